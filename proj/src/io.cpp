#include "imcop/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace imcop {

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_csv(const std::string& file, const std::vector<std::string>& header,
               const Matrix& rows) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot open '" + file + "' for writing");
    for (size_t j = 0; j < header.size(); ++j) {
        if (j) out << ',';
        out << header[j];
    }
    out << "\r\n";
    for (Index i = 0; i < rows.rows(); ++i) {
        for (Index j = 0; j < rows.cols(); ++j) {
            if (j) out << ',';
            out << format_g17(rows(i, j));
        }
        out << "\r\n";
    }
    if (!out) throw Error("failed writing '" + file + "'");
}

Matrix read_csv(const std::string& file, std::vector<std::string>* header) {
    std::ifstream in(file);
    if (!in) throw Error("cannot open '" + file + "'");
    std::string line;
    if (!std::getline(in, line)) throw Error("empty CSV file '" + file + "'");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> head;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) head.push_back(cell);
    }
    if (header) *header = head;
    std::vector<std::vector<double>> data;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != head.size()) throw Error("ragged CSV row in '" + file + "'");
        data.push_back(std::move(row));
    }
    Matrix m(Index(data.size()), Index(head.size()));
    for (size_t i = 0; i < data.size(); ++i)
        for (size_t j = 0; j < head.size(); ++j) m(Index(i), Index(j)) = data[i][j];
    return m;
}

void write_scatter_svg(const std::string& file, const Vector& x, const Vector& y,
                       const std::string& xlabel, const std::string& ylabel) {
    if (x.size() != y.size()) throw Error("scatter: column length mismatch");
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot open '" + file + "' for writing");
    const int W = 1000, H = 1000, margin = 60;
    const double span = double(W - 2 * margin);
    auto px = [&](double u) { return margin + u * span; };
    auto py = [&](double v) { return H - margin - v * span; };
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W
        << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H
        << "\" fill=\"white\"/>\n";
    out << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1) << "\" y2=\""
        << py(0) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(0) << "\" y2=\""
        << py(1) << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        double v = 0.25 * t;
        out << "<text x=\"" << px(v) << "\" y=\"" << py(0) + 30
            << "\" font-size=\"16\" text-anchor=\"middle\">" << v << "</text>\n";
        out << "<text x=\"" << px(0) - 35 << "\" y=\"" << py(v) + 5
            << "\" font-size=\"16\" text-anchor=\"middle\">" << v << "</text>\n";
    }
    out << "<text x=\"" << px(0.5) << "\" y=\"" << H - 10
        << "\" font-size=\"20\" text-anchor=\"middle\">" << xlabel << "</text>\n";
    out << "<text x=\"20\" y=\"" << py(0.5)
        << "\" font-size=\"20\" text-anchor=\"middle\" transform=\"rotate(-90 20 " << py(0.5)
        << ")\">" << ylabel << "</text>\n";
    for (Index i = 0; i < x.size(); ++i)
        out << "<circle cx=\"" << px(x[i]) << "\" cy=\"" << py(y[i]) << "\" r=\"1\"/>\n";
    out << "</svg>\n";
    if (!out) throw Error("failed writing '" + file + "'");
}

}  // namespace imcop
