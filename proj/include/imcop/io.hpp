#pragma once

#include <string>
#include <vector>

#include "imcop/types.hpp"

namespace imcop {

// RFC-4180 CSV: CRLF line endings, header row, '.' decimal separator,
// 17 significant digits (%.17g).
void write_csv(const std::string& file, const std::vector<std::string>& header,
               const Matrix& rows);
std::string format_g17(double x);

// Reads a numeric CSV with a header row; accepts both LF and CRLF.
Matrix read_csv(const std::string& file, std::vector<std::string>* header = nullptr);

// Scatter plot of two sample columns on a fixed 1000x1000 SVG 1.1 viewport:
// axis lines, tick labels, radius-1 points.
void write_scatter_svg(const std::string& file, const Vector& x, const Vector& y,
                       const std::string& xlabel, const std::string& ylabel);

}  // namespace imcop
