// Test-only numerical oracles, kept independent of the library evaluation
// paths they are used to check.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "imcop/copula.hpp"
#include "imcop/special_functions.hpp"

namespace oracles {

using imcop::Copula;
using imcop::Index;
using imcop::Matrix;
using imcop::Vector;

// centered finite difference of dC/du1 at a bivariate point
inline double fd_conditional(const Copula& c, double u1, double u2, double h = 1e-5) {
    Vector a(2), b(2);
    a << u1 + h, u2;
    b << u1 - h, u2;
    return (c.cdf(a) - c.cdf(b)) / (2.0 * h);
}

// mixed second derivative of the cdf, the bivariate density oracle
inline double fd_density(const Copula& c, double u1, double u2, double h = 1e-4) {
    Vector pp(2), pm(2), mp(2), mm(2);
    pp << u1 + h, u2 + h;
    pm << u1 + h, u2 - h;
    mp << u1 - h, u2 + h;
    mm << u1 - h, u2 - h;
    return (c.cdf(pp) - c.cdf(pm) - c.cdf(mp) + c.cdf(mm)) / (4.0 * h * h);
}

// Integral of the density over [0,u1] x [0,u2] by tensor Gauss-Legendre with a
// smoothstep grading (derivative vanishing at the endpoints), which tames the
// integrable corner singularities of tail-dependent densities.
inline double integrate_density_2d(const Copula& c, double u1, double u2, int n = 96) {
    std::vector<double> x, w;
    imcop::gauss_legendre_01(n, x, w);
    std::vector<double> t(x.size()), dt(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        t[i] = x[i] * x[i] * (3.0 - 2.0 * x[i]);
        dt[i] = 6.0 * x[i] * (1.0 - x[i]);
    }
    double sum = 0.0;
    Vector u(2);
    for (size_t i = 0; i < t.size(); ++i)
        for (size_t j = 0; j < t.size(); ++j) {
            u << u1 * t[i], u2 * t[j];
            sum += w[i] * w[j] * dt[i] * dt[j] * c.density(u);
        }
    return sum * u1 * u2;
}

// box mass by inclusion-exclusion, written independently of the library's
// rectangle_probability
inline double box_mass(const Copula& c, const Vector& lo, const Vector& hi) {
    const int d = c.dim();
    double sum = 0.0;
    for (int mask = 0; mask < (1 << d); ++mask) {
        Vector corner(d);
        int bits = 0;
        for (int j = 0; j < d; ++j) {
            bool low = (mask >> j) & 1;
            corner[j] = low ? lo[j] : hi[j];
            bits += low;
        }
        sum += (bits % 2 ? -1.0 : 1.0) * c.cdf(corner);
    }
    return sum;
}

// numeric tail-coefficient proxies at height eps
inline double numeric_lower_tail(const Copula& c, double eps = 1e-6) {
    Vector u(2);
    u << eps, eps;
    return c.cdf(u) / eps;
}

inline double numeric_upper_tail(const Copula& c, double eps = 1e-6) {
    Vector u(2);
    u << 1.0 - eps, 1.0 - eps;
    return (1.0 - 2.0 * (1.0 - eps) + c.cdf(u)) / eps;
}

// simple deterministic grid of interior points
inline std::vector<Vector> grid_points(int d, int per_axis) {
    std::vector<Vector> pts;
    std::vector<int> digit(size_t(d), 1);
    for (;;) {
        Vector u(d);
        for (int j = 0; j < d; ++j) u[j] = double(digit[size_t(j)]) / (per_axis + 1.0);
        pts.push_back(u);
        int pos = d - 1;
        while (pos >= 0 && digit[size_t(pos)] == per_axis) --pos;
        if (pos < 0) break;
        ++digit[size_t(pos)];
        for (int j = pos + 1; j < d; ++j) digit[size_t(j)] = 1;
    }
    return pts;
}

// batch-means standard error of a statistic of sample rows
inline double batch_sigma(const Matrix& samples,
                          const std::function<double(const Matrix&)>& stat, int batches = 25) {
    const Index n = samples.rows();
    const Index m = n / batches;
    std::vector<double> vals;
    for (int b = 0; b < batches; ++b) vals.push_back(stat(samples.middleRows(b * m, m)));
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= batches;
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= (batches - 1);
    return std::sqrt(var / batches);
}

}  // namespace oracles
