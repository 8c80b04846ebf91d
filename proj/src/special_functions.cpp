#include "imcop/special_functions.hpp"

#include <cmath>
#include <limits>

namespace imcop {

namespace {

// Series expansion of P(a,x), converges fast for x < a+1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a,x), converges fast for x > a+1 (modified Lentz).
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double lower_gamma_regularized(double a, double x) {
    if (!(a > 0.0)) throw Error("incomplete gamma: shape must be positive");
    if (x < 0.0) throw Error("incomplete gamma: negative argument");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double upper_gamma_regularized(double a, double x) {
    if (!(a > 0.0)) throw Error("incomplete gamma: shape must be positive");
    if (x < 0.0) throw Error("incomplete gamma: negative argument");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double inverse_lower_gamma(double a, double p) {
    if (!(a > 0.0)) throw Error("inverse incomplete gamma: shape must be positive");
    if (p < 0.0 || p > 1.0) throw Error("inverse incomplete gamma: p outside [0,1]");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return std::numeric_limits<double>::infinity();

    // Initial guess per Abramowitz-Stegun 26.2.22 / 26.4.17, then Halley steps.
    const double gln = std::lgamma(a);
    double x;
    if (a > 1.0) {
        double pp = (p < 0.5) ? p : 1.0 - p;
        double t = std::sqrt(-2.0 * std::log(pp));
        double z = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
        if (p < 0.5) z = -z;
        double a1 = 1.0 / (9.0 * a);
        x = a * std::pow(1.0 - a1 + z * std::sqrt(a1), 3);
        if (x <= 0.0) x = 1e-8;
    } else {
        double t = 1.0 - a * (0.253 + a * 0.12);
        if (p < t)
            x = std::pow(p / t, 1.0 / a);
        else
            x = 1.0 - std::log(1.0 - (p - t) / (1.0 - t));
    }
    for (int it = 0; it < 60; ++it) {
        if (x <= 0.0) x = 0.5 * (x + 1e-300);
        double err = lower_gamma_regularized(a, x) - p;
        double dens = std::exp(-x + (a - 1.0) * std::log(x) - gln);
        if (dens <= 0.0) break;
        double du = err / dens;
        // Halley correction
        double corr = du / (1.0 - 0.5 * std::min(1.0, du * ((a - 1.0) / x - 1.0)));
        double xn = x - corr;
        if (xn <= 0.0) xn = 0.5 * x;
        if (std::abs(xn - x) < 1e-14 * (x + 1e-300)) return xn;
        x = xn;
    }
    return x;
}

double gamma_cdf(double shape, double rate, double x) {
    if (x <= 0.0) return 0.0;
    return lower_gamma_regularized(shape, rate * x);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw Error("normal quantile: p outside (0,1)");

    // Acklam's rational approximation followed by one Halley refinement.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double e = normal_cdf(x) - p;
    double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

double chi_square_quantile(int dof, double p) {
    if (dof <= 0) throw Error("chi-square quantile: dof must be positive");
    return 2.0 * inverse_lower_gamma(0.5 * dof, p);
}

double ks_critical(double alpha, Index n) {
    if (!(alpha > 0.0 && alpha < 1.0) || n <= 0) throw Error("ks_critical: bad arguments");
    return std::sqrt(std::log(2.0 / alpha) / (2.0 * double(n)));
}

void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n <= 0) throw Error("gauss_legendre_01: n must be positive");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Newton on the Legendre polynomial from the Chebyshev-like initial guess.
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        // map from [-1,1] to [0,1]
        nodes[i] = 0.5 * (1.0 - z);
        nodes[n - 1 - i] = 0.5 * (1.0 + z);
        double w = 1.0 / ((1.0 - z * z) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

}  // namespace imcop
