#include "imcop/sums.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "imcop/special_functions.hpp"

namespace imcop {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

bool has_gamma(const SumDistribution::Component& c) { return c.gamma_shape > 0; }
bool has_exp(const SumDistribution::Component& c) { return std::isfinite(c.exp_rate); }

double component_cdf(const SumDistribution::Component& c, double s) {
    if (s <= 0.0) return 0.0;
    if (!has_gamma(c) && !has_exp(c)) return 1.0;  // point mass at 0
    if (!has_exp(c)) return lower_gamma_regularized(c.gamma_shape, c.gamma_rate * s);
    if (!has_gamma(c)) return -std::expm1(-c.exp_rate * s);
    // Gamma(a, lambda) + independent Exp(nu) with nu < lambda:
    // F(s) = P(a, lambda s) - e^{-nu s} (lambda/c)^a P(a, c s), c = lambda - nu
    double lambda = c.gamma_rate, nu = c.exp_rate;
    double cc = lambda - nu;
    if (!(cc > 0.0)) throw Error("sum distribution: exponential rate must be below gamma rate");
    double a = double(c.gamma_shape);
    double val = lower_gamma_regularized(a, lambda * s) -
                 std::exp(-nu * s + a * std::log(lambda / cc)) *
                     lower_gamma_regularized(a, cc * s);
    return std::clamp(val, 0.0, 1.0);
}

double component_pdf(const SumDistribution::Component& c, double s) {
    if (s <= 0.0) return 0.0;
    if (!has_gamma(c) && !has_exp(c)) return 0.0;
    if (!has_exp(c)) {
        double a = double(c.gamma_shape), l = c.gamma_rate;
        return std::exp(a * std::log(l) + (a - 1.0) * std::log(s) - l * s - std::lgamma(a));
    }
    if (!has_gamma(c)) return c.exp_rate * std::exp(-c.exp_rate * s);
    double lambda = c.gamma_rate, nu = c.exp_rate;
    double cc = lambda - nu;
    double a = double(c.gamma_shape);
    return nu * std::exp(-nu * s + a * std::log(lambda / cc)) *
           lower_gamma_regularized(a, cc * s);
}

double component_ls(const SumDistribution::Component& c, double t) {
    double v = 1.0;
    if (has_gamma(c)) v *= std::pow(1.0 + t / c.gamma_rate, -double(c.gamma_shape));
    if (has_exp(c)) v /= 1.0 + t / c.exp_rate;
    return v;
}

double component_mean(const SumDistribution::Component& c) {
    double m = 0.0;
    if (has_gamma(c)) m += double(c.gamma_shape) / c.gamma_rate;
    if (has_exp(c)) m += 1.0 / c.exp_rate;
    return m;
}

double component_variance(const SumDistribution::Component& c) {
    double v = 0.0;
    if (has_gamma(c)) v += double(c.gamma_shape) / (c.gamma_rate * c.gamma_rate);
    if (has_exp(c)) v += 1.0 / (c.exp_rate * c.exp_rate);
    return v;
}

}  // namespace

double margin_quantile(const Margin& m, double u) {
    if (!(u > 0.0 && u < 1.0)) throw Error("margin quantile: u must lie in (0,1)");
    if (const auto* e = std::get_if<ExponentialMargin>(&m))
        return -std::log1p(-u) / e->rate;
    return std::get<PointMassMargin>(m).value;
}

JointModel make_joint_exponential(std::shared_ptr<const IndexMixedCopula> copula, double rate) {
    if (!(rate > 0.0)) throw Error("joint model: exponential rate must be positive");
    JointModel jm;
    jm.margins.assign(size_t(copula->dim()), ExponentialMargin{rate});
    jm.copula = std::move(copula);
    return jm;
}

double ls_transform(const JointModel& jm, const Vector& t) {
    const auto& m = *jm.copula;
    const int d = m.dim();
    if (t.size() != d) throw Error("ls_transform: dimension mismatch");
    if (int(jm.margins.size()) != d) throw Error("ls_transform: margin count mismatch");
    for (int j = 0; j < d; ++j)
        if (t[j] < 0.0) throw Error("ls_transform: t must be nonnegative");
    std::vector<double> rates(static_cast<size_t>(d), 0.0);
    for (int j = 0; j < d; ++j) {
        const auto* e = std::get_if<ExponentialMargin>(&jm.margins[size_t(j)]);
        if (!e) throw Error("ls_transform: exponential margins required");
        rates[size_t(j)] = e->rate;
    }

    const IndexDistribution& idx = m.index();
    double value = 0.0;
    for (Index row = 0; row < idx.support_size(); ++row) {
        const IndexPartition& part = idx.partition(row);
        double term = idx.probs()[row];
        for (int k = 1; k <= idx.K(); ++k) {
            if (part.sizes[k - 1] == 0) continue;
            const Coords& J = part.sets[k - 1];
            Family fam = m.bases()[size_t(k - 1)]->family();
            if (fam == Family::Comonotone) {
                double s = 0.0;
                for (int j : J) s += t[j - 1] / rates[size_t(j - 1)];
                term /= 1.0 + s;
            } else if (fam == Family::Independence) {
                for (int j : J) term /= 1.0 + t[j - 1] / rates[size_t(j - 1)];
            } else {
                throw CapabilityError(
                    "ls_transform: closed form requires comonotone or independence blocks");
            }
        }
        value += term;
    }
    return value;
}

// ---------------------------------------------------------------------------

SumDistribution SumDistribution::analytic(std::vector<Component> components) {
    if (components.empty()) throw Error("sum distribution: empty mixture");
    double sum = 0.0;
    for (const auto& c : components) {
        if (c.weight < 0.0) throw Error("sum distribution: negative weight");
        sum += c.weight;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw Error("sum distribution: weights must sum to 1");
    SumDistribution d;
    d.components_ = std::move(components);
    return d;
}

SumDistribution SumDistribution::empirical(std::vector<double> sums) {
    if (sums.empty()) throw Error("sum distribution: empty sample");
    std::sort(sums.begin(), sums.end());
    SumDistribution d;
    d.empirical_ = true;
    d.sample_ = std::move(sums);
    return d;
}

const std::vector<SumDistribution::Component>& SumDistribution::components() const {
    if (empirical_) throw Error("sum distribution: no analytic components");
    return components_;
}

const std::vector<double>& SumDistribution::sample() const {
    if (!empirical_) throw Error("sum distribution: no empirical sample");
    return sample_;
}

double SumDistribution::cdf(double s) const {
    if (empirical_) {
        auto it = std::upper_bound(sample_.begin(), sample_.end(), s);
        return double(it - sample_.begin()) / double(sample_.size());
    }
    double v = 0.0;
    for (const auto& c : components_) v += c.weight * component_cdf(c, s);
    return v;
}

double SumDistribution::pdf(double s) const {
    if (empirical_) throw Error("sum distribution: pdf of an empirical sample");
    double v = 0.0;
    for (const auto& c : components_) v += c.weight * component_pdf(c, s);
    return v;
}

double SumDistribution::ls(double t) const {
    if (empirical_) throw Error("sum distribution: ls of an empirical sample");
    if (t < 0.0) throw Error("sum distribution: ls requires t >= 0");
    double v = 0.0;
    for (const auto& c : components_) v += c.weight * component_ls(c, t);
    return v;
}

double SumDistribution::mean() const {
    if (empirical_) {
        double s = 0.0;
        for (double x : sample_) s += x;
        return s / double(sample_.size());
    }
    double m = 0.0;
    for (const auto& c : components_) m += c.weight * component_mean(c);
    return m;
}

double SumDistribution::variance() const {
    if (empirical_) {
        double m = mean(), s = 0.0;
        for (double x : sample_) s += (x - m) * (x - m);
        return s / double(sample_.size() - 1);
    }
    double m = mean(), e2 = 0.0;
    for (const auto& c : components_) {
        double cm = component_mean(c);
        e2 += c.weight * (component_variance(c) + cm * cm);
    }
    return e2 - m * m;
}

SumDistribution exp_sum_distribution(const JointModel& jm) {
    const auto& m = *jm.copula;
    if (m.bases().size() != 2)
        throw Error("exp_sum_distribution: exactly two base copulas required");
    int slot_m = -1, slot_pi = -1;
    for (int k = 0; k < 2; ++k) {
        Family f = m.bases()[size_t(k)]->family();
        if (f == Family::Comonotone) slot_m = k;
        if (f == Family::Independence) slot_pi = k;
    }
    if (slot_m < 0 || slot_pi < 0 || slot_m == slot_pi)
        throw Error("exp_sum_distribution: bases must be one comonotone and one independence");
    if (int(jm.margins.size()) != m.dim())
        throw Error("exp_sum_distribution: margin count mismatch");
    double lambda = 0.0;
    for (const auto& mg : jm.margins) {
        const auto* e = std::get_if<ExponentialMargin>(&mg);
        if (!e) throw Error("exp_sum_distribution: exponential margins required");
        if (!(e->rate > 0.0)) throw Error("exp_sum_distribution: rate must be positive");
        if (lambda == 0.0)
            lambda = e->rate;
        else if (e->rate != lambda)
            throw Error("exp_sum_distribution: all margins must share the same rate");
    }

    const IndexDistribution& idx = m.index();
    std::vector<SumDistribution::Component> comps;
    comps.reserve(size_t(idx.support_size()));
    for (Index row = 0; row < idx.support_size(); ++row) {
        const IndexPartition& part = idx.partition(row);
        int d_m = part.sizes[size_t(slot_m)];
        int d_pi = part.sizes[size_t(slot_pi)];
        SumDistribution::Component c;
        c.weight = idx.probs()[row];
        c.exp_rate = inf;
        if (d_m == 1) {
            // Exp(lambda) merges with the Gamma part at equal rates
            c.gamma_shape = d_pi + 1;
            c.gamma_rate = lambda;
        } else {
            if (d_pi > 0) {
                c.gamma_shape = d_pi;
                c.gamma_rate = lambda;
            }
            if (d_m > 0) c.exp_rate = lambda / double(d_m);
        }
        comps.push_back(c);
    }
    return SumDistribution::analytic(std::move(comps));
}

SumDistribution mc_sum_cdf(const JointModel& jm, UniformSource& src, Index n) {
    const auto& m = *jm.copula;
    if (int(jm.margins.size()) != m.dim()) throw Error("mc_sum_cdf: margin count mismatch");
    if (n <= 0) throw Error("mc_sum_cdf: n must be positive");
    Matrix u = m.sample(src, n);
    std::vector<double> sums(size_t(n), 0.0);
    for (Index i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < m.dim(); ++j) s += margin_quantile(jm.margins[size_t(j)], u(i, j));
        sums[size_t(i)] = s;
    }
    return SumDistribution::empirical(std::move(sums));
}

double ks_distance(const SumDistribution& a, const SumDistribution& b) {
    auto one_sample = [](const SumDistribution& emp, const SumDistribution& ana) {
        const auto& s = emp.sample();
        const double n = double(s.size());
        double stat = 0.0;
        for (size_t i = 0; i < s.size(); ++i) {
            double f = ana.cdf(s[i]);
            stat = std::max(stat,
                            std::max(double(i + 1) / n - f, f - double(i) / n));
        }
        return stat;
    };
    if (a.is_empirical() && !b.is_empirical()) return one_sample(a, b);
    if (!a.is_empirical() && b.is_empirical()) return one_sample(b, a);
    if (a.is_empirical() && b.is_empirical()) {
        const auto& x = a.sample();
        const auto& y = b.sample();
        double stat = 0.0;
        size_t i = 0, j = 0;
        while (i < x.size() && j < y.size()) {
            double v = std::min(x[i], y[j]);
            while (i < x.size() && x[i] <= v) ++i;
            while (j < y.size() && y[j] <= v) ++j;
            stat = std::max(stat, std::abs(double(i) / double(x.size()) -
                                           double(j) / double(y.size())));
        }
        return stat;
    }
    // both analytic: sup over a wide grid
    double hi = std::max(a.mean() + 12.0 * std::sqrt(a.variance()),
                         b.mean() + 12.0 * std::sqrt(b.variance()));
    if (!(hi > 0.0)) hi = 1.0;
    double stat = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        double s = hi * double(i) / 2000.0;
        stat = std::max(stat, std::abs(a.cdf(s) - b.cdf(s)));
    }
    return stat;
}

}  // namespace imcop
