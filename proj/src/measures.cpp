#include "imcop/measures.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "imcop/efgm.hpp"
#include "imcop/special_functions.hpp"

namespace imcop {

namespace {

const EfgmCopula* as_efgm(const Copula& c) { return dynamic_cast<const EfgmCopula*>(&c); }

double mixture_combine(const std::vector<double>& w, const std::vector<double>& vals) {
    double s = 0.0;
    for (size_t i = 0; i < w.size(); ++i) s += w[i] * vals[i];
    return s;
}

// closed forms of mu_{Ca,Cb} for fundamental families of any dimension
std::optional<double> closed_mu(const Copula& ca, const Copula& cb) {
    const int d = ca.dim();
    Family fa = ca.family(), fb = cb.family();
    auto is_pi = [](Family f) { return f == Family::Independence; };
    auto is_m = [](Family f) { return f == Family::Comonotone; };
    auto is_w = [](Family f) { return f == Family::Countermonotone; };

    if (is_pi(fa) && is_pi(fb)) return std::pow(0.5, d);
    if ((is_m(fa) && is_pi(fb)) || (is_pi(fa) && is_m(fb))) return 1.0 / (d + 1.0);
    if (is_m(fa) && is_m(fb)) return 0.5;
    if (d == 2) {
        if ((is_w(fa) && is_pi(fb)) || (is_pi(fa) && is_w(fb))) return 1.0 / 6.0;
        if ((is_w(fa) && is_m(fb)) || (is_m(fa) && is_w(fb))) return 0.25;
        if (is_w(fa) && is_w(fb)) return 0.0;
        const EfgmCopula* ea = as_efgm(ca);
        const EfgmCopula* eb = as_efgm(cb);
        if (ea && is_pi(fb)) return 0.25 + ea->theta2() / 36.0;
        if (is_pi(fa) && eb) return 0.25 + eb->theta2() / 36.0;
        if (ea && eb) return 0.25 + (ea->theta2() + eb->theta2()) / 36.0;
    }
    // EFGM against Pi in any dimension: both directions have polynomial
    // closed forms, sum_T theta_T (+-1/3)^{|T|} around 2^-d.
    if (const EfgmCopula* ea = as_efgm(ca); ea && is_pi(fb)) {
        double s = 1.0;
        for (const auto& [mask, theta] : ea->params().thetas)
            s += theta * std::pow(1.0 / 3.0, std::popcount(mask));
        return std::pow(0.5, d) * s;
    }
    if (const EfgmCopula* eb = as_efgm(cb); is_pi(fa) && eb) {
        double s = 1.0;
        for (const auto& [mask, theta] : eb->params().thetas)
            s += theta * std::pow(-1.0 / 3.0, std::popcount(mask));
        return std::pow(0.5, d) * s;
    }
    return std::nullopt;
}

ConcordanceIntegral mu_compute(const Copula& ca, const Copula& cb, QmcBudget budget);

// integrator concentrated on a curve: 1-d Gauss-Legendre on the diagonal /
// antidiagonal
ConcordanceIntegral mu_quadrature_diagonal(const Copula& ca, bool antidiagonal) {
    static const auto rule = [] {
        std::pair<std::vector<double>, std::vector<double>> r;
        gauss_legendre_01(128, r.first, r.second);
        return r;
    }();
    const auto& [nodes, weights] = rule;
    double s = 0.0;
    Vector u(ca.dim());
    for (size_t i = 0; i < nodes.size(); ++i) {
        u.setConstant(nodes[i]);
        if (antidiagonal) u[1] = 1.0 - nodes[i];
        s += weights[i] * ca.cdf(u);
    }
    return {s, MuMethod::Quadrature, 0, 0, 0.0};
}

ConcordanceIntegral mu_qmc(const Copula& ca, const Copula& cb, QmcBudget budget) {
    KroneckerSource src(cb.sample_uniform_count(), budget.seed);
    std::vector<double> buf(cb.sample_uniform_count()), row(cb.dim());
    Vector u(cb.dim());
    double sum = 0.0, sumsq = 0.0;
    for (Index i = 0; i < budget.n; ++i) {
        src.begin_sample();
        for (double& x : buf) x = src.next01();
        cb.sample_from_uniforms(buf.data(), row.data());
        for (int j = 0; j < cb.dim(); ++j) u[j] = row[j];
        double v = ca.cdf(u);
        sum += v;
        sumsq += v * v;
    }
    double mean = sum / double(budget.n);
    double var = std::max(sumsq / double(budget.n) - mean * mean, 0.0);
    return {mean, MuMethod::QuasiMonteCarlo, budget.n, budget.seed,
            std::sqrt(var / double(budget.n))};
}

ConcordanceIntegral mu_compute(const Copula& ca, const Copula& cb, QmcBudget budget) {
    if (ca.dim() != cb.dim()) throw Error("concordance integral: dimension mismatch");
    const int d = ca.dim();

    // survival unwrapping: mu(Ca^, Pi) = mu(Pi, Ca) in any dimension, and in
    // the bivariate case mu(Ca^, Cb) = mu(Ca, Cb^).
    if (ca.family() == Family::Survival) {
        const auto& base = *static_cast<const SurvivalCopula&>(ca).base();
        if (cb.family() == Family::Independence) return mu_compute(cb, base, budget);
        if (d == 2) return mu_compute(base, *cb.survival(), budget);
    }
    if (cb.family() == Family::Survival && ca.family() == Family::Independence) {
        const auto& base = *static_cast<const SurvivalCopula&>(cb).base();
        return mu_compute(base, ca, budget);
    }

    if (auto v = closed_mu(ca, cb)) return {*v, MuMethod::ClosedForm, 0, 0, 0.0};

    // mixture expansion on either side
    auto expand = [&](const FiniteMixtureCopula& mix, bool left) {
        ConcordanceIntegral out{0.0, MuMethod::ClosedForm, 0, 0, 0.0};
        double varsum = 0.0;
        for (size_t i = 0; i < mix.components().size(); ++i) {
            ConcordanceIntegral part = left ? mu_compute(*mix.components()[i], cb, budget)
                                            : mu_compute(ca, *mix.components()[i], budget);
            double w = mix.weights()[i];
            out.value += w * part.value;
            varsum += w * w * part.std_error * part.std_error;
            if (int(part.method) > int(out.method)) out.method = part.method;
            out.n = std::max(out.n, part.n);
            if (part.seed != 0) out.seed = part.seed;
        }
        out.std_error = std::sqrt(varsum);
        return out;
    };
    if (ca.family() == Family::Mixture)
        return expand(static_cast<const FiniteMixtureCopula&>(ca), true);
    if (cb.family() == Family::Mixture)
        return expand(static_cast<const FiniteMixtureCopula&>(cb), false);

    if (cb.family() == Family::Comonotone && ca.capability().cdf)
        return mu_quadrature_diagonal(ca, false);
    if (d == 2 && cb.family() == Family::Countermonotone && ca.capability().cdf)
        return mu_quadrature_diagonal(ca, true);

    if (ca.capability().cdf) return mu_qmc(ca, cb, budget);
    // integrand has no cdf (Gaussian); in the bivariate case swap the roles
    if (d == 2 && cb.capability().cdf) return mu_qmc(cb, ca, budget);
    throw CapabilityError("concordance integral: integrand cdf unavailable");
}

}  // namespace

ConcordanceIntegral concordance_integral(const Copula& ca, const Copula& cb, QmcBudget budget) {
    return mu_compute(ca, cb, budget);
}

ConcordanceIntegral concordance_integral_qmc(const Copula& ca, const Copula& cb,
                                             QmcBudget budget) {
    if (ca.dim() != cb.dim()) throw Error("concordance integral: dimension mismatch");
    return mu_qmc(ca, cb, budget);
}

// ---------------------------------------------------------------------------
// Pairwise closed-form measures of catalogue copulas

double pair_spearman_rho(const Copula& c, QmcBudget budget) {
    if (c.dim() != 2) throw Error("pair_spearman_rho: bivariate copulas only");
    switch (c.family()) {
        case Family::Independence: return 0.0;
        case Family::Comonotone: return 1.0;
        case Family::Countermonotone: return -1.0;
        case Family::Efgm: return static_cast<const EfgmCopula&>(c).theta2() / 3.0;
        case Family::Survival:
            return pair_spearman_rho(*static_cast<const SurvivalCopula&>(c).base(), budget);
        case Family::Mixture: {
            const auto& mix = static_cast<const FiniteMixtureCopula&>(c);
            std::vector<double> vals;
            for (const auto& comp : mix.components())
                vals.push_back(pair_spearman_rho(*comp, budget));
            return mixture_combine(mix.weights(), vals);
        }
        case Family::BlockProduct: {
            const auto& bp = static_cast<const BlockProductCopula&>(c);
            for (const auto& [coords, part] : bp.parts())
                if (coords.size() == 2) return pair_spearman_rho(*part, budget);
            return 0.0;
        }
        case Family::IndexMixed:
            return spearman_rho_pair(static_cast<const IndexMixedCopula&>(c), 1, 2, budget);
        default:
            return 12.0 * mu_compute(c, *independence(2), budget).value - 3.0;
    }
}

double pair_kendall_tau(const Copula& c, QmcBudget budget) {
    if (c.dim() != 2) throw Error("pair_kendall_tau: bivariate copulas only");
    switch (c.family()) {
        case Family::Independence: return 0.0;
        case Family::Comonotone: return 1.0;
        case Family::Countermonotone: return -1.0;
        case Family::Clayton: {
            double th = static_cast<const ClaytonCopula&>(c).theta();
            return th / (th + 2.0);
        }
        case Family::Gumbel: {
            double th = static_cast<const GumbelCopula&>(c).theta();
            return 1.0 - 1.0 / th;
        }
        case Family::Gaussian: {
            double rho = static_cast<const GaussianCopula&>(c).correlation()(0, 1);
            return 2.0 / M_PI * std::asin(rho);
        }
        case Family::Efgm: return 2.0 * static_cast<const EfgmCopula&>(c).theta2() / 9.0;
        case Family::Survival:
            return pair_kendall_tau(*static_cast<const SurvivalCopula&>(c).base(), budget);
        case Family::BlockProduct: {
            const auto& bp = static_cast<const BlockProductCopula&>(c);
            for (const auto& [coords, part] : bp.parts())
                if (coords.size() == 2) return pair_kendall_tau(*part, budget);
            return 0.0;
        }
        case Family::IndexMixed:
            return kendall_tau_pair(static_cast<const IndexMixedCopula&>(c), 1, 2, budget);
        default:
            return 4.0 * mu_compute(c, c, budget).value - 1.0;
    }
}

// ---------------------------------------------------------------------------
// Index-mixed pairwise matrices

namespace {

// diagonal pair-index masses w_k = p^{j1,j2}_{k,k}
std::vector<double> diagonal_pair_masses(const IndexMixedCopula& m, int j1, int j2) {
    IndexDistribution marg = m.index().marginal({j1, j2});
    std::vector<double> wk(size_t(m.index().K()), 0.0);
    for (Index row = 0; row < marg.support_size(); ++row) {
        const auto& v = marg.support()[row];
        if (v[0] == v[1]) wk[v[0] - 1] += marg.probs()[row];
    }
    return wk;
}

template <typename PairFn>
PairMeasureMatrix pair_matrix(const IndexMixedCopula& m, MeasureTag tag, PairFn fn) {
    const int d = m.dim();
    Matrix vals = Matrix::Identity(d, d);
    for (int j1 = 1; j1 <= d; ++j1)
        for (int j2 = j1 + 1; j2 <= d; ++j2) {
            double v = fn(j1, j2);
            vals(j1 - 1, j2 - 1) = v;
            vals(j2 - 1, j1 - 1) = v;
        }
    return {tag, vals};
}

}  // namespace

PairMeasureMatrix tail_dependence_matrix(const IndexMixedCopula& m, TailSide side) {
    return pair_matrix(
        m, side == TailSide::Lower ? MeasureTag::LambdaLower : MeasureTag::LambdaUpper,
        [&](int j1, int j2) {
            std::vector<double> wk = diagonal_pair_masses(m, j1, j2);
            double lambda = 0.0;
            for (size_t k = 0; k < wk.size(); ++k) {
                if (wk[k] <= 0.0) continue;
                TailCoeffs t = m.block_margin(int(k) + 1, {j1, j2})->tail_coeffs();
                lambda += wk[k] * (side == TailSide::Lower ? t.lower : t.upper);
            }
            return lambda;
        });
}

double blomqvist_beta_pair(const IndexMixedCopula& m, int j1, int j2) {
    Vector half = Vector::Constant(2, 0.5);
    return 4.0 * m.bivariate_margin(j1, j2)->cdf(half) - 1.0;
}

double spearman_rho_pair(const IndexMixedCopula& m, int j1, int j2, QmcBudget budget) {
    std::vector<double> wk = diagonal_pair_masses(m, j1, j2);
    double rho = 0.0;
    for (size_t k = 0; k < wk.size(); ++k)
        if (wk[k] > 0.0)
            rho += wk[k] * pair_spearman_rho(*m.block_margin(int(k) + 1, {j1, j2}), budget);
    return rho;
}

double kendall_tau_pair(const IndexMixedCopula& m, int j1, int j2, QmcBudget budget) {
    std::vector<double> wk = diagonal_pair_masses(m, j1, j2);
    const int K = int(wk.size());
    double tau = 0.0, diag = 0.0, rho_term = 0.0;
    for (int k = 0; k < K; ++k) {
        if (wk[k] <= 0.0) continue;
        const Copula& ck = *m.block_margin(k + 1, {j1, j2});
        tau += wk[k] * wk[k] * pair_kendall_tau(ck, budget);
        rho_term += wk[k] * pair_spearman_rho(ck, budget);
        diag += wk[k];
        for (int l = k + 1; l < K; ++l) {
            if (wk[l] <= 0.0) continue;
            double mu = mu_compute(ck, *m.block_margin(l + 1, {j1, j2}), budget).value;
            tau += 2.0 * wk[k] * wk[l] * (4.0 * mu - 1.0);
        }
    }
    tau += (2.0 / 3.0) * (1.0 - diag) * rho_term;
    return tau;
}

PairMeasureMatrix blomqvist_beta_matrix(const IndexMixedCopula& m) {
    return pair_matrix(m, MeasureTag::Beta,
                       [&](int j1, int j2) { return blomqvist_beta_pair(m, j1, j2); });
}

PairMeasureMatrix spearman_rho_matrix(const IndexMixedCopula& m, QmcBudget budget) {
    return pair_matrix(m, MeasureTag::RhoS, [&](int j1, int j2) {
        return spearman_rho_pair(m, j1, j2, budget);
    });
}

PairMeasureMatrix kendall_tau_matrix(const IndexMixedCopula& m, QmcBudget budget) {
    return pair_matrix(m, MeasureTag::Tau, [&](int j1, int j2) {
        return kendall_tau_pair(m, j1, j2, budget);
    });
}

// ---------------------------------------------------------------------------
// Multivariate measures

double blomqvist_beta_multivariate(const IndexMixedCopula& m, BetaPath path) {
    const int d = m.dim();
    if (d < 2) throw Error("multivariate beta: d >= 2 required");
    const double denom = std::pow(2.0, d - 1) - 1.0;
    Vector half = Vector::Constant(d, 0.5);
    switch (path) {
        case BetaPath::General: {
            double c = m.cdf(half);
            double chat = m.survival_model()->cdf(half);
            return (std::pow(2.0, d - 1) * (c + chat) - 1.0) / denom;
        }
        case BetaPath::RadialSymmetric:
            return (std::pow(2.0, d) * m.cdf(half) - 1.0) / denom;
        case BetaPath::BlockProduct: {
            // E_I[prod_k 2^{D_k} delta_k(1/2)], valid under radial symmetry
            double e = 0.0;
            const IndexDistribution& idx = m.index();
            for (Index row = 0; row < idx.support_size(); ++row) {
                const IndexPartition& part = idx.partition(row);
                double term = idx.probs()[row];
                for (int k = 1; k <= idx.K(); ++k) {
                    int Dk = part.sizes[k - 1];
                    if (Dk == 0) continue;
                    if (Dk == 1) continue;  // 2 * 1/2 = 1
                    term *= std::pow(2.0, Dk) *
                            m.block_margin(k, part.sets[k - 1])->diagonal(0.5);
                }
                e += term;
            }
            return (e - 1.0) / denom;
        }
    }
    throw Error("multivariate beta: unknown path");
}

namespace {

// 2^D int C dPi (lower) or 2^D int Pi dC (upper) for one block copula
double block_two_pow_mu(const Copula& c, SpearmanVariant variant, QmcBudget budget) {
    const int d = c.dim();
    const double two_d = std::pow(2.0, d);
    switch (c.family()) {
        case Family::Independence: return 1.0;
        case Family::Comonotone: return two_d / (d + 1.0);
        case Family::Countermonotone: return 4.0 / 6.0;
        case Family::Efgm: {
            const auto& p = static_cast<const EfgmCopula&>(c).params();
            double base = variant == SpearmanVariant::Lower ? 1.0 / 3.0 : -1.0 / 3.0;
            double s = 1.0;
            for (const auto& [mask, theta] : p.thetas)
                s += theta * std::pow(base, std::popcount(mask));
            return s;
        }
        case Family::Survival: {
            const auto& base = *static_cast<const SurvivalCopula&>(c).base();
            SpearmanVariant flipped = variant == SpearmanVariant::Lower
                                          ? SpearmanVariant::Upper
                                          : SpearmanVariant::Lower;
            return block_two_pow_mu(base, flipped, budget);
        }
        case Family::Mixture: {
            const auto& mix = static_cast<const FiniteMixtureCopula&>(c);
            double s = 0.0;
            for (size_t i = 0; i < mix.components().size(); ++i)
                s += mix.weights()[i] * block_two_pow_mu(*mix.components()[i], variant, budget);
            return s;
        }
        case Family::BlockProduct: {
            const auto& bp = static_cast<const BlockProductCopula&>(c);
            double s = 1.0;
            for (const auto& [coords, part] : bp.parts())
                s *= block_two_pow_mu(*part, variant, budget);
            return s;
        }
        default: {
            CopulaPtr pi = independence(d);
            ConcordanceIntegral mu = variant == SpearmanVariant::Lower
                                         ? mu_compute(c, *pi, budget)
                                         : mu_compute(*pi, c, budget);
            return two_d * mu.value;
        }
    }
}

}  // namespace

double multivariate_spearman(const IndexMixedCopula& m, SpearmanVariant variant,
                             QmcBudget budget) {
    if (variant == SpearmanVariant::Center)
        return 0.5 * (multivariate_spearman(m, SpearmanVariant::Lower, budget) +
                      multivariate_spearman(m, SpearmanVariant::Upper, budget));
    const int d = m.dim();
    if (d < 2) throw Error("multivariate spearman: d >= 2 required");
    const double h = (d + 1.0) / (std::pow(2.0, d) - (d + 1.0));
    const IndexDistribution& idx = m.index();
    double e = 0.0;
    for (Index row = 0; row < idx.support_size(); ++row) {
        const IndexPartition& part = idx.partition(row);
        double term = idx.probs()[row];
        for (int k = 1; k <= idx.K(); ++k) {
            int Dk = part.sizes[k - 1];
            if (Dk <= 1) continue;  // 2^D mu factors are exactly 1 for D in {0,1}
            term *= block_two_pow_mu(*m.block_margin(k, part.sets[k - 1]), variant, budget);
        }
        e += term;
    }
    return h * (e - 1.0);
}

// ---------------------------------------------------------------------------
// Orthant dependence and concordance comparison

int default_grid_resolution(int d) {
    if (d <= 2) return 21;
    if (d == 3) return 11;
    if (d == 4) return 7;
    return 5;
}

namespace {

template <typename Fn>
void for_each_grid_point(int d, int g, Fn fn) {
    std::vector<int> digit(d, 1);
    Vector u(d);
    for (;;) {
        for (int j = 0; j < d; ++j) u[j] = double(digit[j]) / double(g + 1);
        if (!fn(u)) return;
        int pos = d - 1;
        while (pos >= 0 && digit[pos] == g) --pos;
        if (pos < 0) return;
        ++digit[pos];
        for (int j = pos + 1; j < d; ++j) digit[j] = 1;
    }
}

}  // namespace

OrthantReport orthant_dependence_check(const IndexMixedCopula& m, int grid_resolution) {
    OrthantReport rep;
    rep.plod = rep.puod = true;
    const int d = m.dim();
    auto surv = m.survival_model();
    for_each_grid_point(d, grid_resolution, [&](const Vector& u) {
        if (rep.plod && m.cdf(u) < u.prod() - prob_tol) {
            rep.plod = false;
            rep.witness_lower = u;
        }
        // survival function comparison: P(U > u) vs prod(1-u_j)
        Vector one_minus = Vector::Ones(d) - u;
        if (rep.puod && surv->cdf(one_minus) < one_minus.prod() - prob_tol) {
            rep.puod = false;
            rep.witness_upper = u;
        }
        return rep.plod || rep.puod;
    });
    rep.pod = rep.plod && rep.puod;
    return rep;
}

OrderVerdict concordance_compare(const Copula& a, const Copula& b, int grid_resolution) {
    if (a.dim() != b.dim()) throw Error("concordance_compare: dimension mismatch");
    OrderVerdict v;
    auto compare = [&](const Copula& ca, const Copula& cb, std::optional<Vector>& wit_above,
                       std::optional<Vector>& wit_below) {
        bool le = true, ge = true;
        for_each_grid_point(ca.dim(), grid_resolution, [&](const Vector& u) {
            double fa = ca.cdf(u), fb = cb.cdf(u);
            if (fa > fb + prob_tol && le) {
                le = false;
                wit_above = u;
            }
            if (fb > fa + prob_tol && ge) {
                ge = false;
                wit_below = u;
            }
            return le || ge;
        });
        if (le && ge) return OrderRel::Equal;
        if (le) return OrderRel::LessOrEqual;
        if (ge) return OrderRel::GreaterOrEqual;
        return OrderRel::Incomparable;
    };
    v.lower = compare(a, b, v.lower_witness_above, v.lower_witness_below);
    auto sa = a.survival();
    auto sb = b.survival();
    v.upper = compare(*sa, *sb, v.upper_witness_above, v.upper_witness_below);
    return v;
}

// ---------------------------------------------------------------------------
// Empirical estimators

namespace {

std::vector<double> column_ranks(const Vector& x) {
    const Index n = x.size();
    std::vector<Index> order(n);
    std::iota(order.begin(), order.end(), Index(0));
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return x[a] < x[b]; });
    std::vector<double> ranks(n);
    for (Index r = 0; r < n; ++r) ranks[size_t(order[r])] = double(r + 1);
    return ranks;
}

}  // namespace

double empirical_spearman_pair(const Vector& x, const Vector& y) {
    if (x.size() != y.size() || x.size() < 2) throw Error("empirical spearman: need n >= 2");
    const Index n = x.size();
    std::vector<double> rx = column_ranks(x), ry = column_ranks(y);
    double mean = (n + 1.0) / 2.0;
    double num = 0.0, den = 0.0;
    for (Index i = 0; i < n; ++i) {
        num += (rx[size_t(i)] - mean) * (ry[size_t(i)] - mean);
        den += (rx[size_t(i)] - mean) * (rx[size_t(i)] - mean);
    }
    return num / den;
}

double empirical_kendall_pair(const Vector& x, const Vector& y) {
    if (x.size() != y.size() || x.size() < 2) throw Error("empirical kendall: need n >= 2");
    const Index n = x.size();
    std::vector<Index> order(n);
    std::iota(order.begin(), order.end(), Index(0));
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return x[a] < x[b]; });
    std::vector<double> ys(static_cast<size_t>(n), 0.0);
    for (Index i = 0; i < n; ++i) ys[size_t(i)] = y[order[size_t(i)]];

    // Knight's algorithm: count inversions of y ordered by x via merge sort
    std::uint64_t inversions = 0;
    std::vector<double> tmp(static_cast<size_t>(n), 0.0);
    for (Index width = 1; width < n; width *= 2) {
        for (Index lo = 0; lo + width < n; lo += 2 * width) {
            Index mid = lo + width;
            Index hi = std::min(lo + 2 * width, n);
            Index i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (ys[size_t(i)] <= ys[size_t(j)]) {
                    tmp[size_t(k++)] = ys[size_t(i++)];
                } else {
                    inversions += std::uint64_t(mid - i);
                    tmp[size_t(k++)] = ys[size_t(j++)];
                }
            }
            while (i < mid) tmp[size_t(k++)] = ys[size_t(i++)];
            while (j < hi) tmp[size_t(k++)] = ys[size_t(j++)];
            std::copy(tmp.begin() + lo, tmp.begin() + hi, ys.begin() + lo);
        }
    }
    double pairs = 0.5 * double(n) * double(n - 1);
    return 1.0 - 2.0 * double(inversions) / pairs;
}

namespace {

template <typename PairFn>
PairMeasureMatrix empirical_matrix(const Matrix& samples, MeasureTag tag, PairFn fn) {
    if (samples.rows() < 2) throw Error("empirical measures: need n >= 2");
    const int d = int(samples.cols());
    Matrix vals = Matrix::Identity(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b) {
            double v = fn(samples.col(a), samples.col(b));
            vals(a, b) = v;
            vals(b, a) = v;
        }
    return {tag, vals};
}

}  // namespace

PairMeasureMatrix empirical_spearman(const Matrix& samples) {
    return empirical_matrix(samples, MeasureTag::RhoS, [](const Vector& x, const Vector& y) {
        return empirical_spearman_pair(x, y);
    });
}

PairMeasureMatrix empirical_kendall(const Matrix& samples) {
    return empirical_matrix(samples, MeasureTag::Tau, [](const Vector& x, const Vector& y) {
        return empirical_kendall_pair(x, y);
    });
}

PairMeasureMatrix empirical_blomqvist(const Matrix& samples) {
    return empirical_matrix(samples, MeasureTag::Beta, [](const Vector& x, const Vector& y) {
        const Index n = x.size();
        std::vector<double> xs(x.data(), x.data() + n), ysv(y.data(), y.data() + n);
        std::nth_element(xs.begin(), xs.begin() + n / 2, xs.end());
        std::nth_element(ysv.begin(), ysv.begin() + n / 2, ysv.end());
        double mx = xs[size_t(n / 2)], my = ysv[size_t(n / 2)];
        Index same = 0;
        for (Index i = 0; i < n; ++i)
            if ((x[i] - mx) * (y[i] - my) > 0.0) ++same;
        return 2.0 * double(same) / double(n) - 1.0;
    });
}

double empirical_multivariate_spearman(const Matrix& samples, SpearmanVariant variant) {
    if (variant == SpearmanVariant::Center)
        return 0.5 * (empirical_multivariate_spearman(samples, SpearmanVariant::Lower) +
                      empirical_multivariate_spearman(samples, SpearmanVariant::Upper));
    const Index n = samples.rows();
    const int d = int(samples.cols());
    if (n < 2 || d < 2) throw Error("empirical multivariate spearman: need n, d >= 2");
    std::vector<std::vector<double>> ranks(static_cast<size_t>(d));
    for (int j = 0; j < d; ++j) ranks[size_t(j)] = column_ranks(samples.col(j));
    double sum = 0.0;
    for (Index i = 0; i < n; ++i) {
        double prod = 1.0;
        for (int j = 0; j < d; ++j) {
            double u = ranks[size_t(j)][size_t(i)] / (double(n) + 1.0);
            prod *= variant == SpearmanVariant::Lower ? 1.0 - u : u;
        }
        sum += prod;
    }
    double h = (d + 1.0) / (std::pow(2.0, d) - (d + 1.0));
    return h * (std::pow(2.0, d) * sum / double(n) - 1.0);
}

double ks_uniform_statistic(const Vector& column) {
    const Index n = column.size();
    if (n < 1) throw Error("ks statistic: empty sample");
    std::vector<double> s(column.data(), column.data() + n);
    std::sort(s.begin(), s.end());
    double stat = 0.0;
    for (Index i = 0; i < n; ++i) {
        double f = s[size_t(i)];
        stat = std::max(stat, std::max(double(i + 1) / double(n) - f, f - double(i) / double(n)));
    }
    return stat;
}

}  // namespace imcop
