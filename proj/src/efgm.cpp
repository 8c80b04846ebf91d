#include "imcop/efgm.hpp"
#include "imcop/measures.hpp"


#include <algorithm>
#include <bit>
#include <cmath>

namespace imcop {

namespace {

void validate_params(const EfgmParameters& p) {
    if (p.d < 2) throw Error("EFGM: dimension must be >= 2");
    if (p.d > 31) throw Error("EFGM: dimension above bitmask capacity");
    for (const auto& [mask, theta] : p.thetas) {
        (void)theta;  // the range |theta| <= 1 is implied by admissibility
        if (mask >= (std::uint32_t(1) << p.d)) throw Error("EFGM: subset outside 1..d");
        if (std::popcount(mask) < 2) throw Error("EFGM: subsets must have size >= 2");
    }
}

}  // namespace

EfgmParameters efgm_pair_parameters(double theta) {
    EfgmParameters p;
    p.d = 2;
    p.thetas[0b11] = theta;
    return p;
}

AdmissibilityResult efgm_admissible(const EfgmParameters& p, int dim_cap) {
    validate_params(p);
    if (p.d > dim_cap) throw Error("EFGM admissibility: dimension above the configured cap");
    AdmissibilityResult res;
    res.admissible = true;
    res.min_corner_value = std::numeric_limits<double>::infinity();
    for (std::uint32_t b = 0; b < (std::uint32_t(1) << p.d); ++b) {
        double v = 1.0;
        for (const auto& [mask, theta] : p.thetas)
            v += (std::popcount(b & mask) & 1) ? -theta : theta;
        if (v < res.min_corner_value) res.min_corner_value = v;
        if (v < -prob_tol && res.admissible) {
            res.admissible = false;
            res.witness.resize(p.d);
            // eps_j = (-1)^{b_j}
            for (int j = 0; j < p.d; ++j) res.witness[j] = (b >> j) & 1u ? -1 : 1;
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Bernoulli vector law

BernoulliVectorLaw::BernoulliVectorLaw(int d, std::vector<std::uint32_t> support, Vector probs)
    : d_(d), support_(std::move(support)), probs_(std::move(probs)) {
    if (d < 1 || d > 31) throw Error("Bernoulli law: dimension out of range");
    if (Index(support_.size()) != probs_.size() || support_.empty())
        throw Error("Bernoulli law: empty or inconsistent table");
    std::vector<Index> order(support_.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = Index(i);
    std::sort(order.begin(), order.end(),
              [&](Index a, Index b) { return support_[a] < support_[b]; });
    std::vector<std::uint32_t> bits;
    std::vector<double> pr;
    for (Index i : order) {
        if (support_[i] >= (std::uint32_t(1) << d)) throw Error("Bernoulli law: bits out of range");
        if (probs_[i] < -prob_tol) throw Error("Bernoulli law: negative probability");
        if (probs_[i] < prune_tol) continue;
        if (!bits.empty() && bits.back() == support_[i])
            pr.back() += probs_[i];
        else {
            bits.push_back(support_[i]);
            pr.push_back(probs_[i]);
        }
    }
    double sum = 0.0;
    for (double x : pr) sum += x;
    if (std::abs(sum - 1.0) > 1e-9) throw Error("Bernoulli law: probabilities must sum to 1");
    support_ = std::move(bits);
    probs_ = Eigen::Map<Vector>(pr.data(), Index(pr.size())) / sum;
    cum_.resize(pr.size());
    double acc = 0.0;
    for (size_t i = 0; i < pr.size(); ++i) {
        acc += probs_[Index(i)];
        cum_[i] = acc;
    }
    cum_.back() = 1.0;
}

BernoulliVectorLaw BernoulliVectorLaw::independent(int d, const Vector& p) {
    if (p.size() != d) throw Error("Bernoulli law: probability vector size mismatch");
    std::vector<std::uint32_t> support;
    std::vector<double> probs;
    for (std::uint32_t b = 0; b < (std::uint32_t(1) << d); ++b) {
        double pr = 1.0;
        for (int j = 0; j < d; ++j) pr *= (b >> j) & 1u ? p[j] : 1.0 - p[j];
        support.push_back(b);
        probs.push_back(pr);
    }
    return BernoulliVectorLaw(d, std::move(support),
                              Eigen::Map<Vector>(probs.data(), Index(probs.size())));
}

BernoulliVectorLaw BernoulliVectorLaw::comonotone(int d, double p) {
    std::vector<std::uint32_t> support{0u, (std::uint32_t(1) << d) - 1u};
    Vector probs(2);
    probs << 1.0 - p, p;
    return BernoulliVectorLaw(d, std::move(support), std::move(probs));
}

BernoulliVectorLaw BernoulliVectorLaw::from_copula(const Copula& c0, const Vector& p) {
    const int d = c0.dim();
    if (p.size() != d) throw Error("Bernoulli law: probability vector size mismatch");
    for (int j = 0; j < d; ++j)
        if (p[j] < 0.0 || p[j] > 1.0) throw Error("Bernoulli law: p outside [0,1]");
    std::vector<std::uint32_t> support;
    std::vector<double> probs;
    Vector lo(d), hi(d);
    for (std::uint32_t b = 0; b < (std::uint32_t(1) << d); ++b) {
        for (int j = 0; j < d; ++j) {
            bool one = (b >> j) & 1u;
            lo[j] = one ? 1.0 - p[j] : 0.0;
            hi[j] = one ? 1.0 : 1.0 - p[j];
        }
        double pr = rectangle_probability(c0, lo, hi);
        support.push_back(b);
        probs.push_back(std::max(pr, 0.0));
    }
    return BernoulliVectorLaw(d, std::move(support),
                              Eigen::Map<Vector>(probs.data(), Index(probs.size())));
}

double BernoulliVectorLaw::margin_p1(int j) const {
    if (j < 1 || j > d_) throw Error("Bernoulli law: coordinate out of range");
    double s = 0.0;
    for (size_t i = 0; i < support_.size(); ++i)
        if ((support_[i] >> (j - 1)) & 1u) s += probs_[Index(i)];
    return s;
}

bool BernoulliVectorLaw::symmetric() const {
    for (int j = 1; j <= d_; ++j)
        if (std::abs(margin_p1(j) - 0.5) > 1e-10) return false;
    return true;
}

std::uint32_t BernoulliVectorLaw::sample_bits(double u01) const {
    size_t i = std::upper_bound(cum_.begin(), cum_.end(), u01) - cum_.begin();
    if (i >= support_.size()) i = support_.size() - 1;
    return support_[i];
}

// ---------------------------------------------------------------------------

EfgmParameters thetas_from_bernoulli(const BernoulliVectorLaw& law) {
    if (!law.symmetric())
        throw Error("EFGM: the Bernoulli law must have Ber(1/2) margins");
    EfgmParameters p;
    p.d = law.d();
    for (std::uint32_t mask = 0; mask < (std::uint32_t(1) << p.d); ++mask) {
        if (std::popcount(mask) < 2) continue;
        double theta = 0.0;
        for (size_t i = 0; i < law.support().size(); ++i) {
            int parity = std::popcount(law.support()[i] & mask) & 1;
            theta += parity ? -law.probs()[Index(i)] : law.probs()[Index(i)];
        }
        if (std::abs(theta) > prune_tol) p.thetas[mask] = theta;
    }
    return p;
}

BernoulliVectorLaw bernoulli_from_thetas(const EfgmParameters& p) {
    validate_params(p);
    std::vector<std::uint32_t> support;
    std::vector<double> probs;
    const double scale = std::pow(0.5, p.d);
    for (std::uint32_t b = 0; b < (std::uint32_t(1) << p.d); ++b) {
        double v = 1.0;
        for (const auto& [mask, theta] : p.thetas)
            v += (std::popcount(b & mask) & 1) ? -theta : theta;
        if (v < -prob_tol) {
            AdmissibilityResult res = efgm_admissible(p);
            std::string w;
            for (int e : res.witness) w += (e > 0 ? "+1 " : "-1 ");
            throw Error("EFGM: inadmissible parameters, witness sign vector " + w);
        }
        support.push_back(b);
        probs.push_back(std::max(v, 0.0) * scale);
    }
    return BernoulliVectorLaw(p.d, std::move(support),
                              Eigen::Map<Vector>(probs.data(), Index(probs.size())));
}

double efgm_cdf(const EfgmParameters& p, const Vector& u) {
    if (u.size() != p.d) throw Error("EFGM cdf: dimension mismatch");
    double perturb = 1.0;
    for (const auto& [mask, theta] : p.thetas) {
        double prod = theta;
        for (int j = 0; j < p.d; ++j)
            if ((mask >> j) & 1u) prod *= 1.0 - u[j];
        perturb += prod;
    }
    return u.prod() * perturb;
}

double efgm_density(const EfgmParameters& p, const Vector& u) {
    if (u.size() != p.d) throw Error("EFGM density: dimension mismatch");
    double dens = 1.0;
    for (const auto& [mask, theta] : p.thetas) {
        double prod = theta;
        for (int j = 0; j < p.d; ++j)
            if ((mask >> j) & 1u) prod *= 1.0 - 2.0 * u[j];
        dens += prod;
    }
    return dens;
}

Matrix efgm_sample(const BernoulliVectorLaw& law, UniformSource& src, Index n) {
    if (!law.symmetric())
        throw Error("EFGM sampling: the Bernoulli law must have Ber(1/2) margins");
    if (n < 0) throw Error("EFGM sampling: n must be nonnegative");
    const int d = law.d();
    Matrix out(n, d);
    for (Index i = 0; i < n; ++i) {
        src.begin_sample();
        std::uint32_t b = law.sample_bits(src.next01());
        for (int j = 0; j < d; ++j) {
            double v1 = src.next01();
            double v2 = src.next01();
            double lo = std::min(v1, v2), hi = std::max(v1, v2);
            out(i, j) = (b >> j) & 1u ? hi : lo;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// EFGM as a copula family

EfgmCopula::EfgmCopula(EfgmParameters params) : Copula(params.d), params_(std::move(params)) {
    AdmissibilityResult res = efgm_admissible(params_);
    if (!res.admissible) {
        std::string w;
        for (int e : res.witness) w += (e > 0 ? "+1 " : "-1 ");
        throw Error("EFGM: inadmissible parameters, witness sign vector " + w);
    }
}

double EfgmCopula::theta2() const {
    if (dim() != 2) throw Error("EFGM: theta2 is defined for bivariate models only");
    auto it = params_.thetas.find(0b11);
    return it == params_.thetas.end() ? 0.0 : it->second;
}

double EfgmCopula::cdf_raw(const Vector& u) const { return efgm_cdf(params_, u); }

double EfgmCopula::density_raw(const Vector& u) const { return efgm_density(params_, u); }

double EfgmCopula::conditional2d_raw(double u2, double u1) const {
    double th = theta2();
    return u2 * (1.0 + th * (1.0 - 2.0 * u1) * (1.0 - u2));
}

CopulaPtr EfgmCopula::margin(const Coords& coords) const {
    check_coords(coords, dim());
    if (coords.size() == 1) return independence(1);
    std::uint32_t keep = 0;
    std::vector<int> newbit(dim(), -1);
    for (size_t a = 0; a < coords.size(); ++a) {
        keep |= std::uint32_t(1) << (coords[a] - 1);
        newbit[coords[a] - 1] = int(a);
    }
    EfgmParameters sub;
    sub.d = int(coords.size());
    for (const auto& [mask, theta] : params_.thetas) {
        if ((mask & ~keep) != 0) continue;  // setting u_j = 1 kills these terms
        std::uint32_t m = 0;
        for (int j = 0; j < dim(); ++j)
            if ((mask >> j) & 1u) m |= std::uint32_t(1) << newbit[j];
        sub.thetas[m] = theta;
    }
    return std::make_shared<EfgmCopula>(std::move(sub));
}

CopulaPtr EfgmCopula::survival() const {
    EfgmParameters flipped;
    flipped.d = params_.d;
    for (const auto& [mask, theta] : params_.thetas)
        flipped.thetas[mask] = (std::popcount(mask) & 1) ? -theta : theta;
    return std::make_shared<EfgmCopula>(std::move(flipped));
}

const BernoulliVectorLaw& EfgmCopula::law() const {
    std::call_once(law_once_, [this] {
        law_ = std::make_unique<BernoulliVectorLaw>(bernoulli_from_thetas(params_));
    });
    return *law_;
}

void EfgmCopula::sample_from_uniforms(const double* us, double* out) const {
    std::uint32_t b = law().sample_bits(us[0]);
    for (int j = 0; j < dim(); ++j) {
        double v1 = us[1 + 2 * j];
        double v2 = us[2 + 2 * j];
        double lo = std::min(v1, v2), hi = std::max(v1, v2);
        out[j] = (b >> j) & 1u ? hi : lo;
    }
}

CopulaPtr efgm(EfgmParameters params) { return std::make_shared<EfgmCopula>(std::move(params)); }

CopulaPtr efgm2(double theta) {
    return std::make_shared<EfgmCopula>(efgm_pair_parameters(theta));
}

CopulaPtr efgm_from_bernoulli(const BernoulliVectorLaw& law) {
    return std::make_shared<EfgmCopula>(thetas_from_bernoulli(law));
}

ConcordanceRangeReport efgm_concordance_range(QmcBudget budget) {
    ConcordanceRangeReport rep;
    auto plus = efgm2(1.0);
    auto minus = efgm2(-1.0);
    rep.rho_closed_at_plus1 = 1.0 / 3.0;
    rep.rho_closed_at_minus1 = -1.0 / 3.0;
    rep.tau_closed_at_plus1 = 2.0 / 9.0;
    rep.tau_closed_at_minus1 = -2.0 / 9.0;

    auto pi = independence(2);
    ConcordanceIntegral rp = concordance_integral_qmc(*plus, *pi, budget);
    ConcordanceIntegral rm = concordance_integral_qmc(*minus, *pi, budget);
    rep.rho_integral_at_plus1 = 12.0 * rp.value - 3.0;
    rep.rho_integral_at_minus1 = 12.0 * rm.value - 3.0;
    rep.rho_integral_sigma = 12.0 * std::max(rp.std_error, rm.std_error);

    ConcordanceIntegral tp = concordance_integral_qmc(*plus, *plus, budget);
    ConcordanceIntegral tm = concordance_integral_qmc(*minus, *minus, budget);
    rep.tau_integral_at_plus1 = 4.0 * tp.value - 1.0;
    rep.tau_integral_at_minus1 = 4.0 * tm.value - 1.0;
    rep.tau_integral_sigma = 4.0 * std::max(tp.std_error, tm.std_error);
    return rep;
}

}  // namespace imcop
