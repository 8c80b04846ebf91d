#pragma once

#include <cstdint>
#include <map>
#include <mutex>

#include "imcop/copula.hpp"

namespace imcop {

// EFGM parameters in the classical form: one theta per coordinate subset of
// size >= 2, keyed by bitmask (bit j-1 set iff coordinate j belongs to the
// subset). Admissibility means the density 1 + sum theta_T prod eps_j stays
// nonnegative on all 2^d sign corners.
struct EfgmParameters {
    int d = 0;
    std::map<std::uint32_t, double> thetas;
};

EfgmParameters efgm_pair_parameters(double theta);  // d = 2 convenience

struct AdmissibilityResult {
    bool admissible = false;
    std::vector<int> witness;  // violating sign vector (+1/-1 entries) when inadmissible
    double min_corner_value = 0.0;
};

AdmissibilityResult efgm_admissible(const EfgmParameters& p, int dim_cap = sieve_dim_cap);

// Law of a Bernoulli vector on {0,1}^d stored as an explicit table.
class BernoulliVectorLaw {
public:
    BernoulliVectorLaw(int d, std::vector<std::uint32_t> support, Vector probs);

    static BernoulliVectorLaw independent(int d, const Vector& p);
    static BernoulliVectorLaw comonotone(int d, double p);
    // B_j = 1{V_j > 1 - p_j} for V ~ c0, enumerated exactly via rectangle
    // probabilities of the coupling copula.
    static BernoulliVectorLaw from_copula(const Copula& c0, const Vector& p);

    int d() const { return d_; }
    const std::vector<std::uint32_t>& support() const { return support_; }
    const Vector& probs() const { return probs_; }
    double margin_p1(int j) const;  // P(B_j = 1), 1-based j
    bool symmetric() const;         // every margin equals 1/2 within tolerance
    std::uint32_t sample_bits(double u01) const;

private:
    int d_;
    std::vector<std::uint32_t> support_;
    Vector probs_;
    std::vector<double> cum_;
};

// theta_{j_1..j_k} = E[(-1)^{B_{j_1}+...+B_{j_k}}]; requires symmetric margins.
EfgmParameters thetas_from_bernoulli(const BernoulliVectorLaw& law);

// Inverse Walsh transform: the unique symmetric Bernoulli law carrying the
// given admissible parameters, p(b) = 2^-d (1 + sum theta_T prod (1-2 b_j)).
BernoulliVectorLaw bernoulli_from_thetas(const EfgmParameters& p);

double efgm_cdf(const EfgmParameters& p, const Vector& u);
double efgm_density(const EfgmParameters& p, const Vector& u);

// Stochastic representation: per row, draw two uniforms, sort them, and let
// B_j select the minimum or the maximum.
Matrix efgm_sample(const BernoulliVectorLaw& law, UniformSource& src, Index n);

class EfgmCopula final : public Copula {
public:
    explicit EfgmCopula(EfgmParameters params);
    const EfgmParameters& params() const { return params_; }
    // single bivariate theta, errors when d != 2
    double theta2() const;

    Family family() const override { return Family::Efgm; }
    Capability capability() const override {
        return {true, true, dim() == 2, true, true};
    }
    TailCoeffs tail_coeffs() const override { return {0.0, 0.0}; }
    CopulaPtr margin(const Coords& coords) const override;
    CopulaPtr survival() const override;  // theta_T -> (-1)^|T| theta_T
    int sample_uniform_count() const override { return 1 + 2 * dim(); }
    void sample_from_uniforms(const double* us, double* out) const override;

protected:
    double cdf_raw(const Vector& u) const override;
    double density_raw(const Vector& u) const override;
    double conditional2d_raw(double u2, double u1) const override;

private:
    const BernoulliVectorLaw& law() const;  // lazily materialized for sampling

    EfgmParameters params_;
    mutable std::once_flag law_once_;
    mutable std::unique_ptr<BernoulliVectorLaw> law_;
};

CopulaPtr efgm(EfgmParameters params);
CopulaPtr efgm2(double theta);  // bivariate single-parameter EFGM
CopulaPtr efgm_from_bernoulli(const BernoulliVectorLaw& law);

// Bivariate concordance range of the family: rho_S in [-1/3, 1/3] and tau in
// [-2/9, 2/9], realized at theta = +-1. The closed endpoints (theta/3, 2theta/9)
// are reported next to independently computed concordance-integral estimates.
struct ConcordanceRangeReport {
    double rho_closed_at_plus1 = 0.0, rho_closed_at_minus1 = 0.0;
    double tau_closed_at_plus1 = 0.0, tau_closed_at_minus1 = 0.0;
    double rho_integral_at_plus1 = 0.0, rho_integral_at_minus1 = 0.0;
    double tau_integral_at_plus1 = 0.0, tau_integral_at_minus1 = 0.0;
    double rho_integral_sigma = 0.0, tau_integral_sigma = 0.0;
    double rho_bound = 1.0 / 3.0, tau_bound = 2.0 / 9.0;
};
ConcordanceRangeReport efgm_concordance_range(QmcBudget budget = {});

}  // namespace imcop
