#pragma once

#include <optional>

#include "imcop/index_mixed.hpp"

namespace imcop {

enum class MeasureTag { LambdaLower, LambdaUpper, Beta, RhoS, Tau };
enum class TailSide { Lower, Upper };
enum class SpearmanVariant { Lower, Upper, Center };
enum class BetaPath { General, RadialSymmetric, BlockProduct };

struct PairMeasureMatrix {
    MeasureTag tag;
    Matrix values;  // symmetric, unit diagonal
};

enum class MuMethod { ClosedForm, Quadrature, QuasiMonteCarlo };

struct ConcordanceIntegral {
    double value = 0.0;
    MuMethod method = MuMethod::ClosedForm;
    Index n = 0;              // quasi-MC points when stochastic
    std::uint64_t seed = 0;
    double std_error = 0.0;   // 0 for deterministic paths
};

// mu_{Ca,Cb} = int Ca dCb for copulas of equal dimension. Closed forms and
// low-dimensional quadratures are used where available; everything else runs
// the quasi-Monte Carlo path (mean of Ca over lattice-driven draws of Cb).
ConcordanceIntegral concordance_integral(const Copula& ca, const Copula& cb,
                                         QmcBudget budget = {});

// Always runs the lattice path, bypassing closed forms; used where an
// independent stochastic route is wanted next to a closed one.
ConcordanceIntegral concordance_integral_qmc(const Copula& ca, const Copula& cb,
                                             QmcBudget budget = {});

// Spearman's rho / Kendall's tau of one bivariate copula (closed forms first).
double pair_spearman_rho(const Copula& c, QmcBudget budget = {});
double pair_kendall_tau(const Copula& c, QmcBudget budget = {});

// lambda^{j1,j2} = sum_k p^{j1,j2}_{k,k} lambda_k^{j1,j2}
PairMeasureMatrix tail_dependence_matrix(const IndexMixedCopula& m, TailSide side);

double blomqvist_beta_pair(const IndexMixedCopula& m, int j1, int j2);
double spearman_rho_pair(const IndexMixedCopula& m, int j1, int j2, QmcBudget budget = {});
double kendall_tau_pair(const IndexMixedCopula& m, int j1, int j2, QmcBudget budget = {});

PairMeasureMatrix blomqvist_beta_matrix(const IndexMixedCopula& m);
PairMeasureMatrix spearman_rho_matrix(const IndexMixedCopula& m, QmcBudget budget = {});
PairMeasureMatrix kendall_tau_matrix(const IndexMixedCopula& m, QmcBudget budget = {});

// beta^d = (2^{d-1}(C(1/2)+C^(1/2))-1)/(2^{d-1}-1); the radially-symmetric
// and block-product paths are shortcuts valid under radial symmetry.
double blomqvist_beta_multivariate(const IndexMixedCopula& m,
                                   BetaPath path = BetaPath::General);

double multivariate_spearman(const IndexMixedCopula& m, SpearmanVariant variant,
                             QmcBudget budget = {});

struct OrthantReport {
    bool plod = false;
    bool puod = false;
    bool pod = false;
    std::optional<Vector> witness_lower;  // first grid point violating C >= Pi
    std::optional<Vector> witness_upper;
};
OrthantReport orthant_dependence_check(const IndexMixedCopula& m, int grid_resolution);

enum class OrderRel { LessOrEqual, GreaterOrEqual, Equal, Incomparable };
struct OrderVerdict {
    OrderRel lower = OrderRel::Incomparable;
    OrderRel upper = OrderRel::Incomparable;
    std::optional<Vector> lower_witness_above;  // a > b on the lower comparison
    std::optional<Vector> lower_witness_below;  // a < b
    std::optional<Vector> upper_witness_above;
    std::optional<Vector> upper_witness_below;
};
// Grid-verified pointwise comparison, not a proof.
OrderVerdict concordance_compare(const Copula& a, const Copula& b, int grid_resolution);

int default_grid_resolution(int d);

// Rank-based estimators, used as independent oracles by the verification
// suites. No tie handling: inputs are continuous samples.
PairMeasureMatrix empirical_spearman(const Matrix& samples);
PairMeasureMatrix empirical_kendall(const Matrix& samples);
PairMeasureMatrix empirical_blomqvist(const Matrix& samples);
double empirical_multivariate_spearman(const Matrix& samples, SpearmanVariant variant);

double empirical_kendall_pair(const Vector& x, const Vector& y);  // Knight O(n log n)
double empirical_spearman_pair(const Vector& x, const Vector& y);

// Kolmogorov-Smirnov statistic of one sample column against Unif(0,1).
double ks_uniform_statistic(const Vector& column);

}  // namespace imcop
