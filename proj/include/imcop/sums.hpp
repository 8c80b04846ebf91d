#pragma once

#include <variant>

#include "imcop/index_mixed.hpp"

namespace imcop {

struct ExponentialMargin {
    double rate = 1.0;
};
struct PointMassMargin {
    double value = 0.0;
};
using Margin = std::variant<ExponentialMargin, PointMassMargin>;

double margin_quantile(const Margin& m, double u);

// Joint model X_j = F_j^{-1}(U_j) with U following an index-mixed copula.
struct JointModel {
    std::shared_ptr<const IndexMixedCopula> copula;
    std::vector<Margin> margins;
};

JointModel make_joint_exponential(std::shared_ptr<const IndexMixedCopula> copula, double rate);

// E[e^{-t'X}] under exponential margins with comonotone / independence base
// blocks: an M block contributes 1/(1+sum t_j/lambda_j), a Pi block
// contributes prod 1/(1+t_j/lambda_j).
double ls_transform(const JointModel& jm, const Vector& t);

// Distribution of S = sum X_j: either the closed-form mixture of
// Gamma (x) Exp convolutions (exponential margins, {M, Pi} bases) or an
// empirical sample.
class SumDistribution {
public:
    struct Component {
        double weight = 0.0;
        int gamma_shape = 0;   // Gamma(shape, lambda); 0 means absent
        double gamma_rate = 0.0;
        double exp_rate = 0.0;  // Exp(exp_rate); infinity means absent
    };

    static SumDistribution analytic(std::vector<Component> components);
    static SumDistribution empirical(std::vector<double> sums);

    bool is_empirical() const { return empirical_; }
    const std::vector<Component>& components() const;
    const std::vector<double>& sample() const;

    double cdf(double s) const;
    double pdf(double s) const;  // analytic representation only
    double ls(double t) const;   // Laplace-Stieltjes transform, analytic only
    double mean() const;
    double variance() const;

private:
    bool empirical_ = false;
    std::vector<Component> components_;
    std::vector<double> sample_;  // sorted
};

// Exact law of the sum under Exp(lambda) margins and exactly one comonotone
// and one independence base: per index vector, Gamma(D_Pi, lambda) convolved
// with Exp(lambda / D_M), with point masses at zero for empty blocks.
SumDistribution exp_sum_distribution(const JointModel& jm);

// Monte Carlo oracle: sample the copula, map through margin quantiles, sum.
SumDistribution mc_sum_cdf(const JointModel& jm, UniformSource& src, Index n);

double ks_distance(const SumDistribution& a, const SumDistribution& b);

}  // namespace imcop
