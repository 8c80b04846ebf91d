#pragma once

#include <map>
#include <mutex>
#include <optional>

#include "imcop/copula.hpp"
#include "imcop/index_distribution.hpp"

namespace imcop {

// Copula of (U_{1,I_1}, ..., U_{d,I_d}) where the columns of the copula
// matrix are independent draws of the base copulas and I follows the given
// index distribution. CDF and density are exact enumerations over the index
// support; the needed marginal copulas of the bases are cached per
// (base, coordinate block).
class IndexMixedCopula final : public Copula {
public:
    static std::shared_ptr<const IndexMixedCopula> make(std::vector<CopulaPtr> bases,
                                                        IndexDistribution index);

    const std::vector<CopulaPtr>& bases() const { return bases_; }
    const IndexDistribution& index() const { return index_; }

    Family family() const override { return Family::IndexMixed; }
    Capability capability() const override { return capability_; }
    TailCoeffs tail_coeffs() const override;

    // Margins of index-mixed copulas are index-mixed copulas of the base
    // margins under the marginal index law.
    std::shared_ptr<const IndexMixedCopula> margin_model(const Coords& coords) const;
    CopulaPtr margin(const Coords& coords) const override;

    // Same index law over the survival copulas of the bases.
    std::shared_ptr<const IndexMixedCopula> survival_model() const;
    CopulaPtr survival() const override;

    // Explicit mixture sum_k p^{j1,j2}_{k,k} C_k^{j1,j2} + (off-diagonal mass) Pi.
    std::shared_ptr<const FiniteMixtureCopula> bivariate_margin(int j1, int j2) const;

    struct TrivariateMargin {
        CopulaPtr mixture;                               // evaluable representation
        std::vector<std::pair<int, double>> triple;      // (k, weight) full margins
        // (k, placement, weight); placement 0: pair (j1,j2) x uniform j3,
        // 1: (j1,j3) x uniform j2, 2: (j2,j3) x uniform j1
        std::vector<std::tuple<int, int, double>> two_equal;
        double distinct_weight = 0.0;
    };
    TrivariateMargin trivariate_margin(int j1, int j2, int j3) const;

    // dC^{j2|j1}/du_{j1}, the pairwise Rosenblatt transform
    double conditional_pair(int j1, int j2, double u2, double u1) const;

    // Convex-combination representation, available iff the index vector is
    // comonotone; refusal (nullopt) otherwise.
    std::optional<std::vector<std::pair<double, CopulaPtr>>> comonotone_decomposition() const;

    // Sampling. The three algorithms share one law; "efficient" draws the
    // index vector first and then only the needed base margins, and is the
    // default behind the Copula::sample interface.
    Matrix sample_sequential(UniformSource& src, Index n) const;
    Matrix sample_vectorized(UniformSource& src, Index n) const;
    // Deterministic block-substream variant: row block b uses an independent
    // engine seeded with mix_seed(seed, b), so output is byte-identical for a
    // given seed regardless of the thread count.
    Matrix sample_vectorized_parallel(std::uint64_t seed, Index n, int threads) const;
    Matrix sample_efficient(UniformSource& src, Index n,
                            std::vector<long>* base_draws = nullptr) const;

    int sample_uniform_count() const override;
    void sample_from_uniforms(const double* us, double* out) const override;

    // cached marginal copula of base k on block coords (1-based)
    CopulaPtr block_margin(int k, const Coords& coords) const;

protected:
    double cdf_raw(const Vector& u) const override;
    double density_raw(const Vector& u) const override;
    double conditional2d_raw(double u2, double u1) const override;

private:
    IndexMixedCopula(std::vector<CopulaPtr> bases, IndexDistribution index);

    std::vector<CopulaPtr> bases_;
    IndexDistribution index_;
    Capability capability_;
    int sample_count_ = 0;

    mutable std::mutex cache_mutex_;
    mutable std::map<std::pair<int, Coords>, CopulaPtr> margin_cache_;
    mutable std::shared_ptr<const IndexMixedCopula> survival_cache_;
};

std::shared_ptr<const IndexMixedCopula> make_index_mixed(std::vector<CopulaPtr> bases,
                                                         IndexDistribution index);

// Wraps any copula as the trivial order-1 index-mixed model (point mass on
// (1,...,1)), so the index-mixed measure formulas apply to plain models too.
std::shared_ptr<const IndexMixedCopula> as_index_mixed(CopulaPtr c);

}  // namespace imcop
