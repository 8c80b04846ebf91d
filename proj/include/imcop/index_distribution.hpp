#pragma once

#include <optional>
#include <vector>

#include "imcop/copula.hpp"

namespace imcop {

// Index vectors take values in {1..K}^d; positions and values are 1-based.

struct IndexPartition {
    std::vector<std::vector<int>> sets;  // J_k, 1-based row indices, k = 1..K
    std::vector<int> sizes;              // D_k = |J_k|
};

// J_k = { j : i_j = k }.
IndexPartition index_partition(const std::vector<int>& i, int K);

struct OrderedClass {
    std::vector<int> representative;           // non-decreasing d-tuple
    std::vector<std::vector<int>> members;     // all distinct permutations
};

// All classes of {1..K}^d grouped by sorted representative. There are
// binomial(K+d-1, d) of them and their members partition {1..K}^d.
std::vector<OrderedClass> ordered_classes(int d, int K,
                                          std::int64_t cap = default_enum_cap);

// Finite law of the random index vector, stored as an explicit normalized
// table sorted lexicographically. Entries below prune_tol are dropped and the
// table renormalized. Immutable after construction.
class IndexDistribution {
public:
    static IndexDistribution from_table(int d, int K,
                                        std::vector<std::vector<int>> vectors,
                                        Vector probs);
    // support {(k,...,k)} with weights p, K = p.size()
    static IndexDistribution comonotone_law(int d, const Vector& p);
    // I = 1 + sum of Bernoulli vectors, each coupled by its own copula; K = terms+1
    static IndexDistribution bernoulli_copula(
        const std::vector<std::pair<CopulaPtr, Vector>>& terms,
        std::int64_t cap = default_enum_cap);
    // I = 1 + Multinomial(K-1, q); d = q.size()
    static IndexDistribution multinomial_shift(int K, const Vector& q);
    // I_j = per-coordinate quantile of pmfs[j] applied to V_j, V ~ c0;
    // enumerated exactly via rectangle probabilities on the K^d grid
    static IndexDistribution copula_quantile(const Copula& c0,
                                             const std::vector<Vector>& pmfs,
                                             std::int64_t cap = default_enum_cap);

    int d() const { return d_; }
    int K() const { return K_; }
    Index support_size() const { return Index(vectors_.size()); }
    const std::vector<std::vector<int>>& support() const { return vectors_; }
    const Vector& probs() const { return probs_; }
    const IndexPartition& partition(Index row) const { return partitions_[size_t(row)]; }

    // law of (I_{j} : j in coords); result lives on {1..K}^{|coords|}
    IndexDistribution marginal(const Coords& coords) const;

    Index sample_row(double u01) const;
    std::vector<std::vector<int>> sample(UniformSource& src, Index n) const;

    struct Predicates {
        bool comonotone = false;
        bool all_distinct = false;
        bool exchangeable_sufficient = false;
    };
    Predicates predicates() const;

private:
    IndexDistribution(int d, int K, std::vector<std::vector<int>> vectors, Vector probs);

    int d_;
    int K_;
    std::vector<std::vector<int>> vectors_;
    Vector probs_;
    std::vector<double> cum_;
    std::vector<IndexPartition> partitions_;
};

}  // namespace imcop
