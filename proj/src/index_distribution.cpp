#include "imcop/index_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace imcop {

IndexPartition index_partition(const std::vector<int>& i, int K) {
    if (K < 1) throw Error("index_partition: K must be >= 1");
    IndexPartition part;
    part.sets.resize(K);
    part.sizes.assign(K, 0);
    for (size_t j = 0; j < i.size(); ++j) {
        if (i[j] < 1 || i[j] > K) throw Error("index_partition: entry outside 1..K");
        part.sets[i[j] - 1].push_back(int(j) + 1);
        ++part.sizes[i[j] - 1];
    }
    return part;
}

std::vector<OrderedClass> ordered_classes(int d, int K, std::int64_t cap) {
    if (d < 1 || K < 1) throw Error("ordered_classes: d and K must be >= 1");
    double total = std::pow(double(K), double(d));
    if (total > double(cap)) throw Error("ordered_classes: K^d exceeds the enumeration cap");

    std::vector<OrderedClass> classes;
    std::vector<int> rep(d, 1);
    // enumerate non-decreasing representatives in lexicographic order
    while (true) {
        OrderedClass cls;
        cls.representative = rep;
        std::vector<int> perm = rep;
        do {
            cls.members.push_back(perm);
        } while (std::next_permutation(perm.begin(), perm.end()));
        classes.push_back(std::move(cls));

        int pos = d - 1;
        while (pos >= 0 && rep[pos] == K) --pos;
        if (pos < 0) break;
        int v = rep[pos] + 1;
        for (int j = pos; j < d; ++j) rep[j] = v;
    }
    return classes;
}

// ---------------------------------------------------------------------------

IndexDistribution::IndexDistribution(int d, int K, std::vector<std::vector<int>> vectors,
                                     Vector probs)
    : d_(d), K_(K) {
    if (d < 1) throw Error("index distribution: d must be >= 1");
    if (K < 1) throw Error("index distribution: K must be >= 1");
    if (vectors.empty() || Index(vectors.size()) != probs.size())
        throw Error("index distribution: empty or inconsistent table");

    std::vector<Index> order(vectors.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = Index(i);
    std::sort(order.begin(), order.end(),
              [&](Index a, Index b) { return vectors[a] < vectors[b]; });

    double sum = 0.0;
    for (Index i = 0; i < probs.size(); ++i) {
        if (probs[i] < -prob_tol) throw Error("index distribution: negative probability");
        sum += std::max(probs[i], 0.0);
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw Error("index distribution: probabilities must sum to 1");

    std::vector<double> pr;
    for (Index idx : order) {
        const auto& v = vectors[idx];
        if (int(v.size()) != d) throw Error("index distribution: vector length mismatch");
        for (int e : v)
            if (e < 1 || e > K) throw Error("index distribution: entry outside 1..K");
        double p = std::max(probs[idx], 0.0);
        if (p < prune_tol) continue;
        if (!vectors_.empty() && vectors_.back() == v)
            pr.back() += p;
        else {
            vectors_.push_back(v);
            pr.push_back(p);
        }
    }
    if (vectors_.empty()) throw Error("index distribution: all mass pruned away");
    double kept = 0.0;
    for (double p : pr) kept += p;
    probs_ = Eigen::Map<Vector>(pr.data(), Index(pr.size())) / kept;

    cum_.resize(pr.size());
    double acc = 0.0;
    for (size_t i = 0; i < pr.size(); ++i) {
        acc += probs_[Index(i)];
        cum_[i] = acc;
    }
    cum_.back() = 1.0;

    partitions_.reserve(vectors_.size());
    for (const auto& v : vectors_) partitions_.push_back(index_partition(v, K_));
}

IndexDistribution IndexDistribution::from_table(int d, int K,
                                                std::vector<std::vector<int>> vectors,
                                                Vector probs) {
    // caller-provided tables must not contain duplicates
    auto sorted = vectors;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw Error("index distribution: support vectors must be pairwise distinct");
    return IndexDistribution(d, K, std::move(vectors), std::move(probs));
}

IndexDistribution IndexDistribution::comonotone_law(int d, const Vector& p) {
    const int K = int(p.size());
    std::vector<std::vector<int>> vectors;
    std::vector<double> probs;
    for (int k = 1; k <= K; ++k) {
        vectors.push_back(std::vector<int>(d, k));
        probs.push_back(p[k - 1]);
    }
    return IndexDistribution(d, K, std::move(vectors),
                             Eigen::Map<Vector>(probs.data(), Index(probs.size())));
}

IndexDistribution IndexDistribution::bernoulli_copula(
    const std::vector<std::pair<CopulaPtr, Vector>>& terms, std::int64_t cap) {
    if (terms.empty()) throw Error("bernoulli_copula: needs at least one term");
    const int d = terms.front().first->dim();
    const int K = int(terms.size()) + 1;

    // start from the deterministic all-ones vector, convolve term by term
    std::map<std::vector<int>, double> table;
    table[std::vector<int>(d, 1)] = 1.0;
    for (const auto& [c0, p] : terms) {
        if (c0->dim() != d) throw Error("bernoulli_copula: terms must share dimension");
        if (!c0->capability().cdf)
            throw Error("bernoulli_copula: the coupling copula needs an evaluable cdf");
        std::map<std::vector<int>, double> next;
        Vector lo(d), hi(d);
        for (std::uint32_t b = 0; b < (std::uint32_t(1) << d); ++b) {
            for (int j = 0; j < d; ++j) {
                bool one = (b >> j) & 1u;
                lo[j] = one ? 1.0 - p[j] : 0.0;
                hi[j] = one ? 1.0 : 1.0 - p[j];
            }
            double pb = rectangle_probability(*c0, lo, hi);
            if (pb <= 0.0) continue;
            for (const auto& [vec, pv] : table) {
                std::vector<int> sum = vec;
                for (int j = 0; j < d; ++j) sum[j] += int((b >> j) & 1u);
                next[sum] += pv * pb;
                if (std::int64_t(next.size()) > cap)
                    throw Error("bernoulli_copula: support exceeds the enumeration cap");
            }
        }
        table = std::move(next);
    }
    std::vector<std::vector<int>> vectors;
    std::vector<double> probs;
    for (const auto& [vec, pv] : table) {
        vectors.push_back(vec);
        probs.push_back(pv);
    }
    return IndexDistribution(d, K, std::move(vectors),
                             Eigen::Map<Vector>(probs.data(), Index(probs.size())));
}

IndexDistribution IndexDistribution::multinomial_shift(int K, const Vector& q) {
    const int d = int(q.size());
    if (K < 1) throw Error("multinomial_shift: K must be >= 1");
    double qs = q.sum();
    if (std::abs(qs - 1.0) > 1e-9)
        throw Error("multinomial_shift: cell probabilities must sum to 1");
    const int m = K - 1;  // multinomial trial count

    std::vector<std::vector<int>> vectors;
    std::vector<double> probs;
    std::vector<int> counts(d, 0);
    double lgm = std::lgamma(double(m) + 1.0);
    // enumerate all compositions of m into d nonnegative parts
    auto emit = [&]() {
        double logp = lgm;
        for (int j = 0; j < d; ++j) {
            if (counts[j] > 0 && q[j] <= 0.0) return;
            logp -= std::lgamma(double(counts[j]) + 1.0);
            if (counts[j] > 0) logp += counts[j] * std::log(q[j]);
        }
        std::vector<int> vec(d);
        for (int j = 0; j < d; ++j) vec[j] = 1 + counts[j];
        vectors.push_back(std::move(vec));
        probs.push_back(std::exp(logp));
    };
    auto rec = [&](auto&& self, int j, int remaining) -> void {
        if (j == d - 1) {
            counts[j] = remaining;
            emit();
            return;
        }
        for (int c = 0; c <= remaining; ++c) {
            counts[j] = c;
            self(self, j + 1, remaining - c);
        }
    };
    rec(rec, 0, m);
    return IndexDistribution(d, K, std::move(vectors),
                             Eigen::Map<Vector>(probs.data(), Index(probs.size())));
}

IndexDistribution IndexDistribution::copula_quantile(const Copula& c0,
                                                     const std::vector<Vector>& pmfs,
                                                     std::int64_t cap) {
    const int d = c0.dim();
    if (int(pmfs.size()) != d) throw Error("copula_quantile: one pmf per coordinate required");
    if (!c0.capability().cdf)
        throw Error("copula_quantile: the coupling copula needs an evaluable cdf");
    const int K = int(pmfs.front().size());
    std::vector<std::vector<double>> cum(d);
    for (int j = 0; j < d; ++j) {
        if (int(pmfs[j].size()) != K)
            throw Error("copula_quantile: pmfs must share the same K");
        if (std::abs(pmfs[j].sum() - 1.0) > 1e-9)
            throw Error("copula_quantile: each pmf must sum to 1");
        cum[j].resize(K + 1, 0.0);
        for (int k = 0; k < K; ++k) {
            if (pmfs[j][k] < 0.0) throw Error("copula_quantile: negative pmf entry");
            cum[j][k + 1] = cum[j][k] + pmfs[j][k];
        }
        cum[j][K] = 1.0;
    }
    if (std::pow(double(K), double(d)) > double(cap))
        throw Error("copula_quantile: K^d exceeds the enumeration cap");

    std::vector<std::vector<int>> vectors;
    std::vector<double> probs;
    std::vector<int> vec(d, 1);
    Vector lo(d), hi(d);
    while (true) {
        for (int j = 0; j < d; ++j) {
            lo[j] = cum[j][vec[j] - 1];
            hi[j] = cum[j][vec[j]];
        }
        double p = rectangle_probability(c0, lo, hi);
        if (p > 0.0) {
            vectors.push_back(vec);
            probs.push_back(p);
        }
        int pos = d - 1;
        while (pos >= 0 && vec[pos] == K) --pos;
        if (pos < 0) break;
        ++vec[pos];
        for (int j = pos + 1; j < d; ++j) vec[j] = 1;
    }
    return IndexDistribution(d, K, std::move(vectors),
                             Eigen::Map<Vector>(probs.data(), Index(probs.size())));
}

IndexDistribution IndexDistribution::marginal(const Coords& coords) const {
    check_coords(coords, d_);
    std::map<std::vector<int>, double> table;
    for (size_t i = 0; i < vectors_.size(); ++i) {
        std::vector<int> sub(coords.size());
        for (size_t a = 0; a < coords.size(); ++a) sub[a] = vectors_[i][coords[a] - 1];
        table[sub] += probs_[Index(i)];
    }
    std::vector<std::vector<int>> vectors;
    std::vector<double> probs;
    for (const auto& [vec, p] : table) {
        vectors.push_back(vec);
        probs.push_back(p);
    }
    return IndexDistribution(int(coords.size()), K_, std::move(vectors),
                             Eigen::Map<Vector>(probs.data(), Index(probs.size())));
}

Index IndexDistribution::sample_row(double u01) const {
    size_t i = std::upper_bound(cum_.begin(), cum_.end(), u01) - cum_.begin();
    if (i >= vectors_.size()) i = vectors_.size() - 1;
    return Index(i);
}

std::vector<std::vector<int>> IndexDistribution::sample(UniformSource& src, Index n) const {
    if (n < 0) throw Error("index sampling: n must be nonnegative");
    std::vector<std::vector<int>> out;
    out.reserve(size_t(n));
    for (Index i = 0; i < n; ++i) {
        src.begin_sample();
        out.push_back(vectors_[size_t(sample_row(src.next01()))]);
    }
    return out;
}

IndexDistribution::Predicates IndexDistribution::predicates() const {
    Predicates pred;
    pred.comonotone = true;
    pred.all_distinct = true;
    for (const auto& v : vectors_) {
        for (int j = 1; j < d_; ++j) {
            if (v[j] != v[0]) pred.comonotone = false;
        }
        std::vector<int> s = v;
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end()) pred.all_distinct = false;
    }

    // sufficient condition: within each ordered class, all members carry the
    // same probability (members absent from the support carry 0)
    pred.exchangeable_sufficient = true;
    std::map<std::vector<int>, std::pair<double, Index>> groups;  // sorted rep -> (prob, count)
    for (size_t i = 0; i < vectors_.size(); ++i) {
        std::vector<int> rep = vectors_[i];
        std::sort(rep.begin(), rep.end());
        auto [it, inserted] = groups.emplace(std::move(rep),
                                             std::make_pair(probs_[Index(i)], Index(1)));
        if (!inserted) {
            if (std::abs(it->second.first - probs_[Index(i)]) > prob_tol)
                pred.exchangeable_sufficient = false;
            ++it->second.second;
        }
    }
    if (pred.exchangeable_sufficient) {
        for (const auto& [rep, info] : groups) {
            // class size = d! / prod(multiplicity!)
            double logsize = std::lgamma(double(d_) + 1.0);
            int run = 1;
            for (size_t j = 1; j <= rep.size(); ++j) {
                if (j < rep.size() && rep[j] == rep[j - 1]) {
                    ++run;
                } else {
                    logsize -= std::lgamma(double(run) + 1.0);
                    run = 1;
                }
            }
            double size = std::round(std::exp(logsize));
            if (double(info.second) != size) {
                pred.exchangeable_sufficient = false;
                break;
            }
        }
    }
    return pred;
}

}  // namespace imcop
