#include "imcop/index_mixed.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <thread>

namespace imcop {

namespace {

constexpr Index block_rows = 4096;  // row-block size of the parallel sampler

// coordinates of J with u_j strictly below 1 (u already clamped to [0,1])
Coords effective_coords(const std::vector<int>& J, const Vector& u) {
    Coords eff;
    for (int j : J)
        if (u[j - 1] < 1.0) eff.push_back(j);
    return eff;
}

}  // namespace

IndexMixedCopula::IndexMixedCopula(std::vector<CopulaPtr> bases, IndexDistribution index)
    : Copula(index.d()), bases_(std::move(bases)), index_(std::move(index)) {
    if (int(bases_.size()) != index_.K())
        throw Error("index-mixed: number of bases must equal the order K");
    for (const auto& b : bases_) {
        if (!b) throw Error("index-mixed: null base copula");
        if (b->dim() != index_.d())
            throw Error("index-mixed: all bases must have dimension d");
    }

    // Precompute the block margins needed by the support vectors and derive
    // the capability flags from them.
    capability_ = Capability{true, true, true, true, true};
    int max_count = 0;
    for (Index row = 0; row < index_.support_size(); ++row) {
        const IndexPartition& part = index_.partition(row);
        int count = 0;
        for (int k = 1; k <= index_.K(); ++k) {
            if (part.sizes[k - 1] == 0) continue;
            CopulaPtr m = block_margin(k, part.sets[k - 1]);
            Capability cap = m->capability();
            capability_.cdf &= cap.cdf;
            capability_.density &= cap.density;
            capability_.survival_closed &= cap.survival_closed;
            count += m->sample_uniform_count();
        }
        max_count = std::max(max_count, count);
    }
    sample_count_ = 1 + max_count;
    if (dim() == 2) {
        capability_.conditional2d = true;
        capability_.tail_coeffs = true;
        for (Index row = 0; row < index_.support_size(); ++row) {
            const auto& v = index_.support()[row];
            if (v[0] != v[1]) continue;
            Capability cap = bases_[v[0] - 1]->capability();
            capability_.conditional2d &= cap.conditional2d;
            capability_.tail_coeffs &= cap.tail_coeffs;
        }
    } else {
        capability_.conditional2d = false;
        capability_.tail_coeffs = false;
    }
}

std::shared_ptr<const IndexMixedCopula> IndexMixedCopula::make(std::vector<CopulaPtr> bases,
                                                               IndexDistribution index) {
    return std::shared_ptr<const IndexMixedCopula>(
        new IndexMixedCopula(std::move(bases), std::move(index)));
}

CopulaPtr IndexMixedCopula::block_margin(int k, const Coords& coords) const {
    if (k < 1 || k > int(bases_.size())) throw Error("index-mixed: base index out of range");
    if (int(coords.size()) == dim()) return bases_[k - 1];
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto key = std::make_pair(k, coords);
    auto it = margin_cache_.find(key);
    if (it != margin_cache_.end()) return it->second;
    CopulaPtr m = bases_[k - 1]->margin(coords);
    margin_cache_.emplace(std::move(key), m);
    return m;
}

double IndexMixedCopula::cdf_raw(const Vector& u) const {
    double total = 0.0;
    for (Index row = 0; row < index_.support_size(); ++row) {
        const IndexPartition& part = index_.partition(row);
        double term = index_.probs()[row];
        for (int k = 1; k <= index_.K() && term != 0.0; ++k) {
            if (part.sizes[k - 1] == 0) continue;  // empty block contributes factor 1
            Coords eff = effective_coords(part.sets[k - 1], u);
            if (eff.empty()) continue;
            if (eff.size() == 1) {
                term *= u[eff[0] - 1];  // one-dimensional margins are uniform
                continue;
            }
            Vector sub(eff.size());
            for (size_t a = 0; a < eff.size(); ++a) sub[a] = u[eff[a] - 1];
            term *= block_margin(k, eff)->cdf(sub);
        }
        total += term;
    }
    return total;
}

double IndexMixedCopula::density_raw(const Vector& u) const {
    double total = 0.0;
    for (Index row = 0; row < index_.support_size(); ++row) {
        const IndexPartition& part = index_.partition(row);
        double term = index_.probs()[row];
        for (int k = 1; k <= index_.K() && term != 0.0; ++k) {
            int Dk = part.sizes[k - 1];
            if (Dk <= 1) continue;  // empty and singleton blocks have density 1
            const Coords& J = part.sets[k - 1];
            Vector sub(Dk);
            for (int a = 0; a < Dk; ++a) sub[a] = u[J[a] - 1];
            term *= block_margin(k, J)->density(sub);
        }
        total += term;
    }
    return total;
}

TailCoeffs IndexMixedCopula::tail_coeffs() const {
    if (dim() != 2) throw Error("tail_coeffs: bivariate models only");
    TailCoeffs t{0.0, 0.0};
    for (Index row = 0; row < index_.support_size(); ++row) {
        const auto& v = index_.support()[row];
        if (v[0] != v[1]) continue;  // off-diagonal mass contributes Pi, tail free
        TailCoeffs base = bases_[v[0] - 1]->tail_coeffs();
        t.lower += index_.probs()[row] * base.lower;
        t.upper += index_.probs()[row] * base.upper;
    }
    return t;
}

std::shared_ptr<const IndexMixedCopula> IndexMixedCopula::margin_model(
    const Coords& coords) const {
    check_coords(coords, dim());
    std::vector<CopulaPtr> margins;
    margins.reserve(bases_.size());
    for (const auto& b : bases_) margins.push_back(b->margin(coords));
    return make(std::move(margins), index_.marginal(coords));
}

CopulaPtr IndexMixedCopula::margin(const Coords& coords) const { return margin_model(coords); }

std::shared_ptr<const IndexMixedCopula> IndexMixedCopula::survival_model() const {
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        if (survival_cache_) return survival_cache_;
    }
    std::vector<CopulaPtr> survivals;
    survivals.reserve(bases_.size());
    for (const auto& b : bases_) survivals.push_back(b->survival());
    auto model = make(std::move(survivals), index_);
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (!survival_cache_) survival_cache_ = model;
    return survival_cache_;
}

CopulaPtr IndexMixedCopula::survival() const { return survival_model(); }

std::shared_ptr<const FiniteMixtureCopula> IndexMixedCopula::bivariate_margin(int j1,
                                                                              int j2) const {
    if (!(1 <= j1 && j1 < j2 && j2 <= dim()))
        throw Error("bivariate_margin: need 1 <= j1 < j2 <= d");
    IndexDistribution marg = index_.marginal({j1, j2});
    std::vector<double> weights;
    std::vector<CopulaPtr> comps;
    double diag = 0.0;
    std::vector<double> wk(bases_.size(), 0.0);
    for (Index row = 0; row < marg.support_size(); ++row) {
        const auto& v = marg.support()[row];
        if (v[0] == v[1]) {
            wk[v[0] - 1] += marg.probs()[row];
            diag += marg.probs()[row];
        }
    }
    for (size_t k = 0; k < bases_.size(); ++k) {
        if (wk[k] <= 0.0) continue;
        weights.push_back(wk[k]);
        comps.push_back(block_margin(int(k) + 1, {j1, j2}));
    }
    double off = 1.0 - diag;
    if (off > prob_tol || comps.empty()) {
        weights.push_back(std::max(off, 0.0));
        comps.push_back(independence(2));
    }
    double sum = 0.0;
    for (double w : weights) sum += w;
    for (double& w : weights) w /= sum;
    return std::make_shared<FiniteMixtureCopula>(std::move(weights), std::move(comps));
}

IndexMixedCopula::TrivariateMargin IndexMixedCopula::trivariate_margin(int j1, int j2,
                                                                       int j3) const {
    if (!(1 <= j1 && j1 < j2 && j2 < j3 && j3 <= dim()))
        throw Error("trivariate_margin: need 1 <= j1 < j2 < j3 <= d");
    IndexDistribution marg = index_.marginal({j1, j2, j3});
    const int K = index_.K();
    std::vector<double> triple(K, 0.0);
    // placement 0: k1 = k2 != k3,  1: k1 = k3 != k2,  2: k2 = k3 != k1
    std::vector<std::array<double, 3>> two(K, {0.0, 0.0, 0.0});
    double distinct = 0.0;
    for (Index row = 0; row < marg.support_size(); ++row) {
        const auto& v = marg.support()[row];
        double p = marg.probs()[row];
        if (v[0] == v[1] && v[1] == v[2])
            triple[v[0] - 1] += p;
        else if (v[0] == v[1])
            two[v[0] - 1][0] += p;
        else if (v[0] == v[2])
            two[v[0] - 1][1] += p;
        else if (v[1] == v[2])
            two[v[1] - 1][2] += p;
        else
            distinct += p;
    }

    TrivariateMargin out;
    out.distinct_weight = distinct;
    std::vector<double> weights;
    std::vector<CopulaPtr> comps;
    const std::array<std::pair<Coords, int>, 3> placements = {{
        {{j1, j2}, 3},  // pair block occupies local coords 1,2; uniform at 3
        {{j1, j3}, 2},
        {{j2, j3}, 1},
    }};
    for (int k = 1; k <= K; ++k) {
        if (triple[k - 1] > 0.0) {
            out.triple.emplace_back(k, triple[k - 1]);
            weights.push_back(triple[k - 1]);
            comps.push_back(block_margin(k, {j1, j2, j3}));
        }
        for (int pl = 0; pl < 3; ++pl) {
            double w = two[k - 1][pl];
            if (w <= 0.0) continue;
            out.two_equal.emplace_back(k, pl, w);
            weights.push_back(w);
            CopulaPtr pair = block_margin(k, placements[pl].first);
            Coords pair_local, uni_local{placements[pl].second};
            for (int c = 1; c <= 3; ++c)
                if (c != placements[pl].second) pair_local.push_back(c);
            std::vector<std::pair<Coords, CopulaPtr>> parts;
            parts.emplace_back(pair_local, pair);
            parts.emplace_back(uni_local, independence(1));
            comps.push_back(block_product(3, std::move(parts)));
        }
    }
    if (distinct > 0.0 || comps.empty()) {
        weights.push_back(std::max(distinct, 0.0));
        comps.push_back(independence(3));
    }
    double sum = 0.0;
    for (double w : weights) sum += w;
    for (double& w : weights) w /= sum;
    out.mixture = finite_mixture(std::move(weights), std::move(comps));
    return out;
}

double IndexMixedCopula::conditional_pair(int j1, int j2, double u2, double u1) const {
    if (!(1 <= j1 && j1 < j2 && j2 <= dim()))
        throw Error("conditional_pair: need 1 <= j1 < j2 <= d");
    if (!(u1 > 0.0 && u1 < 1.0)) throw Error("conditional_pair: u1 must lie in (0,1)");
    u2 = std::clamp(u2, 0.0, 1.0);
    IndexDistribution marg = index_.marginal({j1, j2});
    double value = 0.0, off = 1.0;
    for (Index row = 0; row < marg.support_size(); ++row) {
        const auto& v = marg.support()[row];
        if (v[0] != v[1]) continue;
        double w = marg.probs()[row];
        off -= w;
        value += w * block_margin(v[0], {j1, j2})->conditional2d(u2, u1);
    }
    return value + std::max(off, 0.0) * u2;
}

double IndexMixedCopula::conditional2d_raw(double u2, double u1) const {
    return conditional_pair(1, 2, u2, u1);
}

std::optional<std::vector<std::pair<double, CopulaPtr>>>
IndexMixedCopula::comonotone_decomposition() const {
    if (!index_.predicates().comonotone) return std::nullopt;
    std::vector<std::pair<double, CopulaPtr>> parts;
    std::vector<double> wk(bases_.size(), 0.0);
    for (Index row = 0; row < index_.support_size(); ++row)
        wk[index_.support()[row][0] - 1] += index_.probs()[row];
    for (size_t k = 0; k < bases_.size(); ++k) parts.emplace_back(wk[k], bases_[k]);
    return parts;
}

// ---------------------------------------------------------------------------
// Sampling

Matrix IndexMixedCopula::sample_sequential(UniformSource& src, Index n) const {
    if (n < 0) throw Error("sample: n must be nonnegative");
    const int d = dim();
    const int K = index_.K();
    Matrix out(n, d);
    Matrix cols(d, K);
    std::vector<double> buf, row(d);
    for (Index i = 0; i < n; ++i) {
        // full copula matrix first, index vector afterwards
        for (int k = 0; k < K; ++k) {
            const Copula& base = *bases_[k];
            buf.resize(base.sample_uniform_count());
            for (double& x : buf) x = src.next01();
            base.sample_from_uniforms(buf.data(), row.data());
            for (int j = 0; j < d; ++j) cols(j, k) = row[j];
        }
        const auto& iv = index_.support()[size_t(index_.sample_row(src.next01()))];
        for (int j = 0; j < d; ++j) out(i, j) = cols(j, iv[j] - 1);
    }
    return out;
}

Matrix IndexMixedCopula::sample_vectorized(UniformSource& src, Index n) const {
    if (n < 0) throw Error("sample: n must be nonnegative");
    const int d = dim();
    const int K = index_.K();
    Matrix out(n, d);
    std::vector<Matrix> cols(K);
    std::vector<double> buf, row(d);
    for (Index start = 0; start < n; start += block_rows) {
        Index m = std::min(block_rows, n - start);
        // phase 1: all copula matrices of the block
        for (int k = 0; k < K; ++k) {
            cols[k].resize(m, d);
            const Copula& base = *bases_[k];
            buf.resize(base.sample_uniform_count());
            for (Index i = 0; i < m; ++i) {
                for (double& x : buf) x = src.next01();
                base.sample_from_uniforms(buf.data(), row.data());
                for (int j = 0; j < d; ++j) cols[k](i, j) = row[j];
            }
        }
        // phase 2: all index vectors, then gather
        for (Index i = 0; i < m; ++i) {
            const auto& iv = index_.support()[size_t(index_.sample_row(src.next01()))];
            for (int j = 0; j < d; ++j) out(start + i, j) = cols[iv[j] - 1](i, j);
        }
    }
    return out;
}

Matrix IndexMixedCopula::sample_vectorized_parallel(std::uint64_t seed, Index n,
                                                    int threads) const {
    if (n < 0) throw Error("sample: n must be nonnegative");
    if (threads < 1) threads = 1;
    Matrix out(n, dim());
    const Index nblocks = (n + block_rows - 1) / block_rows;
    std::atomic<Index> next{0};
    auto worker = [&]() {
        for (;;) {
            Index b = next.fetch_add(1);
            if (b >= nblocks) return;
            Index start = b * block_rows;
            Index m = std::min(block_rows, n - start);
            Mt64Source sub(mix_seed(seed, std::uint64_t(b)));
            Matrix block = sample_vectorized(sub, m);
            out.middleRows(start, m) = block;
        }
    };
    if (threads == 1 || nblocks <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return out;
}

int IndexMixedCopula::sample_uniform_count() const { return sample_count_; }

void IndexMixedCopula::sample_from_uniforms(const double* us, double* out) const {
    Index row = index_.sample_row(us[0]);
    const IndexPartition& part = index_.partition(row);
    int off = 1;
    std::vector<double> sub;
    for (int k = 1; k <= index_.K(); ++k) {
        int Dk = part.sizes[k - 1];
        if (Dk == 0) continue;
        const Coords& J = part.sets[k - 1];
        CopulaPtr m = block_margin(k, J);
        sub.resize(Dk);
        m->sample_from_uniforms(us + off, sub.data());
        off += m->sample_uniform_count();
        for (int a = 0; a < Dk; ++a) out[J[a] - 1] = sub[a];
    }
}

Matrix IndexMixedCopula::sample_efficient(UniformSource& src, Index n,
                                          std::vector<long>* base_draws) const {
    if (n < 0) throw Error("sample: n must be nonnegative");
    if (base_draws) base_draws->assign(bases_.size(), 0);
    Matrix out(n, dim());
    const int m = sample_uniform_count();
    std::vector<double> buf(m), row(dim());
    for (Index i = 0; i < n; ++i) {
        src.begin_sample();
        for (int j = 0; j < m; ++j) buf[j] = src.next01();
        if (base_draws) {
            const IndexPartition& part = index_.partition(index_.sample_row(buf[0]));
            for (int k = 0; k < index_.K(); ++k)
                if (part.sizes[k] > 0) ++(*base_draws)[k];
        }
        sample_from_uniforms(buf.data(), row.data());
        for (int j = 0; j < dim(); ++j) out(i, j) = row[j];
    }
    return out;
}

std::shared_ptr<const IndexMixedCopula> make_index_mixed(std::vector<CopulaPtr> bases,
                                                         IndexDistribution index) {
    return IndexMixedCopula::make(std::move(bases), std::move(index));
}

std::shared_ptr<const IndexMixedCopula> as_index_mixed(CopulaPtr c) {
    if (auto m = std::dynamic_pointer_cast<const IndexMixedCopula>(c)) return m;
    int d = c->dim();
    return IndexMixedCopula::make({std::move(c)},
                                  IndexDistribution::comonotone_law(d, Vector::Ones(1)));
}

}  // namespace imcop
