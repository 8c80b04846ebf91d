#include <doctest.h>

#include <map>

#include "imcop/index_distribution.hpp"
#include "imcop/special_functions.hpp"

using namespace imcop;

namespace {

IndexDistribution table(int d, int K, std::vector<std::vector<int>> vecs,
                        std::vector<double> probs) {
    return IndexDistribution::from_table(
        d, K, std::move(vecs), Eigen::Map<Vector>(probs.data(), Index(probs.size())));
}

}  // namespace

TEST_CASE("index_partition matches the worked example") {
    // i = (3,1,2,1), K = 5
    IndexPartition p = index_partition({3, 1, 2, 1}, 5);
    CHECK(p.sets[0] == std::vector<int>{2, 4});
    CHECK(p.sets[1] == std::vector<int>{3});
    CHECK(p.sets[2] == std::vector<int>{1});
    CHECK(p.sets[3].empty());
    CHECK(p.sets[4].empty());
    CHECK(p.sizes == std::vector<int>{2, 1, 1, 0, 0});
}

TEST_CASE("index_partition trivial cases and errors") {
    IndexPartition con = index_partition({1, 1, 1, 1}, 3);
    CHECK(con.sets[0] == std::vector<int>{1, 2, 3, 4});
    CHECK(con.sizes == std::vector<int>{4, 0, 0});
    IndexPartition perm = index_partition({1, 2}, 2);
    CHECK(perm.sizes == std::vector<int>{1, 1});
    CHECK_THROWS_AS(index_partition({0, 1}, 2), Error);
    CHECK_THROWS_AS(index_partition({3}, 2), Error);
}

TEST_CASE("partition reconstructs the vector") {
    std::vector<int> i{2, 4, 4, 1, 3, 2};
    IndexPartition p = index_partition(i, 4);
    int total = 0;
    for (int k = 1; k <= 4; ++k) {
        total += p.sizes[size_t(k - 1)];
        for (int j : p.sets[size_t(k - 1)]) CHECK(i[size_t(j - 1)] == k);
    }
    CHECK(total == 6);
}

TEST_CASE("ordered classes counts") {
    auto cls = ordered_classes(3, 2);
    REQUIRE(cls.size() == 4);  // binomial(4,3)
    std::vector<size_t> sizes;
    size_t total = 0;
    for (const auto& c : cls) {
        sizes.push_back(c.members.size());
        total += c.members.size();
    }
    CHECK(sizes == std::vector<size_t>{1, 3, 3, 1});
    CHECK(total == 8);  // K^d

    CHECK(ordered_classes(1, 3).size() == 3);
    auto c22 = ordered_classes(2, 2);
    CHECK(c22.size() == 3);
    CHECK(c22[0].members.size() == 1);
    CHECK(c22[1].members.size() == 2);
    CHECK(c22[2].members.size() == 1);

    CHECK_THROWS_AS(ordered_classes(40, 10), Error);  // cap
}

TEST_CASE("explicit table law and invariants") {
    auto dist = table(2, 2, {{1, 1}, {2, 2}}, {0.5, 0.5});
    CHECK(dist.support_size() == 2);
    CHECK(dist.probs().sum() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(table(2, 2, {{1, 1}, {1, 1}}, {0.5, 0.5}), Error);  // duplicate
    CHECK_THROWS_AS(table(2, 2, {{1, 3}}, {1.0}), Error);               // out of range
    CHECK_THROWS_AS(table(2, 2, {{1, 1}, {2, 2}}, {0.5, 0.4}), Error);  // bad mass
}

TEST_CASE("comonotone construction") {
    Vector p(2);
    p << 0.5, 0.5;
    auto dist = IndexDistribution::comonotone_law(2, p);
    REQUIRE(dist.support_size() == 2);
    CHECK(dist.support()[0] == std::vector<int>{1, 1});
    CHECK(dist.support()[1] == std::vector<int>{2, 2});
    CHECK(dist.probs()[0] == doctest::Approx(0.5));
    CHECK(dist.predicates().comonotone);
}

TEST_CASE("bernoulli coupling with independence copula enumerates the product law") {
    auto dist = IndexDistribution::bernoulli_copula({{independence(2), Vector::Constant(2, 0.5)}});
    REQUIRE(dist.support_size() == 4);
    for (Index r = 0; r < 4; ++r) CHECK(dist.probs()[r] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(dist.K() == 2);
}

TEST_CASE("bernoulli coupling with comonotone copula gives the comonotone index law") {
    auto dist = IndexDistribution::bernoulli_copula({{comonotone(3), Vector::Constant(3, 0.25)}});
    REQUIRE(dist.support_size() == 2);
    CHECK(dist.support()[0] == std::vector<int>{1, 1, 1});
    CHECK(dist.probs()[0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(dist.support()[1] == std::vector<int>{2, 2, 2});
    CHECK(dist.probs()[1] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("sum of two bernoulli vectors reaches K = 3") {
    std::vector<std::pair<CopulaPtr, Vector>> terms{
        {independence(2), Vector::Constant(2, 0.5)},
        {independence(2), Vector::Constant(2, 0.5)},
    };
    auto dist = IndexDistribution::bernoulli_copula(terms);
    CHECK(dist.K() == 3);
    // per-coordinate law of I_j - 1 is Binomial(2, 1/2)
    auto m = dist.marginal({1});
    REQUIRE(m.support_size() == 3);
    CHECK(m.probs()[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(m.probs()[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m.probs()[2] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("multinomial shift composition law") {
    Vector q(2);
    q << 0.3, 0.7;
    auto dist = IndexDistribution::multinomial_shift(3, q);  // counts sum to 2
    REQUIRE(dist.support_size() == 3);
    std::map<std::vector<int>, double> probs;
    for (Index r = 0; r < dist.support_size(); ++r)
        probs[dist.support()[size_t(r)]] = dist.probs()[r];
    CHECK(probs[{3, 1}] == doctest::Approx(0.09).epsilon(1e-12));
    CHECK(probs[{2, 2}] == doctest::Approx(2 * 0.3 * 0.7).epsilon(1e-12));
    CHECK(probs[{1, 3}] == doctest::Approx(0.49).epsilon(1e-12));
}

TEST_CASE("copula_quantile enumeration matches the coupling law") {
    // comonotone coupling with equal cells concentrates on the diagonal
    std::vector<Vector> pmfs{Vector::Constant(3, 1.0 / 3), Vector::Constant(3, 1.0 / 3)};
    auto dist = IndexDistribution::copula_quantile(*comonotone(2), pmfs);
    REQUIRE(dist.support_size() == 3);
    for (Index r = 0; r < 3; ++r) {
        CHECK(dist.support()[size_t(r)][0] == dist.support()[size_t(r)][1]);
        CHECK(dist.probs()[r] == doctest::Approx(1.0 / 3).epsilon(1e-12));
    }
    // independence coupling spreads mass over the full grid
    auto indep = IndexDistribution::copula_quantile(*independence(2), pmfs);
    CHECK(indep.support_size() == 9);
}

TEST_CASE("marginal index probabilities") {
    // the 4d example law
    auto dist = table(4, 2, {{1, 1, 2, 2}, {1, 2, 1, 2}, {2, 2, 1, 1}},
                      {0.5, 1.0 / 3.0, 1.0 / 6.0});
    auto m12 = dist.marginal({1, 2});
    std::map<std::vector<int>, double> probs;
    for (Index r = 0; r < m12.support_size(); ++r)
        probs[m12.support()[size_t(r)]] = m12.probs()[r];
    CHECK(probs[{1, 1}] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(probs[{1, 2}] == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(probs[{2, 2}] == doctest::Approx(1.0 / 6).epsilon(1e-14));
    CHECK(m12.probs().sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(dist.marginal({}), Error);
    CHECK_THROWS_AS(dist.marginal({2, 1}), Error);
}

TEST_CASE("sampling determinism, degenerate law and goodness of fit") {
    auto point = table(2, 2, {{1, 2}}, {1.0});
    Mt64Source src(1);
    auto rows = point.sample(src, 5);
    REQUIRE(rows.size() == 5);
    for (const auto& r : rows) CHECK(r == std::vector<int>{1, 2});

    Mt64Source e(3);
    CHECK(point.sample(e, 0).empty());

    auto half = table(2, 2, {{1, 1}, {2, 2}}, {0.5, 0.5});
    Mt64Source s1(99), s2(99);
    auto a = half.sample(s1, 2000), b = half.sample(s2, 2000);
    CHECK(a == b);

    // frequency of (1,1) within 3 binomial sigmas of 1/2 at n = 1e5
    Mt64Source s3(1234);
    auto big = half.sample(s3, 100000);
    Index count = 0;
    for (const auto& r : big) count += (r[0] == 1);
    double freq = double(count) / 1e5;
    CHECK(std::abs(freq - 0.5) < 3.0 * std::sqrt(0.25 / 1e5));

    // chi-square goodness of fit at alpha = 0.001 across the support
    auto skewed = table(2, 3, {{1, 1}, {2, 3}, {3, 2}, {1, 3}}, {0.1, 0.2, 0.3, 0.4});
    Mt64Source s4(777);
    auto draws = skewed.sample(s4, 100000);
    std::map<std::vector<int>, Index> counts;
    for (const auto& r : draws) ++counts[r];
    double chi2 = 0.0;
    for (Index r = 0; r < skewed.support_size(); ++r) {
        double expected = 1e5 * skewed.probs()[r];
        double diff = double(counts[skewed.support()[size_t(r)]]) - expected;
        chi2 += diff * diff / expected;
    }
    CHECK(chi2 < chi_square_quantile(int(skewed.support_size()) - 1, 0.999));
}

TEST_CASE("predicates") {
    auto com = table(2, 2, {{1, 1}, {2, 2}}, {0.5, 0.5});
    auto p = com.predicates();
    CHECK(p.comonotone);
    CHECK_FALSE(p.all_distinct);
    CHECK(p.exchangeable_sufficient);  // constant vectors are their own class

    auto distinct = table(2, 3, {{1, 2}, {2, 3}, {1, 3}},
                          {1.0 / 3, 1.0 / 3, 1.0 / 3});
    auto q = distinct.predicates();
    CHECK(q.all_distinct);
    CHECK_FALSE(q.comonotone);
    CHECK_FALSE(q.exchangeable_sufficient);  // (2,1) carries 0 != 1/3

    // uniform law on {1,2}^3
    std::vector<std::vector<int>> all;
    for (int a = 1; a <= 2; ++a)
        for (int b = 1; b <= 2; ++b)
            for (int c = 1; c <= 2; ++c) all.push_back({a, b, c});
    auto uni = table(3, 2, all, std::vector<double>(8, 0.125));
    CHECK(uni.predicates().exchangeable_sufficient);
}

TEST_CASE("enumerated constructions reproduce the declared per-coordinate laws") {
    // (b): P(I_j = 2) equals the Bernoulli probability p_j
    Vector p(3);
    p << 0.2, 0.5, 0.9;
    auto ber = IndexDistribution::bernoulli_copula({{clayton(2.0, 3), p}});
    for (int j = 1; j <= 3; ++j) {
        auto mj = ber.marginal({j});
        double p2 = 0.0;
        for (Index r = 0; r < mj.support_size(); ++r)
            if (mj.support()[size_t(r)][0] == 2) p2 += mj.probs()[r];
        CHECK(p2 == doctest::Approx(p[j - 1]).epsilon(1e-12));
    }

    // (c): I_j - 1 is Binomial(K-1, q_j)
    Vector q(3);
    q << 0.2, 0.3, 0.5;
    auto multi = IndexDistribution::multinomial_shift(4, q);  // m = 3 trials
    for (int j = 1; j <= 3; ++j) {
        auto mj = multi.marginal({j});
        for (Index r = 0; r < mj.support_size(); ++r) {
            int k = mj.support()[size_t(r)][0] - 1;
            double binom = std::exp(std::lgamma(4.0) - std::lgamma(k + 1.0) -
                                    std::lgamma(4.0 - k)) *
                           std::pow(q[j - 1], k) * std::pow(1 - q[j - 1], 3 - k);
            CHECK(mj.probs()[r] == doctest::Approx(binom).epsilon(1e-11));
        }
    }

    // (d): the coordinate laws equal the declared pmfs
    std::vector<Vector> pmfs{(Vector(3) << 0.5, 0.3, 0.2).finished(),
                             (Vector(3) << 0.1, 0.6, 0.3).finished()};
    auto quant = IndexDistribution::copula_quantile(*gumbel(2.0, 2), pmfs);
    for (int j = 1; j <= 2; ++j) {
        auto mj = quant.marginal({j});
        for (Index r = 0; r < mj.support_size(); ++r) {
            int k = mj.support()[size_t(r)][0];
            CHECK(mj.probs()[r] == doctest::Approx(pmfs[size_t(j - 1)][k - 1]).epsilon(1e-11));
        }
    }

    // (e): P(I = (k,...,k)) = p_k
    Vector w(3);
    w << 0.2, 0.3, 0.5;
    auto com = IndexDistribution::comonotone_law(4, w);
    for (int j = 1; j <= 4; ++j) {
        auto mj = com.marginal({j});
        for (Index r = 0; r < mj.support_size(); ++r)
            CHECK(mj.probs()[r] ==
                  doctest::Approx(w[mj.support()[size_t(r)][0] - 1]).epsilon(1e-14));
    }
}

TEST_CASE("pruning renormalizes tiny mass") {
    auto dist = table(1, 2, {{1}, {2}}, {1.0 - 1e-16, 1e-16});
    CHECK(dist.support_size() == 1);
    CHECK(dist.probs()[0] == doctest::Approx(1.0));
}
