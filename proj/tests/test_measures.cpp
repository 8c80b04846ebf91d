#include <doctest.h>

#include <cmath>

#include "imcop/efgm.hpp"
#include "imcop/measures.hpp"
#include "oracles.hpp"

using namespace imcop;

namespace {

IndexDistribution table(int d, int K, std::vector<std::vector<int>> vecs,
                        std::vector<double> probs) {
    return IndexDistribution::from_table(
        d, K, std::move(vecs), Eigen::Map<Vector>(probs.data(), Index(probs.size())));
}

IndexDistribution half_half(int d) {
    return IndexDistribution::comonotone_law(d, Vector::Constant(2, 0.5));
}

IndexDistribution distinct_pairs() {
    return table(2, 3, {{1, 2}, {2, 3}, {3, 1}}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
}

}  // namespace

TEST_CASE("concordance integral closed forms") {
    auto check = [](const Copula& a, const Copula& b, double expected) {
        ConcordanceIntegral mu = concordance_integral(a, b);
        CHECK(mu.method == MuMethod::ClosedForm);
        CHECK(mu.value == doctest::Approx(expected).epsilon(1e-14));
    };
    check(*independence(2), *independence(2), 0.25);
    check(*comonotone(2), *independence(2), 1.0 / 3.0);
    check(*comonotone(2), *comonotone(2), 0.5);
    check(*countermonotone(), *independence(2), 1.0 / 6.0);
    check(*comonotone(2), *countermonotone(), 0.25);
    check(*efgm2(1.0), *independence(2), 0.25 + 1.0 / 36.0);
    // any-d entries
    check(*comonotone(4), *independence(4), 0.2);
    check(*independence(3), *independence(3), 0.125);
}

TEST_CASE("concordance integral quadrature and qmc paths") {
    // mu(C, M) = integral of the diagonal: Clayton theta=2 diagonal is
    // (2 u^-2 - 1)^{-1/2}; integrate numerically as the oracle
    ConcordanceIntegral mu = concordance_integral(*clayton(2.0, 2), *comonotone(2));
    CHECK(mu.method == MuMethod::Quadrature);
    std::vector<double> x, w;
    gauss_legendre_01(400, x, w);
    double oracle = 0.0;
    for (size_t i = 0; i < x.size(); ++i)
        oracle += w[i] * std::pow(2.0 * std::pow(x[i], -2.0) - 1.0, -0.5);
    CHECK(mu.value == doctest::Approx(oracle).epsilon(1e-10));

    // identity rho_S = 12 mu(C, Pi) - 3 against the Clayton sampler
    ConcordanceIntegral mq = concordance_integral(*clayton(2.0, 2), *independence(2));
    CHECK(mq.method == MuMethod::QuasiMonteCarlo);
    Mt64Source src(1);
    Matrix s = clayton(2.0, 2)->sample(src, 100000);
    double rho_emp = empirical_spearman_pair(s.col(0), s.col(1));
    double sig = oracles::batch_sigma(
        s, [](const Matrix& b) { return empirical_spearman_pair(b.col(0), b.col(1)); });
    CHECK(std::abs((12.0 * mq.value - 3.0) - rho_emp) < 3.0 * sig + 1e-3);

    // bivariate symmetry mu(Ca,Cb) = mu(Cb,Ca) within combined 3 sigma
    ConcordanceIntegral ab = concordance_integral_qmc(*clayton(2.0, 2), *gumbel(2.0, 2));
    ConcordanceIntegral ba = concordance_integral_qmc(*gumbel(2.0, 2), *clayton(2.0, 2));
    double sigma = std::sqrt(ab.std_error * ab.std_error + ba.std_error * ba.std_error);
    CHECK(std::abs(ab.value - ba.value) < 3.0 * sigma + 1e-6);

    // the Gaussian integrand swaps onto the sampling side
    Matrix corr = Matrix::Identity(2, 2);
    corr(0, 1) = corr(1, 0) = 0.6;
    ConcordanceIntegral g = concordance_integral(*gaussian_sample_only(corr), *independence(2));
    CHECK(g.method == MuMethod::QuasiMonteCarlo);
    // rho_S of a Gaussian copula is (6/pi) asin(rho/2); standard identity used
    // here purely as the test oracle
    double rho_gauss = 6.0 / M_PI * std::asin(0.3);
    CHECK(12.0 * g.value - 3.0 == doctest::Approx(rho_gauss).epsilon(2e-2));
}

TEST_CASE("pair measures of catalogue copulas") {
    CHECK(pair_spearman_rho(*efgm2(1.0)) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(pair_kendall_tau(*efgm2(1.0)) == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
    CHECK(pair_kendall_tau(*clayton(2.0, 2)) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(pair_kendall_tau(*gumbel(2.0, 2)) == doctest::Approx(0.5).epsilon(1e-14));
    Matrix corr = Matrix::Identity(2, 2);
    corr(0, 1) = corr(1, 0) = std::sin(M_PI * 0.25);
    CHECK(pair_kendall_tau(*gaussian_sample_only(corr)) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(pair_spearman_rho(*clayton(2.0, 2)->survival()) ==
          doctest::Approx(pair_spearman_rho(*clayton(2.0, 2))).epsilon(1e-12));
}

TEST_CASE("tail dependence matrices") {
    auto m = make_index_mixed({clayton(2.0, 2), independence(2)}, half_half(2));
    PairMeasureMatrix low = tail_dependence_matrix(*m, TailSide::Lower);
    PairMeasureMatrix up = tail_dependence_matrix(*m, TailSide::Upper);
    CHECK(low.values(0, 1) == doctest::Approx(0.5 * std::pow(2.0, -0.5)).epsilon(1e-14));
    CHECK(up.values(0, 1) == doctest::Approx(0.0));
    // numeric diagonal-limit oracle on the pair margin
    auto mix = m->bivariate_margin(1, 2);
    CHECK(low.values(0, 1) == doctest::Approx(oracles::numeric_lower_tail(*mix)).epsilon(1e-3));

    auto md = make_index_mixed({clayton(2.0, 2), gumbel(2.0, 2), comonotone(2)},
                               distinct_pairs());
    PairMeasureMatrix zl = tail_dependence_matrix(*md, TailSide::Lower);
    CHECK(zl.values(0, 1) == 0.0);

    auto mm = make_index_mixed({comonotone(2)},
                               IndexDistribution::comonotone_law(2, Vector::Ones(1)));
    CHECK(tail_dependence_matrix(*mm, TailSide::Lower).values(0, 1) == 1.0);
    CHECK(tail_dependence_matrix(*mm, TailSide::Upper).values(0, 1) == 1.0);

    // bound chain 0 <= lambda <= sum_k p_kk <= 1
    auto m4 = make_index_mixed(
        {clayton(2.0, 4), gumbel(2.0, 4)},
        table(4, 2, {{1, 1, 2, 2}, {1, 2, 1, 2}, {2, 2, 1, 1}}, {0.5, 1.0 / 3.0, 1.0 / 6.0}));
    for (auto side : {TailSide::Lower, TailSide::Upper}) {
        PairMeasureMatrix lam = tail_dependence_matrix(*m4, side);
        for (int j1 = 1; j1 <= 4; ++j1)
            for (int j2 = j1 + 1; j2 <= 4; ++j2) {
                IndexDistribution marg = m4->index().marginal({j1, j2});
                double diag = 0.0;
                for (Index r = 0; r < marg.support_size(); ++r)
                    if (marg.support()[size_t(r)][0] == marg.support()[size_t(r)][1])
                        diag += marg.probs()[r];
                double l = lam.values(j1 - 1, j2 - 1);
                CHECK(l >= 0.0);
                CHECK(l <= diag + 1e-12);
                CHECK(diag <= 1.0 + 1e-12);
            }
    }
}

TEST_CASE("blomqvist beta") {
    auto pm = make_index_mixed({independence(2), comonotone(2)}, half_half(2));
    CHECK(blomqvist_beta_pair(*pm, 1, 2) == doctest::Approx(0.5).epsilon(1e-14));

    auto off = make_index_mixed({independence(2), comonotone(2)},
                                table(2, 2, {{1, 2}, {2, 1}}, {0.5, 0.5}));
    CHECK(blomqvist_beta_pair(*off, 1, 2) == doctest::Approx(0.0).epsilon(1e-14));

    auto cg = make_index_mixed({clayton(2.0, 2), gumbel(2.0, 2)}, half_half(2));
    Vector half = Vector::Constant(2, 0.5);
    double expected = 0.5 * (4.0 * clayton(2.0, 2)->cdf(half) - 1.0) +
                      0.5 * (4.0 * gumbel(2.0, 2)->cdf(half) - 1.0);
    CHECK(blomqvist_beta_pair(*cg, 1, 2) == doctest::Approx(expected).epsilon(1e-14));
    // definitional identity against the margin cdf
    CHECK(blomqvist_beta_pair(*cg, 1, 2) ==
          doctest::Approx(4.0 * cg->bivariate_margin(1, 2)->cdf(half) - 1.0).epsilon(1e-12));
}

TEST_CASE("multivariate blomqvist beta") {
    auto pi3 = as_index_mixed(independence(3));
    CHECK(blomqvist_beta_multivariate(*pi3) == doctest::Approx(0.0).epsilon(1e-14));
    auto m3 = as_index_mixed(comonotone(3));
    CHECK(blomqvist_beta_multivariate(*m3) == doctest::Approx(1.0).epsilon(1e-14));

    auto pm3 = make_index_mixed({independence(3), comonotone(3)}, half_half(3));
    double general = blomqvist_beta_multivariate(*pm3, BetaPath::General);
    double radial = blomqvist_beta_multivariate(*pm3, BetaPath::RadialSymmetric);
    double blocks = blomqvist_beta_multivariate(*pm3, BetaPath::BlockProduct);
    CHECK(general == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(general - radial) < 1e-10);
    CHECK(std::abs(general - blocks) < 1e-10);

    // non-symmetric model: general path still defined via C + C-hat
    auto cl = make_index_mixed({clayton(2.0, 3), independence(3)}, half_half(3));
    double b = blomqvist_beta_multivariate(*cl, BetaPath::General);
    Vector half = Vector::Constant(3, 0.5);
    double expected =
        (4.0 * (cl->cdf(half) + cl->survival_model()->cdf(half)) - 1.0) / 3.0;
    CHECK(b == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("pairwise spearman and kendall of index-mixed models") {
    auto pm = make_index_mixed({independence(2), comonotone(2)}, half_half(2));
    CHECK(spearman_rho_pair(*pm, 1, 2) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(kendall_tau_pair(*pm, 1, 2) == doctest::Approx(5.0 / 12.0).epsilon(1e-14));

    auto ef = as_index_mixed(efgm2(1.0));
    CHECK(spearman_rho_pair(*ef, 1, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(kendall_tau_pair(*ef, 1, 2) == doctest::Approx(2.0 / 9.0).epsilon(1e-14));

    auto md = make_index_mixed({clayton(2.0, 2), gumbel(2.0, 2), comonotone(2)},
                               distinct_pairs());
    CHECK(spearman_rho_pair(*md, 1, 2) == doctest::Approx(0.0));
    CHECK(kendall_tau_pair(*md, 1, 2) == doctest::Approx(0.0));

    // EFGM attains at most 1/3 while index-mixing reaches 1/2 here: the
    // strict concordance-range comparison
    CHECK(spearman_rho_pair(*ef, 1, 2) < spearman_rho_pair(*pm, 1, 2) - 0.1);
}

TEST_CASE("pairwise measures against empirical oracles") {
    struct Case {
        std::shared_ptr<const IndexMixedCopula> m;
        std::uint64_t seed;
    };
    std::vector<Case> fleet{
        {make_index_mixed({independence(2), comonotone(2)}, half_half(2)), 2021},
        {make_index_mixed({clayton(2.0, 2), gumbel(2.0, 2)}, half_half(2)), 2022},
        {make_index_mixed({clayton(2.0, 2), independence(2)},
                          table(2, 2, {{1, 1}, {1, 2}, {2, 1}, {2, 2}},
                                {0.4, 0.2, 0.1, 0.3})),
         2023},
        {as_index_mixed(efgm2(-1.0)), 2024},
    };
    const Index n = 100000;
    for (const auto& cs : fleet) {
        Mt64Source src(cs.seed);
        Matrix s = cs.m->sample_efficient(src, n);
        double rho = spearman_rho_pair(*cs.m, 1, 2);
        double tau = kendall_tau_pair(*cs.m, 1, 2);
        double beta = blomqvist_beta_pair(*cs.m, 1, 2);
        double rho_hat = empirical_spearman_pair(s.col(0), s.col(1));
        double tau_hat = empirical_kendall_pair(s.col(0), s.col(1));
        double beta_hat = empirical_blomqvist(s).values(0, 1);
        auto sig = [&](auto stat) { return oracles::batch_sigma(s, stat); };
        CHECK(std::abs(rho - rho_hat) <
              3.0 * sig([](const Matrix& b) {
                  return empirical_spearman_pair(b.col(0), b.col(1));
              }));
        CHECK(std::abs(tau - tau_hat) <
              3.0 * sig([](const Matrix& b) {
                  return empirical_kendall_pair(b.col(0), b.col(1));
              }));
        CHECK(std::abs(beta - beta_hat) <
              3.0 * sig([](const Matrix& b) { return empirical_blomqvist(b).values(0, 1); }));
    }
}

TEST_CASE("multivariate spearman") {
    auto pi4 = as_index_mixed(independence(4));
    CHECK(multivariate_spearman(*pi4, SpearmanVariant::Lower) == doctest::Approx(0.0));
    CHECK(multivariate_spearman(*pi4, SpearmanVariant::Upper) == doctest::Approx(0.0));

    // d=2 reduction onto the pairwise value
    auto pm = make_index_mixed({independence(2), comonotone(2)}, half_half(2));
    for (auto v : {SpearmanVariant::Lower, SpearmanVariant::Upper, SpearmanVariant::Center})
        CHECK(multivariate_spearman(*pm, v) == doctest::Approx(0.5).epsilon(1e-9));
    auto cg = make_index_mixed({clayton(2.0, 2), gumbel(2.0, 2)},
                               table(2, 2, {{1, 1}, {1, 2}, {2, 2}}, {0.35, 0.4, 0.25}));
    double pairwise = spearman_rho_pair(*cg, 1, 2);
    CHECK(multivariate_spearman(*cg, SpearmanVariant::Lower) ==
          doctest::Approx(pairwise).epsilon(5e-3));

    // d=3 half-half (Pi, M): closed value 1/2 both ways, checked against the
    // rank-statistic estimator
    auto pm3 = make_index_mixed({independence(3), comonotone(3)}, half_half(3));
    double lo = multivariate_spearman(*pm3, SpearmanVariant::Lower);
    double up = multivariate_spearman(*pm3, SpearmanVariant::Upper);
    CHECK(lo == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(up == doctest::Approx(0.5).epsilon(1e-12));
    Mt64Source src(31415);
    Matrix s = pm3->sample_efficient(src, 100000);
    double lo_hat = empirical_multivariate_spearman(s, SpearmanVariant::Lower);
    double sig = oracles::batch_sigma(s, [](const Matrix& b) {
        return empirical_multivariate_spearman(b, SpearmanVariant::Lower);
    });
    CHECK(std::abs(lo - lo_hat) < 3.0 * sig);

    // exchangeable Clayton blocks: lower and upper differ (no radial symmetry)
    auto cl3 = make_index_mixed({clayton(2.0, 3), independence(3)}, half_half(3));
    double clo = multivariate_spearman(*cl3, SpearmanVariant::Lower);
    double cup = multivariate_spearman(*cl3, SpearmanVariant::Upper);
    CHECK(clo != doctest::Approx(cup).epsilon(1e-4));
    Mt64Source src2(2718);
    Matrix s2 = cl3->sample_efficient(src2, 100000);
    for (auto [variant, value] :
         std::vector<std::pair<SpearmanVariant, double>>{{SpearmanVariant::Lower, clo},
                                                         {SpearmanVariant::Upper, cup}}) {
        double hat = empirical_multivariate_spearman(s2, variant);
        double sg = oracles::batch_sigma(s2, [variant](const Matrix& b) {
            return empirical_multivariate_spearman(b, variant);
        });
        CHECK(std::abs(value - hat) < 3.0 * sg + 2e-3);
    }
}

TEST_CASE("orthant dependence") {
    auto pm = make_index_mixed({independence(2), comonotone(2)},
                               table(2, 2, {{1, 1}, {1, 2}, {2, 2}}, {0.3, 0.4, 0.3}));
    OrthantReport rep = orthant_dependence_check(*pm, 21);
    CHECK(rep.plod);
    CHECK(rep.puod);
    CHECK(rep.pod);

    auto w = make_index_mixed({countermonotone()},
                              IndexDistribution::comonotone_law(2, Vector::Ones(1)));
    OrthantReport wrep = orthant_dependence_check(*w, 21);
    CHECK_FALSE(wrep.plod);
    CHECK(wrep.witness_lower.has_value());

    auto cg = make_index_mixed({clayton(2.0, 2), gumbel(2.0, 2)}, half_half(2));
    OrthantReport crep = orthant_dependence_check(*cg, 21);
    CHECK(crep.pod);
}

TEST_CASE("concordance ordering") {
    // same index, W vs Pi in each slot: lower order holds
    auto idx = table(2, 2, {{1, 1}, {2, 2}, {1, 2}}, {0.4, 0.4, 0.2});
    auto a = make_index_mixed({countermonotone(), countermonotone()}, idx);
    auto b = make_index_mixed({independence(2), independence(2)}, idx);
    OrderVerdict v = concordance_compare(*a, *b, 21);
    CHECK(v.lower == OrderRel::LessOrEqual);

    // the ordering counterexample: Pi vs (1/4)M + (1/4)W + (1/2)Pi
    auto pi = independence(2);
    auto mix = finite_mixture({0.25, 0.25, 0.5},
                              {comonotone(2), countermonotone(), independence(2)});
    OrderVerdict cx = concordance_compare(*pi, *mix, 21);
    CHECK(cx.lower == OrderRel::Incomparable);
    REQUIRE(cx.lower_witness_above.has_value());
    REQUIRE(cx.lower_witness_below.has_value());
    // the two disagreement regions sit on opposite sides: Pi above near
    // (.75,.25), below near (.75,.75)
    const Vector& above = *cx.lower_witness_above;  // Pi > mixture here
    CHECK(std::abs(above[0] - above[1]) > 0.2);     // off-diagonal corner
    const Vector& below = *cx.lower_witness_below;
    CHECK(std::abs(below[0] - below[1]) < 0.6);

    OrderVerdict self = concordance_compare(*mix, *mix, 11);
    CHECK(self.lower == OrderRel::Equal);
    CHECK(self.upper == OrderRel::Equal);

    CHECK_THROWS_AS(concordance_compare(*independence(2), *independence(3), 5), Error);
}

TEST_CASE("empirical estimators on degenerate samples") {
    Mt64Source src(77);
    Matrix s(1000, 2);
    for (Index i = 0; i < s.rows(); ++i) {
        double u = src.next01();
        s(i, 0) = u;
        s(i, 1) = u;
    }
    CHECK(empirical_kendall(s).values(0, 1) == doctest::Approx(1.0));
    CHECK(empirical_spearman(s).values(0, 1) == doctest::Approx(1.0));
    CHECK(empirical_blomqvist(s).values(0, 1) == doctest::Approx(1.0).epsilon(2e-3));
    s.col(1) = Vector::Ones(s.rows()) - s.col(0);  // reversed ranks
    CHECK(empirical_kendall(s).values(0, 1) == doctest::Approx(-1.0));
    CHECK(empirical_spearman(s).values(0, 1) == doctest::Approx(-1.0));
    Matrix tiny(1, 2);
    CHECK_THROWS_AS(empirical_kendall(tiny), Error);
}

TEST_CASE("efgm concordance range") {
    ConcordanceRangeReport rep = efgm_concordance_range();
    CHECK(rep.rho_closed_at_plus1 == doctest::Approx(1.0 / 3.0));
    CHECK(rep.tau_closed_at_plus1 == doctest::Approx(2.0 / 9.0));
    CHECK(std::abs(rep.rho_integral_at_plus1 - 1.0 / 3.0) <
          3.0 * rep.rho_integral_sigma + 1e-3);
    CHECK(std::abs(rep.rho_integral_at_minus1 + 1.0 / 3.0) <
          3.0 * rep.rho_integral_sigma + 1e-3);
    CHECK(std::abs(rep.tau_integral_at_plus1 - 2.0 / 9.0) <
          3.0 * rep.tau_integral_sigma + 1e-3);
    CHECK(std::abs(rep.tau_integral_at_minus1 + 2.0 / 9.0) <
          3.0 * rep.tau_integral_sigma + 1e-3);
}
