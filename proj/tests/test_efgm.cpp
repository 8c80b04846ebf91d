#include <doctest.h>

#include <cmath>

#include "imcop/efgm.hpp"
#include "imcop/measures.hpp"
#include "oracles.hpp"

using namespace imcop;

namespace {

// radially symmetrized random law: p(b) <- (p(b) + p(~b))/2 has Ber(1/2) margins
BernoulliVectorLaw random_symmetric_law(int d, Mt64Source& src) {
    const std::uint32_t n = std::uint32_t(1) << d;
    std::vector<double> p(n);
    double sum = 0.0;
    for (auto& x : p) {
        x = src.next01();
        sum += x;
    }
    for (auto& x : p) x /= sum;
    std::vector<std::uint32_t> bits;
    std::vector<double> probs;
    for (std::uint32_t b = 0; b < n; ++b) {
        bits.push_back(b);
        probs.push_back(0.5 * (p[b] + p[(n - 1) & ~b]));
    }
    return BernoulliVectorLaw(d, std::move(bits),
                              Eigen::Map<Vector>(probs.data(), Index(probs.size())));
}

// mixture form E_B[prod_j F_{(B_j+1)}(u_j)] evaluated straight off the law
double mixture_form_cdf(const BernoulliVectorLaw& law, const Vector& u) {
    double total = 0.0;
    for (size_t i = 0; i < law.support().size(); ++i) {
        double prod = 1.0;
        for (int j = 0; j < law.d(); ++j) {
            bool b = (law.support()[i] >> j) & 1u;
            prod *= b ? u[j] * u[j] : u[j] * (2.0 - u[j]);
        }
        total += law.probs()[Index(i)] * prod;
    }
    return total;
}

}  // namespace

TEST_CASE("thetas from Bernoulli laws") {
    auto indep = BernoulliVectorLaw::independent(3, Vector::Constant(3, 0.5));
    CHECK(thetas_from_bernoulli(indep).thetas.empty());  // EFGM = Pi

    auto com2 = BernoulliVectorLaw::comonotone(2, 0.5);
    EfgmParameters p2 = thetas_from_bernoulli(com2);
    REQUIRE(p2.thetas.count(0b11) == 1);
    CHECK(p2.thetas[0b11] == doctest::Approx(1.0).epsilon(1e-14));

    auto com3 = BernoulliVectorLaw::comonotone(3, 0.5);
    EfgmParameters p3 = thetas_from_bernoulli(com3);
    CHECK(p3.thetas[0b011] == doctest::Approx(1.0));
    CHECK(p3.thetas[0b101] == doctest::Approx(1.0));
    CHECK(p3.thetas[0b110] == doctest::Approx(1.0));
    CHECK(p3.thetas.count(0b111) == 0);  // E[(-1)^{3B}] = 0

    auto skew = BernoulliVectorLaw::independent(2, Vector::Constant(2, 0.3));
    CHECK_THROWS_AS(thetas_from_bernoulli(skew), Error);
}

TEST_CASE("classical cdf and density values") {
    EfgmParameters p = efgm_pair_parameters(1.0);
    Vector u(2);
    u << 0.5, 0.5;
    CHECK(efgm_cdf(p, u) == doctest::Approx(0.3125).epsilon(1e-15));
    u << 0.4, 1.0;
    CHECK(efgm_cdf(p, u) == doctest::Approx(0.4).epsilon(1e-15));  // uniform margin
    u << 1e-12, 1e-12;
    CHECK(efgm_density(p, u) == doctest::Approx(2.0).epsilon(1e-9));
    u << 1.0 - 1e-12, 1e-12;
    CHECK(efgm_density(p, u) == doctest::Approx(0.0).epsilon(1e-9));

    EfgmParameters zero;
    zero.d = 3;
    Vector v = Vector::Constant(3, 0.63);
    CHECK(efgm_cdf(zero, v) == doctest::Approx(std::pow(0.63, 3)).epsilon(1e-14));
}

TEST_CASE("admissibility brute force") {
    CHECK(efgm_admissible(efgm_pair_parameters(1.0)).admissible);
    AdmissibilityResult bad = efgm_admissible(efgm_pair_parameters(1.5));
    CHECK_FALSE(bad.admissible);
    REQUIRE(bad.witness.size() == 2);
    // the witness sign vector makes 1 + 1.5 e1 e2 negative
    CHECK(bad.witness[0] * bad.witness[1] == -1);
    CHECK(1.0 + 1.5 * bad.witness[0] * bad.witness[1] < 0.0);
    CHECK_THROWS_AS(efgm2(1.5), Error);

    // every generative law yields admissible parameters
    Mt64Source src(31);
    for (int rep = 0; rep < 40; ++rep) {
        int d = 2 + rep % 3;
        auto law = random_symmetric_law(d, src);
        CHECK(efgm_admissible(thetas_from_bernoulli(law)).admissible);
    }
}

TEST_CASE("mixture form equals classical form on a grid") {
    Mt64Source src(77);
    for (int rep = 0; rep < 50; ++rep) {
        int d = 2 + rep % 3;
        auto law = random_symmetric_law(d, src);
        EfgmParameters p = thetas_from_bernoulli(law);
        for (const auto& u : oracles::grid_points(d, 3))
            CHECK(efgm_cdf(p, u) == doctest::Approx(mixture_form_cdf(law, u)).epsilon(1e-12));
    }
}

TEST_CASE("law reconstruction from thetas") {
    Mt64Source src(5151);
    for (int rep = 0; rep < 10; ++rep) {
        auto law = random_symmetric_law(3, src);
        EfgmParameters p = thetas_from_bernoulli(law);
        auto law2 = bernoulli_from_thetas(p);
        EfgmParameters p2 = thetas_from_bernoulli(law2);
        for (const auto& [mask, theta] : p.thetas)
            CHECK(p2.thetas[mask] == doctest::Approx(theta).epsilon(1e-12));
    }
}

TEST_CASE("sorted-matrix sampler matches the copula") {
    auto com = BernoulliVectorLaw::comonotone(2, 0.5);
    Mt64Source src(42);
    CHECK(efgm_sample(com, src, 0).rows() == 0);

    const Index n = 100000;
    Matrix s = efgm_sample(com, src, n);
    double rho = empirical_spearman_pair(s.col(0), s.col(1));
    double tau = empirical_kendall_pair(s.col(0), s.col(1));
    double sig_rho = oracles::batch_sigma(
        s, [](const Matrix& b) { return empirical_spearman_pair(b.col(0), b.col(1)); });
    double sig_tau = oracles::batch_sigma(
        s, [](const Matrix& b) { return empirical_kendall_pair(b.col(0), b.col(1)); });
    CHECK(std::abs(rho - 1.0 / 3.0) < 3.0 * sig_rho);
    CHECK(std::abs(tau - 2.0 / 9.0) < 3.0 * sig_tau);

    auto ind = BernoulliVectorLaw::independent(2, Vector::Constant(2, 0.5));
    Mt64Source src2(43);
    Matrix si = efgm_sample(ind, src2, n);
    double rho0 = empirical_spearman_pair(si.col(0), si.col(1));
    CHECK(std::abs(rho0) < 3.0 / std::sqrt(double(n)));

    // empirical cdf against the classical form at sprinkled points
    EfgmParameters p = thetas_from_bernoulli(com);
    Mt64Source pts(9);
    for (int rep = 0; rep < 20; ++rep) {
        Vector u(2);
        u << 0.1 + 0.8 * pts.next01(), 0.1 + 0.8 * pts.next01();
        double target = efgm_cdf(p, u);
        Index count = 0;
        for (Index i = 0; i < n; ++i) count += (s(i, 0) <= u[0] && s(i, 1) <= u[1]);
        double sigma = std::sqrt(target * (1.0 - target) / double(n));
        CHECK(std::abs(double(count) / double(n) - target) < 3.0 * sigma);
    }

    // margins stay uniform
    for (Index j = 0; j < 2; ++j)
        CHECK(ks_uniform_statistic(s.col(j)) < ks_critical(0.001, n));
}

TEST_CASE("efgm copula family plugs into the catalogue") {
    auto e = efgm2(1.0);
    CHECK(e->capability().cdf);
    CHECK(e->capability().density);
    Mt64Source src(4);
    Matrix s = e->sample(src, 50000);
    CHECK(ks_uniform_statistic(s.col(0)) < ks_critical(0.001, s.rows()));
    double rho = empirical_spearman_pair(s.col(0), s.col(1));
    CHECK(std::abs(rho - 1.0 / 3.0) < 4.0 / std::sqrt(5e4));

    // survival flips odd-cardinality thetas: for a pairwise theta nothing changes
    EfgmParameters p3;
    p3.d = 3;
    p3.thetas[0b111] = 0.5;
    auto s3 = efgm(p3)->survival();
    const auto& flipped = static_cast<const EfgmCopula&>(*s3).params();
    CHECK(flipped.thetas.at(0b111) == doctest::Approx(-0.5));
}
