#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "imcop/io.hpp"
#include "imcop/json_model.hpp"
#include "imcop/measures.hpp"

using namespace imcop;

namespace {

Json parse_text(const std::string& text) { return Json::parse(text); }

}  // namespace

TEST_CASE("copula descriptors parse to the right families") {
    CHECK(parse_copula(parse_text(R"({"kind":"independence","dim":3})"))->family() ==
          Family::Independence);
    CHECK(parse_copula(parse_text(R"({"kind":"comonotone","dim":2})"))->family() ==
          Family::Comonotone);
    CHECK(parse_copula(parse_text(R"({"kind":"countermonotone"})"))->dim() == 2);
    auto cl = parse_copula(parse_text(R"({"kind":"clayton","theta":2.0,"dim":4})"));
    CHECK(cl->family() == Family::Clayton);
    CHECK(cl->dim() == 4);
    auto gu = parse_copula(parse_text(R"({"kind":"gumbel","theta":3.5,"dim":2})"));
    CHECK(static_cast<const GumbelCopula&>(*gu).theta() == 3.5);
    auto ga = parse_copula(parse_text(R"({"kind":"gaussian","rho":[[1.0,0.5],[0.5,1.0]]})"));
    CHECK(ga->family() == Family::Gaussian);
    auto mix = parse_copula(parse_text(
        R"({"kind":"mixture","weights":[0.5,0.5],
            "components":[{"kind":"independence","dim":2},{"kind":"comonotone","dim":2}]})"));
    CHECK(mix->family() == Family::Mixture);
    auto sur = parse_copula(parse_text(
        R"({"kind":"survival","of":{"kind":"clayton","theta":2.0,"dim":2}})"));
    CHECK(sur->family() == Family::Survival);
}

TEST_CASE("efgm descriptors, both spellings") {
    auto direct = parse_copula(parse_text(R"({"kind":"efgm","d":2,"thetas":{"1,2":0.5}})"));
    CHECK(direct->family() == Family::Efgm);
    auto wrapped = parse_copula(parse_text(R"({"efgm":{"d":2,"thetas":{"1,2":0.5}}})"));
    Vector u(2);
    u << 0.3, 0.7;
    CHECK(wrapped->cdf(u) == doctest::Approx(direct->cdf(u)).epsilon(1e-15));
    auto law = parse_copula(parse_text(
        R"({"efgm_bernoulli":{"kind":"comonotone","d":2,"p":0.5}})"));
    CHECK(static_cast<const EfgmCopula&>(*law).theta2() == doctest::Approx(1.0));
    // three-dimensional subset keys
    auto p3 = parse_efgm_parameters(
        parse_text(R"({"d":3,"thetas":{"1,2":0.2,"1,2,3":-0.1}})"));
    CHECK(p3.thetas.at(0b011) == 0.2);
    CHECK(p3.thetas.at(0b111) == -0.1);
}

TEST_CASE("index distribution descriptors") {
    auto tab = parse_index_distribution(parse_text(
        R"({"kind":"table","d":2,"K":2,
            "entries":[{"i":[1,1],"p":0.5},{"i":[2,2],"p":0.5}]})"));
    CHECK(tab.predicates().comonotone);

    auto com = parse_index_distribution(parse_text(
        R"({"kind":"comonotone","d":3,"p":[0.25,0.75]})"));
    CHECK(com.d() == 3);
    CHECK(com.K() == 2);

    auto ber = parse_index_distribution(parse_text(
        R"({"kind":"bernoulli_copula","copula":{"kind":"independence","dim":2},"p":0.5})"));
    CHECK(ber.support_size() == 4);

    auto multi = parse_index_distribution(parse_text(
        R"({"kind":"multinomial_shift","K":3,"q":[0.5,0.5]})"));
    CHECK(multi.K() == 3);

    auto quant = parse_index_distribution(parse_text(
        R"({"kind":"copula_quantile","copula":{"kind":"comonotone","dim":2},
            "pmfs":[[0.5,0.5],[0.5,0.5]]})"));
    CHECK(quant.support_size() == 2);
}

TEST_CASE("nested index-mixed descriptors compose") {
    auto model = parse_copula(parse_text(R"({
        "kind":"index_mixed",
        "bases":[
            {"kind":"index_mixed",
             "bases":[{"kind":"clayton","theta":2.0,"dim":2},{"kind":"independence","dim":2}],
             "index":{"kind":"comonotone","d":2,"p":[0.5,0.5]}},
            {"kind":"comonotone","dim":2}
        ],
        "index":{"kind":"comonotone","d":2,"p":[0.5,0.5]}
    })"));
    CHECK(model->family() == Family::IndexMixed);
    Vector u(2);
    u << 0.4, 0.6;
    double inner = 0.5 * clayton(2.0, 2)->cdf(u) + 0.5 * 0.24;
    CHECK(model->cdf(u) == doctest::Approx(0.5 * inner + 0.5 * 0.4).epsilon(1e-14));
}

TEST_CASE("config errors carry their JSON path") {
    auto path_of = [](auto fn) -> std::string {
        try {
            fn();
        } catch (const ConfigError& e) {
            return e.path();
        }
        return "";
    };
    CHECK(path_of([] {
              parse_copula(parse_text(R"({"kind":"clayton","dim":2})"));
          }) == "/theta");
    CHECK(path_of([] {
              parse_copula(parse_text(R"({"kind":"warp","dim":2})"));
          }) == "/kind");
    CHECK(path_of([] {
              parse_copula(parse_text(
                  R"({"kind":"mixture","weights":[0.5],"components":[
                      {"kind":"independence","dim":2},{"kind":"comonotone","dim":2}]})"));
          }) == "/components");
    CHECK(path_of([] {
              parse_copula(parse_text(R"({"kind":"clayton","theta":-1.0,"dim":2})"));
          }) == "/");  // library-level violation surfaces at the descriptor root
    CHECK(path_of([] {
              parse_index_distribution(parse_text(
                  R"({"kind":"table","d":2,"K":2,"entries":[{"i":[1,3],"p":1.0}]})"));
          }) == "/");
    CHECK(path_of([] {
              parse_copula(parse_text(R"({
                  "kind":"index_mixed",
                  "bases":[{"kind":"independence","dim":2}],
                  "index":{"kind":"comonotone","d":2,"p":[0.5,0.5]}
              })"));
          }) == "/");  // K mismatch reported against the model object
    CHECK(path_of([] {
              parse_index_distribution(parse_text(
                  R"({"kind":"comonotone","d":2,"p":[0.5]})"));
          }) == "/");  // bad probability mass surfaces at the descriptor root
    CHECK(path_of([] {
              parse_index_distribution(parse_text(
                  R"({"kind":"table","d":2,"K":2,"entries":[{"i":[1],"p":1.0}]})"));
          }) == "/entries/0/i");
    CHECK(path_of([] {
              parse_joint_model(parse_text(
                  R"({"margins":{"exp":-2.0},
                      "copula":{"kind":"index_mixed",
                                "bases":[{"kind":"comonotone","dim":2},
                                         {"kind":"independence","dim":2}],
                                "index":{"kind":"comonotone","d":2,"p":[0.5,0.5]}}})"));
          }) == "/margins");
}

TEST_CASE("joint model parsing") {
    JointModel jm = parse_joint_model(parse_text(R"({
        "margins": {"exp": 2.0},
        "copula": {"kind":"index_mixed",
                   "bases":[{"kind":"comonotone","dim":3},{"kind":"independence","dim":3}],
                   "index":{"kind":"comonotone","d":3,"p":[0.5,0.5]}}
    })"));
    CHECK(jm.margins.size() == 3);
    CHECK(std::get<ExponentialMargin>(jm.margins[0]).rate == 2.0);
    // per-coordinate list with a point mass
    JointModel jm2 = parse_joint_model(parse_text(R"({
        "margins": [{"exp": 1.0}, {"point_mass": 3.0}],
        "copula": {"kind":"index_mixed",
                   "bases":[{"kind":"comonotone","dim":2},{"kind":"independence","dim":2}],
                   "index":{"kind":"comonotone","d":2,"p":[0.5,0.5]}}
    })"));
    CHECK(std::get<PointMassMargin>(jm2.margins[1]).value == 3.0);
}

TEST_CASE("csv round trip and determinism") {
    Matrix m(3, 2);
    m << 0.1234567890123456789, 1.0 / 3.0, 0.59375, 1e-17, 1.0, 0.0;
    std::string file = "/tmp/imcop_test_roundtrip.csv";
    write_csv(file, {"a", "b"}, m);
    std::vector<std::string> header;
    Matrix back = read_csv(file, &header);
    CHECK(header == std::vector<std::string>{"a", "b"});
    // 17 significant digits round-trip doubles exactly
    CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);

    // same seed, same model: byte-identical files
    auto model = parse_copula(parse_text(
        R"({"kind":"index_mixed",
            "bases":[{"kind":"clayton","theta":2.0,"dim":2},{"kind":"gumbel","theta":2.0,"dim":2}],
            "index":{"kind":"comonotone","d":2,"p":[0.5,0.5]}})"));
    auto imc = as_index_mixed(model);
    for (int rep = 0; rep < 2; ++rep) {
        Mt64Source src(4242);
        write_csv("/tmp/imcop_det_" + std::to_string(rep) + ".csv", {"u1", "u2"},
                  imc->sample_efficient(src, 500));
    }
    std::ifstream f1("/tmp/imcop_det_0.csv", std::ios::binary);
    std::ifstream f2("/tmp/imcop_det_1.csv", std::ios::binary);
    std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(s1 == s2);
    CHECK(s1.find("\r\n") != std::string::npos);
    std::remove(file.c_str());
    std::remove("/tmp/imcop_det_0.csv");
    std::remove("/tmp/imcop_det_1.csv");
}

TEST_CASE("svg scatter output is well formed") {
    Mt64Source src(5);
    Matrix s = independence(2)->sample(src, 100);
    std::string file = "/tmp/imcop_test_scatter.svg";
    write_scatter_svg(file, s.col(0), s.col(1), "u1", "u2");
    std::ifstream in(file);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text.find("<svg") == 0);
    CHECK(text.find("width=\"1000\"") != std::string::npos);
    CHECK(text.find("<circle") != std::string::npos);
    CHECK(text.find("</svg>") != std::string::npos);
    std::remove(file.c_str());
}

TEST_CASE("the shipped example configs parse") {
    for (const char* name :
         {"clayton_gumbel_2d", "comonotone_mm_2d", "clayton_gumbel_comonotone_index_2d",
          "gumbel_gauss_4d", "ordering_counterexample", "pi_m_half"}) {
        Json j = load_json_file(std::string(IMCOP_CONFIG_DIR) + "/" + name + ".json");
        CHECK(parse_model_config(j)->dim() >= 2);
    }
    for (const char* name : {"sumdist_d2_halfhalf", "sumdist_d5_halfhalf"}) {
        Json j = load_json_file(std::string(IMCOP_CONFIG_DIR) + "/" + name + ".json");
        JointModel jm = parse_joint_model(j);
        CHECK(exp_sum_distribution(jm).mean() == doctest::Approx(jm.copula->dim()));
    }
}
