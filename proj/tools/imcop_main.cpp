// Command-line front end: sampling, exact evaluation, dependence measures,
// sum distributions, EFGM reports and the verification fleet, driven by JSON
// model descriptors. Exit codes: 0 success, 1 verification failure, 2 config
// error.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>

#include "imcop/io.hpp"
#include "imcop/json_model.hpp"
#include "imcop/measures.hpp"
#include "imcop/special_functions.hpp"
#include "imcop/sums.hpp"
#include "imcop/verify.hpp"

namespace fs = std::filesystem;
using namespace imcop;

namespace {

struct GlobalOpts {
    std::string config;
    std::uint64_t seed = 42;
    std::string out = ".";
    int threads = 1;
};

std::string out_path(const GlobalOpts& g, const std::string& name) {
    fs::create_directories(g.out);
    return (fs::path(g.out) / name).string();
}

Json load_config(const GlobalOpts& g) {
    if (g.config.empty()) throw ConfigError("/", "--config is required for this command");
    return load_json_file(g.config);
}

std::vector<std::string> sample_header(int d) {
    std::vector<std::string> h;
    for (int j = 1; j <= d; ++j) h.push_back("u" + std::to_string(j));
    return h;
}

void write_pair_scatters(const GlobalOpts& g, const Matrix& s) {
    const int d = int(s.cols());
    if (d > 6) return;
    for (int a = 1; a <= d; ++a)
        for (int b = a + 1; b <= d; ++b)
            write_scatter_svg(out_path(g, "scatter_u" + std::to_string(a) + "_u" +
                                              std::to_string(b) + ".svg"),
                              s.col(a - 1), s.col(b - 1), "u" + std::to_string(a),
                              "u" + std::to_string(b));
}

int cmd_sample(const GlobalOpts& g, Index n, const std::string& algorithm, bool plot) {
    CopulaPtr model = parse_model_config(load_config(g));
    Matrix s;
    if (algorithm == "seq" || algorithm == "vec" || algorithm == "eff") {
        auto imc = as_index_mixed(model);
        if (algorithm == "seq") {
            Mt64Source src(g.seed);
            s = imc->sample_sequential(src, n);
        } else if (algorithm == "vec") {
            s = imc->sample_vectorized_parallel(g.seed, n, g.threads);
        } else {
            Mt64Source src(g.seed);
            s = imc->sample_efficient(src, n);
        }
    } else {
        throw ConfigError("/algorithm", "unknown algorithm '" + algorithm + "'");
    }
    std::string file = out_path(g, "sample.csv");
    write_csv(file, sample_header(int(s.cols())), s);
    std::cout << "wrote " << file << " (" << s.rows() << " rows, algorithm " << algorithm
              << ", seed " << g.seed << ")\n";
    if (plot && n > 0) write_pair_scatters(g, s);
    return 0;
}

int cmd_evaluate(const GlobalOpts& g, const std::string& points_file) {
    CopulaPtr model = parse_model_config(load_config(g));
    std::vector<std::string> header;
    Matrix pts = read_csv(points_file, &header);
    if (int(pts.cols()) != model->dim())
        throw ConfigError("/points", "points file has " + std::to_string(pts.cols()) +
                                         " columns, model dimension is " +
                                         std::to_string(model->dim()));
    bool with_density = model->capability().density;
    Matrix out(pts.rows(), pts.cols() + 1 + (with_density ? 1 : 0));
    for (Index i = 0; i < pts.rows(); ++i) {
        out.row(i).head(pts.cols()) = pts.row(i);
        Vector u = pts.row(i).transpose();
        try {
            out(i, pts.cols()) = model->cdf(u);
            if (with_density) {
                bool interior = true;
                for (Index j = 0; j < u.size(); ++j)
                    interior &= (u[j] > 0.0 && u[j] < 1.0);
                out(i, pts.cols() + 1) =
                    interior ? model->density(u) : std::numeric_limits<double>::quiet_NaN();
            }
        } catch (const Error& e) {
            std::cerr << "row " << (i + 1) << ": " << e.what() << "\n";
            out(i, pts.cols()) = std::numeric_limits<double>::quiet_NaN();
            if (with_density)
                out(i, pts.cols() + 1) = std::numeric_limits<double>::quiet_NaN();
        }
    }
    std::vector<std::string> h = sample_header(int(pts.cols()));
    h.push_back("C");
    if (with_density) h.push_back("c");
    std::string file = out_path(g, "evaluate.csv");
    write_csv(file, h, out);
    for (Index i = 0; i < out.rows(); ++i) {
        std::cout << "C(";
        for (Index j = 0; j < pts.cols(); ++j)
            std::cout << (j ? "," : "") << format_g17(pts(i, j));
        std::cout << ") = " << format_g17(out(i, pts.cols())) << "\n";
    }
    std::cout << "wrote " << file << "\n";
    return 0;
}

Json matrix_json(const Matrix& m) {
    Json rows = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

int cmd_measures(const GlobalOpts& g, bool with_verify, Index n) {
    CopulaPtr model = parse_model_config(load_config(g));
    auto m = as_index_mixed(model);
    QmcBudget budget;
    budget.seed = g.seed;
    Json rep;
    rep["dim"] = m->dim();
    rep["seed"] = g.seed;
    rep["method"] = {{"qmc_n", budget.n}, {"qmc_seed", budget.seed}};

    // per-pair reporting: unavailable entries become null, the rest are kept
    auto pair_guarded = [&](const char* key, auto fn) {
        Json rows = Json::array();
        for (int j1 = 1; j1 <= m->dim(); ++j1) {
            Json row = Json::array();
            for (int j2 = 1; j2 <= m->dim(); ++j2) {
                if (j1 == j2) {
                    row.push_back(1.0);
                    continue;
                }
                try {
                    row.push_back(fn(std::min(j1, j2), std::max(j1, j2)));
                } catch (const Error&) {
                    row.push_back(nullptr);
                }
            }
            rows.push_back(row);
        }
        rep["pairwise"][key] = rows;
    };
    pair_guarded("lambda_lower", [&](int j1, int j2) {
        auto lam = tail_dependence_matrix(*m->margin_model({j1, j2}), TailSide::Lower);
        return lam.values(0, 1);
    });
    pair_guarded("lambda_upper", [&](int j1, int j2) {
        auto lam = tail_dependence_matrix(*m->margin_model({j1, j2}), TailSide::Upper);
        return lam.values(0, 1);
    });
    pair_guarded("beta", [&](int j1, int j2) { return blomqvist_beta_pair(*m, j1, j2); });
    pair_guarded("rho_s",
                 [&](int j1, int j2) { return spearman_rho_pair(*m, j1, j2, budget); });
    pair_guarded("tau", [&](int j1, int j2) { return kendall_tau_pair(*m, j1, j2, budget); });

    auto guarded_mv = [&](const char* key, auto fn) {
        try {
            rep["multivariate"][key] = fn();
        } catch (const Error& e) {
            rep["multivariate"][key] = {{"unavailable", e.what()}};
        }
    };
    guarded_mv("beta", [&] { return blomqvist_beta_multivariate(*m); });
    guarded_mv("rho_s_lower",
               [&] { return multivariate_spearman(*m, SpearmanVariant::Lower, budget); });
    guarded_mv("rho_s_upper",
               [&] { return multivariate_spearman(*m, SpearmanVariant::Upper, budget); });
    guarded_mv("rho_s_center",
               [&] { return multivariate_spearman(*m, SpearmanVariant::Center, budget); });

    try {
        OrthantReport orep = orthant_dependence_check(*m, default_grid_resolution(m->dim()));
        rep["orthant"] = {{"plod", orep.plod},
                          {"puod", orep.puod},
                          {"pod", orep.pod},
                          {"grid_verified", true}};
    } catch (const Error& e) {
        rep["orthant"] = {{"unavailable", e.what()}};
    }

    if (with_verify) {
        Mt64Source src(mix_seed(g.seed, 0xE));
        Matrix s = m->sample_efficient(src, n);
        // batch-means standard errors of the rank statistics
        const int batches = 25;
        const Index bm = s.rows() / batches;
        auto sigma_matrix = [&](auto stat) {
            const int d = m->dim();
            Matrix sig = Matrix::Zero(d, d);
            for (int a = 0; a < d; ++a)
                for (int b = a + 1; b < d; ++b) {
                    double mean = 0.0;
                    std::vector<double> vals;
                    for (int k = 0; k < batches; ++k) {
                        Matrix blk = s.middleRows(k * bm, bm);
                        vals.push_back(stat(blk, a, b));
                        mean += vals.back();
                    }
                    mean /= batches;
                    double var = 0.0;
                    for (double v : vals) var += (v - mean) * (v - mean);
                    sig(a, b) = sig(b, a) = std::sqrt(var / (batches - 1) / batches);
                }
            return sig;
        };
        rep["empirical"] = {
            {"n", n},
            {"sigma_method", "batch means, 25 batches"},
            {"rho_s", matrix_json(empirical_spearman(s).values)},
            {"rho_s_sigma", matrix_json(sigma_matrix([](const Matrix& b, int x, int y) {
                 return empirical_spearman_pair(b.col(x), b.col(y));
             }))},
            {"tau", matrix_json(empirical_kendall(s).values)},
            {"tau_sigma", matrix_json(sigma_matrix([](const Matrix& b, int x, int y) {
                 return empirical_kendall_pair(b.col(x), b.col(y));
             }))},
            {"beta", matrix_json(empirical_blomqvist(s).values)},
            {"beta_sigma", matrix_json(sigma_matrix([](const Matrix& b, int x, int y) {
                 Matrix two(b.rows(), 2);
                 two.col(0) = b.col(x);
                 two.col(1) = b.col(y);
                 return empirical_blomqvist(two).values(0, 1);
             }))},
        };
    }

    std::string file = out_path(g, "measures.json");
    std::ofstream out(file);
    out << rep.dump(2) << "\n";
    std::cout << rep.dump(2) << "\n";
    return 0;
}

int cmd_sumdist(const GlobalOpts& g, Index n, int grid) {
    JointModel jm = parse_joint_model(load_config(g));
    Mt64Source src(g.seed);
    SumDistribution emp = mc_sum_cdf(jm, src, n);
    bool analytic_ok = true;
    SumDistribution ana = emp;
    try {
        ana = exp_sum_distribution(jm);
    } catch (const Error& e) {
        analytic_ok = false;
        std::cerr << "analytic path unavailable (" << e.what()
                  << "); reporting the empirical distribution only\n";
    }
    double hi = emp.sample().back();
    Matrix out(grid + 1, 4);
    for (int i = 0; i <= grid; ++i) {
        double s = hi * double(i) / grid;
        out(i, 0) = s;
        out(i, 1) = analytic_ok ? ana.cdf(s) : std::numeric_limits<double>::quiet_NaN();
        out(i, 2) = emp.cdf(s);
        out(i, 3) = analytic_ok ? std::abs(out(i, 1) - out(i, 2))
                                : std::numeric_limits<double>::quiet_NaN();
    }
    std::string file = out_path(g, "sumdist.csv");
    write_csv(file, {"s", "cdf_analytic", "cdf_empirical", "abs_diff"}, out);
    std::cout << "wrote " << file << "\n";
    if (analytic_ok) {
        double ks = ks_distance(emp, ana);
        double threshold = ks_critical(0.001, n);
        std::cout << "KS = " << ks << ", DKW threshold (alpha=0.001, n=" << n
                  << ") = " << threshold << ": " << (ks < threshold ? "PASS" : "FAIL") << "\n";
        std::cout << "analytic mean = " << format_g17(ana.mean())
                  << ", variance = " << format_g17(ana.variance()) << "\n";
        return ks < threshold ? 0 : 1;
    }
    return 0;
}

int cmd_efgm(const GlobalOpts& g, Index n) {
    Json config = load_config(g);
    Json rep;
    EfgmParameters params;
    if (config.contains("efgm_bernoulli") || (config.contains("kind") &&
                                              config["kind"] == "efgm_bernoulli")) {
        BernoulliVectorLaw law = parse_bernoulli_law(
            config.contains("efgm_bernoulli") ? config["efgm_bernoulli"] : config["law"],
            "/efgm_bernoulli");
        params = thetas_from_bernoulli(law);
        rep["source"] = "bernoulli_law";
    } else {
        params = parse_efgm_parameters(config);
        rep["source"] = "theta_table";
    }
    rep["d"] = params.d;
    for (const auto& [mask, theta] : params.thetas) {
        std::string key;
        for (int j = 0; j < params.d; ++j)
            if ((mask >> j) & 1u) key += (key.empty() ? "" : ",") + std::to_string(j + 1);
        rep["thetas"][key] = theta;
    }
    AdmissibilityResult adm = efgm_admissible(params);
    rep["admissible"] = adm.admissible;
    rep["min_corner_value"] = adm.min_corner_value;
    if (!adm.admissible) {
        rep["witness"] = adm.witness;
        std::cout << rep.dump(2) << "\n";
        return 1;
    }
    if (params.d == 2) {
        QmcBudget budget;
        budget.seed = g.seed;
        ConcordanceRangeReport range = efgm_concordance_range(budget);
        double theta = params.thetas.count(0b11) ? params.thetas.at(0b11) : 0.0;
        rep["concordance"] = {
            {"rho_s_closed", theta / 3.0},
            {"tau_closed", 2.0 * theta / 9.0},
            {"rho_s_range", {-range.rho_bound, range.rho_bound}},
            {"tau_range", {-range.tau_bound, range.tau_bound}},
            {"rho_s_integral_at_plus1", range.rho_integral_at_plus1},
            {"tau_integral_at_plus1", range.tau_integral_at_plus1},
        };
    }
    if (n > 0) {
        Mt64Source src(g.seed);
        Matrix s = efgm_sample(bernoulli_from_thetas(params), src, n);
        std::string file = out_path(g, "efgm_sample.csv");
        write_csv(file, sample_header(params.d), s);
        rep["sample_file"] = file;
        if (params.d <= 6) write_pair_scatters(g, s);
    }
    std::string file = out_path(g, "efgm_report.json");
    std::ofstream out(file);
    out << rep.dump(2) << "\n";
    std::cout << rep.dump(2) << "\n";
    return 0;
}

int cmd_verify(const GlobalOpts& g, Index n, Index mc_n) {
    VerifyOptions opts;
    opts.seed = g.seed;
    opts.sample_n = n;
    opts.mc_sum_n = mc_n;
    opts.qmc.seed = mix_seed(g.seed, 0x51);
    // optional fleet descriptor: {"fleet": ["check", ...]}; default runs all
    std::vector<std::string> selection = default_fleet();
    if (!g.config.empty()) {
        Json cfg = load_json_file(g.config);
        if (!cfg.is_object() || !cfg.contains("fleet") || !cfg["fleet"].is_array())
            throw ConfigError("/fleet", "expected an array of check names");
        selection.clear();
        for (size_t i = 0; i < cfg["fleet"].size(); ++i) {
            if (!cfg["fleet"][i].is_string())
                throw ConfigError("/fleet/" + std::to_string(i), "expected a check name");
            selection.push_back(cfg["fleet"][i].get<std::string>());
        }
    }
    RunReport report = run_verification_fleet(selection, opts);
    Json jrep;
    jrep["command"] = "verify";
    jrep["seed"] = g.seed;
    jrep["sample_n"] = n;
    jrep["mc_sum_n"] = mc_n;
    jrep["seconds"] = report.seconds;
    jrep["artifacts"] = Json::array({out_path(g, "verify_report.json")});
    for (const auto& v : report.verdicts) {
        std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << v.name << "  (observed "
                  << v.observed << ", tolerance " << v.tolerance << ", " << v.method << ")\n";
        jrep["verdicts"].push_back({{"name", v.name},
                                    {"pass", v.pass},
                                    {"observed", v.observed},
                                    {"tolerance", v.tolerance},
                                    {"method", v.method},
                                    {"detail", v.detail}});
    }
    std::cout << report.verdicts.size() - size_t(report.failures()) << "/"
              << report.verdicts.size() << " checks passed in " << report.seconds << "s\n";
    std::string file = out_path(g, "verify_report.json");
    std::ofstream out(file);
    out << jrep.dump(2) << "\n";
    return report.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"index-mixed copulas: construction, evaluation, sampling and verification"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalOpts g;
    app.add_option("--config", g.config, "JSON model descriptor file");
    app.add_option("--seed", g.seed, "random seed (default 42)");
    app.add_option("--out", g.out, "output directory (default .)");
    app.add_option("--threads", g.threads, "worker threads for block sampling (default 1)");

    auto* sample = app.add_subcommand("sample", "draw from a model, write CSV and scatter SVGs");
    Index sample_n = 10000;
    std::string algorithm = "eff";
    bool no_plot = false;
    sample->add_option("--n", sample_n, "number of rows (default 10000)");
    sample->add_option("--algorithm", algorithm, "seq | vec | eff (default eff)");
    sample->add_flag("--no-plot", no_plot, "skip SVG scatter output");

    auto* evaluate = app.add_subcommand("evaluate", "exact CDF/density at points from a CSV");
    std::string points_file;
    evaluate->add_option("--points", points_file, "CSV of evaluation points")->required();

    auto* measures = app.add_subcommand("measures", "dependence measure report (JSON)");
    bool with_verify = false;
    Index measures_n = 100000;
    measures->add_flag("--verify", with_verify, "add empirical rank-statistic oracles");
    measures->add_option("--n", measures_n, "sample size for --verify (default 1e5)");

    auto* sumdist = app.add_subcommand("sumdist", "distribution of the component sum");
    Index sum_n = 1000000;
    int sum_grid = 200;
    sumdist->add_option("--n", sum_n, "Monte Carlo sample size (default 1e6)");
    sumdist->add_option("--grid", sum_grid, "CSV grid resolution (default 200)");

    auto* efgm_cmd = app.add_subcommand("efgm", "EFGM parameter/admissibility report");
    Index efgm_n = 0;
    efgm_cmd->add_option("--n", efgm_n, "also sample n rows via the sorted-matrix scheme");

    auto* verify = app.add_subcommand("verify", "run the verification fleet");
    Index verify_n = 100000, verify_mc = 250000;
    verify->add_option("--n", verify_n, "rank-statistic sample size (default 1e5)");
    verify->add_option("--mc-n", verify_mc, "sum-distribution oracle size (default 2.5e5)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sample->parsed()) return cmd_sample(g, sample_n, algorithm, !no_plot);
        if (evaluate->parsed()) return cmd_evaluate(g, points_file);
        if (measures->parsed()) return cmd_measures(g, with_verify, measures_n);
        if (sumdist->parsed()) return cmd_sumdist(g, sum_n, sum_grid);
        if (efgm_cmd->parsed()) return cmd_efgm(g, efgm_n);
        if (verify->parsed()) return cmd_verify(g, verify_n, verify_mc);
    } catch (const ConfigError& e) {
        std::cerr << "config error at " << e.path() << ": " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
