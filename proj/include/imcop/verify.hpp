#pragma once

#include <string>

#include "imcop/rng.hpp"
#include "imcop/types.hpp"

namespace imcop {

// One verification verdict: a named check with its observed statistic, the
// tolerance it was held to, and the method that produced it.
struct Verdict {
    std::string name;
    bool pass = false;
    double observed = 0.0;
    double tolerance = 0.0;
    std::string method;
    std::string detail;
};

struct RunReport {
    std::vector<Verdict> verdicts;
    double seconds = 0.0;
    bool all_pass() const {
        for (const auto& v : verdicts)
            if (!v.pass) return false;
        return true;
    }
    Index failures() const {
        Index n = 0;
        for (const auto& v : verdicts) n += !v.pass;
        return n;
    }
};

struct VerifyOptions {
    std::uint64_t seed = 42;
    Index sample_n = 100000;   // rank-statistic sample sizes
    Index mc_sum_n = 250000;   // sum-distribution oracle size
    QmcBudget qmc;
};

// Names of the registered checks. The default fleet is every check except
// the demonstration entries (currently "broken_efgm_demo", which verifies a
// deliberately inadmissible model and therefore always fails with a witness).
std::vector<std::string> default_fleet();
std::vector<std::string> all_checks();

// Runs the default fleet: every closed-form identity, sampler equivalence,
// symmetry, measure, ordering and sum-distribution check the library ships
// with, each reported as one or more verdicts.
RunReport run_verification_fleet(const VerifyOptions& opts = {});

// Runs a named selection; an empty selection yields an empty passing report.
// Unknown names are an error.
RunReport run_verification_fleet(const std::vector<std::string>& selection,
                                 const VerifyOptions& opts = {});

}  // namespace imcop
