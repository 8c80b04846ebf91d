#pragma once

#include <json.hpp>

#include "imcop/efgm.hpp"
#include "imcop/index_mixed.hpp"
#include "imcop/sums.hpp"

namespace imcop {

using Json = nlohmann::json;

// Parsers for the JSON model descriptors. Every error is reported as a
// ConfigError carrying the JSON path of the offending field.

CopulaPtr parse_copula(const Json& j, const std::string& path = "");
IndexDistribution parse_index_distribution(const Json& j, const std::string& path = "");
BernoulliVectorLaw parse_bernoulli_law(const Json& j, const std::string& path = "");

// Raw EFGM parameters (d + theta table), without the admissibility gate the
// copula constructor applies; lets callers report inadmissibility themselves.
EfgmParameters parse_efgm_parameters(const Json& j, const std::string& path = "");
std::vector<Margin> parse_margins(const Json& j, int d, const std::string& path = "");

// {"margins": ..., "copula": <index-mixed descriptor>}
JointModel parse_joint_model(const Json& j, const std::string& path = "");

// Top-level model config: a copula descriptor, optionally nested under "model".
CopulaPtr parse_model_config(const Json& j, const std::string& path = "");

Json load_json_file(const std::string& file);

}  // namespace imcop
