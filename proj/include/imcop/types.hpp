#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace imcop {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Coordinate subsets are 1-based and strictly increasing, matching the
// conventions of the formulas implemented here. Eigen buffers stay 0-based.
using Coords = std::vector<int>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An evaluation the model cannot perform (e.g. CDF of a sampling-only family).
class CapabilityError : public Error {
public:
    using Error::Error;
};

// Invalid user-facing configuration; carries the JSON path of the bad field.
class ConfigError : public Error {
public:
    ConfigError(std::string path, const std::string& what)
        : Error(path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

inline constexpr double prob_tol = 1e-12;   // probability bookkeeping tolerance
inline constexpr double prune_tol = 1e-15;  // support entries below this are dropped
inline constexpr std::int64_t default_enum_cap = std::int64_t(1) << 20;
inline constexpr int sieve_dim_cap = 20;    // 2^d inclusion-exclusion cap

// Throws Error unless coords is non-empty, strictly increasing and within 1..dim.
void check_coords(const Coords& coords, int dim);

}  // namespace imcop
