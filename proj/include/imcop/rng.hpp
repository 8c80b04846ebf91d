#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "imcop/types.hpp"

namespace imcop {

// Stream of uniforms on the open interval (0,1). begin_sample() marks the
// start of one multivariate draw so that low-discrepancy sources can align
// lattice points with samples; pseudo-random sources ignore it.
class UniformSource {
public:
    virtual ~UniformSource() = default;
    virtual double next01() = 0;
    virtual void begin_sample() {}
};

// splitmix64 step, used to derive independent substreams from (seed, stream).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

class Mt64Source final : public UniformSource {
public:
    explicit Mt64Source(std::uint64_t seed) : eng_(seed) {}
    double next01() override { return ((eng_() >> 11) + 0.5) * 0x1.0p-53; }

private:
    std::mt19937_64 eng_;
};

// Rank-1 Kronecker lattice with sqrt-prime generators and a seed-derived
// offset: coordinate j of point i is frac(offset_j + i * sqrt(p_j)).
// Dimension is fixed at construction; each begin_sample() advances one point.
class KroneckerSource final : public UniformSource {
public:
    KroneckerSource(int dim, std::uint64_t seed);
    void begin_sample() override;
    double next01() override;

private:
    std::vector<double> alpha_;
    std::vector<double> offset_;
    std::uint64_t point_ = 0;
    int cursor_ = 0;
};

// Budget for quasi-Monte Carlo integration paths.
struct QmcBudget {
    Index n = Index(1) << 17;
    std::uint64_t seed = 0x1d5c;
};

}  // namespace imcop
