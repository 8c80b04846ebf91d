#include "imcop/rng.hpp"

#include <cmath>

namespace imcop {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

bool is_prime(int n) {
    if (n < 2) return false;
    for (int k = 2; k * k <= n; ++k)
        if (n % k == 0) return false;
    return true;
}

double frac(double x) { return x - std::floor(x); }

}  // namespace

KroneckerSource::KroneckerSource(int dim, std::uint64_t seed) {
    if (dim <= 0) throw Error("KroneckerSource: dimension must be positive");
    alpha_.reserve(dim);
    offset_.reserve(dim);
    int p = 1;
    for (int j = 0; j < dim; ++j) {
        do { ++p; } while (!is_prime(p));
        alpha_.push_back(frac(std::sqrt(double(p))));
        offset_.push_back((mix_seed(seed, j) >> 11) * 0x1.0p-53);
    }
    cursor_ = dim;  // force begin_sample() before the first use
}

void KroneckerSource::begin_sample() {
    ++point_;
    cursor_ = 0;
}

double KroneckerSource::next01() {
    if (cursor_ >= int(alpha_.size()))
        throw Error("KroneckerSource: lattice dimension exhausted within one sample");
    double u = frac(offset_[cursor_] + double(point_) * alpha_[cursor_]);
    ++cursor_;
    if (u < 0x1.0p-53) u = 0x1.0p-53;
    if (u > 1.0 - 0x1.0p-53) u = 1.0 - 0x1.0p-53;
    return u;
}

}  // namespace imcop
