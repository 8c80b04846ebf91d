#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "imcop/rng.hpp"
#include "imcop/types.hpp"

namespace imcop {

enum class Family {
    Independence,
    Comonotone,
    Countermonotone,
    Clayton,
    Gumbel,
    Efgm,
    Gaussian,
    Mixture,
    BlockProduct,
    Survival,
    IndexMixed,
};

struct Capability {
    bool cdf = false;
    bool density = false;
    bool conditional2d = false;
    bool survival_closed = false;
    bool tail_coeffs = false;
};

struct TailCoeffs {
    double lower = 0.0;
    double upper = 0.0;
};

class Copula;
using CopulaPtr = std::shared_ptr<const Copula>;

// Common interface of all copula models. Values are immutable after
// construction; every evaluation is reentrant. Sampling is expressed as a
// deterministic transform of iid U(0,1) inputs (sample_from_uniforms), so the
// same code path serves pseudo-random and low-discrepancy sources.
class Copula : public std::enable_shared_from_this<Copula> {
public:
    virtual ~Copula() = default;

    int dim() const { return dim_; }
    virtual Family family() const = 0;
    virtual Capability capability() const = 0;

    // Inputs are clamped into [0,1] within 1e-12 slack; beyond that is an error.
    double cdf(const Vector& u) const;
    // Defined on the open cube only.
    double density(const Vector& u) const;
    double diagonal(double u) const;
    // dC/du1 evaluated at (u1,u2), bivariate models, u1 in (0,1).
    double conditional2d(double u2, double u1) const;
    // bivariate models
    virtual TailCoeffs tail_coeffs() const;

    virtual CopulaPtr margin(const Coords& coords) const = 0;
    virtual CopulaPtr survival() const = 0;

    // Fixed number of U(0,1) inputs one draw consumes (upper bound; unused
    // buffer entries are permitted).
    virtual int sample_uniform_count() const = 0;
    virtual void sample_from_uniforms(const double* us, double* out) const = 0;
    Matrix sample(UniformSource& src, Index n) const;

protected:
    explicit Copula(int dim);
    virtual double cdf_raw(const Vector& u) const;
    virtual double density_raw(const Vector& u) const;
    virtual double conditional2d_raw(double u2, double u1) const;

private:
    int dim_;
};

class IndependenceCopula final : public Copula {
public:
    explicit IndependenceCopula(int d) : Copula(d) {}
    Family family() const override { return Family::Independence; }
    Capability capability() const override { return {true, true, true, true, true}; }
    TailCoeffs tail_coeffs() const override;
    CopulaPtr margin(const Coords& coords) const override;
    CopulaPtr survival() const override;
    int sample_uniform_count() const override { return dim(); }
    void sample_from_uniforms(const double* us, double* out) const override;

protected:
    double cdf_raw(const Vector& u) const override;
    double density_raw(const Vector&) const override { return 1.0; }
    double conditional2d_raw(double u2, double u1) const override;
};

class ComonotoneCopula final : public Copula {
public:
    explicit ComonotoneCopula(int d) : Copula(d) {}
    Family family() const override { return Family::Comonotone; }
    Capability capability() const override { return {true, false, true, true, true}; }
    TailCoeffs tail_coeffs() const override { return {1.0, 1.0}; }
    CopulaPtr margin(const Coords& coords) const override;
    CopulaPtr survival() const override;
    int sample_uniform_count() const override { return 1; }
    void sample_from_uniforms(const double* us, double* out) const override;

protected:
    double cdf_raw(const Vector& u) const override { return u.minCoeff(); }
    double conditional2d_raw(double u2, double u1) const override { return u2 >= u1 ? 1.0 : 0.0; }
};

class CountermonotoneCopula final : public Copula {
public:
    CountermonotoneCopula() : Copula(2) {}
    Family family() const override { return Family::Countermonotone; }
    Capability capability() const override { return {true, false, true, true, true}; }
    TailCoeffs tail_coeffs() const override { return {0.0, 0.0}; }
    CopulaPtr margin(const Coords& coords) const override;
    CopulaPtr survival() const override;
    int sample_uniform_count() const override { return 1; }
    void sample_from_uniforms(const double* us, double* out) const override;

protected:
    double cdf_raw(const Vector& u) const override { return std::max(u[0] + u[1] - 1.0, 0.0); }
    double conditional2d_raw(double u2, double u1) const override {
        return u2 >= 1.0 - u1 ? 1.0 : 0.0;
    }
};

// Clayton with theta > 0, sampled by the Marshall-Olkin Gamma-frailty
// construction (the frailty comes from the Gamma quantile, so one draw
// consumes exactly d+1 uniforms).
class ClaytonCopula final : public Copula {
public:
    ClaytonCopula(double theta, int d);
    double theta() const { return theta_; }
    Family family() const override { return Family::Clayton; }
    Capability capability() const override { return {true, true, true, false, true}; }
    TailCoeffs tail_coeffs() const override;
    CopulaPtr margin(const Coords& coords) const override;
    CopulaPtr survival() const override;
    int sample_uniform_count() const override { return dim() + 1; }
    void sample_from_uniforms(const double* us, double* out) const override;

protected:
    double cdf_raw(const Vector& u) const override;
    double density_raw(const Vector& u) const override;
    double conditional2d_raw(double u2, double u1) const override;

private:
    double theta_;
};

// Gumbel with theta >= 1, stable-frailty sampling (d+2 uniforms per draw).
// The density is implemented for d = 2 only.
class GumbelCopula final : public Copula {
public:
    GumbelCopula(double theta, int d);
    double theta() const { return theta_; }
    Family family() const override { return Family::Gumbel; }
    Capability capability() const override {
        return {true, dim() == 2, true, false, true};
    }
    TailCoeffs tail_coeffs() const override;
    CopulaPtr margin(const Coords& coords) const override;
    CopulaPtr survival() const override;
    int sample_uniform_count() const override { return dim() + 2; }
    void sample_from_uniforms(const double* us, double* out) const override;

protected:
    double cdf_raw(const Vector& u) const override;
    double density_raw(const Vector& u) const override;
    double conditional2d_raw(double u2, double u1) const override;

private:
    double theta_;
};

// Gaussian copula, sampling only: there is no exact CDF evaluation, so
// cdf/density/conditional capabilities are absent by design.
class GaussianCopula final : public Copula {
public:
    explicit GaussianCopula(const Matrix& correlation);
    const Matrix& correlation() const { return corr_; }
    Family family() const override { return Family::Gaussian; }
    Capability capability() const override { return {false, false, false, true, false}; }
    CopulaPtr margin(const Coords& coords) const override;
    CopulaPtr survival() const override;  // radially symmetric
    int sample_uniform_count() const override { return dim(); }
    void sample_from_uniforms(const double* us, double* out) const override;

private:
    Matrix corr_;
    Matrix root_;  // symmetric square root, tolerates semidefinite inputs
};

class FiniteMixtureCopula final : public Copula {
public:
    FiniteMixtureCopula(std::vector<double> weights, std::vector<CopulaPtr> components);
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<CopulaPtr>& components() const { return components_; }
    Family family() const override { return Family::Mixture; }
    Capability capability() const override;
    TailCoeffs tail_coeffs() const override;
    CopulaPtr margin(const Coords& coords) const override;
    CopulaPtr survival() const override;
    int sample_uniform_count() const override;
    void sample_from_uniforms(const double* us, double* out) const override;

protected:
    double cdf_raw(const Vector& u) const override;
    double density_raw(const Vector& u) const override;
    double conditional2d_raw(double u2, double u1) const override;

private:
    std::vector<double> weights_;
    std::vector<CopulaPtr> components_;
    std::vector<double> cumweights_;
};

// Product of independent lower-dimensional copulas acting on disjoint
// coordinate blocks covering 1..d.
class BlockProductCopula final : public Copula {
public:
    BlockProductCopula(int d, std::vector<std::pair<Coords, CopulaPtr>> parts);
    const std::vector<std::pair<Coords, CopulaPtr>>& parts() const { return parts_; }
    Family family() const override { return Family::BlockProduct; }
    Capability capability() const override;
    TailCoeffs tail_coeffs() const override;
    CopulaPtr margin(const Coords& coords) const override;
    CopulaPtr survival() const override;
    int sample_uniform_count() const override;
    void sample_from_uniforms(const double* us, double* out) const override;

protected:
    double cdf_raw(const Vector& u) const override;
    double density_raw(const Vector& u) const override;
    double conditional2d_raw(double u2, double u1) const override;

private:
    std::vector<std::pair<Coords, CopulaPtr>> parts_;
};

// Survival copula of a base without a closed form, evaluated by the
// inclusion-exclusion sieve over 2^d corners (d <= sieve_dim_cap).
class SurvivalCopula final : public Copula {
public:
    explicit SurvivalCopula(CopulaPtr base);
    const CopulaPtr& base() const { return base_; }
    Family family() const override { return Family::Survival; }
    Capability capability() const override;
    TailCoeffs tail_coeffs() const override;
    CopulaPtr margin(const Coords& coords) const override;
    CopulaPtr survival() const override { return base_; }
    int sample_uniform_count() const override { return base_->sample_uniform_count(); }
    void sample_from_uniforms(const double* us, double* out) const override;

protected:
    double cdf_raw(const Vector& u) const override;
    double density_raw(const Vector& u) const override;
    double conditional2d_raw(double u2, double u1) const override;

private:
    CopulaPtr base_;
};

CopulaPtr independence(int d);
CopulaPtr comonotone(int d);
CopulaPtr countermonotone();
CopulaPtr clayton(double theta, int d);
CopulaPtr gumbel(double theta, int d);
CopulaPtr gaussian_sample_only(const Matrix& correlation);
CopulaPtr finite_mixture(std::vector<double> weights, std::vector<CopulaPtr> components);
CopulaPtr block_product(int d, std::vector<std::pair<Coords, CopulaPtr>> parts);
CopulaPtr survival_of(const CopulaPtr& c);  // shorthand for c->survival()

// P(lo < U <= hi) by inclusion-exclusion over the 2^d corners of the box.
double rectangle_probability(const Copula& c, const Vector& lo, const Vector& hi);

}  // namespace imcop
