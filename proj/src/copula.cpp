#include "imcop/copula.hpp"

#include <algorithm>
#include <cmath>

#include "imcop/special_functions.hpp"

namespace imcop {

Copula::Copula(int dim) : dim_(dim) {
    if (dim < 1) throw Error("copula dimension must be >= 1");
}

double Copula::cdf(const Vector& u) const {
    if (u.size() != dim_) throw Error("cdf: dimension mismatch");
    Vector v = u;
    bool any_zero = false;
    for (Index j = 0; j < v.size(); ++j) {
        if (v[j] < -prob_tol || v[j] > 1.0 + prob_tol)
            throw Error("cdf: argument outside the unit cube");
        v[j] = std::clamp(v[j], 0.0, 1.0);
        any_zero |= (v[j] == 0.0);
    }
    if (any_zero) return 0.0;  // groundedness
    return cdf_raw(v);
}

double Copula::density(const Vector& u) const {
    if (u.size() != dim_) throw Error("density: dimension mismatch");
    for (Index j = 0; j < u.size(); ++j)
        if (!(u[j] > 0.0 && u[j] < 1.0))
            throw Error("density: argument must lie in the open cube");
    return density_raw(u);
}

double Copula::diagonal(double u) const { return cdf(Vector::Constant(dim_, u)); }

double Copula::conditional2d(double u2, double u1) const {
    if (dim_ != 2) throw Error("conditional2d: bivariate models only");
    if (!(u1 > 0.0 && u1 < 1.0)) throw Error("conditional2d: u1 must lie in (0,1)");
    if (u2 < -prob_tol || u2 > 1.0 + prob_tol)
        throw Error("conditional2d: u2 outside [0,1]");
    u2 = std::clamp(u2, 0.0, 1.0);
    return conditional2d_raw(u2, u1);
}

TailCoeffs Copula::tail_coeffs() const {
    throw CapabilityError("tail dependence coefficients unavailable for this family");
}

double Copula::cdf_raw(const Vector&) const {
    throw CapabilityError("cdf unavailable for this family");
}

double Copula::density_raw(const Vector&) const {
    throw CapabilityError("density unavailable for this family");
}

double Copula::conditional2d_raw(double, double) const {
    throw CapabilityError("conditional distribution unavailable for this family");
}

Matrix Copula::sample(UniformSource& src, Index n) const {
    if (n < 0) throw Error("sample: n must be nonnegative");
    Matrix out(n, dim_);
    const int m = sample_uniform_count();
    std::vector<double> buf(m);
    std::vector<double> row(dim_);
    for (Index i = 0; i < n; ++i) {
        src.begin_sample();
        for (int j = 0; j < m; ++j) buf[j] = src.next01();
        sample_from_uniforms(buf.data(), row.data());
        for (int j = 0; j < dim_; ++j) out(i, j) = row[j];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Independence

double IndependenceCopula::cdf_raw(const Vector& u) const { return u.prod(); }

double IndependenceCopula::conditional2d_raw(double u2, double) const { return u2; }

TailCoeffs IndependenceCopula::tail_coeffs() const { return {0.0, 0.0}; }

CopulaPtr IndependenceCopula::margin(const Coords& coords) const {
    check_coords(coords, dim());
    return independence(int(coords.size()));
}

CopulaPtr IndependenceCopula::survival() const { return shared_from_this(); }

void IndependenceCopula::sample_from_uniforms(const double* us, double* out) const {
    for (int j = 0; j < dim(); ++j) out[j] = us[j];
}

// ---------------------------------------------------------------------------
// Comonotone

CopulaPtr ComonotoneCopula::margin(const Coords& coords) const {
    check_coords(coords, dim());
    return coords.size() == 1 ? independence(1) : comonotone(int(coords.size()));
}

CopulaPtr ComonotoneCopula::survival() const { return shared_from_this(); }

void ComonotoneCopula::sample_from_uniforms(const double* us, double* out) const {
    for (int j = 0; j < dim(); ++j) out[j] = us[0];
}

// ---------------------------------------------------------------------------
// Countermonotone

CopulaPtr CountermonotoneCopula::margin(const Coords& coords) const {
    check_coords(coords, dim());
    return coords.size() == 1 ? independence(1) : countermonotone();
}

CopulaPtr CountermonotoneCopula::survival() const { return shared_from_this(); }

void CountermonotoneCopula::sample_from_uniforms(const double* us, double* out) const {
    out[0] = us[0];
    out[1] = 1.0 - us[0];
}

// ---------------------------------------------------------------------------
// Clayton

ClaytonCopula::ClaytonCopula(double theta, int d) : Copula(d), theta_(theta) {
    if (!(theta > 0.0)) throw Error("Clayton: theta must be positive");
}

double ClaytonCopula::cdf_raw(const Vector& u) const {
    double s = 0.0;
    for (Index j = 0; j < u.size(); ++j) s += std::pow(u[j], -theta_) - 1.0;
    return std::pow(1.0 + s, -1.0 / theta_);
}

double ClaytonCopula::density_raw(const Vector& u) const {
    double s = 0.0, logu = 0.0;
    for (Index j = 0; j < u.size(); ++j) {
        s += std::pow(u[j], -theta_) - 1.0;
        logu += std::log(u[j]);
    }
    double logc = -(1.0 + theta_) * logu - (1.0 / theta_ + dim()) * std::log1p(s);
    for (int k = 1; k < dim(); ++k) logc += std::log(1.0 + k * theta_);
    return std::exp(logc);
}

double ClaytonCopula::conditional2d_raw(double u2, double u1) const {
    if (u2 == 0.0) return 0.0;
    double s = std::pow(u1, -theta_) + std::pow(u2, -theta_) - 1.0;
    return std::pow(u1, -theta_ - 1.0) * std::pow(s, -1.0 / theta_ - 1.0);
}

TailCoeffs ClaytonCopula::tail_coeffs() const { return {std::pow(2.0, -1.0 / theta_), 0.0}; }

CopulaPtr ClaytonCopula::margin(const Coords& coords) const {
    check_coords(coords, dim());
    return coords.size() == 1 ? independence(1) : clayton(theta_, int(coords.size()));
}

CopulaPtr ClaytonCopula::survival() const {
    return std::make_shared<SurvivalCopula>(shared_from_this());
}

void ClaytonCopula::sample_from_uniforms(const double* us, double* out) const {
    double v = inverse_lower_gamma(1.0 / theta_, us[0]);  // Gamma(1/theta, 1) frailty
    for (int j = 0; j < dim(); ++j) {
        double e = -std::log(us[j + 1]);
        out[j] = std::pow(1.0 + e / v, -1.0 / theta_);
    }
}

// ---------------------------------------------------------------------------
// Gumbel

GumbelCopula::GumbelCopula(double theta, int d) : Copula(d), theta_(theta) {
    if (!(theta >= 1.0)) throw Error("Gumbel: theta must be >= 1");
}

double GumbelCopula::cdf_raw(const Vector& u) const {
    double t = 0.0;
    for (Index j = 0; j < u.size(); ++j) t += std::pow(-std::log(u[j]), theta_);
    return std::exp(-std::pow(t, 1.0 / theta_));
}

double GumbelCopula::density_raw(const Vector& u) const {
    // bivariate only
    double x = -std::log(u[0]), y = -std::log(u[1]);
    double t = std::pow(x, theta_) + std::pow(y, theta_);
    double a = std::pow(t, 1.0 / theta_);
    return std::exp(-a) * std::pow(x * y, theta_ - 1.0) * std::pow(a, 1.0 - 2.0 * theta_) *
           (a + theta_ - 1.0) / (u[0] * u[1]);
}

double GumbelCopula::conditional2d_raw(double u2, double u1) const {
    if (u2 == 0.0) return 0.0;
    double x = -std::log(u1), y = -std::log(u2);
    double t = std::pow(x, theta_) + std::pow(y, theta_);
    double a = std::pow(t, 1.0 / theta_);
    return std::exp(-a) * std::pow(a, 1.0 - theta_) * std::pow(x, theta_ - 1.0) / u1;
}

TailCoeffs GumbelCopula::tail_coeffs() const {
    return {0.0, 2.0 - std::pow(2.0, 1.0 / theta_)};
}

CopulaPtr GumbelCopula::margin(const Coords& coords) const {
    check_coords(coords, dim());
    return coords.size() == 1 ? independence(1) : gumbel(theta_, int(coords.size()));
}

CopulaPtr GumbelCopula::survival() const {
    return std::make_shared<SurvivalCopula>(shared_from_this());
}

void GumbelCopula::sample_from_uniforms(const double* us, double* out) const {
    if (theta_ == 1.0) {
        for (int j = 0; j < dim(); ++j) out[j] = us[j + 2];
        return;
    }
    // Kanter's representation of the positive stable frailty with LS e^{-t^alpha}.
    const double alpha = 1.0 / theta_;
    double th = M_PI * us[0];
    double w = -std::log(us[1]);
    double s = (std::sin(alpha * th) / std::pow(std::sin(th), 1.0 / alpha)) *
               std::pow(std::sin((1.0 - alpha) * th) / w, (1.0 - alpha) / alpha);
    for (int j = 0; j < dim(); ++j) {
        double e = -std::log(us[j + 2]);
        out[j] = std::exp(-std::pow(e / s, alpha));
    }
}

// ---------------------------------------------------------------------------
// Gaussian (sampling only)

GaussianCopula::GaussianCopula(const Matrix& correlation) : Copula(int(correlation.rows())) {
    if (correlation.rows() != correlation.cols())
        throw Error("Gaussian: correlation matrix must be square");
    corr_ = correlation;
    for (Index i = 0; i < corr_.rows(); ++i) {
        if (std::abs(corr_(i, i) - 1.0) > prob_tol)
            throw Error("Gaussian: correlation diagonal must be 1");
        for (Index j = 0; j < i; ++j)
            if (std::abs(corr_(i, j) - corr_(j, i)) > prob_tol)
                throw Error("Gaussian: correlation matrix must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(corr_);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw Error("Gaussian: correlation matrix must be positive semi-definite");
    Vector lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    root_ = es.eigenvectors() * lam.asDiagonal();
}

CopulaPtr GaussianCopula::margin(const Coords& coords) const {
    check_coords(coords, dim());
    if (coords.size() == 1) return independence(1);
    Matrix sub(coords.size(), coords.size());
    for (size_t a = 0; a < coords.size(); ++a)
        for (size_t b = 0; b < coords.size(); ++b)
            sub(a, b) = corr_(coords[a] - 1, coords[b] - 1);
    return gaussian_sample_only(sub);
}

CopulaPtr GaussianCopula::survival() const { return shared_from_this(); }

void GaussianCopula::sample_from_uniforms(const double* us, double* out) const {
    Vector g(dim());
    for (int j = 0; j < dim(); ++j) g[j] = normal_quantile(us[j]);
    Vector z = root_ * g;
    for (int j = 0; j < dim(); ++j) out[j] = normal_cdf(z[j]);
}

// ---------------------------------------------------------------------------
// Finite mixture

FiniteMixtureCopula::FiniteMixtureCopula(std::vector<double> weights,
                                         std::vector<CopulaPtr> components)
    : Copula(components.empty() ? 1 : components.front()->dim()),
      weights_(std::move(weights)),
      components_(std::move(components)) {
    if (components_.empty()) throw Error("mixture: needs at least one component");
    if (weights_.size() != components_.size())
        throw Error("mixture: weights/components size mismatch");
    double sum = 0.0;
    for (double w : weights_) {
        if (w < 0.0) throw Error("mixture: weights must be nonnegative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > prob_tol) throw Error("mixture: weights must sum to 1");
    for (const auto& c : components_)
        if (c->dim() != dim()) throw Error("mixture: components must share dimension");
    cumweights_.resize(weights_.size());
    double acc = 0.0;
    for (size_t i = 0; i < weights_.size(); ++i) {
        acc += weights_[i];
        cumweights_[i] = acc;
    }
    cumweights_.back() = 1.0;
}

Capability FiniteMixtureCopula::capability() const {
    Capability cap{true, true, true, true, true};
    for (const auto& c : components_) {
        Capability k = c->capability();
        cap.cdf &= k.cdf;
        cap.density &= k.density;
        cap.conditional2d &= k.conditional2d;
        cap.survival_closed &= k.survival_closed;
        cap.tail_coeffs &= k.tail_coeffs;
    }
    return cap;
}

double FiniteMixtureCopula::cdf_raw(const Vector& u) const {
    double s = 0.0;
    for (size_t i = 0; i < components_.size(); ++i) s += weights_[i] * components_[i]->cdf(u);
    return s;
}

double FiniteMixtureCopula::density_raw(const Vector& u) const {
    double s = 0.0;
    for (size_t i = 0; i < components_.size(); ++i)
        s += weights_[i] * components_[i]->density(u);
    return s;
}

double FiniteMixtureCopula::conditional2d_raw(double u2, double u1) const {
    double s = 0.0;
    for (size_t i = 0; i < components_.size(); ++i)
        s += weights_[i] * components_[i]->conditional2d(u2, u1);
    return s;
}

TailCoeffs FiniteMixtureCopula::tail_coeffs() const {
    TailCoeffs t{0.0, 0.0};
    for (size_t i = 0; i < components_.size(); ++i) {
        TailCoeffs k = components_[i]->tail_coeffs();
        t.lower += weights_[i] * k.lower;
        t.upper += weights_[i] * k.upper;
    }
    return t;
}

CopulaPtr FiniteMixtureCopula::margin(const Coords& coords) const {
    check_coords(coords, dim());
    std::vector<CopulaPtr> margins;
    margins.reserve(components_.size());
    for (const auto& c : components_) margins.push_back(c->margin(coords));
    return finite_mixture(weights_, std::move(margins));
}

CopulaPtr FiniteMixtureCopula::survival() const {
    std::vector<CopulaPtr> survivals;
    survivals.reserve(components_.size());
    for (const auto& c : components_) survivals.push_back(c->survival());
    return finite_mixture(weights_, std::move(survivals));
}

int FiniteMixtureCopula::sample_uniform_count() const {
    int m = 0;
    for (const auto& c : components_) m = std::max(m, c->sample_uniform_count());
    return m + 1;
}

void FiniteMixtureCopula::sample_from_uniforms(const double* us, double* out) const {
    size_t i = std::upper_bound(cumweights_.begin(), cumweights_.end(), us[0]) -
               cumweights_.begin();
    if (i >= components_.size()) i = components_.size() - 1;
    components_[i]->sample_from_uniforms(us + 1, out);
}

// ---------------------------------------------------------------------------
// Block product

BlockProductCopula::BlockProductCopula(int d, std::vector<std::pair<Coords, CopulaPtr>> parts)
    : Copula(d), parts_(std::move(parts)) {
    std::vector<bool> seen(d, false);
    for (const auto& [coords, part] : parts_) {
        check_coords(coords, d);
        if (int(coords.size()) != part->dim())
            throw Error("block product: block dimension mismatch");
        for (int c : coords) {
            if (seen[c - 1]) throw Error("block product: blocks must be disjoint");
            seen[c - 1] = true;
        }
    }
    for (bool s : seen)
        if (!s) throw Error("block product: blocks must cover all coordinates");
}

Capability BlockProductCopula::capability() const {
    Capability cap{true, true, dim() == 2, true, dim() == 2};
    for (const auto& [coords, part] : parts_) {
        Capability k = part->capability();
        cap.cdf &= k.cdf;
        cap.density &= k.density;
        cap.survival_closed &= k.survival_closed;
        if (coords.size() == 2) {
            cap.conditional2d &= k.conditional2d;
            cap.tail_coeffs &= k.tail_coeffs;
        }
    }
    return cap;
}

double BlockProductCopula::cdf_raw(const Vector& u) const {
    double prod = 1.0;
    for (const auto& [coords, part] : parts_) {
        Vector sub(coords.size());
        for (size_t a = 0; a < coords.size(); ++a) sub[a] = u[coords[a] - 1];
        prod *= part->cdf(sub);
    }
    return prod;
}

double BlockProductCopula::density_raw(const Vector& u) const {
    double prod = 1.0;
    for (const auto& [coords, part] : parts_) {
        Vector sub(coords.size());
        for (size_t a = 0; a < coords.size(); ++a) sub[a] = u[coords[a] - 1];
        prod *= part->density(sub);
    }
    return prod;
}

double BlockProductCopula::conditional2d_raw(double u2, double u1) const {
    for (const auto& [coords, part] : parts_)
        if (coords.size() == 2) return part->conditional2d(u2, u1);
    return u2;  // the two coordinates sit in different independent blocks
}

TailCoeffs BlockProductCopula::tail_coeffs() const {
    if (dim() != 2) throw Error("tail_coeffs: bivariate models only");
    for (const auto& [coords, part] : parts_)
        if (coords.size() == 2) return part->tail_coeffs();
    return {0.0, 0.0};
}

CopulaPtr BlockProductCopula::margin(const Coords& coords) const {
    check_coords(coords, dim());
    if (coords.size() == 1) return independence(1);
    // position of each retained coordinate in the margined space
    std::vector<int> newpos(dim() + 1, 0);
    for (size_t a = 0; a < coords.size(); ++a) newpos[coords[a]] = int(a) + 1;
    std::vector<std::pair<Coords, CopulaPtr>> newparts;
    for (const auto& [pcoords, part] : parts_) {
        Coords local, kept;
        for (size_t a = 0; a < pcoords.size(); ++a) {
            if (newpos[pcoords[a]] > 0) {
                local.push_back(int(a) + 1);
                kept.push_back(newpos[pcoords[a]]);
            }
        }
        if (local.empty()) continue;
        newparts.emplace_back(std::move(kept), part->margin(local));
    }
    if (newparts.size() == 1) return newparts.front().second;
    return block_product(int(coords.size()), std::move(newparts));
}

CopulaPtr BlockProductCopula::survival() const {
    std::vector<std::pair<Coords, CopulaPtr>> newparts;
    newparts.reserve(parts_.size());
    for (const auto& [coords, part] : parts_) newparts.emplace_back(coords, part->survival());
    return block_product(dim(), std::move(newparts));
}

int BlockProductCopula::sample_uniform_count() const {
    int m = 0;
    for (const auto& [coords, part] : parts_) m += part->sample_uniform_count();
    return m;
}

void BlockProductCopula::sample_from_uniforms(const double* us, double* out) const {
    int off = 0;
    std::vector<double> sub;
    for (const auto& [coords, part] : parts_) {
        sub.resize(coords.size());
        part->sample_from_uniforms(us + off, sub.data());
        off += part->sample_uniform_count();
        for (size_t a = 0; a < coords.size(); ++a) out[coords[a] - 1] = sub[a];
    }
}

// ---------------------------------------------------------------------------
// Generic survival wrapper

SurvivalCopula::SurvivalCopula(CopulaPtr base) : Copula(base->dim()), base_(std::move(base)) {}

Capability SurvivalCopula::capability() const {
    Capability k = base_->capability();
    return {k.cdf && dim() <= sieve_dim_cap, k.density, k.conditional2d, false, k.tail_coeffs};
}

double SurvivalCopula::cdf_raw(const Vector& u) const {
    if (dim() > sieve_dim_cap)
        throw Error("survival: inclusion-exclusion dimension above the configured cap");
    const int d = dim();
    Vector point(d);
    double sum = 0.0;
    for (std::uint32_t mask = 0; mask < (std::uint32_t(1) << d); ++mask) {
        for (int j = 0; j < d; ++j) point[j] = (mask >> j) & 1u ? 1.0 - u[j] : 1.0;
        double term = base_->cdf(point);
        sum += (__builtin_popcount(mask) & 1) ? -term : term;
    }
    return std::clamp(sum, 0.0, 1.0);
}

double SurvivalCopula::density_raw(const Vector& u) const {
    return base_->density(Vector::Ones(dim()) - u);
}

double SurvivalCopula::conditional2d_raw(double u2, double u1) const {
    return 1.0 - base_->conditional2d(1.0 - u2, 1.0 - u1);
}

TailCoeffs SurvivalCopula::tail_coeffs() const {
    TailCoeffs k = base_->tail_coeffs();
    return {k.upper, k.lower};
}

CopulaPtr SurvivalCopula::margin(const Coords& coords) const {
    check_coords(coords, dim());
    return base_->margin(coords)->survival();
}

void SurvivalCopula::sample_from_uniforms(const double* us, double* out) const {
    base_->sample_from_uniforms(us, out);
    for (int j = 0; j < dim(); ++j) out[j] = 1.0 - out[j];
}

// ---------------------------------------------------------------------------

CopulaPtr independence(int d) { return std::make_shared<IndependenceCopula>(d); }
CopulaPtr comonotone(int d) { return std::make_shared<ComonotoneCopula>(d); }
CopulaPtr countermonotone() { return std::make_shared<CountermonotoneCopula>(); }
CopulaPtr clayton(double theta, int d) { return std::make_shared<ClaytonCopula>(theta, d); }
CopulaPtr gumbel(double theta, int d) { return std::make_shared<GumbelCopula>(theta, d); }
CopulaPtr gaussian_sample_only(const Matrix& correlation) {
    return std::make_shared<GaussianCopula>(correlation);
}
CopulaPtr finite_mixture(std::vector<double> weights, std::vector<CopulaPtr> components) {
    return std::make_shared<FiniteMixtureCopula>(std::move(weights), std::move(components));
}
CopulaPtr block_product(int d, std::vector<std::pair<Coords, CopulaPtr>> parts) {
    return std::make_shared<BlockProductCopula>(d, std::move(parts));
}
CopulaPtr survival_of(const CopulaPtr& c) { return c->survival(); }

double rectangle_probability(const Copula& c, const Vector& lo, const Vector& hi) {
    const int d = c.dim();
    if (lo.size() != d || hi.size() != d) throw Error("rectangle: dimension mismatch");
    if (d > sieve_dim_cap) throw Error("rectangle: dimension above the configured cap");
    for (int j = 0; j < d; ++j)
        if (lo[j] > hi[j]) throw Error("rectangle: lower corner above upper corner");
    Vector point(d);
    double sum = 0.0;
    for (std::uint32_t mask = 0; mask < (std::uint32_t(1) << d); ++mask) {
        for (int j = 0; j < d; ++j) point[j] = (mask >> j) & 1u ? lo[j] : hi[j];
        double term = c.cdf(point);
        sum += (__builtin_popcount(mask) & 1) ? -term : term;
    }
    return sum;
}

}  // namespace imcop
