#include "superosc/orthopoly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include "superosc/errors.hpp"

namespace superosc {
namespace {

constexpr double kMassTolerance = 1e-12;
// Squared residual norm relative to the squared monomial norm below which
// the moment matrix is treated as numerically singular.
constexpr double kConditioningFloor = 1e-24;
constexpr double kGramTolerance = 1e-9;

}  // namespace

ReferenceDensity::ReferenceDensity(Kind kind, std::vector<double> breakpoints, std::vector<double> values)
    : kind_(kind), breakpoints_(std::move(breakpoints)), values_(std::move(values)) {}

void ReferenceDensity::finish() {
    quad_ = Quadrature::composite(breakpoints_);
    const auto x = quad_.nodes();
    const auto w = quad_.weights();
    weighted_.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) weighted_[i] = w[i] * (*this)(x[i]);
}

ReferenceDensity ReferenceDensity::rectangle(double half_width) {
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw ArgumentError("degenerate reference density: rectangle half-width must be positive");
    ReferenceDensity d(Kind::rectangle, {-half_width, half_width}, {});
    d.finish();
    return d;
}

double ReferenceDensity::raw_mass() const {
    // Trapezoid rule is exact for a piecewise-linear density.
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i)
        mass += 0.5 * (values_[i] + values_[i + 1]) * (breakpoints_[i + 1] - breakpoints_[i]);
    return mass;
}

namespace {

void validate_table(const std::vector<double>& points, const std::vector<double>& values) {
    if (points.size() != values.size()) throw ArgumentError("tabulated density: column lengths differ");
    if (points.size() < 2) throw ArgumentError("tabulated density: need at least two points");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i]) || !std::isfinite(values[i]))
            throw ArgumentError("tabulated density: non-finite entry");
        if (values[i] < 0.0) throw ArgumentError(fmt::format("tabulated density: negative value at x={}", points[i]));
        if (i > 0 && !(points[i] > points[i - 1]))
            throw ArgumentError("tabulated density: points must be strictly increasing");
    }
}

}  // namespace

ReferenceDensity ReferenceDensity::tabulated(std::vector<double> points, std::vector<double> values) {
    validate_table(points, values);
    ReferenceDensity d(Kind::tabulated, std::move(points), std::move(values));
    const double mass = d.raw_mass();
    if (!(mass > 0.0)) throw ArgumentError("degenerate reference density: zero measure");
    if (std::abs(mass - 1.0) > kMassTolerance)
        throw NormalizationError(fmt::format("tabulated density integrates to {:.17g}, expected 1", mass));
    d.finish();
    return d;
}

ReferenceDensity ReferenceDensity::normalized(std::vector<double> points, std::vector<double> values) {
    validate_table(points, values);
    ReferenceDensity d(Kind::tabulated, std::move(points), std::move(values));
    const double mass = d.raw_mass();
    if (!(mass > 0.0)) throw ArgumentError("degenerate reference density: zero measure");
    for (double& v : d.values_) v /= mass;
    d.finish();
    return d;
}

double ReferenceDensity::operator()(double x) const {
    if (x < lower() || x > upper()) return 0.0;
    if (kind_ == Kind::rectangle) return 1.0 / (upper() - lower());
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    if (it == breakpoints_.end()) return values_.back();
    const auto i = static_cast<std::size_t>(it - breakpoints_.begin());
    const double t = (x - breakpoints_[i - 1]) / (breakpoints_[i] - breakpoints_[i - 1]);
    return values_[i - 1] + t * (values_[i] - values_[i - 1]);
}

bool ReferenceDensity::is_even(double tol) const {
    if (std::abs(lower() + upper()) > tol * std::max(1.0, upper())) return false;
    for (double x : quad_.nodes())
        if (std::abs((*this)(x) - (*this)(-x)) > tol * std::max(1.0, (*this)(x))) return false;
    return true;
}

double OrthoBasis::coeff(int mu, int nu) const {
    if (mu < 0 || mu > order_max_ || nu < 0 || nu > order_max_)
        throw ArgumentError(fmt::format("basis index ({}, {}) outside order {}", mu, nu, order_max_));
    return coeffs_[static_cast<std::size_t>(mu) * (order_max_ + 1) + nu];
}

std::span<const double> OrthoBasis::row(int mu) const {
    if (mu < 0 || mu > order_max_)
        throw ArgumentError(fmt::format("polynomial index {} outside [0, {}]", mu, order_max_));
    return {coeffs_.data() + static_cast<std::size_t>(mu) * (order_max_ + 1), static_cast<std::size_t>(mu) + 1};
}

double OrthoBasis::operator()(int mu, double x) const { return horner(row(mu), x); }

std::vector<double> OrthoBasis::gram() const {
    const int n = order_max_ + 1;
    const auto nodes = reference_.quadrature().nodes();
    const auto w = reference_.density_weights();
    std::vector<double> values(static_cast<std::size_t>(n) * nodes.size());
    for (int mu = 0; mu < n; ++mu)
        for (std::size_t i = 0; i < nodes.size(); ++i) values[mu * nodes.size() + i] = (*this)(mu, nodes[i]);
    std::vector<double> g(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b <= a; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < nodes.size(); ++i) s += w[i] * values[a * nodes.size() + i] * values[b * nodes.size() + i];
            g[a * n + b] = g[b * n + a] = s;
        }
    return g;
}

OrthoBasis build_basis(const ReferenceDensity& reference, int order_max) {
    if (order_max < 0 || order_max > kOrderCap)
        throw ArgumentError(fmt::format("basis order {} outside [0, {}]", order_max, kOrderCap));

    const int n = order_max + 1;
    const auto nodes = reference.quadrature().nodes();
    const auto w = reference.density_weights();

    auto dot = [&](std::span<const double> p, std::span<const double> q) {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += w[i] * horner(p, nodes[i]) * horner(q, nodes[i]);
        return s;
    };

    std::vector<double> coeffs(static_cast<std::size_t>(n) * n, 0.0);
    auto row = [&](int mu) { return std::span<double>(coeffs.data() + static_cast<std::size_t>(mu) * n, mu + 1); };

    for (int m = 0; m < n; ++m) {
        std::vector<double> v(m + 1, 0.0);
        v[m] = 1.0;
        const double monomial_norm2 = dot(v, v);
        for (int pass = 0; pass < 2; ++pass) {
            for (int j = 0; j < m; ++j) {
                const auto aj = row(j);
                const double c = dot(v, aj);
                for (int k = 0; k <= j; ++k) v[k] -= c * aj[k];
            }
        }
        const double norm2 = dot(v, v);
        if (!(norm2 > kConditioningFloor * monomial_norm2))
            throw ConditioningError(
                fmt::format("moment matrix lost positive-definiteness at order {} (residual {:.3g})", m, norm2), m);
        const double scale = 1.0 / std::sqrt(norm2);
        auto out = row(m);
        for (int k = 0; k <= m; ++k) out[k] = v[k] * scale;
    }

    OrthoBasis basis(reference, order_max, std::move(coeffs));
    const auto g = basis.gram();
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (std::abs(g[a * n + b] - (a == b ? 1.0 : 0.0)) > kGramTolerance)
                throw ConditioningError(
                    fmt::format("orthonormality lost at order {} (Gram entry {:.3g})", std::max(a, b), g[a * n + b]),
                    std::max(a, b));
    return basis;
}

}  // namespace superosc
