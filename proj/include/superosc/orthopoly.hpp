#pragma once

#include <span>
#include <vector>

#include "superosc/quadrature.hpp"

namespace superosc {

/// Probability density with bounded support, used as the weight of an
/// inner product. Immutable after construction.
class ReferenceDensity {
public:
    enum class Kind { rectangle, tabulated };

    /// Uniform density 1/(2 half_width) on [-half_width, half_width].
    static ReferenceDensity rectangle(double half_width = 1.0);

    /// Piecewise-linear density through (points[i], values[i]), zero
    /// outside. Throws NormalizationError unless it integrates to one
    /// within 1e-12.
    static ReferenceDensity tabulated(std::vector<double> points, std::vector<double> values);

    /// Same as tabulated() but rescales the values to unit mass first.
    static ReferenceDensity normalized(std::vector<double> points, std::vector<double> values);

    Kind kind() const { return kind_; }
    double lower() const { return breakpoints_.front(); }
    double upper() const { return breakpoints_.back(); }
    std::span<const double> breakpoints() const { return breakpoints_; }

    double operator()(double x) const;

    /// Whether density(x) == density(-x) within `tol` on the quadrature nodes.
    bool is_even(double tol = 1e-12) const;

    /// Gauss-Legendre rule over the support, one panel per breakpoint interval.
    const Quadrature& quadrature() const { return quad_; }

    /// Quadrature weights multiplied by the density at each node.
    std::span<const double> density_weights() const { return weighted_; }

    /// Integral of f against the density.
    template <class F>
    double integrate(F&& f) const {
        const auto x = quad_.nodes();
        double sum = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) sum += weighted_[i] * f(x[i]);
        return sum;
    }

private:
    ReferenceDensity(Kind kind, std::vector<double> breakpoints, std::vector<double> values);
    double raw_mass() const;
    void finish();

    Kind kind_;
    std::vector<double> breakpoints_;
    std::vector<double> values_;  // tabulated only
    Quadrature quad_;
    std::vector<double> weighted_;
};

inline constexpr int kDefaultOrderMax = 8;
inline constexpr int kOrderCap = 16;

/// Orthonormal polynomials a_mu(x) = sum_nu A(mu, nu) x^nu with respect to
/// a reference density. A is lower triangular with positive diagonal.
class OrthoBasis {
public:
    const ReferenceDensity& reference() const { return reference_; }
    int order_max() const { return order_max_; }

    /// A(mu, nu); zero above the diagonal.
    double coeff(int mu, int nu) const;

    /// Row mu of A, lowest degree first (length mu + 1).
    std::span<const double> row(int mu) const;

    /// a_mu(x) by Horner accumulation. Throws ArgumentError when mu is out of range.
    double operator()(int mu, double x) const;

    /// Numerical Gram matrix <a_mu, a_nu>, row-major (order_max+1)^2.
    std::vector<double> gram() const;

private:
    friend OrthoBasis build_basis(const ReferenceDensity&, int);
    OrthoBasis(ReferenceDensity reference, int order_max, std::vector<double> coeffs)
        : reference_(std::move(reference)), order_max_(order_max), coeffs_(std::move(coeffs)) {}

    ReferenceDensity reference_;
    int order_max_;
    std::vector<double> coeffs_;  // row-major (order_max+1)^2
};

/// Gram-Schmidt on 1, x, x^2, ... (modified form, one re-orthogonalization
/// pass). Throws ConditioningError naming the order at which the residual
/// norm collapses, ArgumentError for order_max outside [0, kOrderCap].
OrthoBasis build_basis(const ReferenceDensity& reference, int order_max = kDefaultOrderMax);

/// Horner evaluation of sum_k coeffs[k] x^k.
inline double horner(std::span<const double> coeffs, double x) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

/// <f, g> with respect to `density`.
template <class F, class G>
double inner_product(F&& f, G&& g, const ReferenceDensity& density) {
    return density.integrate([&](double x) { return f(x) * g(x); });
}

}  // namespace superosc
