#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace superosc {

/// Points per Gauss-Legendre panel. Exact for polynomials of degree <= 127.
inline constexpr int kGaussOrder = 64;

/// Gauss-Legendre nodes and weights on [-1, 1], ascending.
std::span<const double> gauss_nodes();
std::span<const double> gauss_weights();

/// Composite Gauss-Legendre rule: a set of nodes and weights covering a
/// union of panels.
class Quadrature {
public:
    Quadrature() = default;

    /// One panel per consecutive pair of breakpoints, each split into
    /// `subdivisions` equal pieces.
    static Quadrature composite(std::span<const double> breakpoints, int subdivisions = 1);

    /// `panels` equal panels on [lo, hi].
    static Quadrature uniform(double lo, double hi, int panels = 1);

    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> weights() const { return weights_; }
    std::size_t size() const { return nodes_.size(); }
    int panel_count() const { return panels_; }
    int order_per_panel() const { return kGaussOrder; }

    template <class F>
    double integrate(F&& f) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * f(nodes_[i]);
        return sum;
    }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
    int panels_ = 0;
};

/// Visit the Gauss-Legendre nodes of `panels` equal panels on [lo, hi]
/// without materializing a rule; fn(node, weight).
template <class Fn>
void for_each_gauss_node(double lo, double hi, int panels, Fn&& fn) {
    const auto x = gauss_nodes();
    const auto w = gauss_weights();
    const double width = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
        const double a = lo + width * p;
        const double half = 0.5 * width;
        const double mid = a + half;
        for (std::size_t i = 0; i < x.size(); ++i) fn(mid + half * x[i], half * w[i]);
    }
}

}  // namespace superosc
