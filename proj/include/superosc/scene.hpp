#pragma once

#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "superosc/orthopoly.hpp"

namespace superosc {

/// Subdiffraction source F(X) = W(X/Delta)/Delta, with W a unit-mass
/// distribution on the normalized coordinate xi in [-1, 1]. Point sources
/// are kept as exact atoms.
class SceneModel {
public:
    enum class Shape { rect, point, two_point, table };

    static SceneModel rect(double delta);
    static SceneModel point(double delta, double xi0);
    /// Atoms at xi1 (weight w) and xi2 (weight 1 - w).
    static SceneModel two_point(double delta, double xi1, double xi2, double w);
    /// Piecewise-linear W through (xi, density); rescaled to unit mass.
    static SceneModel table(double delta, std::vector<double> xi, std::vector<double> density);

    /// `rect`, `point:0.3`, `two-point:-1,1,0.5`, `table:<path>`.
    static SceneModel parse(std::string_view spec, double delta);

    SceneModel with_delta(double delta) const;

    Shape shape() const { return shape_; }
    double delta() const { return delta_; }
    /// Canonical spec string.
    const std::string& spec() const { return spec_; }

    /// True when Delta >= 0.5, outside the regime the small-Delta expansions assume.
    bool outside_asymptotic_regime() const { return delta_ >= 0.5; }

    bool has_density() const { return shape_ == Shape::rect || shape_ == Shape::table; }
    /// W as a reference density on [-1, 1]; only for rect/table shapes.
    const ReferenceDensity& shape_density() const;

    /// Normalized positions xi_i and masses of the atoms (point shapes) or of
    /// the Gauss nodes (density shapes). Sum of masses is one.
    std::span<const double> xi_nodes() const { return xi_; }
    std::span<const double> masses() const { return mass_; }

    /// int g(X) F(X) dX.
    template <class G>
    double expectation(G&& g) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < xi_.size(); ++i) sum += mass_[i] * g(delta_ * xi_[i]);
        return sum;
    }

    /// Same with every density panel split into `subdivisions` pieces.
    template <class G>
    double expectation(G&& g, int subdivisions) const {
        if (!has_density() || subdivisions <= 1) return expectation(g);
        const auto& w = shape_density();
        const auto rule = Quadrature::composite(w.breakpoints(), subdivisions);
        return rule.integrate([&](double xi) { return w(xi) * g(delta_ * xi); });
    }

    /// theta_nu = int X^nu F(X) dX for nu = 0..nu_max; theta_0 = 1.
    std::vector<double> moments(int nu_max) const;

    /// One source position X ~ F.
    double sample(std::mt19937_64& rng) const;

    /// P(X' <= X).
    double cdf(double X) const;

private:
    SceneModel() = default;
    void init_nodes();

    Shape shape_ = Shape::rect;
    double delta_ = 0.0;
    std::string spec_;
    std::vector<double> atom_xi_;
    std::vector<double> atom_w_;
    std::vector<ReferenceDensity> density_;  // zero or one element
    std::vector<double> cum_mass_;           // table: cumulative mass at breakpoints
    std::vector<double> xi_;
    std::vector<double> mass_;
};

struct GroundTruth {
    std::vector<double> moments;  // theta_nu, nu = 0..2 mu_max
    std::vector<double> coeffs;   // beta_mu, mu = 0..mu_max
};

/// beta_mu for mu = 0..basis.order_max(), computed by direct quadrature of
/// a_mu against W and cross-checked against the moment assembly
/// sum_nu A(mu, nu) theta_nu / Delta^nu. Throws ConsistencyError if the two
/// routes differ by more than 1e-9.
std::vector<double> fourier_coeffs(const SceneModel& scene, const OrthoBasis& basis);

GroundTruth ground_truth(const SceneModel& scene, const OrthoBasis& basis);

}  // namespace superosc
