#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "superosc/optics.hpp"
#include "superosc/orthopoly.hpp"
#include "superosc/scene.hpp"

namespace superosc {

/// Expected per-photon count fractions f_q^{+-} = (1/2) int h_q^{+-}(X) F(X) dX.
/// The 1/2 is the share of observation time spent in the configuration
/// that pairs modes q and q+1.
struct CountFractions {
    double plus = 0.0;
    double minus = 0.0;
};

CountFractions expected_fractions(const OpticalSystem& sys, const SceneModel& scene, int q);

/// How one moment estimate is formed from the counts of pair q:
/// theta_nu = scale * (n_q^+ - n_q^-) / L  (difference, nu = 2q+1)
/// theta_nu = scale * (n_q^+ + n_q^-) / L  (sum, nu = 2q)
/// theta_0 = 1                              (constant)
struct MomentEstimator {
    enum class Kind { constant, difference, sum };
    Kind kind = Kind::constant;
    int q = 0;
    double scale = 0.0;
};

/// Moment estimators for nu = 0..2 ceil(mu_max/2) and the assembly
/// matrix A(mu, nu) / Delta^nu mapping moments to Fourier coefficients.
class EstimatorPlan {
public:
    EstimatorPlan(const OpticalSystem& sys, const OrthoBasis& basis, double delta, int mu_max);

    int mu_max() const { return mu_max_; }
    int nu_max() const { return static_cast<int>(moments_.size()) - 1; }
    double delta() const { return delta_; }
    /// Highest PAD mode index the plan reads, ceil(mu_max/2) + 1.
    int modes_required() const { return (mu_max_ + 1) / 2 + 1; }

    const MomentEstimator& moment(int nu) const;
    double assembly(int mu, int nu) const;

private:
    int mu_max_;
    double delta_;
    std::vector<MomentEstimator> moments_;
    std::vector<double> assembly_;  // row-major (mu_max+1) x (mu_max+1)
};

/// Build the estimator for theta_nu. Throws ArgumentError when a required
/// H_q is below 1e-12.
MomentEstimator moment_estimator(const OpticalSystem& sys, int nu);

/// t_nu(X): the mean of theta_nu-hat for a point source at X, i.e.
/// scale/2 * (h_q^+ -+ h_q^-) evaluated through the identities
/// h^+ - h^- = 2 O_q O_{q+1} and h^+ + h^- = O_q^2 + O_{q+1}^2.
double moment_filter(const OpticalSystem& sys, const MomentEstimator& est, double X);
double moment_filter(const OpticalSystem& sys, int nu, double X);

/// b_mu(X) = sum_nu A(mu, nu)/Delta^nu t_nu(X), the linear functional the
/// measurement plus estimator applies to F, together with its target
/// a_mu(X/Delta). Holds references; `sys` and `basis` must outlive it.
class FilterFunction {
public:
    FilterFunction(const OpticalSystem& sys, const OrthoBasis& basis, double delta, int mu);

    int mu() const { return mu_; }
    double delta() const { return delta_; }
    double operator()(double X) const;
    double target(double X) const { return basis_.get()(mu_, X / delta_); }

private:
    std::reference_wrapper<const OpticalSystem> sys_;
    std::reference_wrapper<const OrthoBasis> basis_;
    double delta_;
    int mu_;
    std::vector<MomentEstimator> moments_;
    std::vector<double> weights_;  // A(mu, nu) / Delta^nu
};

FilterFunction filter_function(const OpticalSystem& sys, const OrthoBasis& basis, double delta, int mu);

/// b_mu on a grid. OpenMP-parallel over grid points.
std::vector<double> filter_grid(const FilterFunction& b, std::span<const double> xs);
/// Single-threaded reference for filter_grid.
std::vector<double> filter_grid_serial(const FilterFunction& b, std::span<const double> xs);

/// Per-photon output probabilities of one configuration, integrated over F.
struct ConfigurationModel {
    Configuration config;
    std::vector<Port> ports;
    std::vector<double> probabilities;  // one per port, then the lost probability
};

struct PortModel {
    std::array<ConfigurationModel, 2> configs;  // even_pairs, odd_pairs
};

PortModel expected_port_model(const OpticalSystem& sys, const SceneModel& scene);

/// Large-N variance of beta_mu-hat from the delta method applied to
/// independent Poisson port counts with means (photons/2) * probability.
double asymptotic_variance(const EstimatorPlan& plan, const PortModel& model, int mu, double photons);

}  // namespace superosc
