#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "superosc/measurement.hpp"
#include "superosc/optics.hpp"
#include "superosc/orthopoly.hpp"
#include "superosc/scene.hpp"

namespace superosc {

/// How the port counts of one half-time configuration are drawn.
/// per_photon: each photon samples X ~ F and then a port from the
/// conditional probabilities at X (reference path).
/// aggregated: the photon number is drawn once and split multinomially
/// with the F-averaged port probabilities. Both give the same joint
/// distribution of counts.
enum class SamplingMode { aggregated, per_photon };

struct RunConfig {
    std::string scene = "rect";
    double delta = 0.1;
    double photons = 1e6;  // expected photons reaching the image plane, N
    int q_max = kDefaultQMax;
    int mu_max = 4;
    int trials = 200;
    std::uint64_t seed = 1;
    SamplingMode sampling = SamplingMode::aggregated;
};

/// Photon counts from one realization of both half-time configurations.
struct CountRecord {
    std::vector<std::int64_t> plus;              // n_q^+, q = 0..q_max-1
    std::vector<std::int64_t> minus;             // n_q^-
    std::vector<std::int64_t> passthrough_even;  // unpaired modes in the even-pairs configuration
    std::vector<std::int64_t> passthrough_odd;   // n_0 and unpaired top mode in the odd-pairs configuration
    std::int64_t lost = 0;                       // photons in modes above q_max
    std::int64_t detected = 0;                   // L

    std::int64_t n0() const { return passthrough_odd.empty() ? 0 : passthrough_odd[0]; }
    std::int64_t emitted() const { return detected + lost; }
};

struct EstimateRecord {
    std::int64_t detected = 0;
    std::vector<double> theta;  // nu = 0..2 ceil(mu_max/2); theta[0] == 1
    std::vector<double> beta;   // mu = 0..mu_max
};

/// Everything a run needs that does not change between trials.
class Experiment {
public:
    explicit Experiment(const RunConfig& cfg);
    Experiment(const RunConfig& cfg, SceneModel scene);

    const RunConfig& config() const { return cfg_; }
    const OpticalSystem& optics() const { return sys_; }
    const OrthoBasis& basis() const { return basis_; }
    const SceneModel& scene() const { return scene_; }
    const EstimatorPlan& plan() const { return plan_; }
    const PortModel& port_model() const { return ports_; }
    /// Fraction of arriving photons that reach a detector (both halves averaged).
    double detected_fraction() const;

private:
    RunConfig cfg_;
    OpticalSystem sys_;
    OrthoBasis basis_;
    SceneModel scene_;
    EstimatorPlan plan_;
    PortModel ports_;
};

/// Independent stream keyed by (seed, trial, stream).
std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t trial, std::uint32_t stream = 0);

/// One realization: L_b, L_c ~ Poisson(N/2) photons per configuration, each
/// routed to a port or lost.
CountRecord simulate_run(const Experiment& exp, std::mt19937_64& rng);

/// Moment and Fourier-coefficient estimates with L = total detected
/// photons across both configurations. Throws NoDataError when L = 0.
EstimateRecord estimate(const CountRecord& counts, const EstimatorPlan& plan);

struct QuantityStats {
    std::string name;   // theta_<nu> or beta_<mu>
    double truth;       // exact moment / coefficient of the scene
    double expected;    // exact mean of the estimator: quadrature of t_nu or b_mu against F, over detected fraction
    double mean;
    double variance;    // NaN when fewer than two valid trials
    double std_error;   // sqrt(variance / valid trials)
};

struct TrialResult {
    std::uint64_t trial = 0;
    bool valid = false;
    EstimateRecord estimate;
};

struct EnsembleStats {
    std::vector<TrialResult> trials;
    std::vector<QuantityStats> quantities;
    int invalid_trials = 0;

    const QuantityStats& quantity(const std::string& name) const;
};

/// T trials in parallel (OpenMP), one random stream per trial; results are
/// independent of thread count.
EnsembleStats run_ensemble(const Experiment& exp);
EnsembleStats run_ensemble(const RunConfig& cfg);
/// Single-threaded reference for run_ensemble.
EnsembleStats run_ensemble_serial(const Experiment& exp);

}  // namespace superosc
