#include "superosc/simulator.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "superosc/errors.hpp"

namespace superosc {
namespace {

std::int64_t draw_poisson(double mean, std::mt19937_64& rng) {
    if (!(mean > 0.0)) return 0;
    std::poisson_distribution<std::int64_t> d(mean);
    return d(rng);
}

struct HalfCounts {
    std::vector<std::int64_t> ports;  // aligned with ConfigurationModel::ports
    std::int64_t lost = 0;
};

// Multinomial split by sequential conditional binomials.
HalfCounts split_aggregated(const ConfigurationModel& m, std::int64_t photons, std::mt19937_64& rng) {
    HalfCounts out;
    out.ports.assign(m.ports.size(), 0);
    std::int64_t remaining = photons;
    double remaining_prob = 1.0;
    for (std::size_t k = 0; k < m.ports.size() && remaining > 0; ++k) {
        const double p = remaining_prob > 0.0 ? std::clamp(m.probabilities[k] / remaining_prob, 0.0, 1.0) : 0.0;
        std::binomial_distribution<std::int64_t> d(remaining, p);
        const std::int64_t n = p >= 1.0 ? remaining : d(rng);
        out.ports[k] = n;
        remaining -= n;
        remaining_prob -= m.probabilities[k];
    }
    out.lost = remaining;
    return out;
}

HalfCounts route_photons(const Experiment& exp, const ConfigurationModel& m, std::int64_t photons,
                         std::mt19937_64& rng) {
    HalfCounts out;
    out.ports.assign(m.ports.size(), 0);
    const auto& sys = exp.optics();
    std::vector<double> o(sys.q_max() + 1);
    std::vector<double> p(m.ports.size() + 1);
    for (std::int64_t i = 0; i < photons; ++i) {
        const double X = exp.scene().sample(rng);
        sys.overlaps(X, o);
        port_probabilities(sys, m.ports, o, p);
        double u = std::generate_canonical<double, 64>(rng);
        std::size_t k = 0;
        for (; k < m.ports.size(); ++k) {
            if (u < p[k]) break;
            u -= p[k];
        }
        if (k < m.ports.size())
            ++out.ports[k];
        else
            ++out.lost;
    }
    return out;
}

void record_half(const ConfigurationModel& m, const HalfCounts& half, CountRecord& rec) {
    for (std::size_t k = 0; k < m.ports.size(); ++k) {
        const Port& port = m.ports[k];
        const std::int64_t n = half.ports[k];
        switch (port.kind) {
            case Port::Kind::pair_plus: rec.plus[port.q] += n; break;
            case Port::Kind::pair_minus: rec.minus[port.q] += n; break;
            case Port::Kind::passthrough:
                (m.config == Configuration::even_pairs ? rec.passthrough_even : rec.passthrough_odd)[port.q] += n;
                break;
        }
        rec.detected += n;
    }
    rec.lost += half.lost;
}

double stable_mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

}  // namespace

Experiment::Experiment(const RunConfig& cfg) : Experiment(cfg, SceneModel::parse(cfg.scene, cfg.delta)) {}

Experiment::Experiment(const RunConfig& cfg, SceneModel scene)
    : cfg_(cfg),
      sys_(build_optics(OtfKind::rectangular, 3.14159265358979323846, cfg.q_max)),
      basis_(build_basis(ReferenceDensity::rectangle(1.0), std::max(cfg.mu_max, 0))),
      scene_(std::move(scene)),
      plan_(sys_, basis_, scene_.delta(), cfg.mu_max),
      ports_(expected_port_model(sys_, scene_)) {
    if (!(cfg.photons >= 0.0) || !std::isfinite(cfg.photons)) throw ArgumentError("photon number must be nonnegative");
    if (cfg.trials < 1) throw ArgumentError("trial count must be at least 1");
}

double Experiment::detected_fraction() const {
    double lost = 0.0;
    for (const auto& m : ports_.configs) lost += 0.5 * m.probabilities.back();
    return 1.0 - lost;
}

std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t trial, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32), stream};
    return std::mt19937_64(seq);
}

CountRecord simulate_run(const Experiment& exp, std::mt19937_64& rng) {
    const int q_max = exp.optics().q_max();
    CountRecord rec;
    rec.plus.assign(q_max, 0);
    rec.minus.assign(q_max, 0);
    rec.passthrough_even.assign(q_max + 1, 0);
    rec.passthrough_odd.assign(q_max + 1, 0);
    const double half_mean = 0.5 * exp.config().photons;
    for (const auto& m : exp.port_model().configs) {
        const std::int64_t photons = draw_poisson(half_mean, rng);
        const HalfCounts half = exp.config().sampling == SamplingMode::per_photon
                                    ? route_photons(exp, m, photons, rng)
                                    : split_aggregated(m, photons, rng);
        record_half(m, half, rec);
    }
    return rec;
}

EstimateRecord estimate(const CountRecord& counts, const EstimatorPlan& plan) {
    if (counts.detected <= 0) throw NoDataError("no photons detected; estimator undefined at L = 0");
    const double L = static_cast<double>(counts.detected);
    EstimateRecord out;
    out.detected = counts.detected;
    out.theta.resize(plan.nu_max() + 1);
    for (int nu = 0; nu <= plan.nu_max(); ++nu) {
        const auto& est = plan.moment(nu);
        switch (est.kind) {
            case MomentEstimator::Kind::constant: out.theta[nu] = 1.0; break;
            case MomentEstimator::Kind::difference:
                out.theta[nu] = est.scale * static_cast<double>(counts.plus[est.q] - counts.minus[est.q]) / L;
                break;
            case MomentEstimator::Kind::sum:
                out.theta[nu] = est.scale * static_cast<double>(counts.plus[est.q] + counts.minus[est.q]) / L;
                break;
        }
    }
    out.beta.assign(plan.mu_max() + 1, 0.0);
    for (int mu = 0; mu <= plan.mu_max(); ++mu)
        for (int nu = 0; nu <= mu; ++nu) out.beta[mu] += plan.assembly(mu, nu) * out.theta[nu];
    return out;
}

const QuantityStats& EnsembleStats::quantity(const std::string& name) const {
    for (const auto& q : quantities)
        if (q.name == name) return q;
    throw ArgumentError(fmt::format("no ensemble quantity named '{}'", name));
}

namespace {

TrialResult run_trial(const Experiment& exp, std::uint64_t trial) {
    auto rng = trial_stream(exp.config().seed, trial);
    const CountRecord counts = simulate_run(exp, rng);
    TrialResult r;
    r.trial = trial;
    r.estimate.detected = counts.detected;
    if (counts.detected > 0) {
        r.estimate = estimate(counts, exp.plan());
        r.valid = true;
    }
    return r;
}

EnsembleStats summarize(const Experiment& exp, std::vector<TrialResult> trials) {
    EnsembleStats stats;
    stats.trials = std::move(trials);
    for (const auto& t : stats.trials)
        if (!t.valid) ++stats.invalid_trials;

    const auto& plan = exp.plan();
    const auto truth = ground_truth(exp.scene(), exp.basis());
    const double detected = exp.detected_fraction();
    const auto& sys = exp.optics();
    const auto& scene = exp.scene();

    auto add = [&](std::string name, double true_value, double expected, auto&& pick) {
        std::vector<double> xs;
        for (const auto& t : stats.trials)
            if (t.valid) xs.push_back(pick(t.estimate));
        QuantityStats q{std::move(name), true_value, expected, std::numeric_limits<double>::quiet_NaN(),
                        std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
        if (!xs.empty()) q.mean = stable_mean(xs);
        if (xs.size() >= 2) {
            double ss = 0.0;
            for (double x : xs) ss += (x - q.mean) * (x - q.mean);
            q.variance = ss / static_cast<double>(xs.size() - 1);
            q.std_error = std::sqrt(q.variance / static_cast<double>(xs.size()));
        }
        stats.quantities.push_back(std::move(q));
    };

    for (int nu = 0; nu <= plan.nu_max(); ++nu) {
        const auto& est = plan.moment(nu);
        const double expected =
            nu == 0 ? 1.0 : scene.expectation([&](double X) { return moment_filter(sys, est, X); }) / detected;
        const double true_value = nu < static_cast<int>(truth.moments.size()) ? truth.moments[nu]
                                                                              : scene.moments(nu)[nu];
        add(fmt::format("theta_{}", nu), true_value, expected, [nu](const EstimateRecord& e) { return e.theta[nu]; });
    }
    for (int mu = 0; mu <= plan.mu_max(); ++mu) {
        const FilterFunction b(sys, exp.basis(), scene.delta(), mu);
        // b_0 = A_00 is not divided by the detected fraction: theta_0 = 1 exactly.
        double expected = exp.basis().coeff(mu, 0);
        expected += (scene.expectation(b) - expected) / detected;
        add(fmt::format("beta_{}", mu), truth.coeffs[mu], expected, [mu](const EstimateRecord& e) { return e.beta[mu]; });
    }
    return stats;
}

}  // namespace

EnsembleStats run_ensemble(const Experiment& exp) {
    const auto n = static_cast<std::int64_t>(exp.config().trials);
    std::vector<TrialResult> trials(n);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t t = 0; t < n; ++t) trials[t] = run_trial(exp, static_cast<std::uint64_t>(t));
    return summarize(exp, std::move(trials));
}

EnsembleStats run_ensemble(const RunConfig& cfg) { return run_ensemble(Experiment(cfg)); }

EnsembleStats run_ensemble_serial(const Experiment& exp) {
    const auto n = static_cast<std::int64_t>(exp.config().trials);
    std::vector<TrialResult> trials(n);
    for (std::int64_t t = 0; t < n; ++t) trials[t] = run_trial(exp, static_cast<std::uint64_t>(t));
    return summarize(exp, std::move(trials));
}

}  // namespace superosc
