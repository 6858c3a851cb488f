#include "superosc/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>

#include "superosc/bounds.hpp"
#include "superosc/csv.hpp"
#include "superosc/errors.hpp"
#include "superosc/measurement.hpp"
#include "superosc/optics.hpp"
#include "superosc/orthopoly.hpp"
#include "superosc/parallel.hpp"
#include "superosc/scene.hpp"
#include "superosc/simulator.hpp"

namespace superosc::cli {
namespace {

constexpr double kPi = 3.14159265358979323846;

struct Options {
    std::optional<double> delta;
    std::vector<double> deltas;
    std::optional<double> photons;
    std::optional<int> trials;
    std::optional<int> mu_max;
    int q_max = kDefaultQMax;
    std::uint64_t seed = 1;
    std::string scene = "rect";
    std::string out = "-";
    std::string summary;
    bool assert_slopes = false;
    std::string grid = "-3:3:1201";
    double tolerance = 0.5;
    std::string sampling = "aggregated";
    double window = 40.0;
    int refinement = 1;
};

const std::vector<double> kDefaultDeltas{0.05, 0.07, 0.1, 0.14, 0.2};

struct Grid {
    double lo, hi;
    int n;
    std::vector<double> points() const {
        std::vector<double> xs(n);
        for (int i = 0; i < n; ++i) xs[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
        return xs;
    }
};

Grid parse_grid(const std::string& text) {
    Grid g{};
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    in >> g.lo >> c1 >> g.hi >> c2 >> g.n;
    if (in.fail() || c1 != ':' || c2 != ':' || !(in >> std::ws).eof() || g.n < 1 || !(g.hi >= g.lo))
        throw ParseError(fmt::format("--grid '{}': expected lo:hi:n with lo <= hi and n >= 1", text));
    return g;
}

std::string summary_path(const Options& o) {
    if (!o.summary.empty()) return o.summary;
    if (o.out == "-") return "-";
    const std::filesystem::path p(o.out);
    return (p.parent_path() / (p.stem().string() + "_summary.csv")).string();
}

// Summary streams go to stderr when the main output is stdout.
std::unique_ptr<CsvWriter> open_summary(const Options& o) {
    const auto path = summary_path(o);
    if (path == "-") return std::make_unique<CsvWriter>(std::cerr);
    return std::make_unique<CsvWriter>(path, std::initializer_list<std::string_view>{});
}

void warn_regime(double delta) {
    if (delta >= 0.5)
        std::cerr << fmt::format("warning: Delta={} is not small; small-Delta expansions may not hold\n", delta);
}

SamplingMode parse_sampling(const std::string& s) {
    if (s == "aggregated") return SamplingMode::aggregated;
    if (s == "per-photon") return SamplingMode::per_photon;
    throw ParseError(fmt::format("--sampling '{}': expected aggregated or per-photon", s));
}

int cmd_filters(const Options& o) {
    const double delta = o.delta.value_or(0.2);
    const int mu_max = o.mu_max.value_or(8);
    if (mu_max < 1) throw ArgumentError("--mu-max must be at least 1");
    warn_regime(delta);
    const auto sys = build_optics(OtfKind::rectangular, kPi, o.q_max);
    const auto basis = build_basis(ReferenceDensity::rectangle(1.0), mu_max);
    const auto xs = parse_grid(o.grid).points();
    CsvWriter csv(o.out, {"mu", "X", "b", "a_target"});
    for (int mu = 1; mu <= mu_max; ++mu) {
        const FilterFunction b(sys, basis, delta, mu);
        const auto values = filter_grid(b, xs);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double target = std::abs(xs[i]) <= delta ? b.target(xs[i]) : std::nan("");
            csv.field(mu).field(xs[i]).field(values[i]).field(target);
            csv.end_row();
        }
    }
    csv.flush();
    return kExitOk;
}

int cmd_modes(const Options& o) {
    const auto sys = build_optics(OtfKind::rectangular, kPi, o.q_max);
    const auto xs = parse_grid(o.grid).points();
    CsvWriter csv(o.out, {"q", "x", "phi_re", "phi_im", "h_plus", "h_minus"});
    for (int q = 0; q <= sys.q_max(); ++q) {
        for (double x : xs) {
            const auto phi = sys.pad_mode(q, x);
            const bool paired = q < sys.q_max();
            csv.field(q).field(x).field(phi.real()).field(phi.imag());
            csv.field(paired ? sys.pair_response(q, Sign::plus, x) : std::nan(""));
            csv.field(paired ? sys.pair_response(q, Sign::minus, x) : std::nan(""));
            csv.end_row();
        }
    }
    csv.flush();
    return kExitOk;
}

RunConfig run_config(const Options& o, double delta, int default_trials, int default_mu_max) {
    RunConfig cfg;
    cfg.scene = o.scene;
    cfg.delta = delta;
    cfg.photons = o.photons.value_or(1e6);
    cfg.q_max = o.q_max;
    cfg.mu_max = o.mu_max.value_or(default_mu_max);
    cfg.trials = o.trials.value_or(default_trials);
    cfg.seed = o.seed;
    cfg.sampling = parse_sampling(o.sampling);
    return cfg;
}

int cmd_simulate(const Options& o) {
    const RunConfig cfg = run_config(o, o.delta.value_or(0.1), 200, 4);
    warn_regime(cfg.delta);
    const Experiment exp(cfg);
    const auto stats = run_ensemble(exp);
    const auto& plan = exp.plan();

    std::vector<std::string> header{"trial", "L"};
    for (int nu = 0; nu <= plan.nu_max(); ++nu) header.push_back(fmt::format("theta_{}", nu));
    for (int mu = 0; mu <= plan.mu_max(); ++mu) header.push_back(fmt::format("beta_{}", mu));
    CsvWriter trials(o.out, {});
    trials.header(header);
    for (const auto& t : stats.trials) {
        trials.field(static_cast<long long>(t.trial)).field(static_cast<long long>(t.estimate.detected));
        for (int nu = 0; nu <= plan.nu_max(); ++nu) trials.field(t.valid ? t.estimate.theta[nu] : std::nan(""));
        for (int mu = 0; mu <= plan.mu_max(); ++mu) trials.field(t.valid ? t.estimate.beta[mu] : std::nan(""));
        trials.end_row();
    }
    trials.flush();

    auto summary = open_summary(o);
    summary->header({"quantity", "truth", "expected", "mean", "variance", "stderr"});
    for (const auto& q : stats.quantities) {
        summary->field(q.name).field(q.truth).field(q.expected).field(q.mean).field(q.variance).field(q.std_error);
        summary->end_row();
    }
    summary->flush();
    if (stats.invalid_trials > 0)
        std::cerr << fmt::format("note: {} of {} trials detected no photons and were excluded\n",
                                 stats.invalid_trials, cfg.trials);
    return kExitOk;
}

void write_slopes(CsvWriter& csv, const std::vector<ScalingReport>& reports) {
    csv.header({"quantity", "mu", "slope", "intercept", "target", "tolerance", "check", "residual_rms", "pass"});
    for (const auto& r : reports) {
        const char* check = r.check == ScalingReport::Check::two_sided ? "two_sided"
                            : r.check == ScalingReport::Check::at_least ? "at_least"
                                                                        : "at_most";
        csv.field(r.quantity).field(r.mu).field(r.slope).field(r.intercept).field(r.target).field(r.tolerance);
        csv.field(check).field(r.residual_rms).field(r.passes() ? "true" : "false");
        csv.end_row();
    }
    csv.flush();
}

int report_assertions(const Options& o, const std::vector<ScalingReport>& reports) {
    if (!o.assert_slopes) return kExitOk;
    bool ok = true;
    for (const auto& r : reports) {
        if (!r.passes()) {
            ok = false;
            std::cerr << fmt::format("slope check failed: {} mu={} slope={:.4f} target={} tol={}\n", r.quantity, r.mu,
                                     r.slope, r.target, r.tolerance);
        }
    }
    return ok ? kExitOk : kExitAssertFailed;
}

std::vector<double> sweep_deltas(const Options& o) {
    auto deltas = o.deltas.empty() ? kDefaultDeltas : o.deltas;
    if (o.assert_slopes && deltas.size() < 4)
        throw InsufficientGridError(fmt::format("--assert needs at least 4 Delta values, got {}", deltas.size()));
    for (double d : deltas) warn_regime(d);
    return deltas;
}

struct BoundsGrid {
    std::vector<std::vector<double>> fisher;  // [mu-1][delta]
    std::vector<std::vector<double>> crb;
};

BoundsGrid direct_bounds(const OpticalSystem& sys, const OrthoBasis& basis, const std::string& scene_spec,
                         std::span<const double> deltas, int mu_max, double photons, const ImagingWindow& window) {
    BoundsGrid g;
    for (int mu = 1; mu <= mu_max; ++mu) {
        g.fisher.emplace_back();
        g.crb.emplace_back();
        for (double d : deltas) {
            const auto sub = make_submodel(basis, SceneModel::parse(scene_spec, d), mu);
            const double J = fisher_direct(sys, sub, window);
            g.fisher.back().push_back(J);
            g.crb.back().push_back(crb_direct(sub.d_beta, J, photons));
        }
    }
    return g;
}

int cmd_scaling(const Options& o) {
    const auto deltas = sweep_deltas(o);
    const int mu_max = o.mu_max.value_or(4);
    const auto sys = build_optics(OtfKind::rectangular, kPi, o.q_max);
    const auto basis = build_basis(ReferenceDensity::rectangle(1.0), mu_max);
    const ImagingWindow window{o.window, o.refinement};
    const double photons = o.photons.value_or(1e6);

    std::vector<std::vector<double>> variance(mu_max, std::vector<double>(deltas.size()));
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        const auto stats = run_ensemble(Experiment(run_config(o, deltas[i], 400, mu_max)));
        for (int mu = 1; mu <= mu_max; ++mu) variance[mu - 1][i] = stats.quantity(fmt::format("beta_{}", mu)).variance;
    }
    const auto bounds = direct_bounds(sys, basis, o.scene, deltas, mu_max, photons, window);

    CsvWriter csv(o.out, {"mu", "delta", "variance", "crb", "ratio"});
    for (int mu = 1; mu <= mu_max; ++mu)
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            const double v = variance[mu - 1][i];
            const double c = bounds.crb[mu - 1][i];
            csv.field(mu).field(deltas[i]).field(v).field(c).field(c / v);
            csv.end_row();
        }
    csv.flush();

    if (deltas.size() < 4) {
        std::cerr << "note: fewer than 4 Delta values; slope summary skipped\n";
        return kExitOk;
    }
    ScalingTolerances tol;
    tol.variance = o.tolerance;
    std::vector<ScalingReport> reports;
    for (int mu = 1; mu <= mu_max; ++mu) {
        auto r = compare_scalings(mu, deltas, variance[mu - 1], bounds.crb[mu - 1], tol);
        reports.insert(reports.end(), r.begin(), r.end());
    }
    auto summary = open_summary(o);
    write_slopes(*summary, reports);
    return report_assertions(o, reports);
}

int cmd_fisher(const Options& o) {
    const auto deltas = sweep_deltas(o);
    const int mu_max = o.mu_max.value_or(3);
    const double photons = o.photons.value_or(1e6);
    const auto sys = build_optics(OtfKind::rectangular, kPi, o.q_max);
    const auto basis = build_basis(ReferenceDensity::rectangle(1.0), mu_max);
    const ImagingWindow window{o.window, o.refinement};
    const auto bounds = direct_bounds(sys, basis, o.scene, deltas, mu_max, photons, window);

    std::vector<std::vector<double>> v_spade(mu_max, std::vector<double>(deltas.size()));
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        const auto scene = SceneModel::parse(o.scene, deltas[i]);
        const EstimatorPlan plan(sys, basis, deltas[i], mu_max);
        const auto ports = expected_port_model(sys, scene);
        for (int mu = 1; mu <= mu_max; ++mu) v_spade[mu - 1][i] = asymptotic_variance(plan, ports, mu, photons);
    }

    CsvWriter csv(o.out, {"mu", "delta", "J", "crb", "v_spade", "ratio"});
    for (int mu = 1; mu <= mu_max; ++mu)
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            const double c = bounds.crb[mu - 1][i];
            const double v = v_spade[mu - 1][i];
            csv.field(mu).field(deltas[i]).field(bounds.fisher[mu - 1][i]).field(c).field(v).field(c / v);
            csv.end_row();
        }
    csv.flush();

    if (deltas.size() < 4) {
        std::cerr << "note: fewer than 4 Delta values; slope summary skipped\n";
        return kExitOk;
    }
    ScalingTolerances tol;
    tol.variance = o.tolerance;
    std::vector<ScalingReport> reports;
    for (int mu = 1; mu <= mu_max; ++mu) {
        const int e = direct_bound_exponent(mu);
        if (mu == 1)
            reports.push_back(fit_scaling("fisher", mu, deltas, bounds.fisher[0], e, tol.crb));
        else
            reports.push_back(
                fit_scaling("fisher", mu, deltas, bounds.fisher[mu - 1], e, tol.crb_one_sided, ScalingReport::Check::at_least));
        auto r = compare_scalings(mu, deltas, v_spade[mu - 1], bounds.crb[mu - 1], tol);
        reports.insert(reports.end(), r.begin(), r.end());
    }
    auto summary = open_summary(o);
    write_slopes(*summary, reports);
    return report_assertions(o, reports);
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Superoscillation measurement toolkit for subdiffraction incoherent imaging"};
    app.set_config("--config", "", "Read key=value options from a file; command-line flags override it");
    app.require_subcommand(1);
    app.footer(fmt::format("Environment: {} caps the number of worker threads.\n"
                           "Exit status: 0 success, 1 a --assert slope check failed, 2 usage or runtime error.",
                           kThreadsEnv));
    app.fallthrough();

    Options o;
    app.add_option("--delta", o.delta, "Object half-width Delta in Airy units [filters: 0.2, simulate: 0.1]");
    app.add_option("--deltas", o.deltas, "Comma-separated Delta sweep [0.05,0.07,0.1,0.14,0.2]")->delimiter(',');
    app.add_option("--photons", o.photons, "Expected photon number N [1e6]");
    app.add_option("--trials", o.trials, "Monte Carlo trials T [simulate: 200, scaling: 400]");
    app.add_option("--mu-max", o.mu_max, "Highest Fourier coefficient [filters: 8, simulate: 4, scaling: 4, fisher: 3]");
    app.add_option("--q-max", o.q_max, "Highest demultiplexed PAD mode")->capture_default_str();
    app.add_option("--seed", o.seed, "Master random seed")->capture_default_str();
    app.add_option("--scene", o.scene, "Scene: rect | point:XI | two-point:XI1,XI2,W | table:PATH")->capture_default_str();
    app.add_option("--out", o.out, "Output CSV path, '-' for stdout")->capture_default_str();
    app.add_option("--summary", o.summary,
                   "Summary/slope CSV path [<out stem>_summary.csv, or stderr when --out is stdout]");
    app.add_flag("--assert", o.assert_slopes, "Exit with status 1 if a fitted slope misses its target");
    app.add_option("--grid", o.grid, "Sample grid lo:hi:n for filters and modes")->capture_default_str();
    app.add_option("--tolerance", o.tolerance, "Slope tolerance for the variance exponent; direct-bound and ratio tolerances are fixed at 0.3 (mu=1), 0.5 (mu>=2) and 0.7")->capture_default_str();
    app.add_option("--sampling", o.sampling, "Photon routing: aggregated | per-photon")->capture_default_str();
    app.add_option("--window", o.window, "Image-plane half-width for direct-imaging integrals")->capture_default_str();
    app.add_option("--refinement", o.refinement, "Quadrature panel refinement for direct imaging")->capture_default_str();

    int status = kExitOk;
    std::function<int(const Options&)> command;
    auto* filters = app.add_subcommand("filters", "CSV of filter functions b_mu(X) and targets a_mu(X/Delta)");
    filters->callback([&] { command = cmd_filters; });
    auto* modes = app.add_subcommand("modes", "CSV of PAD modes phi_q(x) and pair responses h_q^+-(x)");
    modes->callback([&] { command = cmd_modes; });
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo ensemble: per-trial estimates and a summary CSV");
    simulate->callback([&] { command = cmd_simulate; });
    auto* scaling = app.add_subcommand("scaling", "Delta sweep of estimator variance against the direct-imaging bound");
    scaling->callback([&] { command = cmd_scaling; });
    auto* fisher = app.add_subcommand("fisher", "Direct-imaging Fisher information and Cramer-Rao bound sweep");
    fisher->callback([&] { command = cmd_fisher; });
    for (auto* sub : {filters, modes, simulate, scaling, fisher}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        configure_threads_from_env();
        status = command(o);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return status;
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("superosc");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace superosc::cli
