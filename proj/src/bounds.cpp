#include "superosc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "superosc/errors.hpp"

namespace superosc {
namespace {

// int_c^inf sin(u)/u du from its asymptotic expansion; accurate to
// ~1e-15 once c exceeds ~30.
double sine_integral_tail(double c) {
    double f = 0.0, g = 0.0;
    double term_f = 1.0 / c;       // (2k)!/c^{2k+1}
    double term_g = 1.0 / (c * c);  // (2k+1)!/c^{2k+2}
    for (int k = 0; k < 12; ++k) {
        const double sign = k % 2 == 0 ? 1.0 : -1.0;
        f += sign * term_f;
        g += sign * term_g;
        term_f *= (2.0 * k + 1.0) * (2.0 * k + 2.0) / (c * c);
        term_g *= (2.0 * k + 2.0) * (2.0 * k + 3.0) / (c * c);
        if (term_f < 1e-18 * std::abs(f)) break;
    }
    return f * std::cos(c) + g * std::sin(c);
}

// int_a^inf |psi(x)|^2 dx for the rectangular OTF with band edge k_max.
double psf_tail_mass(double k_max, double a) {
    const double b = k_max * a;
    const double s = std::sin(b);
    return (s * s / b + sine_integral_tail(2.0 * b)) / std::numbers::pi;
}

void require_rectangular(const OpticalSystem& sys) {
    if (sys.kind() != OtfKind::rectangular)
        throw UnsupportedOtfError("direct-imaging bounds need the closed-form PSF of a rectangular OTF");
}

void require_window(const ImagingWindow& window, double zero_spacing) {
    if (!(window.half_width >= 5.0 * zero_spacing))
        throw ArgumentError(fmt::format("imaging window half-width {} too small", window.half_width));
    if (window.refinement < 1) throw ArgumentError("window refinement must be positive");
}

struct FisherIntegrand {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> values;  // weight * (dp)^2 / p at each node
};

FisherIntegrand fisher_setup(const OpticalSystem& sys, const SubmodelSpec& submodel, const ImagingWindow& window) {
    require_rectangular(sys);
    const DirectImage image(sys, submodel.base);
    const auto rule = Quadrature::composite(image.breakpoints(window), window.refinement);
    FisherIntegrand f;
    f.nodes.assign(rule.nodes().begin(), rule.nodes().end());
    f.weights.assign(rule.weights().begin(), rule.weights().end());
    f.values.assign(f.nodes.size(), 0.0);
    return f;
}

double fisher_point(const OpticalSystem& sys, std::span<const double> X, std::span<const double> mass,
                    std::span<const double> score, double x) {
    double p = 0.0, dp = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double s = mass[i] * sys.psf_intensity(x - X[i]);
        p += s;
        dp += s * score[i];
    }
    if (p <= std::numeric_limits<double>::min()) {
        if (std::abs(dp) > 1e-300)
            throw ConsistencyError(fmt::format("direct image underflows at x={} with nonzero score", x));
        return 0.0;
    }
    return dp * dp / p;
}

double fisher_finish(const FisherIntegrand& f, const OpticalSystem& sys, const ImagingWindow& window) {
    const double spacing = std::numbers::pi / sys.k_max();
    const double W = window.half_width;
    double total = 0.0, edge = 0.0;
    for (std::size_t i = 0; i < f.nodes.size(); ++i) {
        total += f.values[i];
        if (std::abs(f.nodes[i]) >= W - spacing) edge += f.values[i];
    }
    // Outer cells decay like 1/x^2; extrapolate the remainder beyond the window.
    return total + edge * (W - spacing) / spacing;
}

struct ScoreNodes {
    std::vector<double> X, mass, score;
};

ScoreNodes score_nodes(const SubmodelSpec& submodel) {
    ScoreNodes s;
    const auto xi = submodel.base.xi_nodes();
    const auto m = submodel.base.masses();
    for (std::size_t i = 0; i < xi.size(); ++i) {
        s.X.push_back(submodel.base.delta() * xi[i]);
        s.mass.push_back(m[i]);
        s.score.push_back(submodel.score_basis(submodel.mu, xi[i]));
    }
    return s;
}

}  // namespace

DirectImage::DirectImage(const OpticalSystem& sys, const SceneModel& scene) : sys_(&sys), scene_(&scene) {
    require_rectangular(sys);
}

double DirectImage::operator()(double x) const {
    return scene_->expectation([&](double X) { return sys_->psf_intensity(x - X); });
}

std::vector<double> DirectImage::breakpoints(const ImagingWindow& window) const {
    const double spacing = std::numbers::pi / sys_->k_max();
    require_window(window, spacing);
    const double W = window.half_width;
    const double eps = std::max(scene_->delta() / 4.0, 1e-4 * spacing);
    std::vector<double> bp{-W, W};
    const int n_max = static_cast<int>(std::floor(W / spacing));
    for (int n = -n_max; n <= n_max; ++n) {
        const double z = n * spacing;
        bp.push_back(z);
        if (n != n_max) bp.push_back(z + 0.5 * spacing);
        if (n == 0) continue;
        for (double d = eps; d < 0.5 * spacing; d *= 2.0) {
            bp.push_back(z - d);
            bp.push_back(z + d);
        }
    }
    std::erase_if(bp, [W](double x) { return x < -W || x > W; });
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    return bp;
}

double DirectImage::total_mass(const ImagingWindow& window) const {
    const auto rule = Quadrature::composite(breakpoints(window), window.refinement);
    const double inside = rule.integrate(*this);
    const double W = window.half_width;
    const double k = sys_->k_max();
    const double tail = scene_->expectation([&](double X) { return psf_tail_mass(k, W - X) + psf_tail_mass(k, W + X); });
    return inside + tail;
}

SubmodelSpec make_submodel(const OrthoBasis& reference, const SceneModel& base, int mu) {
    if (mu < 1 || mu > reference.order_max())
        throw ArgumentError(fmt::format("submodel index {} outside [1, {}]", mu, reference.order_max()));
    if (!base.has_density())
        throw ArgumentError(fmt::format("submodel base scene '{}' must be a density", base.spec()));
    const auto& w = base.shape_density();
    OrthoBasis scores = build_basis(w, mu);
    const double d_beta = inner_product([&](double xi) { return reference(mu, xi); },
                                        [&](double xi) { return scores(mu, xi); }, w);
    return {mu, base, std::move(scores), d_beta};
}

double fisher_direct(const OpticalSystem& sys, const SubmodelSpec& submodel, const ImagingWindow& window) {
    auto f = fisher_setup(sys, submodel, window);
    const auto s = score_nodes(submodel);
    const auto n = static_cast<std::ptrdiff_t>(f.nodes.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) f.values[i] = f.weights[i] * fisher_point(sys, s.X, s.mass, s.score, f.nodes[i]);
    return fisher_finish(f, sys, window);
}

double fisher_direct_serial(const OpticalSystem& sys, const SubmodelSpec& submodel, const ImagingWindow& window) {
    auto f = fisher_setup(sys, submodel, window);
    const auto s = score_nodes(submodel);
    for (std::size_t i = 0; i < f.nodes.size(); ++i)
        f.values[i] = f.weights[i] * fisher_point(sys, s.X, s.mass, s.score, f.nodes[i]);
    return fisher_finish(f, sys, window);
}

double crb_direct(double d_beta, double fisher, double photons) {
    if (!(photons > 0.0)) throw ArgumentError("photon number must be positive");
    if (fisher < 0.0) throw ArgumentError("Fisher information must be nonnegative");
    if (fisher == 0.0) return std::numeric_limits<double>::infinity();
    return d_beta * d_beta / (photons * fisher);
}

bool ScalingReport::passes() const {
    switch (check) {
        case Check::two_sided: return std::abs(slope - target) <= tolerance;
        case Check::at_least: return slope >= target - tolerance;
        case Check::at_most: return slope <= target + tolerance;
    }
    return false;
}

ScalingReport fit_scaling(std::string quantity, int mu, std::span<const double> deltas,
                          std::span<const double> values, double target, double tolerance,
                          ScalingReport::Check check) {
    if (deltas.size() != values.size()) throw ArgumentError("scaling fit: grid and values differ in length");
    if (deltas.size() < 4)
        throw InsufficientGridError(fmt::format("scaling fit of {} needs at least 4 grid points, got {}", quantity,
                                                deltas.size()));
    const std::size_t n = deltas.size();
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(deltas[i] > 0.0) || !(values[i] > 0.0) || !std::isfinite(values[i]))
            throw ArgumentError(fmt::format("scaling fit of {}: nonpositive value at Delta={}", quantity, deltas[i]));
        x[i] = std::log(deltas[i]);
        y[i] = std::log(values[i]);
    }
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw InsufficientGridError("scaling fit needs at least two distinct Delta values");
    ScalingReport r;
    r.quantity = std::move(quantity);
    r.mu = mu;
    r.deltas.assign(deltas.begin(), deltas.end());
    r.values.assign(values.begin(), values.end());
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (r.intercept + r.slope * x[i]);
        ss += e * e;
    }
    r.residual_rms = std::sqrt(ss / n);
    r.target = target;
    r.tolerance = tolerance;
    r.check = check;
    r.comparable_case = mu == 1;
    return r;
}

int spade_variance_exponent(int mu) { return 2 * ((mu + 1) / 2); }
int direct_bound_exponent(int mu) { return mu == 1 ? 2 : 2 * mu - 1; }

std::vector<ScalingReport> compare_scalings(int mu, std::span<const double> deltas, std::span<const double> variances,
                                            std::span<const double> crbs, const ScalingTolerances& tol) {
    if (deltas.size() != variances.size() || deltas.size() != crbs.size())
        throw ArgumentError("compare_scalings: variance and bound grids must share the Delta grid");
    if (deltas.size() < 4)
        throw InsufficientGridError(fmt::format("scaling comparison needs at least 4 grid points, got {}", deltas.size()));
    std::vector<double> ratio(deltas.size());
    for (std::size_t i = 0; i < deltas.size(); ++i) ratio[i] = crbs[i] / variances[i];

    const int v_exp = spade_variance_exponent(mu);
    const int c_exp = direct_bound_exponent(mu);
    std::vector<ScalingReport> out;
    out.push_back(fit_scaling("variance", mu, deltas, variances, -v_exp, tol.variance));
    if (mu == 1)
        out.push_back(fit_scaling("crb", mu, deltas, crbs, -c_exp, tol.crb));
    else
        out.push_back(fit_scaling("crb", mu, deltas, crbs, -c_exp, tol.crb_one_sided, ScalingReport::Check::at_most));
    out.push_back(fit_scaling("ratio", mu, deltas, ratio, -(c_exp - v_exp), tol.ratio));
    return out;
}

}  // namespace superosc
