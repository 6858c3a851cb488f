#include "superosc/measurement.hpp"

#include <cmath>

#include <fmt/format.h>

#include "superosc/errors.hpp"

namespace superosc {
namespace {

constexpr double kMinLeadingConstant = 1e-12;

double pair_weight(const MomentEstimator& est, const Port& port) {
    if (est.kind == MomentEstimator::Kind::constant || port.kind == Port::Kind::passthrough || port.q != est.q)
        return 0.0;
    if (est.kind == MomentEstimator::Kind::difference && port.kind == Port::Kind::pair_minus) return -est.scale;
    return est.scale;
}

}  // namespace

CountFractions expected_fractions(const OpticalSystem& sys, const SceneModel& scene, int q) {
    return {0.5 * scene.expectation([&](double X) { return sys.pair_response(q, Sign::plus, X); }),
            0.5 * scene.expectation([&](double X) { return sys.pair_response(q, Sign::minus, X); })};
}

MomentEstimator moment_estimator(const OpticalSystem& sys, int nu) {
    if (nu < 0) throw ArgumentError("moment order must be nonnegative");
    if (nu == 0) return {};
    const int q = nu / 2;
    if (q + 1 > sys.q_max())
        throw ArgumentError(fmt::format("theta_{} needs modes up to {}, optics has q_max={}", nu, q + 1, sys.q_max()));
    const double hq = sys.leading_constants(q).h;
    if (nu % 2 == 1) {
        const double hq1 = sys.leading_constants(q + 1).h;
        if (std::abs(hq) < kMinLeadingConstant || std::abs(hq1) < kMinLeadingConstant)
            throw ArgumentError(fmt::format("H_{} or H_{} vanishes; theta_{} is not estimable", q, q + 1, nu));
        return {MomentEstimator::Kind::difference, q, 1.0 / (hq * hq1)};
    }
    if (std::abs(hq) < kMinLeadingConstant)
        throw ArgumentError(fmt::format("H_{} vanishes; theta_{} is not estimable", q, nu));
    return {MomentEstimator::Kind::sum, q, 2.0 / (hq * hq)};
}

double moment_filter(const OpticalSystem& sys, const MomentEstimator& est, double X) {
    switch (est.kind) {
        case MomentEstimator::Kind::constant: return 1.0;
        case MomentEstimator::Kind::difference:
            return est.scale * sys.overlap(est.q, X) * sys.overlap(est.q + 1, X);
        case MomentEstimator::Kind::sum: {
            const double a = sys.overlap(est.q, X);
            const double b = sys.overlap(est.q + 1, X);
            return 0.5 * est.scale * (a * a + b * b);
        }
    }
    return 0.0;
}

double moment_filter(const OpticalSystem& sys, int nu, double X) {
    return moment_filter(sys, moment_estimator(sys, nu), X);
}

EstimatorPlan::EstimatorPlan(const OpticalSystem& sys, const OrthoBasis& basis, double delta, int mu_max)
    : mu_max_(mu_max), delta_(delta) {
    if (mu_max < 0 || mu_max > basis.order_max())
        throw ArgumentError(fmt::format("mu_max {} outside basis order {}", mu_max, basis.order_max()));
    if (!(delta > 0.0)) throw ArgumentError("Delta must be positive");
    if (modes_required() > sys.q_max())
        throw ArgumentError(fmt::format("mu_max={} needs PAD modes up to {}, optics has q_max={}", mu_max,
                                        modes_required(), sys.q_max()));
    const int nu_max = 2 * ((mu_max + 1) / 2);
    for (int nu = 0; nu <= nu_max; ++nu) moments_.push_back(moment_estimator(sys, nu));
    const int n = mu_max + 1;
    assembly_.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int mu = 0; mu < n; ++mu)
        for (int nu = 0; nu <= mu; ++nu) assembly_[mu * n + nu] = basis.coeff(mu, nu) / std::pow(delta, nu);
}

const MomentEstimator& EstimatorPlan::moment(int nu) const {
    if (nu < 0 || nu > nu_max()) throw ArgumentError(fmt::format("moment index {} outside plan", nu));
    return moments_[nu];
}

double EstimatorPlan::assembly(int mu, int nu) const {
    if (mu < 0 || mu > mu_max_ || nu < 0 || nu > mu_max_)
        throw ArgumentError(fmt::format("assembly index ({}, {}) outside plan", mu, nu));
    return assembly_[static_cast<std::size_t>(mu) * (mu_max_ + 1) + nu];
}

FilterFunction::FilterFunction(const OpticalSystem& sys, const OrthoBasis& basis, double delta, int mu)
    : sys_(sys), basis_(basis), delta_(delta), mu_(mu) {
    if (mu < 0 || mu > basis.order_max())
        throw ArgumentError(fmt::format("filter index {} outside basis order {}", mu, basis.order_max()));
    if (!(delta > 0.0)) throw ArgumentError("Delta must be positive");
    for (int nu = 0; nu <= mu; ++nu) {
        moments_.push_back(moment_estimator(sys, nu));
        weights_.push_back(basis.coeff(mu, nu) / std::pow(delta, nu));
    }
}

double FilterFunction::operator()(double X) const {
    const OpticalSystem& sys = sys_.get();
    const int top = mu_ / 2 + 1;
    std::array<double, kOrderCap + 2> o{};
    for (int q = 0; q <= std::min(top, sys.q_max()); ++q) o[q] = sys.overlap(q, X);
    double b = 0.0;
    for (int nu = 0; nu <= mu_; ++nu) {
        const auto& est = moments_[nu];
        double t = 1.0;
        if (est.kind == MomentEstimator::Kind::difference) t = est.scale * o[est.q] * o[est.q + 1];
        if (est.kind == MomentEstimator::Kind::sum)
            t = 0.5 * est.scale * (o[est.q] * o[est.q] + o[est.q + 1] * o[est.q + 1]);
        b += weights_[nu] * t;
    }
    return b;
}

FilterFunction filter_function(const OpticalSystem& sys, const OrthoBasis& basis, double delta, int mu) {
    return FilterFunction(sys, basis, delta, mu);
}

std::vector<double> filter_grid(const FilterFunction& b, std::span<const double> xs) {
    std::vector<double> out(xs.size());
    const auto n = static_cast<std::ptrdiff_t>(xs.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = b(xs[i]);
    return out;
}

std::vector<double> filter_grid_serial(const FilterFunction& b, std::span<const double> xs) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = b(xs[i]);
    return out;
}

PortModel expected_port_model(const OpticalSystem& sys, const SceneModel& scene) {
    PortModel model;
    const Configuration configs[2] = {Configuration::even_pairs, Configuration::odd_pairs};
    for (int c = 0; c < 2; ++c) {
        auto& m = model.configs[c];
        m.config = configs[c];
        m.ports = configuration_ports(configs[c], sys.q_max());
        m.probabilities.assign(m.ports.size() + 1, 0.0);
    }
    std::vector<double> o(sys.q_max() + 1);
    std::vector<double> p;
    const auto xi = scene.xi_nodes();
    const auto mass = scene.masses();
    for (std::size_t i = 0; i < xi.size(); ++i) {
        sys.overlaps(scene.delta() * xi[i], o);
        for (auto& m : model.configs) {
            p.resize(m.ports.size() + 1);
            port_probabilities(sys, m.ports, o, p);
            for (std::size_t k = 0; k < p.size(); ++k) m.probabilities[k] += mass[i] * p[k];
        }
    }
    return model;
}

double asymptotic_variance(const EstimatorPlan& plan, const PortModel& model, int mu, double photons) {
    if (mu < 0 || mu > plan.mu_max()) throw ArgumentError(fmt::format("mu={} outside plan", mu));
    if (!(photons > 0.0)) throw ArgumentError("photon number must be positive");
    std::vector<double> w, pi;
    for (const auto& m : model.configs) {
        for (std::size_t k = 0; k < m.ports.size(); ++k) {
            double weight = 0.0;
            for (int nu = 1; nu <= mu; ++nu) weight += plan.assembly(mu, nu) * pair_weight(plan.moment(nu), m.ports[k]);
            w.push_back(weight);
            pi.push_back(0.5 * m.probabilities[k]);
        }
    }
    double detected = 0.0, mean = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        detected += pi[k];
        mean += pi[k] * w[k];
    }
    mean /= detected;
    double spread = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) spread += pi[k] * (w[k] - mean) * (w[k] - mean);
    return spread / (photons * detected * detected);
}

}  // namespace superosc
