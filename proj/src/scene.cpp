#include "superosc/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "superosc/errors.hpp"

namespace superosc {
namespace {

constexpr double kDualRouteTolerance = 1e-9;

void check_delta(double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ArgumentError(fmt::format("Delta must be positive, got {}", delta));
}

void check_xi(double xi) {
    if (!(std::abs(xi) <= 1.0)) throw ArgumentError(fmt::format("source position xi={} outside [-1, 1]", xi));
}

double parse_number(std::string_view token, std::string_view context) {
    std::string s(token);
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t\r") + 1);
    std::istringstream in(s);
    double v = 0.0;
    in >> v;
    if (s.empty() || in.fail() || !in.eof())
        throw ParseError(fmt::format("scene spec '{}': cannot parse number '{}'", context, token));
    return v;
}

std::vector<double> parse_list(std::string_view args, std::string_view context) {
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = args.find(',', start);
        out.push_back(parse_number(args.substr(start, comma - start), context));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

void SceneModel::init_nodes() {
    if (has_density()) {
        const auto& w = density_.front();
        const auto nodes = w.quadrature().nodes();
        xi_.assign(nodes.begin(), nodes.end());
        const auto dw = w.density_weights();
        mass_.assign(dw.begin(), dw.end());
    } else {
        xi_ = atom_xi_;
        mass_ = atom_w_;
    }
}

SceneModel SceneModel::rect(double delta) {
    check_delta(delta);
    SceneModel s;
    s.shape_ = Shape::rect;
    s.delta_ = delta;
    s.spec_ = "rect";
    s.density_.push_back(ReferenceDensity::rectangle(1.0));
    s.init_nodes();
    return s;
}

SceneModel SceneModel::point(double delta, double xi0) {
    check_delta(delta);
    check_xi(xi0);
    SceneModel s;
    s.shape_ = Shape::point;
    s.delta_ = delta;
    s.spec_ = fmt::format("point:{}", xi0);
    s.atom_xi_ = {xi0};
    s.atom_w_ = {1.0};
    s.init_nodes();
    return s;
}

SceneModel SceneModel::two_point(double delta, double xi1, double xi2, double w) {
    check_delta(delta);
    check_xi(xi1);
    check_xi(xi2);
    if (!(w >= 0.0 && w <= 1.0)) throw ArgumentError(fmt::format("two-point weight {} outside [0, 1]", w));
    SceneModel s;
    s.shape_ = Shape::two_point;
    s.delta_ = delta;
    s.spec_ = fmt::format("two-point:{},{},{}", xi1, xi2, w);
    s.atom_xi_ = {xi1, xi2};
    s.atom_w_ = {w, 1.0 - w};
    s.init_nodes();
    return s;
}

SceneModel SceneModel::table(double delta, std::vector<double> xi, std::vector<double> density) {
    check_delta(delta);
    for (double x : xi) check_xi(x);
    SceneModel s;
    s.shape_ = Shape::table;
    s.delta_ = delta;
    s.spec_ = "table";
    s.density_.push_back(ReferenceDensity::normalized(std::move(xi), std::move(density)));
    const auto& w = s.density_.front();
    const auto bp = w.breakpoints();
    s.cum_mass_.assign(bp.size(), 0.0);
    for (std::size_t i = 1; i < bp.size(); ++i)
        s.cum_mass_[i] = s.cum_mass_[i - 1] + 0.5 * (w(bp[i - 1]) + w(bp[i])) * (bp[i] - bp[i - 1]);
    s.init_nodes();
    return s;
}

SceneModel SceneModel::parse(std::string_view spec, double delta) {
    const auto colon = spec.find(':');
    const std::string_view name = spec.substr(0, colon);
    const std::string_view args = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
    if (name == "rect") {
        if (!args.empty()) throw ParseError(fmt::format("scene spec '{}': rect takes no arguments", spec));
        return rect(delta);
    }
    if (name == "point") {
        const auto v = parse_list(args, spec);
        if (v.size() != 1) throw ParseError(fmt::format("scene spec '{}': point takes one position", spec));
        return point(delta, v[0]);
    }
    if (name == "two-point") {
        const auto v = parse_list(args, spec);
        if (v.size() != 3) throw ParseError(fmt::format("scene spec '{}': two-point takes xi1,xi2,w", spec));
        return two_point(delta, v[0], v[1], v[2]);
    }
    if (name == "table") {
        const std::string path(args);
        std::ifstream in(path);
        if (!in) throw IoError(fmt::format("cannot open scene table '{}'", path));
        std::vector<double> xi, dens;
        std::string line;
        int lineno = 0;
        bool header_seen = false;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#') continue;
            const auto comma = line.find(',');
            if (comma == std::string::npos)
                throw ParseError(fmt::format("{}:{}: expected two comma-separated columns", path, lineno));
            try {
                const double a = parse_number(std::string_view(line).substr(0, comma), spec);
                const double b = parse_number(std::string_view(line).substr(comma + 1), spec);
                xi.push_back(a);
                dens.push_back(b);
            } catch (const ParseError&) {
                if (xi.empty() && !header_seen) {
                    header_seen = true;
                    continue;
                }
                throw ParseError(fmt::format("{}:{}: malformed row '{}'", path, lineno, line));
            }
        }
        auto s = table(delta, std::move(xi), std::move(dens));
        s.spec_ = std::string(spec);
        return s;
    }
    throw ParseError(fmt::format("unknown scene shape '{}' in spec '{}'", name, spec));
}

SceneModel SceneModel::with_delta(double delta) const {
    check_delta(delta);
    SceneModel s = *this;
    s.delta_ = delta;
    return s;
}

const ReferenceDensity& SceneModel::shape_density() const {
    if (!has_density()) throw ArgumentError(fmt::format("scene '{}' has no density", spec_));
    return density_.front();
}

std::vector<double> SceneModel::moments(int nu_max) const {
    if (nu_max < 0) throw ArgumentError("moment order must be nonnegative");
    std::vector<double> theta(nu_max + 1, 0.0);
    theta[0] = 1.0;
    for (int nu = 1; nu <= nu_max; ++nu)
        theta[nu] = expectation([nu](double X) { return std::pow(X, nu); });
    return theta;
}

double SceneModel::sample(std::mt19937_64& rng) const {
    switch (shape_) {
        case Shape::point: return delta_ * atom_xi_[0];
        case Shape::two_point: {
            const double u = std::generate_canonical<double, 64>(rng);
            return delta_ * (u < atom_w_[0] ? atom_xi_[0] : atom_xi_[1]);
        }
        case Shape::rect: {
            const double u = std::generate_canonical<double, 64>(rng);
            return delta_ * (2.0 * u - 1.0);
        }
        case Shape::table: {
            const auto& w = density_.front();
            const auto bp = w.breakpoints();
            const double u = std::generate_canonical<double, 64>(rng) * cum_mass_.back();
            auto it = std::upper_bound(cum_mass_.begin(), cum_mass_.end(), u);
            std::size_t i = it == cum_mass_.begin() ? 0 : static_cast<std::size_t>(it - cum_mass_.begin()) - 1;
            i = std::min(i, bp.size() - 2);
            const double h = bp[i + 1] - bp[i];
            const double a = w(bp[i]);
            const double slope = (w(bp[i + 1]) - a) / h;
            const double r = u - cum_mass_[i];
            // Solve a t + slope t^2 / 2 = r in a cancellation-free form.
            const double disc = std::max(a * a + 2.0 * slope * r, 0.0);
            const double denom = a + std::sqrt(disc);
            const double t = denom > 0.0 ? 2.0 * r / denom : 0.0;
            return delta_ * std::clamp(bp[i] + t, bp[i], bp[i + 1]);
        }
    }
    return 0.0;
}

double SceneModel::cdf(double X) const {
    const double xi = X / delta_;
    switch (shape_) {
        case Shape::point: return xi >= atom_xi_[0] ? 1.0 : 0.0;
        case Shape::two_point:
            return (xi >= atom_xi_[0] ? atom_w_[0] : 0.0) + (xi >= atom_xi_[1] ? atom_w_[1] : 0.0);
        case Shape::rect: return std::clamp(0.5 * (xi + 1.0), 0.0, 1.0);
        case Shape::table: {
            const auto& w = density_.front();
            const auto bp = w.breakpoints();
            if (xi <= bp.front()) return 0.0;
            if (xi >= bp.back()) return 1.0;
            auto it = std::upper_bound(bp.begin(), bp.end(), xi);
            const auto i = static_cast<std::size_t>(it - bp.begin()) - 1;
            const double t = xi - bp[i];
            const double a = w(bp[i]);
            const double slope = (w(bp[i + 1]) - a) / (bp[i + 1] - bp[i]);
            return cum_mass_[i] + a * t + 0.5 * slope * t * t;
        }
    }
    return 0.0;
}

std::vector<double> fourier_coeffs(const SceneModel& scene, const OrthoBasis& basis) {
    const int mu_max = basis.order_max();
    const auto xi = scene.xi_nodes();
    const auto mass = scene.masses();
    const auto theta = scene.moments(mu_max);
    std::vector<double> beta(mu_max + 1);
    for (int mu = 0; mu <= mu_max; ++mu) {
        double direct = 0.0;
        for (std::size_t i = 0; i < xi.size(); ++i) direct += mass[i] * basis(mu, xi[i]);
        double assembled = 0.0;
        for (int nu = 0; nu <= mu; ++nu) assembled += basis.coeff(mu, nu) * theta[nu] / std::pow(scene.delta(), nu);
        if (std::abs(direct - assembled) > kDualRouteTolerance)
            throw ConsistencyError(fmt::format(
                "beta_{} disagrees between quadrature ({:.17g}) and moment assembly ({:.17g})", mu, direct, assembled));
        beta[mu] = direct;
    }
    return beta;
}

GroundTruth ground_truth(const SceneModel& scene, const OrthoBasis& basis) {
    return {scene.moments(2 * basis.order_max()), fourier_coeffs(scene, basis)};
}

}  // namespace superosc
