#include "superosc/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>

#include "superosc/errors.hpp"

namespace superosc {
namespace {

struct FullRule {
    std::array<double, kGaussOrder> nodes{};
    std::array<double, kGaussOrder> weights{};
};

// boost stores the nonnegative half of a symmetric rule.
FullRule expand_boost_rule() {
    using Rule = boost::math::quadrature::gauss<double, kGaussOrder>;
    const auto& a = Rule::abscissa();
    const auto& w = Rule::weights();
    static_assert(kGaussOrder % 2 == 0);
    constexpr int half = kGaussOrder / 2;
    FullRule rule;
    for (int i = 0; i < half; ++i) {
        rule.nodes[half + i] = a[i];
        rule.weights[half + i] = w[i];
        rule.nodes[half - 1 - i] = -a[i];
        rule.weights[half - 1 - i] = w[i];
    }
    return rule;
}

const FullRule& full_rule() {
    static const FullRule rule = expand_boost_rule();
    return rule;
}

}  // namespace

std::span<const double> gauss_nodes() { return full_rule().nodes; }
std::span<const double> gauss_weights() { return full_rule().weights; }

Quadrature Quadrature::composite(std::span<const double> breakpoints, int subdivisions) {
    if (breakpoints.size() < 2) throw ArgumentError("quadrature needs at least two breakpoints");
    if (subdivisions < 1) throw ArgumentError("quadrature subdivisions must be positive");
    if (!std::is_sorted(breakpoints.begin(), breakpoints.end()))
        throw ArgumentError("quadrature breakpoints must be ascending");
    Quadrature q;
    q.nodes_.reserve((breakpoints.size() - 1) * subdivisions * kGaussOrder);
    q.weights_.reserve(q.nodes_.capacity());
    for (std::size_t b = 0; b + 1 < breakpoints.size(); ++b) {
        if (breakpoints[b + 1] == breakpoints[b]) continue;
        for_each_gauss_node(breakpoints[b], breakpoints[b + 1], subdivisions, [&](double x, double w) {
            q.nodes_.push_back(x);
            q.weights_.push_back(w);
        });
        q.panels_ += subdivisions;
    }
    return q;
}

Quadrature Quadrature::uniform(double lo, double hi, int panels) {
    if (!(hi > lo)) throw ArgumentError("quadrature interval must have positive length");
    const double bp[2] = {lo, hi};
    return composite(bp, panels);
}

}  // namespace superosc
