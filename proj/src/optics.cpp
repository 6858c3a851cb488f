#include "superosc/optics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "superosc/errors.hpp"

namespace superosc {
namespace {

constexpr double kImaginaryTolerance = 1e-10;
// |X| k_max below which the overlap is summed from its power series.
constexpr double kSeriesRadius = 1.0;
constexpr int kSeriesTerms = 24;
// Max phase swept per Gauss panel in the oscillatory quadrature.
constexpr double kPhasePerPanel = 16.0;

// sin(pi y) with exact reduction of the integer part.
double sinpi(double y) {
    const double n = std::nearbyint(y);
    const double s = std::sin(std::numbers::pi * (y - n));
    return std::fmod(n, 2.0) == 0.0 ? s : -s;
}

// i^q * (re + i im)
std::complex<double> times_i_pow(int q, std::complex<double> z) {
    switch (q % 4) {
        case 0: return z;
        case 1: return {-z.imag(), z.real()};
        case 2: return -z;
        default: return {z.imag(), -z.real()};
    }
}

// Integrate f(k) * exp(i k x) over the spectral support.
template <class F>
std::complex<double> oscillatory_integral(const ReferenceDensity& density, double x, F&& f) {
    const auto bp = density.breakpoints();
    double re = 0.0, im = 0.0;
    for (std::size_t s = 0; s + 1 < bp.size(); ++s) {
        const double len = bp[s + 1] - bp[s];
        const int panels = std::max(1, static_cast<int>(std::ceil(len * std::abs(x) / kPhasePerPanel)));
        for_each_gauss_node(bp[s], bp[s + 1], panels, [&](double k, double w) {
            const double v = w * f(k);
            re += v * std::cos(k * x);
            im += v * std::sin(k * x);
        });
    }
    return {re, im};
}

}  // namespace

OpticalSystem::OpticalSystem(OtfKind kind, double k_max, int q_max, OrthoBasis basis)
    : kind_(kind), k_max_(k_max), q_max_(q_max), basis_(std::move(basis)) {
    const auto& rho = basis_.reference();
    leading_.resize(q_max_ + 1);
    series_.resize(q_max_ + 1);
    for (int q = 0; q <= q_max_; ++q) {
        auto moment = [&](int p) {
            return rho.integrate([&](double k) { return basis_(q, k) * std::pow(k, p); });
        };
        leading_[q].h = moment(q) / std::tgamma(q + 1.0);
        leading_[q].h_prime = moment(q + 1) / std::tgamma(q + 2.0);
        auto& coeffs = series_[q];
        coeffs.resize(kSeriesTerms);
        for (int j = 0; j < kSeriesTerms; ++j) {
            const int p = q + 2 * j;
            coeffs[j] = (j % 2 == 0 ? 1.0 : -1.0) * moment(p) / std::tgamma(p + 1.0);
        }
    }
}

OpticalSystem build_optics(OtfKind kind, double k_max, int q_max) {
    if (kind != OtfKind::rectangular)
        throw ArgumentError("tabulated OTFs are built from a spectral density table");
    if (!(k_max > 0.0) || !std::isfinite(k_max)) throw ArgumentError("k_max must be positive");
    if (q_max < 1 || q_max > kOrderCap) throw ArgumentError(fmt::format("q_max {} outside [1, {}]", q_max, kOrderCap));
    return OpticalSystem(kind, k_max, q_max, build_basis(ReferenceDensity::rectangle(k_max), q_max));
}

OpticalSystem build_optics(const ReferenceDensity& spectral_density, int q_max) {
    if (q_max < 1 || q_max > kOrderCap) throw ArgumentError(fmt::format("q_max {} outside [1, {}]", q_max, kOrderCap));
    if (!spectral_density.is_even())
        throw UnsupportedOtfError("only even-symmetric spectral densities |Psi(k)|^2 are supported");
    const double k_max = spectral_density.upper();
    const auto kind = spectral_density.kind() == ReferenceDensity::Kind::rectangle ? OtfKind::rectangular
                                                                                   : OtfKind::tabulated;
    return OpticalSystem(kind, k_max, q_max, build_basis(spectral_density, q_max));
}

void OpticalSystem::check_mode(int q) const {
    if (q < 0 || q > q_max_) throw ArgumentError(fmt::format("mode index {} outside [0, {}]", q, q_max_));
}

double OpticalSystem::otf(double k) const { return std::sqrt(spectral_density()(k)); }

double OpticalSystem::psf(double x) const {
    if (kind_ == OtfKind::rectangular) {
        const double amp = std::sqrt(k_max_ / std::numbers::pi);
        if (x == 0.0) return amp;
        const double y = k_max_ * x / std::numbers::pi;
        return amp * sinpi(y) / (std::numbers::pi * y);
    }
    const auto& rho = spectral_density();
    const auto v = oscillatory_integral(rho, x, [&](double k) { return std::sqrt(rho(k)); });
    return v.real() / std::sqrt(2.0 * std::numbers::pi);
}

double OpticalSystem::psf_intensity(double x) const {
    const double v = psf(x);
    return v * v;
}

std::complex<double> OpticalSystem::spectral_overlap(int q, double X) const {
    // int rho g_q exp(-ikX) dk = conj of int rho g_q exp(ikX) dk for real integrands.
    const auto& rho = spectral_density();
    const auto v = oscillatory_integral(rho, X, [&](double k) { return rho(k) * basis_(q, k); });
    return times_i_pow(q, std::conj(v));
}

double OpticalSystem::overlap(int q, double X) const {
    check_mode(q);
    if (std::abs(X) * k_max_ <= kSeriesRadius) {
        const double x2 = X * X;
        return std::pow(X, q) * horner(series_[q], x2);
    }
    const auto v = spectral_overlap(q, X);
    if (std::abs(v.imag()) > kImaginaryTolerance)
        throw UnsupportedOtfError(
            fmt::format("overlap amplitude q={} X={} has imaginary residual {:.3g}", q, X, v.imag()));
    return v.real();
}

void OpticalSystem::overlaps(double X, std::span<double> out) const {
    if (out.size() != static_cast<std::size_t>(q_max_ + 1)) throw ArgumentError("overlap buffer size mismatch");
    for (int q = 0; q <= q_max_; ++q) out[q] = overlap(q, X);
}

LeadingConstants OpticalSystem::leading_constants(int q) const {
    check_mode(q);
    return leading_[q];
}

double OpticalSystem::pair_response(int q, Sign sign, double X) const {
    if (q < 0 || q >= q_max_)
        throw ArgumentError(fmt::format("pair ({}, {}) needs modes up to q_max={}", q, q + 1, q_max_));
    const double a = overlap(q, X);
    const double b = overlap(q + 1, X);
    const double s = sign == Sign::plus ? a + b : a - b;
    return 0.5 * s * s;
}

std::complex<double> OpticalSystem::pad_mode(int q, double x) const {
    check_mode(q);
    const auto& rho = spectral_density();
    const auto v = oscillatory_integral(rho, x, [&](double k) { return std::sqrt(rho(k)) * basis_(q, k); });
    // (-i)^q = i^{3q}
    return times_i_pow(3 * q, v) / std::sqrt(2.0 * std::numbers::pi);
}

std::vector<Port> configuration_ports(Configuration config, int q_max) {
    std::vector<Port> ports;
    int q = 0;
    if (config == Configuration::odd_pairs) {
        ports.push_back({Port::Kind::passthrough, 0});
        q = 1;
    }
    for (; q + 1 <= q_max; q += 2) {
        ports.push_back({Port::Kind::pair_plus, q});
        ports.push_back({Port::Kind::pair_minus, q});
    }
    if (q == q_max) ports.push_back({Port::Kind::passthrough, q});
    return ports;
}

void port_probabilities(const OpticalSystem& sys, std::span<const Port> ports,
                        std::span<const double> overlaps, std::span<double> out) {
    if (out.size() != ports.size() + 1) throw ArgumentError("port probability buffer size mismatch");
    if (overlaps.size() != static_cast<std::size_t>(sys.q_max() + 1)) throw ArgumentError("overlap buffer size mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < ports.size(); ++i) {
        const Port& p = ports[i];
        double prob = 0.0;
        switch (p.kind) {
            case Port::Kind::passthrough: prob = overlaps[p.q] * overlaps[p.q]; break;
            case Port::Kind::pair_plus: {
                const double s = overlaps[p.q] + overlaps[p.q + 1];
                prob = 0.5 * s * s;
                break;
            }
            case Port::Kind::pair_minus: {
                const double s = overlaps[p.q] - overlaps[p.q + 1];
                prob = 0.5 * s * s;
                break;
            }
        }
        out[i] = prob;
        total += prob;
    }
    double lost = 1.0 - total;
    if (lost < -1e-12)
        throw ConsistencyError(fmt::format("port probabilities sum to {:.17g} > 1", total));
    out[ports.size()] = std::max(lost, 0.0);
}

}  // namespace superosc
