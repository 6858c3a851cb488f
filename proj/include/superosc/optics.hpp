#pragma once

#include <complex>
#include <span>
#include <vector>

#include "superosc/orthopoly.hpp"

namespace superosc {

enum class OtfKind { rectangular, tabulated };

/// Sign of an interferometer output port: (phi_q + phi_{q+1})/sqrt2 or (phi_q - phi_{q+1})/sqrt2.
enum class Sign { plus, minus };

/// Leading small-X constants of the overlap amplitude:
/// O_q(X) ~ h X^q - i h_prime X^{q+1}.
struct LeadingConstants {
    double h = 0.0;
    double h_prime = 0.0;
};

inline constexpr int kDefaultQMax = 6;

/// Diffraction-limited one-dimensional imaging system with an even, real
/// transfer function supported on [-k_max, k_max], together with the
/// spectral polynomials g_q that define the PAD modes.
class OpticalSystem {
public:
    OtfKind kind() const { return kind_; }
    double k_max() const { return k_max_; }
    int q_max() const { return q_max_; }

    /// |Psi(k)|^2, a unit-mass density in k.
    const ReferenceDensity& spectral_density() const { return basis_.reference(); }
    /// g_q, orthonormal under |Psi|^2.
    const OrthoBasis& spectral_basis() const { return basis_; }

    double otf(double k) const;
    /// Field point-spread function psi(x); real for an even real OTF.
    double psf(double x) const;
    /// |psi(x)|^2. Closed form with exact argument reduction for the rectangular OTF.
    double psf_intensity(double x) const;

    /// O_q(X) = i^q int |Psi(k)|^2 g_q(k) exp(-ikX) dk, real for even spectra.
    /// Throws UnsupportedOtfError if the imaginary residual exceeds 1e-10.
    double overlap(int q, double X) const;

    /// All O_0(X) .. O_{q_max}(X) written to out (size q_max + 1).
    void overlaps(double X, std::span<double> out) const;

    LeadingConstants leading_constants(int q) const;

    /// h_q^{+-}(X) = |<(phi_q +- phi_{q+1})/sqrt2, psi(. - X)>|^2 for q < q_max.
    double pair_response(int q, Sign sign, double X) const;

    /// phi_q(x) = (-i)^q / sqrt(2 pi) int Psi(k) g_q(k) exp(ikx) dk.
    std::complex<double> pad_mode(int q, double x) const;

private:
    friend OpticalSystem build_optics(OtfKind, double, int);
    friend OpticalSystem build_optics(const ReferenceDensity&, int);
    OpticalSystem(OtfKind kind, double k_max, int q_max, OrthoBasis basis);

    void check_mode(int q) const;
    std::complex<double> spectral_overlap(int q, double X) const;

    OtfKind kind_;
    double k_max_;
    int q_max_;
    OrthoBasis basis_;
    std::vector<LeadingConstants> leading_;
    // Small-|X| series: O_q(X) = X^q sum_j series_[q][j] X^{2j}.
    std::vector<std::vector<double>> series_;
};

/// Rectangular OTF 1_{|k|<=k_max}/sqrt(2 k_max).
OpticalSystem build_optics(OtfKind kind, double k_max = 3.14159265358979323846, int q_max = kDefaultQMax);

/// Tabulated even spectral density |Psi(k)|^2 (must already be normalized).
OpticalSystem build_optics(const ReferenceDensity& spectral_density, int q_max = kDefaultQMax);

// ---------------------------------------------------------------------------
// Interferometer network (demultiplexer followed by pairwise MZIs).

/// The two half-time configurations. even_pairs: MZI0, MZI2, ... act as
/// 50-50 beamsplitters pairing (0,1), (2,3), ...; odd_pairs pairs
/// (1,2), (3,4), ... and passes mode 0 through.
enum class Configuration { even_pairs, odd_pairs };

struct Port {
    enum class Kind { pair_plus, pair_minus, passthrough };
    Kind kind;
    int q;  // lower mode of the pair, or the passthrough mode
};

/// Output ports of one configuration for modes 0..q_max. An unpaired top
/// mode is routed straight to a detector as a passthrough port.
std::vector<Port> configuration_ports(Configuration config, int q_max);

/// Per-photon port probabilities for a source at X; out has one entry per
/// configuration port followed by the lost probability (modes > q_max).
/// Negative residual below -1e-12 throws ConsistencyError; smaller ones clamp to 0.
void port_probabilities(const OpticalSystem& sys, std::span<const Port> ports,
                        std::span<const double> overlaps, std::span<double> out);

}  // namespace superosc
