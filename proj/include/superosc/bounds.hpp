#pragma once

#include <span>
#include <string>
#include <vector>

#include "superosc/optics.hpp"
#include "superosc/orthopoly.hpp"
#include "superosc/scene.hpp"

namespace superosc {

/// Image-plane truncation for direct-imaging integrals.
struct ImagingWindow {
    double half_width = 40.0;  // |x| <= half_width, in Airy units
    int refinement = 1;        // every panel split this many times
};

/// Ideal direct-imaging intensity p(x) = int |psi(x - X)|^2 F(X) dX.
/// Rectangular OTF only. Holds references to `sys` and `scene`.
class DirectImage {
public:
    DirectImage(const OpticalSystem& sys, const SceneModel& scene);

    double operator()(double x) const;

    /// int p over the window plus the analytic tail mass outside it.
    double total_mass(const ImagingWindow& window = {}) const;

    /// Panel breakpoints over the window, refined geometrically around the
    /// PSF zeros where p becomes small.
    std::vector<double> breakpoints(const ImagingWindow& window) const;

private:
    const OpticalSystem* sys_;
    const SceneModel* scene_;
};

/// One-parameter submodel through the base scene with score
/// d log F / d vartheta = c_mu(X/Delta), c_mu orthonormal under W.
struct SubmodelSpec {
    int mu;
    SceneModel base;
    OrthoBasis score_basis;  // orthonormal under W
    double d_beta;           // d beta_mu / d vartheta = <a_mu, c_mu>_W
};

/// Submodel for coefficient mu of `reference` (the basis defining beta).
/// The base scene must be a density shape; with W = R this gives c_mu = a_mu and d_beta = 1.
SubmodelSpec make_submodel(const OrthoBasis& reference, const SceneModel& base, int mu);

/// Fisher information per photon of ideal direct imaging,
/// J = int (dp)^2 / p dx with dp(x) = int |psi(x - X)|^2 c_mu(X/Delta) F(X) dX.
/// The truncated tail is extrapolated from the 1/x^2 decay of the outermost cells.
double fisher_direct(const OpticalSystem& sys, const SubmodelSpec& submodel, const ImagingWindow& window = {});
/// Single-threaded reference for fisher_direct.
double fisher_direct_serial(const OpticalSystem& sys, const SubmodelSpec& submodel, const ImagingWindow& window = {});

/// (d beta)^2 / (N J); +infinity when J == 0.
double crb_direct(double d_beta, double fisher, double photons);

/// Log-log fit of a quantity against Delta and its acceptance check.
struct ScalingReport {
    enum class Check { two_sided, at_least, at_most };

    std::string quantity;
    int mu = 0;
    std::vector<double> deltas;
    std::vector<double> values;
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    Check check = Check::two_sided;
    bool comparable_case = false;  // mu = 1: both methods scale alike

    bool passes() const;
};

/// Least-squares fit of log(values) against log(deltas). Needs >= 4 points
/// (InsufficientGridError otherwise) and positive values.
ScalingReport fit_scaling(std::string quantity, int mu, std::span<const double> deltas,
                          std::span<const double> values, double target, double tolerance,
                          ScalingReport::Check check = ScalingReport::Check::two_sided);

/// Exponent targets: variance Delta^{-2 ceil(mu/2)}; direct bound Delta^{-2} for
/// mu = 1 and Delta^{-(2 mu - 1)} for mu >= 2.
int spade_variance_exponent(int mu);
int direct_bound_exponent(int mu);

struct ScalingTolerances {
    double variance = 0.5;
    double crb = 0.3;    // two-sided for mu = 1
    double crb_one_sided = 0.5;
    double ratio = 0.7;
};

/// Slopes of V(beta_mu-hat), C_direct and C_direct / V against Delta.
/// The ratio slope target is the difference of the two exponents, negated:
/// the direct bound exceeds the SPADE variance by that power of 1/Delta.
std::vector<ScalingReport> compare_scalings(int mu, std::span<const double> deltas, std::span<const double> variances,
                                            std::span<const double> crbs, const ScalingTolerances& tol = {});

}  // namespace superosc
