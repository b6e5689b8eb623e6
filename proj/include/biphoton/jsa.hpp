#pragma once

#include <complex>

#include <Eigen/Dense>

#include "biphoton/grid.hpp"

namespace biphoton {

// First-order effective coupling of the nonlinear interaction. The magnitude
// sets the scale of every detection probability; the perturbative treatment
// is only trustworthy for small values, so magnitudes above 0.3 are rejected
// and those above 0.1 are flagged.
struct CouplingChi {
    double magnitude = 0.1;
    double phase = 0.0;

    CouplingChi() = default;
    CouplingChi(double magnitude_, double phase_);

    complexd value() const { return std::polar(magnitude, phase); }
    bool perturbative_warning() const { return magnitude > 0.1; }
};

enum class PhaseMatchKind {
    sinc,         // sin(u)/u transverse profile of a uniform medium
    gaussian,     // exp(-u^2/2) transverse profile
    nu_prime_only // explicit profile in the difference frequency alone
};

// Phasematching function over the (w_s, w_i) plane.
//
// For sinc/gaussian kinds the function is constant along the ridge direction
// (cos theta, sin theta) measured from the w_s axis relative to the grid
// centers, and varies transversally:
//   u = (-sin(theta) (w_s - c_s) + cos(theta) (w_i - c_i)) / bandwidth.
// At theta = 45 deg the ridge runs along the main diagonal, so the function
// depends on the difference frequency nu' = w_s - w_i alone and is independent
// of the sum frequency -- the group-velocity-matched configuration that makes
// the detection POVM orthogonal.
//
// nu_prime_only evaluates a stored profile at nu' = w_s - w_i directly
// (grid-center offsets cancel in nu', so it is shift invariant); the profile
// is rescaled to unit peak magnitude on construction.
struct PhaseMatchSpec {
    PhaseMatchKind kind = PhaseMatchKind::sinc;
    double angle_theta = M_PI / 4; // ridge angle from the w_s axis, radians
    double bandwidth = 1.0;        // transverse width of the profile argument
    SpectralAmplitude profile;     // nu' profile, nu_prime_only kind

    static PhaseMatchSpec sinc_ridge(double angle_theta, double bandwidth);
    static PhaseMatchSpec gaussian_ridge(double angle_theta, double bandwidth);
    static PhaseMatchSpec difference_profile(SpectralAmplitude profile);
};

// Phasematching amplitude sampled on a signal x idler grid; |values| <= 1.
Eigen::MatrixXcd evaluate_phasematching(const PhaseMatchSpec& pm,
                                        const FrequencyGrid& grid_s,
                                        const FrequencyGrid& grid_i);

// Two-photon amplitude f(w_s, w_i) on a pair of frequency grids.
// values(j, k) = f at (grid_s.point(j), grid_i.point(k)); constructors that
// produce unit quadrature norm set `normalized`.
struct JointSpectralAmplitude {
    FrequencyGrid grid_s;
    FrequencyGrid grid_i;
    Eigen::MatrixXcd values;
    bool normalized = false;

    double step_product() const { return grid_s.step() * grid_i.step(); }
    // Quadrature L2 norm sqrt(sum |f_jk|^2 step_s step_i).
    double norm() const { return std::sqrt(values.squaredNorm() * step_product()); }
};

// Quadrature inner product <a|b> between amplitudes on identical grids.
complexd jsa_inner_product(const JointSpectralAmplitude& a, const JointSpectralAmplitude& b);

// Separable two-photon amplitude u(w_s) v(w_i), normalized.
JointSpectralAmplitude product_jsa(const SpectralAmplitude& u, const SpectralAmplitude& v);

// Result of assembling a pumped down-conversion (or, with the pump replaced by
// a detection mode, an upconversion measurement) amplitude.
struct PdcState {
    JointSpectralAmplitude jsa; // f = (chi/sqrt(w)) pump(w_s + w_i) Phi(w_s, w_i)
    double weight = 0.0;        // w = integral |chi pump Phi|^2, the element weight
    bool pump_truncated = false;
};

// Builds the normalized two-photon amplitude driven by `pump` through the
// phasematching `pm`. The pump is interpolated linearly at the sum frequency
// w_s + w_i; sums that fall outside a pump grid carrying non-negligible edge
// amplitude set pump_truncated. Throws degenerate_error when the weight
// underflows (below 1e-300).
PdcState build_jsa(const SpectralAmplitude& pump, const PhaseMatchSpec& pm,
                   const CouplingChi& chi, const FrequencyGrid& grid_s,
                   const FrequencyGrid& grid_i);

// Two-mode Gaussian amplitude with adjustable frequency correlation:
//   f ~ exp(-(x^2/2 + y^2/2 + alpha x y) / (gamma^2 (1 - alpha^2))),
// x, y measured from the grid centers. alpha in (-1, 1); alpha -> +1 is the
// maximally anticorrelated (cw-pump) limit, reachable only via cw_limit_jsa.
struct GaussianJsaParams {
    double gamma = 1.0;
    double alpha = 0.0;
};

JointSpectralAmplitude gaussian_jsa(const GaussianJsaParams& p,
                                    const FrequencyGrid& grid_a,
                                    const FrequencyGrid& grid_b);

// Maximal-correlation (cw-pump) limit on a finite grid: a normalized ridge
//   exp(-nu^2 / (2 h^2)) exp(-nu'^2 / (2 gamma_diff^2)),
// nu = x + y and nu' = x - y from the grid centers, where h is one grid step:
// the narrowest sum-frequency band the grid can represent.
JointSpectralAmplitude cw_limit_jsa(double gamma_diff, const FrequencyGrid& grid_a,
                                    const FrequencyGrid& grid_b);

// Exact resampling of a JSA into sum/difference coordinates. Equal-step grids
// rotate onto a checkerboard lattice; the even sublattice (every second sum
// line, difference step 2h) is itself rectangular, so no interpolation is
// involved and a function that factorizes in (nu, nu') maps to an exactly
// rank-1 matrix. Rows: nu; columns: nu'.
struct RotatedFrame {
    Eigen::VectorXd nu;       // sum-frequency samples (even sublattice)
    Eigen::VectorXd nu_prime; // difference-frequency samples
    Eigen::MatrixXcd values;
};

RotatedFrame sum_difference_frame(const JointSpectralAmplitude& f);

} // namespace biphoton
