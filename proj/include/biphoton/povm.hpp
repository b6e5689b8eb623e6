#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "biphoton/jsa.hpp"

namespace biphoton {

// Rank-decomposed detection operator  Pi = sum_n weights[n] |components[n]><components[n]|.
// A projective element has a single component; mixtures of projective elements
// carry one (weight, component) pair per constituent.
struct PovmElement {
    std::vector<double> weights;                   // non-negative
    std::vector<JointSpectralAmplitude> components; // unit-norm, shared grids
    std::string label;

    bool projective() const { return components.size() == 1; }
    double trace() const; // sum of weights (components are normalized)
};

// Dense two-photon density matrix over the flattened (signal, idler) grid.
// Entries carry the quadrature weight: matrix((j,k),(j',k')) =
// rho(w_j, w_k; w_j', w_k') * step_s * step_i, so trace and eigenvalues are the
// continuum ones and sum to 1.
struct TwoPhotonDensity {
    FrequencyGrid grid_s;
    FrequencyGrid grid_i;
    Eigen::MatrixXcd matrix; // (n_s * n_i) x (n_s * n_i), Hermitian, row index j * n_i + k
};

// The no-click element of the measurement, diagonal in the frequency basis:
// diagonal(j, k) = 1 - |chi|^2 |Phi(w_j, w_k)|^2.
struct NullElement {
    FrequencyGrid grid_s;
    FrequencyGrid grid_i;
    Eigen::MatrixXd diagonal;
};

// Measurement amplitude for detection mode phi_n: identical construction to the
// down-conversion amplitude with the pump replaced by the mode, so retrodicted
// states and source states built from the same inputs agree bit for bit.
PdcState measurement_jsa(const SpectralAmplitude& detect_mode, const PhaseMatchSpec& pm,
                         const CouplingChi& chi, const FrequencyGrid& grid_s,
                         const FrequencyGrid& grid_i);

// First-order upconverted amplitude of the two-photon input g:
//   sigma(nu) = -1/2 integral dnu' conj(Phi~(nu, nu')) g~(nu, nu'),
// where ~ marks sum/difference coordinates and the 1/2 is the Jacobian of the
// change of variables. Returned on the exact sum-frequency lattice
// (n_s + n_i - 1 points, same step), so mode projections of sigma reproduce the
// Born probabilities to rounding accuracy. The caller applies -i chi* to turn
// sigma into the physical detection amplitude.
SpectralAmplitude sfg_amplitude(const JointSpectralAmplitude& g, const PhaseMatchSpec& pm);

// Detection probability p = sum_n w_n |<Psi_n|g>|^2 of a pure two-photon input.
double born_probability(const JointSpectralAmplitude& g, const PovmElement& element);

// Detection probability p = sum_n w_n <Psi_n|rho|Psi_n> of a mixed input.
double born_probability(const TwoPhotonDensity& rho, const PovmElement& element);

// Projective element for detection mode `detect_mode`; weight from measurement_jsa.
PovmElement projective_element(const SpectralAmplitude& detect_mode, const PhaseMatchSpec& pm,
                               const CouplingChi& chi, const FrequencyGrid& grid_s,
                               const FrequencyGrid& grid_i, std::string label = {});

// Weighted combination sum_n q_n Pi_n of projective elements, q_n in [0, 1].
// The q_n need not sum to 1: partial sums of a POVM are themselves valid
// (sub-normalized) measurement operators.
PovmElement mix_elements(const std::vector<double>& q, const std::vector<PovmElement>& elements);

// Normalized retrodicted state rho = Pi / Tr(Pi) as a dense matrix.
// Throws resource_error for grids beyond 64 x 64 and degenerate_error when the
// trace underflows.
TwoPhotonDensity retrodicted_state(const PovmElement& element);

// Tr(rho^2) from the dense matrix (Frobenius norm of a Hermitian matrix).
double purity(const TwoPhotonDensity& rho);

// Tr(rho^2) of the retrodicted state of `element` through its rank
// decomposition and Gram matrix, without materializing the dense matrix.
double purity(const PovmElement& element);

// Gram matrix G_nm = <Psi_n|Psi_m> of the (projective) elements' components.
Eigen::MatrixXcd gram_matrix(const std::vector<PovmElement>& elements);

// Applies the element to a pure amplitude: Pi g = sum_n w_n <Psi_n|g> Psi_n.
JointSpectralAmplitude element_apply(const PovmElement& element, const JointSpectralAmplitude& g);

// Null element and the completeness deficit of the mode family truncated at
// modes.max_order.
//
// The click elements sum to the positive operator |chi|^2 A^dagger A, where A
// maps g to its upconverted amplitude sigma_g; a mode family that resolves
// every reachable sigma makes the partial sums exhaust that limit. The deficit
// is probed with displaced ground-mode pump amplitudes spread across the
// central half of the sum-frequency range:
//   defect = max over probes of  1 - sum_n p_n(probe) / (|chi|^2 ||sigma_probe||^2).
// Bessel's inequality keeps every capture ratio <= 1, and adding modes only
// increases it, so the defect decreases monotonically in max_order.
struct NullResult {
    NullElement null;
    double completeness_defect = 1.0;
    std::vector<double> probe_centers; // sum-frequency displacement of each probe
    std::vector<double> probe_defects; // per-probe deficit, same order
};

NullResult null_element(const ModeFamily& modes, const PhaseMatchSpec& pm,
                        const CouplingChi& chi, const FrequencyGrid& grid_s,
                        const FrequencyGrid& grid_i);

} // namespace biphoton
