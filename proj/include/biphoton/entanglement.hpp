#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "biphoton/grid.hpp"
#include "biphoton/jsa.hpp"
#include "biphoton/povm.hpp"

namespace biphoton {

// Schmidt decomposition f(w_s, w_i) = sum_j sqrt(lambda_j) u_j(w_s) v_j(w_i).
struct SchmidtData {
    std::vector<double> lambda;          // descending, sums to 1 before truncation
    std::vector<SpectralAmplitude> modes_s;
    std::vector<SpectralAmplitude> modes_i;
    double schmidt_number = 1.0;         // K = 1 / sum lambda_j^2, full spectrum
    // Equivalent squeezing parameter, K = cosh(2 zeta); coincides with the
    // family parameter zeta = atanh(alpha) / 2 for the correlated Gaussian.
    std::optional<double> zeta;
};

// SVD of the quadrature-scaled amplitude matrix; the sqrt(step) scaling makes
// the singular values grid-invariant. Input must be normalized. Coefficients
// are truncated once their running sum reaches 1 - cutoff, so the reconstruction
// error of the retained modes is at most sqrt(cutoff).
SchmidtData schmidt_decompose(const JointSpectralAmplitude& f, double cutoff = 1e-10);

// Closed-form Schmidt number of the correlated Gaussian amplitude:
// K = 1 / sqrt(1 - alpha^2) = cosh(2 zeta) with alpha = tanh(2 zeta).
double gaussian_schmidt_number(double alpha);

// Closed-form coefficients lambda_j = sech^2(zeta) tanh^{2j}(zeta),
// j = 0 .. j_max, with zeta = atanh(alpha) / 2.
std::vector<double> gaussian_schmidt_coefficients(double alpha, int j_max);

// Entanglement negativity N = sum |negative eigenvalues| of the partial
// transpose of rho on the idler index. Dense path; grids beyond 64 x 64 throw
// resource_error. For a pure state with Schmidt coefficients lambda this
// equals ((sum_j sqrt(lambda_j))^2 - 1) / 2.
double negativity(const TwoPhotonDensity& rho);

// Eigenvalues of the partial transpose, ascending; negativity derives from
// them two ways (sum of negatives vs trace norm), which tests cross-check.
Eigen::VectorXd partial_transpose_spectrum(const TwoPhotonDensity& rho);

} // namespace biphoton
