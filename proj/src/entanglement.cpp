#include "biphoton/entanglement.hpp"

#include <cmath>

#include <Eigen/SVD>
#include <Eigen/Eigenvalues>

namespace biphoton {

SchmidtData schmidt_decompose(const JointSpectralAmplitude& f, double cutoff) {
    if (!f.normalized)
        throw config_error("schmidt_decompose: amplitude must be normalized");
    if (!(cutoff >= 0.0 && cutoff < 1.0))
        throw config_error("schmidt_decompose: cutoff must lie in [0, 1)");

    // Quadrature scaling sqrt(step_s step_i) turns the continuum kernel into a
    // matrix whose SVD is grid-invariant: singular values approximate the
    // continuum Schmidt amplitudes directly.
    const double hs = f.grid_s.step(), hi = f.grid_i.step();
    Eigen::MatrixXcd m = f.values * std::sqrt(hs * hi);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd s = svd.singularValues();

    SchmidtData out;
    double sum2 = 0.0, sum4 = 0.0;
    for (int j = 0; j < s.size(); ++j) {
        sum2 += s[j] * s[j];
        sum4 += s[j] * s[j] * s[j] * s[j];
    }
    out.schmidt_number = sum2 * sum2 / sum4;
    // Equivalent squeezing parameter through K = cosh(2 zeta); for the
    // correlated-Gaussian family this is exactly zeta = atanh(alpha) / 2.
    out.zeta = 0.5 * std::acosh(std::max(1.0, out.schmidt_number));

    double cumulative = 0.0;
    for (int j = 0; j < s.size(); ++j) {
        const double lj = s[j] * s[j];
        out.lambda.push_back(lj);
        out.modes_s.push_back({f.grid_s, svd.matrixU().col(j) / std::sqrt(hs)});
        out.modes_i.push_back({f.grid_i, svd.matrixV().col(j).conjugate() / std::sqrt(hi)});
        cumulative += lj;
        if (cumulative >= 1.0 - cutoff) break;
    }
    return out;
}

double gaussian_schmidt_number(double alpha) {
    if (!(std::abs(alpha) < 1.0))
        throw config_error("gaussian_schmidt_number: |alpha| must be < 1");
    return 1.0 / std::sqrt(1.0 - alpha * alpha);
}

std::vector<double> gaussian_schmidt_coefficients(double alpha, int j_max) {
    if (!(std::abs(alpha) < 1.0))
        throw config_error("gaussian_schmidt_coefficients: |alpha| must be < 1");
    if (j_max < 0)
        throw config_error("gaussian_schmidt_coefficients: j_max must be >= 0");
    const double zeta = 0.5 * std::atanh(alpha);
    const double t2 = std::tanh(zeta) * std::tanh(zeta);
    const double head = 1.0 - t2; // sech^2(zeta)
    std::vector<double> lambda(j_max + 1);
    double term = head;
    for (int j = 0; j <= j_max; ++j) {
        lambda[j] = term;
        term *= t2;
    }
    return lambda;
}

Eigen::VectorXd partial_transpose_spectrum(const TwoPhotonDensity& rho) {
    const int ns = rho.grid_s.n_points, ni = rho.grid_i.n_points;
    if (ns > 64 || ni > 64)
        throw resource_error("partial_transpose_spectrum: dense path is limited to 64 x 64 grids");
    const int dim = ns * ni;
    if (rho.matrix.rows() != dim || rho.matrix.cols() != dim)
        throw config_error("partial_transpose_spectrum: matrix does not match its grids");

    // Transpose the idler index: (j k | j' k') -> (j k' | j' k).
    Eigen::MatrixXcd pt(dim, dim);
    for (int j = 0; j < ns; ++j)
        for (int k = 0; k < ni; ++k)
            for (int jp = 0; jp < ns; ++jp)
                for (int kp = 0; kp < ni; ++kp)
                    pt(j * ni + k, jp * ni + kp) = rho.matrix(j * ni + kp, jp * ni + k);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(pt, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

double negativity(const TwoPhotonDensity& rho) {
    const Eigen::VectorXd ev = partial_transpose_spectrum(rho);
    double n = 0.0;
    for (int j = 0; j < ev.size(); ++j)
        if (ev[j] < 0.0) n -= ev[j];
    return n;
}

} // namespace biphoton
