#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "biphoton/entanglement.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/povm.hpp"

using namespace biphoton;

namespace {

TwoPhotonDensity pure_density(const JointSpectralAmplitude& g) {
    const int ns = g.grid_s.n_points, ni = g.grid_i.n_points;
    Eigen::VectorXcd psi(ns * ni);
    const double scale = std::sqrt(g.step_product());
    for (int j = 0; j < ns; ++j)
        for (int k = 0; k < ni; ++k) psi[j * ni + k] = g.values(j, k) * scale;
    return {g.grid_s, g.grid_i, psi * psi.adjoint()};
}

double negative_part(const Eigen::VectorXd& spectrum) {
    double n = 0.0;
    for (int j = 0; j < spectrum.size(); ++j)
        if (spectrum[j] < 0.0) n -= spectrum[j];
    return n;
}

} // namespace

TEST_CASE("schmidt decomposition of the correlated gaussian") {
    const FrequencyGrid grid = make_grid(0.0, 16.0, 256);
    const JointSpectralAmplitude g = gaussian_jsa({1.0, 0.6}, grid, grid);
    const SchmidtData sd = schmidt_decompose(g, 1e-16);

    SUBCASE("schmidt number matches the closed form and converges with the grid") {
        const double k_exact = 1.25; // 1 / sqrt(1 - 0.36)
        const double err256 = std::abs(sd.schmidt_number - k_exact);
        CHECK(err256 <= 1e-4 * k_exact);

        const FrequencyGrid fine = make_grid(0.0, 16.0, 512);
        const SchmidtData sd512 = schmidt_decompose(gaussian_jsa({1.0, 0.6}, fine, fine));
        const double err512 = std::abs(sd512.schmidt_number - k_exact);
        CHECK(err512 <= 2e-3 * k_exact);
        // Refinement keeps the error at or below the coarse grid's, down to
        // the floating-point floor (both sit at machine epsilon here).
        CHECK(err512 <= err256 + 4e-16 * k_exact);
    }

    SUBCASE("geometric coefficient ladder with ratio tanh^2(zeta) = 1/9") {
        REQUIRE(sd.lambda.size() >= 7);
        CHECK(sd.lambda[0] == doctest::Approx(8.0 / 9.0).epsilon(1e-4));
        for (int j = 0; j <= 5; ++j) {
            const double ratio = sd.lambda[j + 1] / sd.lambda[j];
            CHECK(ratio == doctest::Approx(1.0 / 9.0).epsilon(1e-2));
        }
        double sum = 0.0;
        for (const double l : sd.lambda) sum += l;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }

    SUBCASE("modes are orthonormal in the quadrature inner product") {
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
                const complexd ss = inner_product(sd.modes_s[a], sd.modes_s[b]);
                const complexd ii = inner_product(sd.modes_i[a], sd.modes_i[b]);
                const double expect = a == b ? 1.0 : 0.0;
                CHECK(std::abs(ss - expect) < 1e-6);
                CHECK(std::abs(ii - expect) < 1e-6);
            }
        }
    }

    SUBCASE("retained modes reconstruct the amplitude to sqrt(cutoff)") {
        const SchmidtData trunc = schmidt_decompose(g); // default cutoff 1e-10
        Eigen::MatrixXcd recon = Eigen::MatrixXcd::Zero(grid.n_points, grid.n_points);
        for (size_t r = 0; r < trunc.lambda.size(); ++r)
            recon += std::sqrt(trunc.lambda[r]) * trunc.modes_s[r].values *
                     trunc.modes_i[r].values.transpose();
        const double err =
            std::sqrt((g.values - recon).squaredNorm() * g.step_product());
        CHECK(err <= 1.1e-5);
    }

    SUBCASE("equivalent squeezing parameter") {
        REQUIRE(sd.zeta.has_value());
        CHECK(*sd.zeta == doctest::Approx(0.5 * std::atanh(0.6)).epsilon(1e-5));
    }

    SUBCASE("input validation") {
        JointSpectralAmplitude raw = g;
        raw.values *= 2.0;
        raw.normalized = false;
        CHECK_THROWS_AS((void)schmidt_decompose(raw), config_error);
        CHECK_THROWS_AS((void)schmidt_decompose(g, 1.5), config_error);
        CHECK_THROWS_AS((void)schmidt_decompose(g, -0.1), config_error);
    }
}

TEST_CASE("closed-form schmidt data of the gaussian family") {
    CHECK(gaussian_schmidt_number(0.0) == 1.0);
    CHECK(gaussian_schmidt_number(0.6) == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(gaussian_schmidt_number(0.8) == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
    CHECK(gaussian_schmidt_number(-0.6) == gaussian_schmidt_number(0.6));
    CHECK_THROWS_AS((void)gaussian_schmidt_number(1.0), config_error);
    CHECK_THROWS_AS((void)gaussian_schmidt_number(-1.0), config_error);

    const std::vector<double> lam = gaussian_schmidt_coefficients(0.6, 5);
    REQUIRE(lam.size() == 6);
    CHECK(lam[0] == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
    for (int j = 0; j + 1 < 6; ++j)
        CHECK(lam[j + 1] / lam[j] == doctest::Approx(1.0 / 9.0).epsilon(1e-12));

    const std::vector<double> sep = gaussian_schmidt_coefficients(0.0, 3);
    CHECK(sep[0] == 1.0);
    CHECK(sep[1] == 0.0);

    double total = 0.0;
    for (const double l : gaussian_schmidt_coefficients(0.9, 200)) total += l;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

    CHECK_THROWS_AS((void)gaussian_schmidt_coefficients(1.0, 5), config_error);
    CHECK_THROWS_AS((void)gaussian_schmidt_coefficients(0.5, -1), config_error);
}

TEST_CASE("negativity of pure correlated gaussians") {
    const FrequencyGrid grid = make_grid(0.0, 12.0, 32);
    const double alphas[] = {0.0, 0.3, 0.6, 0.9};
    std::vector<double> negs;

    for (const double alpha : alphas) {
        const JointSpectralAmplitude g = gaussian_jsa({1.0, alpha}, grid, grid);
        const TwoPhotonDensity rho = pure_density(g);
        const Eigen::VectorXd spectrum = partial_transpose_spectrum(rho);

        // Partial transposition preserves the trace.
        CHECK(spectrum.sum() == doctest::Approx(1.0).epsilon(1e-9));

        // The two routes to the negativity agree.
        const double from_negatives = negative_part(spectrum);
        const double from_trace_norm = 0.5 * (spectrum.cwiseAbs().sum() - 1.0);
        CHECK(std::abs(from_negatives - from_trace_norm) < 1e-9);
        negs.push_back(from_negatives);

        if (alpha == 0.0) CHECK(from_negatives <= 1e-10);
        if (alpha == 0.3)
            CHECK(negativity(rho) == doctest::Approx(from_negatives).epsilon(1e-12));
        if (alpha == 0.6) {
            // Pure-state identity N = ((sum_j sqrt(lambda_j))^2 - 1) / 2: exact
            // linear algebra on the discrete amplitude, whatever the grid.
            const SchmidtData sd = schmidt_decompose(g, 1e-16);
            double root_sum = 0.0;
            for (const double l : sd.lambda) root_sum += std::sqrt(l);
            const double from_schmidt = 0.5 * (root_sum * root_sum - 1.0);
            CHECK(std::abs(from_negatives - from_schmidt) <= 1e-6);
        }
    }

    for (size_t i = 1; i < negs.size(); ++i) CHECK(negs[i] > negs[i - 1]);
}

TEST_CASE("negativity of a retrodicted mixture via both routes") {
    const FrequencyGrid grid = make_grid(0.0, 10.0, 24);
    const FrequencyGrid sum_grid = make_grid(0.0, 20.0, 47);
    const auto pm = PhaseMatchSpec::gaussian_ridge(M_PI / 4, 2.0);
    const CouplingChi chi;

    std::vector<PovmElement> elements;
    for (int n = 0; n < 2; ++n)
        elements.push_back(projective_element(hermite_gauss(n, 0.0, 1.0, sum_grid), pm, chi,
                                              grid, grid, "hg" + std::to_string(n)));
    const TwoPhotonDensity rho = retrodicted_state(mix_elements({0.5, 0.5}, elements));
    const Eigen::VectorXd spectrum = partial_transpose_spectrum(rho);

    CHECK(spectrum.sum() == doctest::Approx(1.0).epsilon(1e-9));
    const double from_negatives = negative_part(spectrum);
    const double from_trace_norm = 0.5 * (spectrum.cwiseAbs().sum() - 1.0);
    CHECK(std::abs(from_negatives - from_trace_norm) < 1e-9);
    CHECK(negativity(rho) == doctest::Approx(from_negatives).epsilon(1e-12));
    CHECK(from_negatives > 0.0); // retrodicted states of pumped elements stay entangled
}

TEST_CASE("dense-path guards") {
    const FrequencyGrid big = make_grid(0.0, 16.0, 65);
    TwoPhotonDensity oversized{big, big, Eigen::MatrixXcd::Zero(4, 4)};
    CHECK_THROWS_AS((void)partial_transpose_spectrum(oversized), resource_error);
    CHECK_THROWS_AS((void)negativity(oversized), resource_error);

    const FrequencyGrid small = make_grid(0.0, 16.0, 8);
    TwoPhotonDensity mismatched{small, small, Eigen::MatrixXcd::Zero(3, 3)};
    CHECK_THROWS_AS((void)partial_transpose_spectrum(mismatched), config_error);
}

TEST_CASE("retrodicted and source amplitudes share one schmidt spectrum") {
    const FrequencyGrid grid = make_grid(0.0, 16.0, 48);
    const FrequencyGrid sum_grid = make_grid(0.0, 32.0, 95);
    const auto pm = PhaseMatchSpec::gaussian_ridge(M_PI / 4, 2.0);
    const CouplingChi chi(0.1, 0.2);
    const SpectralAmplitude pump = hermite_gauss(0, 0.0, 1.0, sum_grid);

    const JointSpectralAmplitude source = build_jsa(pump, pm, chi, grid, grid).jsa;
    const JointSpectralAmplitude retro = measurement_jsa(pump, pm, chi, grid, grid).jsa;

    const SchmidtData a = schmidt_decompose(source);
    const SchmidtData b = schmidt_decompose(retro);
    REQUIRE(a.lambda.size() == b.lambda.size());
    for (size_t j = 0; j < std::min<size_t>(a.lambda.size(), 6); ++j)
        CHECK(a.lambda[j] == b.lambda[j]);
    CHECK(a.schmidt_number == b.schmidt_number);
}
