// Acceptance gate: one pass/fail line per criterion, nonzero exit on failure.
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "biphoton/cli.hpp"
#include "biphoton/entanglement.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/povm.hpp"
#include "biphoton/teleport.hpp"

using namespace biphoton;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Checker {
    int failures = 0;
    int index = 0;

    void run(const std::string& name,
             const std::function<std::pair<bool, std::string>()>& fn) {
        ++index;
        bool ok = false;
        std::string detail;
        try {
            std::tie(ok, detail) = fn();
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] %2d. %s -- %s\n", ok ? "PASS" : "FAIL", index, name.c_str(),
                    detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
};

TwoPhotonDensity pure_density(const JointSpectralAmplitude& g) {
    const int ns = g.grid_s.n_points, ni = g.grid_i.n_points;
    Eigen::VectorXcd psi(ns * ni);
    const double scale = std::sqrt(g.step_product());
    for (int j = 0; j < ns; ++j)
        for (int k = 0; k < ni; ++k) psi[j * ni + k] = g.values(j, k) * scale;
    return {g.grid_s, g.grid_i, psi * psi.adjoint()};
}

PhaseMatchSpec difference_only(double width, double nu_center, double nu_span) {
    return PhaseMatchSpec::difference_profile(
        hermite_gauss(0, 0.0, width, make_grid(nu_center, nu_span, 641)));
}

} // namespace

int main() {
    Checker c;

    c.run("teleport corner value sqrt(8/9), closed and numeric", [] {
        const double target = std::sqrt(8.0 / 9.0);
        const double closed = closed_form_fidelity_ideal_measurement(1.0, 1.0);
        const RegimeCheck rc = numeric_closed_form_check({1.0, 1.0, 1.0, kInf, 1.0}, 256);
        const bool ok = std::abs(closed - target) <= 1e-12 && rc.discrepancy <= 1e-2;
        return std::make_pair(ok, "closed error " + fmt(std::abs(closed - target)) +
                                      " (tol 1e-12), numeric gap " + fmt(rc.discrepancy) +
                                      " (tol 1e-2)");
    });

    c.run("unit-fidelity curve alpha^2 = 1 - sigma^4", [] {
        bool ok = true;
        double worst_closed = 0.0, min_numeric = 1.0;
        for (const double sigma : {0.3, 0.5, 0.8}) {
            const double alpha = std::sqrt(1.0 - std::pow(sigma, 4.0));
            const double closed = closed_form_fidelity_ideal_measurement(alpha, sigma);
            const RegimeCheck rc =
                numeric_closed_form_check({alpha, 1.0, 1.0, kInf, sigma}, 256);
            worst_closed = std::max(worst_closed, std::abs(closed - 1.0));
            min_numeric = std::min(min_numeric, rc.numeric);
            ok = ok && std::abs(closed - 1.0) <= 1e-12 && rc.numeric >= 0.995;
        }
        return std::make_pair(ok, "closed |F-1| <= " + fmt(worst_closed) +
                                      " (tol 1e-12), numeric F >= " + fmt(min_numeric) +
                                      " (floor 0.995)");
    });

    c.run("equal-bandwidth corner value sqrt(8/9)", [] {
        const double target = std::sqrt(8.0 / 9.0);
        const double f = closed_form_fidelity_equal_bandwidths(1.0, 0.0, 1.0);
        return std::make_pair(std::abs(f - target) <= 1e-12,
                              "error " + fmt(std::abs(f - target)) + " (tol 1e-12)");
    });

    c.run("pair and measurement correlation act asymmetrically", [] {
        const double f_pair = closed_form_fidelity_equal_bandwidths(1.0, 0.0, 1.0);
        const double f_meas = closed_form_fidelity_equal_bandwidths(0.0, 1.0, 1.0);
        const double diff = std::abs(f_pair - f_meas);
        return std::make_pair(diff > 1e-3, "F(corr pair) = " + fmt(f_pair) +
                                               ", F(corr meas) = " + fmt(f_meas) +
                                               ", difference " + fmt(diff) + " (> 1e-3)");
    });

    c.run("schmidt number matches 1/sqrt(1-alpha^2)", [] {
        bool ok = true;
        double worst256 = 0.0, worst512 = 0.0;
        for (const double alpha : {0.3, 0.6, 0.8, 0.9}) {
            const double k_exact = 1.0 / std::sqrt(1.0 - alpha * alpha);
            for (const int n : {256, 512}) {
                const FrequencyGrid grid = make_grid(0.0, 16.0, n);
                const SchmidtData sd =
                    schmidt_decompose(gaussian_jsa({1.0, alpha}, grid, grid));
                const double rel = std::abs(sd.schmidt_number - k_exact) / k_exact;
                (n == 256 ? worst256 : worst512) =
                    std::max(n == 256 ? worst256 : worst512, rel);
                ok = ok && rel <= (n == 256 ? 1e-2 : 2e-3);
            }
        }
        return std::make_pair(ok, "relative error " + fmt(worst256) +
                                      " at 256^2 (tol 1e-2), " + fmt(worst512) +
                                      " at 512^2 (tol 2e-3)");
    });

    c.run("schmidt coefficient ladder is geometric", [] {
        const FrequencyGrid grid = make_grid(0.0, 16.0, 256);
        const SchmidtData sd =
            schmidt_decompose(gaussian_jsa({1.0, 0.6}, grid, grid), 1e-16);
        const double t = std::tanh(0.5 * std::atanh(0.6));
        const double t2 = t * t; // = 1/9
        bool ok = sd.lambda.size() >= 7;
        double worst = 0.0;
        for (int j = 0; ok && j <= 5; ++j) {
            const double rel = std::abs(sd.lambda[j + 1] / sd.lambda[j] - t2) / t2;
            worst = std::max(worst, rel);
            ok = ok && rel <= 1e-2;
        }
        return std::make_pair(ok, "ratio error <= " + fmt(worst) +
                                      " vs tanh^2 = " + fmt(t2) + " (tol 1%)");
    });

    c.run("born probabilities via upconversion and via elements agree", [] {
        std::mt19937 rng(20260815);
        auto uni = [&rng](double lo, double hi) {
            return std::uniform_real_distribution<double>(lo, hi)(rng);
        };
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            const int n = 33 + static_cast<int>(rng() % 49);
            const double span = uni(8.0, 24.0);
            const FrequencyGrid gs = make_grid(uni(-2.0, 2.0), span, n);
            const FrequencyGrid gi = make_grid(uni(-2.0, 2.0), span, n);
            const FrequencyGrid sum =
                make_grid(gs.center + gi.center, 2.0 * span, 2 * n - 1);
            const CouplingChi chi(uni(0.02, 0.1), uni(0.0, 6.28));

            PhaseMatchSpec pm = PhaseMatchSpec::sinc_ridge(0.0, 1.0);
            switch (rng() % 3) {
            case 0:
                pm = PhaseMatchSpec::sinc_ridge(uni(0.35, 1.22), uni(0.8, 2.5));
                break;
            case 1:
                pm = PhaseMatchSpec::gaussian_ridge(uni(0.35, 1.22), uni(0.8, 2.5));
                break;
            default:
                pm = difference_only(uni(0.8, 2.0), gs.center - gi.center,
                                     2.0 * span + 2.0);
                break;
            }

            JointSpectralAmplitude g{gs, gi, {}, false};
            switch (rng() % 3) {
            case 0:
                g = gaussian_jsa({uni(0.7, 1.5), uni(-0.85, 0.85)}, gs, gi);
                break;
            case 1:
                g = build_jsa(hermite_gauss(static_cast<int>(rng() % 3),
                                            sum.center + uni(-1.0, 1.0), uni(0.8, 1.6),
                                            sum),
                              pm, chi, gs, gi)
                        .jsa;
                break;
            default:
                g = cw_limit_jsa(uni(0.5, 2.5), gs, gi);
                break;
            }

            const SpectralAmplitude sigma = sfg_amplitude(g, pm);
            const SpectralAmplitude mode =
                hermite_gauss(static_cast<int>(rng() % 5), sum.center + uni(-1.0, 1.0),
                              uni(0.7, 1.8), sigma.grid);
            const double p_sfg =
                chi.magnitude * chi.magnitude * std::norm(inner_product(mode, sigma));
            const double p_born =
                born_probability(g, projective_element(mode, pm, chi, gs, gi));
            const double rel = std::abs(p_sfg - p_born) /
                               std::max({p_sfg, p_born, 1e-300});
            worst = std::max(worst, rel);
        }
        return std::make_pair(worst <= 1e-10, "50 random configurations, worst relative "
                                              "residual " +
                                                  fmt(worst) + " (tol 1e-10)");
    });

    c.run("difference-only phasematching makes the family orthogonal", [] {
        const FrequencyGrid grid = make_grid(0.0, 16.0, 128);
        const FrequencyGrid sum_grid = make_grid(0.0, 32.0, 255);
        const CouplingChi chi;
        const PhaseMatchSpec pm_orth = difference_only(2.0, 0.0, 40.0);

        std::vector<PovmElement> elements;
        for (int n = 0; n < 6; ++n)
            elements.push_back(projective_element(hermite_gauss(n, 0.0, 1.0, sum_grid),
                                                  pm_orth, chi, grid, grid));
        const Eigen::MatrixXcd gram = gram_matrix(elements);
        double off = 0.0, diag = 0.0;
        for (int a = 0; a < 6; ++a) {
            diag = std::max(diag, std::abs(gram(a, a) - 1.0));
            for (int b = 0; b < 6; ++b)
                if (a != b) off = std::max(off, std::abs(gram(a, b)));
        }

        const PhaseMatchSpec pm_sum = PhaseMatchSpec::sinc_ridge(-M_PI / 4, 2.0);
        std::vector<PovmElement> mixed;
        for (int n = 0; n < 3; ++n)
            mixed.push_back(projective_element(hermite_gauss(n, 0.0, 1.0, sum_grid),
                                               pm_sum, chi, grid, grid));
        const double cross = std::abs(gram_matrix(mixed)(0, 2));

        const bool ok = off <= 1e-6 && diag <= 1e-6 && cross > 1e-3;
        return std::make_pair(ok, "gram off-diagonal " + fmt(off) +
                                      " (tol 1e-6), sum-dependent |G_02| = " + fmt(cross) +
                                      " (> 1e-3)");
    });

    c.run("upconversion recovers matched pulse shapes", [] {
        const FrequencyGrid grid = make_grid(0.0, 16.0, 128);
        const FrequencyGrid sum_grid = make_grid(0.0, 32.0, 255);
        const CouplingChi chi;
        const PhaseMatchSpec pm = difference_only(2.0, 0.0, 40.0);
        bool ok = true;
        double min_overlap = 1.0;
        for (int k = 0; k < 3; ++k) {
            const JointSpectralAmplitude g =
                build_jsa(hermite_gauss(k, 0.0, 1.0, sum_grid), pm, chi, grid, grid).jsa;
            const SpectralAmplitude sigma = sfg_amplitude(g, pm);
            const SpectralAmplitude phi = hermite_gauss(k, 0.0, 1.0, sigma.grid);
            const double overlap =
                std::norm(inner_product(phi, sigma)) / (sigma.norm() * sigma.norm());
            min_overlap = std::min(min_overlap, overlap);
            ok = ok && overlap >= 0.999;
        }
        return std::make_pair(ok, "min |<phi|sigma>|^2 = " + fmt(min_overlap) +
                                      " over HG0..HG2 (floor 0.999)");
    });

    c.run("mode family exhausts the click operator", [] {
        const FrequencyGrid grid = make_grid(0.0, 16.0, 256);
        const CouplingChi chi; // |chi| = 0.1
        const PhaseMatchSpec pm = difference_only(2.0, 0.0, 40.0);
        std::vector<double> defects;
        for (const int count : {8, 16, 32, 64}) {
            ModeFamily family{ModeKind::hermite_gauss, 0.0, 1.0, count};
            defects.push_back(null_element(family, pm, chi, grid, grid).completeness_defect);
        }
        bool ok = defects.back() <= 1e-2;
        for (size_t i = 1; i < defects.size(); ++i)
            ok = ok && defects[i] <= defects[i - 1] + 1e-12;
        std::string list;
        for (size_t i = 0; i < defects.size(); ++i)
            list += (i ? ", " : "") + fmt(defects[i]);
        return std::make_pair(ok, "defect over N in {8,16,32,64}: " + list +
                                      " (final tol 1e-2, monotone)");
    });

    c.run("projective elements are pure; equal mixtures halve the purity", [] {
        const FrequencyGrid grid = make_grid(0.0, 12.0, 32);
        const FrequencyGrid sum_grid = make_grid(0.0, 24.0, 63);
        const CouplingChi chi;
        const PhaseMatchSpec pm = difference_only(2.0, 0.0, 30.0);

        std::vector<PovmElement> elements;
        for (int n = 0; n < 3; ++n)
            elements.push_back(projective_element(hermite_gauss(n, 0.0, 1.0, sum_grid), pm,
                                                  chi, grid, grid));
        bool ok = true;
        double worst_pure = 0.0;
        for (const PovmElement& e : elements) {
            const double gap_gram = std::abs(purity(e) - 1.0);
            const double gap_dense = std::abs(purity(retrodicted_state(e)) - 1.0);
            worst_pure = std::max({worst_pure, gap_gram, gap_dense});
            ok = ok && gap_gram <= 1e-9 && gap_dense <= 1e-9;
        }

        const PovmElement mixed =
            mix_elements({0.5, 0.5}, {elements[0], elements[1]});
        const double gap_mix_gram = std::abs(purity(mixed) - 0.5);
        const double gap_mix_dense = std::abs(purity(retrodicted_state(mixed)) - 0.5);
        ok = ok && gap_mix_gram <= 1e-9 && gap_mix_dense <= 1e-9;

        return std::make_pair(ok, "single-element |purity-1| <= " + fmt(worst_pure) +
                                      ", mixture |purity-1/2| <= " +
                                      fmt(std::max(gap_mix_gram, gap_mix_dense)) +
                                      " (tol 1e-9)");
    });

    c.run("negativity: separable floor, pure-state identity, monotone growth", [] {
        const FrequencyGrid grid = make_grid(0.0, 12.0, 32);
        std::vector<double> negs;
        bool ok = true;
        double identity_gap = 0.0;
        for (const double alpha : {0.0, 0.3, 0.6, 0.9}) {
            const JointSpectralAmplitude g = gaussian_jsa({1.0, alpha}, grid, grid);
            const double neg = negativity(pure_density(g));
            negs.push_back(neg);
            if (alpha == 0.0) ok = ok && neg <= 1e-10;
            if (alpha == 0.6) {
                const SchmidtData sd = schmidt_decompose(g, 1e-16);
                double root_sum = 0.0;
                for (const double l : sd.lambda) root_sum += std::sqrt(l);
                identity_gap = std::abs(neg - 0.5 * (root_sum * root_sum - 1.0));
                ok = ok && identity_gap <= 1e-6;
            }
        }
        for (size_t i = 1; i < negs.size(); ++i) ok = ok && negs[i] > negs[i - 1];
        return std::make_pair(ok, "N(0) = " + fmt(negs[0]) + " (tol 1e-10), identity gap " +
                                      fmt(identity_gap) + " (tol 1e-6), N = {" + fmt(negs[0]) +
                                      ", " + fmt(negs[1]) + ", " + fmt(negs[2]) + ", " +
                                      fmt(negs[3]) + "} strictly increasing");
    });

    if (c.failures == 0) {
        std::printf("all %d acceptance criteria passed\n", c.index);
        return 0;
    }
    std::printf("%d of %d acceptance criteria FAILED\n", c.failures, c.index);
    return 1;
}
