#include "biphoton/teleport.hpp"

#include <cmath>
#include <limits>

namespace biphoton {

HeraldedState herald_state(const JointSpectralAmplitude& f_s,
                           const JointSpectralAmplitude& f_m,
                           const SpectralAmplitude& psi_c) {
    // Photon a is shared between pair and measurement; photon c rides along
    // the measurement's second axis.
    if (!(f_s.grid_s == f_m.grid_s))
        throw incompatible_grid_error("herald_state: pair and measurement share photon a, "
                                      "grids must match");
    if (!(psi_c.grid == f_m.grid_i))
        throw incompatible_grid_error("herald_state: input state must live on the "
                                      "measurement's second axis");

    const double ha = f_s.grid_s.step(), hc = psi_c.grid.step(), hb = f_s.grid_i.step();
    const Eigen::VectorXcd u = (f_m.values.conjugate() * psi_c.values) * hc;
    Eigen::VectorXcd psi = (f_s.values.transpose() * u) * ha;

    // Guard against both true underflow and catastrophic cancellation (an
    // orthogonal herald): compare with the same contraction run on magnitudes.
    const Eigen::VectorXd u_abs =
        (f_m.values.cwiseAbs() * psi_c.values.cwiseAbs()) * hc;
    const Eigen::VectorXd psi_abs =
        (f_s.values.cwiseAbs().transpose() * u_abs) * ha;
    const double scale = std::sqrt(psi.squaredNorm() * hb);
    const double bound = std::sqrt(psi_abs.squaredNorm() * hb);
    if (scale < 1e-300 || scale < 1e-12 * bound)
        throw degenerate_error("herald_state: herald amplitude vanishes "
                               "(zero-overlap configuration)");

    psi /= scale;
    return {{f_s.grid_i, std::move(psi)}, scale};
}

double fidelity(const SpectralAmplitude& a, const SpectralAmplitude& b) {
    if (std::abs(a.norm() - 1.0) > 1e-6 || std::abs(b.norm() - 1.0) > 1e-6)
        throw config_error("fidelity: amplitudes must be normalized");
    return std::norm(inner_product(a, b));
}

namespace {

void check_corr_sigma(double corr, double sigma, const char* who) {
    if (!(std::abs(corr) <= 1.0))
        throw config_error(std::string(who) + ": |correlation| must be <= 1");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw config_error(std::string(who) + ": sigma must be positive and finite");
}

} // namespace

double closed_form_fidelity_ideal_measurement(double alpha, double sigma) {
    check_corr_sigma(alpha, sigma, "closed_form_fidelity_ideal_measurement");
    const double s2 = sigma * sigma, a2 = alpha * alpha;
    return std::sqrt(4.0 * s2 * (s2 + 1.0) * (s2 + 1.0 - a2)) /
           ((s2 + 1.0) * (s2 + 1.0) - a2);
}

double closed_form_fidelity_ideal_state(double beta, double sigma) {
    // The herald contraction treats pair and measurement symmetrically in this
    // limit, so the ideal-source fidelity is the same function of (beta, sigma).
    check_corr_sigma(beta, sigma, "closed_form_fidelity_ideal_state");
    return closed_form_fidelity_ideal_measurement(beta, sigma);
}

double closed_form_fidelity_equal_bandwidths(double alpha, double beta, double sigma) {
    check_corr_sigma(alpha, sigma, "closed_form_fidelity_equal_bandwidths");
    check_corr_sigma(beta, sigma, "closed_form_fidelity_equal_bandwidths");
    const double s2 = sigma * sigma, a2 = alpha * alpha, b2 = beta * beta;
    const double num = 4.0 * s2 * (b2 - 2.0 * (1.0 + s2)) * (b2 - (2.0 - a2) * (1.0 + s2));
    const double den = (1.0 + s2) * std::abs(a2 + b2 - 2.0 * (1.0 + s2));
    return std::sqrt(num) / den;
}

SweepResult fidelity_sweep(const SweepSpec& spec) {
    if (spec.n_corr < 1 || spec.n_sigma < 1)
        throw config_error("fidelity_sweep: resolution must be >= 1");
    if (!(spec.sigma_min > 0.0) || spec.sigma_max < spec.sigma_min)
        throw config_error("fidelity_sweep: bad sigma range");
    if (std::abs(spec.corr_min) > 1.0 || std::abs(spec.corr_max) > 1.0 ||
        spec.corr_max < spec.corr_min)
        throw config_error("fidelity_sweep: correlations must lie in [-1, 1]");

    auto axis = [](double lo, double hi, int n) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i)
            v[i] = (n == 1) ? lo : lo + (hi - lo) * i / (n - 1.0);
        return v;
    };

    SweepResult out;
    out.correlation = axis(spec.corr_min, spec.corr_max, spec.n_corr);
    out.sigma = axis(spec.sigma_min, spec.sigma_max, spec.n_sigma);
    out.fidelity.resize(spec.n_corr, spec.n_sigma);
    for (int i = 0; i < spec.n_corr; ++i) {
        for (int j = 0; j < spec.n_sigma; ++j) {
            const double c = out.correlation[i], s = out.sigma[j];
            switch (spec.regime) {
            case SweepRegime::ideal_measurement:
                out.fidelity(i, j) = closed_form_fidelity_ideal_measurement(c, s);
                break;
            case SweepRegime::ideal_state:
                out.fidelity(i, j) = closed_form_fidelity_ideal_state(c, s);
                break;
            case SweepRegime::equal_bandwidths:
                out.fidelity(i, j) =
                    spec.vary_beta
                        ? closed_form_fidelity_equal_bandwidths(spec.fixed_correlation, c, s)
                        : closed_form_fidelity_equal_bandwidths(c, spec.fixed_correlation, s);
                break;
            }
        }
    }
    return out;
}

namespace {

bool is_inf(double x) { return std::isinf(x) && x > 0.0; }
bool is_unit(double x) { return std::abs(std::abs(x) - 1.0) < 1e-12; }

// Realizes a Gaussian pair amplitude on the grid; |corr| = 1 becomes the
// maximally anticorrelated ridge with the matching difference-axis width.
JointSpectralAmplitude realize_pair(double corr, double gamma, const FrequencyGrid& grid) {
    if (is_unit(corr)) return cw_limit_jsa(2.0 * gamma, grid, grid);
    return gaussian_jsa({gamma, corr}, grid, grid);
}

} // namespace

RegimeCheck numeric_closed_form_check(const TeleportScenario& sc, int n_points) {
    if (!(sc.gamma_c > 0.0) || !std::isfinite(sc.gamma_c))
        throw config_error("numeric_closed_form_check: gamma_c must be positive and finite");
    if (!(sc.gamma_s > 0.0) || !(sc.gamma_m > 0.0))
        throw config_error("numeric_closed_form_check: bandwidths must be positive");

    RegimeCheck out;
    double gs = sc.gamma_s, gm = sc.gamma_m;
    if (is_inf(gs) && is_inf(gm))
        throw config_error("numeric_closed_form_check: at most one bandwidth may be infinite");
    if (is_inf(gm) && !is_unit(sc.beta))
        throw config_error("numeric_closed_form_check: infinite gamma_m requires |beta| = 1 "
                           "(ideally resolving measurement)");
    if (is_inf(gs) && !is_unit(sc.alpha))
        throw config_error("numeric_closed_form_check: infinite gamma_s requires |alpha| = 1 "
                           "(ideal cw-pumped source)");

    // A bandwidth counts as ideal when infinite, or finite but at least 50x
    // every other scale with the matching unit correlation (the sentinel rule
    // applied by the caller).
    const bool ideal_m =
        is_unit(sc.beta) && !is_inf(gs) &&
        (is_inf(gm) || gm >= 50.0 * std::max(gs, sc.gamma_c) * (1.0 - 1e-12));
    const bool ideal_s =
        is_unit(sc.alpha) && !is_inf(gm) &&
        (is_inf(gs) || gs >= 50.0 * std::max(gm, sc.gamma_c) * (1.0 - 1e-12));
    if (ideal_m && ideal_s)
        throw config_error("numeric_closed_form_check: scenario matches more than one "
                           "closed-form regime");

    // The grid resolves the finite structure; a quasi-infinite bandwidth only
    // has to look flat across it.
    double scale = 0.0;
    if (ideal_m) {
        out.closed_form = closed_form_fidelity_ideal_measurement(sc.alpha, sc.gamma_c / gs);
        scale = std::max(gs, sc.gamma_c);
        if (is_inf(gm)) gm = 50.0 * scale;
        out.sentinel_width = gm;
    } else if (ideal_s) {
        out.closed_form = closed_form_fidelity_ideal_state(sc.beta, sc.gamma_c / gm);
        scale = std::max(gm, sc.gamma_c);
        if (is_inf(gs)) gs = 50.0 * scale;
        out.sentinel_width = gs;
    } else if (!is_inf(gs) && !is_inf(gm) && std::abs(gs - gm) <= 1e-12 * gs) {
        out.closed_form =
            closed_form_fidelity_equal_bandwidths(sc.alpha, sc.beta, sc.gamma_c / gs);
        scale = std::max(gs, sc.gamma_c);
        out.sentinel_width = 0.0;
    } else {
        throw config_error("numeric_closed_form_check: scenario matches no closed-form regime "
                           "(need an ideal bandwidth with unit correlation, or equal finite "
                           "bandwidths)");
    }

    const FrequencyGrid grid = make_grid(0.0, 16.0 * scale, n_points);
    const JointSpectralAmplitude f_s = realize_pair(sc.alpha, gs, grid);
    const JointSpectralAmplitude f_m = realize_pair(sc.beta, gm, grid);
    const SpectralAmplitude psi_c = hermite_gauss(0, 0.0, sc.gamma_c, grid);

    const HeraldedState heralded = herald_state(f_s, f_m, psi_c);
    out.numeric = fidelity(psi_c, heralded.psi);
    out.discrepancy = std::abs(out.numeric - out.closed_form);
    return out;
}

} // namespace biphoton
