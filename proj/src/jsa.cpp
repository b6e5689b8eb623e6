#include "biphoton/jsa.hpp"

#include <cmath>

namespace biphoton {

CouplingChi::CouplingChi(double magnitude_, double phase_)
    : magnitude(magnitude_), phase(phase_) {
    if (!(magnitude >= 0.0) || !std::isfinite(magnitude))
        throw config_error("CouplingChi: magnitude must be a finite non-negative number");
    if (magnitude > 0.3)
        throw config_error("CouplingChi: magnitude above 0.3 leaves the perturbative regime");
}

PhaseMatchSpec PhaseMatchSpec::sinc_ridge(double angle_theta, double bandwidth) {
    if (!(bandwidth > 0.0))
        throw config_error("PhaseMatchSpec: bandwidth must be positive");
    PhaseMatchSpec pm;
    pm.kind = PhaseMatchKind::sinc;
    pm.angle_theta = angle_theta;
    pm.bandwidth = bandwidth;
    return pm;
}

PhaseMatchSpec PhaseMatchSpec::gaussian_ridge(double angle_theta, double bandwidth) {
    PhaseMatchSpec pm = sinc_ridge(angle_theta, bandwidth);
    pm.kind = PhaseMatchKind::gaussian;
    return pm;
}

PhaseMatchSpec PhaseMatchSpec::difference_profile(SpectralAmplitude profile) {
    const double peak = profile.values.cwiseAbs().maxCoeff();
    if (peak < 1e-300)
        throw config_error("PhaseMatchSpec: difference profile is identically zero");
    profile.values /= peak; // unit peak keeps |Phi| <= 1 on any grid
    PhaseMatchSpec pm;
    pm.kind = PhaseMatchKind::nu_prime_only;
    pm.profile = std::move(profile);
    return pm;
}

namespace {

// sin(u)/u with the small-argument expansion to avoid 0/0.
double sinc(double u) {
    if (std::abs(u) < 1e-4) return 1.0 - u * u / 6.0;
    return std::sin(u) / u;
}

} // namespace

Eigen::MatrixXcd evaluate_phasematching(const PhaseMatchSpec& pm,
                                        const FrequencyGrid& grid_s,
                                        const FrequencyGrid& grid_i) {
    Eigen::MatrixXcd phi(grid_s.n_points, grid_i.n_points);
    if (pm.kind == PhaseMatchKind::nu_prime_only) {
        for (int j = 0; j < grid_s.n_points; ++j)
            for (int k = 0; k < grid_i.n_points; ++k)
                phi(j, k) = interpolate(pm.profile.grid, pm.profile.values,
                                        grid_s.point(j) - grid_i.point(k));
        return phi;
    }
    if (!(pm.bandwidth > 0.0))
        throw config_error("evaluate_phasematching: bandwidth must be positive");
    const double s = std::sin(pm.angle_theta), c = std::cos(pm.angle_theta);
    for (int j = 0; j < grid_s.n_points; ++j) {
        const double xs = grid_s.point(j) - grid_s.center;
        for (int k = 0; k < grid_i.n_points; ++k) {
            const double xi = grid_i.point(k) - grid_i.center;
            const double u = (-s * xs + c * xi) / pm.bandwidth;
            phi(j, k) = (pm.kind == PhaseMatchKind::sinc) ? sinc(u) : std::exp(-0.5 * u * u);
        }
    }
    return phi;
}

complexd jsa_inner_product(const JointSpectralAmplitude& a, const JointSpectralAmplitude& b) {
    if (!(a.grid_s == b.grid_s) || !(a.grid_i == b.grid_i))
        throw incompatible_grid_error("jsa_inner_product: amplitudes live on different grids");
    return (a.values.conjugate().cwiseProduct(b.values)).sum() * a.step_product();
}

JointSpectralAmplitude product_jsa(const SpectralAmplitude& u, const SpectralAmplitude& v) {
    JointSpectralAmplitude f{u.grid, v.grid, u.values * v.values.transpose(), false};
    const double n = f.norm();
    if (n < 1e-300) throw degenerate_error("product_jsa: factors have zero norm");
    f.values /= n;
    f.normalized = true;
    return f;
}

PdcState build_jsa(const SpectralAmplitude& pump, const PhaseMatchSpec& pm,
                   const CouplingChi& chi, const FrequencyGrid& grid_s,
                   const FrequencyGrid& grid_i) {
    const Eigen::MatrixXcd phi = evaluate_phasematching(pm, grid_s, grid_i);

    // The pump only matters where it is sampled; sums beyond its grid read as
    // zero, which silently discards amplitude when the pump has not decayed at
    // its own edges.
    const double pump_peak = pump.values.cwiseAbs().maxCoeff();
    const double pump_edge = std::max(std::abs(pump.values[0]),
                                      std::abs(pump.values[pump.grid.n_points - 1]));
    bool out_of_range = false;

    PdcState st;
    st.jsa.grid_s = grid_s;
    st.jsa.grid_i = grid_i;
    st.jsa.values.resize(grid_s.n_points, grid_i.n_points);
    for (int j = 0; j < grid_s.n_points; ++j) {
        const double ws = grid_s.point(j);
        for (int k = 0; k < grid_i.n_points; ++k) {
            const double nu = ws + grid_i.point(k);
            if (nu < pump.grid.min() || nu > pump.grid.max()) out_of_range = true;
            st.jsa.values(j, k) = interpolate(pump.grid, pump.values, nu) * phi(j, k);
        }
    }
    st.pump_truncated = out_of_range && pump_edge > 1e-8 * pump_peak;

    const double w_raw = st.jsa.values.squaredNorm() * st.jsa.step_product();
    st.weight = chi.magnitude * chi.magnitude * w_raw;
    if (st.weight < 1e-300)
        throw degenerate_error("build_jsa: pump/phasematching overlap weight underflows");

    // f = (chi / sqrt(w)) pump Phi has unit norm by construction; the coupling
    // survives only as a global phase.
    st.jsa.values *= chi.value() / std::sqrt(st.weight);
    st.jsa.normalized = true;
    return st;
}

JointSpectralAmplitude gaussian_jsa(const GaussianJsaParams& p,
                                    const FrequencyGrid& grid_a,
                                    const FrequencyGrid& grid_b) {
    if (!(p.gamma > 0.0))
        throw config_error("gaussian_jsa: gamma must be positive");
    if (!(std::abs(p.alpha) < 1.0))
        throw config_error("gaussian_jsa: |alpha| must be < 1; "
                           "the maximal-correlation limit is cw_limit_jsa");

    const double denom = p.gamma * p.gamma * (1.0 - p.alpha * p.alpha);
    JointSpectralAmplitude f{grid_a, grid_b,
                             Eigen::MatrixXcd(grid_a.n_points, grid_b.n_points), false};
    for (int j = 0; j < grid_a.n_points; ++j) {
        const double x = grid_a.point(j) - grid_a.center;
        for (int k = 0; k < grid_b.n_points; ++k) {
            const double y = grid_b.point(k) - grid_b.center;
            f.values(j, k) = std::exp(-(0.5 * x * x + 0.5 * y * y + p.alpha * x * y) / denom);
        }
    }
    const double n = f.norm();
    if (n < 1e-300) throw degenerate_error("gaussian_jsa: amplitude vanishes on the grid");
    f.values /= n;
    f.normalized = true;
    return f;
}

JointSpectralAmplitude cw_limit_jsa(double gamma_diff, const FrequencyGrid& grid_a,
                                    const FrequencyGrid& grid_b) {
    if (!(gamma_diff > 0.0))
        throw config_error("cw_limit_jsa: gamma_diff must be positive");

    const double h = 0.5 * (grid_a.step() + grid_b.step()); // sum-frequency resolution
    JointSpectralAmplitude f{grid_a, grid_b,
                             Eigen::MatrixXcd(grid_a.n_points, grid_b.n_points), false};
    for (int j = 0; j < grid_a.n_points; ++j) {
        const double x = grid_a.point(j) - grid_a.center;
        for (int k = 0; k < grid_b.n_points; ++k) {
            const double y = grid_b.point(k) - grid_b.center;
            const double nu = x + y, nup = x - y;
            f.values(j, k) = std::exp(-0.5 * nu * nu / (h * h)
                                      - 0.5 * nup * nup / (gamma_diff * gamma_diff));
        }
    }
    const double n = f.norm();
    if (n < 1e-300) throw degenerate_error("cw_limit_jsa: amplitude vanishes on the grid");
    f.values /= n;
    f.normalized = true;
    return f;
}

RotatedFrame sum_difference_frame(const JointSpectralAmplitude& f) {
    const FrequencyGrid& gs = f.grid_s;
    const FrequencyGrid& gi = f.grid_i;
    const double h = gs.step();
    if (std::abs(gs.step() - gi.step()) > 1e-9 * h)
        throw incompatible_grid_error("sum_difference_frame: grids must share one step");

    // Lattice points w_s = min_s + j h, w_i = min_i + k h map to
    // nu = (min_s + min_i) + (j + k) h, nu' = (min_s - min_i) + (j - k) h.
    // Keeping only even j + k gives a rectangular sublattice with nu' step 2h
    // and no interpolation; entries outside the diamond support are zero.
    const int ns = gs.n_points, ni = gi.n_points;
    std::vector<int> ms, ds;
    for (int m = 0; m <= ns + ni - 2; m += 2) ms.push_back(m);
    const int d_lo = -(ni - 1) + ((ni - 1) % 2);
    const int d_hi = (ns - 1) - ((ns - 1) % 2);
    for (int d = d_lo; d <= d_hi; d += 2) ds.push_back(d);

    RotatedFrame out;
    out.nu.resize(static_cast<int>(ms.size()));
    out.nu_prime.resize(static_cast<int>(ds.size()));
    out.values = Eigen::MatrixXcd::Zero(static_cast<int>(ms.size()), static_cast<int>(ds.size()));
    for (size_t r = 0; r < ms.size(); ++r) out.nu[r] = gs.min() + gi.min() + ms[r] * h;
    for (size_t c = 0; c < ds.size(); ++c) out.nu_prime[c] = gs.min() - gi.min() + ds[c] * h;
    for (size_t r = 0; r < ms.size(); ++r) {
        for (size_t c = 0; c < ds.size(); ++c) {
            const int j = (ms[r] + ds[c]) / 2, k = (ms[r] - ds[c]) / 2;
            if (j >= 0 && j < ns && k >= 0 && k < ni) out.values(r, c) = f.values(j, k);
        }
    }
    return out;
}

} // namespace biphoton
