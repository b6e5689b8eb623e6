#include "biphoton/grid.hpp"

#include <cmath>

namespace biphoton {

FrequencyGrid make_grid(double center, double span, int n_points) {
    if (!(span > 0.0) || !std::isfinite(span) || !std::isfinite(center))
        throw config_error("make_grid: span must be positive and finite");
    if (n_points < 2)
        throw config_error("make_grid: need at least 2 points");
    return FrequencyGrid{center, span, n_points};
}

FrequencyGrid default_grid(double gamma_max) {
    if (!(gamma_max > 0.0))
        throw config_error("default_grid: width scale must be positive");
    return make_grid(0.0, 16.0 * gamma_max, 256);
}

double SpectralAmplitude::norm() const {
    return std::sqrt(values.squaredNorm() * grid.step());
}

complexd inner_product(const SpectralAmplitude& a, const SpectralAmplitude& b) {
    if (!(a.grid == b.grid))
        throw incompatible_grid_error("inner_product: amplitudes live on different grids");
    return (a.values.conjugate().cwiseProduct(b.values)).sum() * a.grid.step();
}

complexd interpolate(const FrequencyGrid& grid, const Eigen::VectorXcd& values, double omega) {
    const double t = (omega - grid.min()) / grid.step();
    if (t < 0.0 || t > grid.n_points - 1) return {0.0, 0.0};
    const int k = std::min(static_cast<int>(t), grid.n_points - 2);
    const double frac = t - k;
    return values[k] * (1.0 - frac) + values[k + 1] * frac;
}

SpectralAmplitude resample(const SpectralAmplitude& a, const FrequencyGrid& target) {
    Eigen::VectorXcd out(target.n_points);
    for (int k = 0; k < target.n_points; ++k)
        out[k] = interpolate(a.grid, a.values, target.point(k));
    return {target, std::move(out)};
}

SpectralAmplitude hermite_gauss(int order, double center, double width,
                                const FrequencyGrid& grid, bool* truncated) {
    if (order < 0) throw config_error("hermite_gauss: order must be >= 0");
    if (!(width > 0.0)) throw config_error("hermite_gauss: width must be positive");

    const int n = grid.n_points;
    Eigen::VectorXd h(n);
    // Normalized recurrence psi_n = sqrt(2/n) x psi_{n-1} - sqrt((n-1)/n) psi_{n-2};
    // the continuum norm of psi_order/sqrt(width) is exactly 1, so the factor
    // 2^n n! sqrt(pi) never appears and order ~10^2 stays in range.
    for (int k = 0; k < n; ++k) {
        const double x = (grid.point(k) - center) / width;
        double pm2 = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
        double pm1 = std::sqrt(2.0) * x * pm2;
        double p = (order == 0) ? pm2 : pm1;
        for (int m = 2; m <= order; ++m) {
            p = std::sqrt(2.0 / m) * x * pm1 - std::sqrt((m - 1.0) / m) * pm2;
            pm2 = pm1;
            pm1 = p;
        }
        h[k] = p / std::sqrt(width);
    }

    const double raw_norm = std::sqrt(h.squaredNorm() * grid.step());
    if (truncated) *truncated = std::abs(raw_norm - 1.0) > 0.01;
    if (raw_norm < 1e-300)
        throw degenerate_error("hermite_gauss: mode has no support on the grid");

    SpectralAmplitude out{grid, (h / raw_norm).cast<complexd>()};
    return out;
}

namespace {

SpectralAmplitude monochromatic_bin(int n, double center, double width, int count,
                                    const FrequencyGrid& grid, bool* truncated) {
    // Bin j covers [c_j - width/2, c_j + width/2) with c_j spread symmetrically
    // around the family center; half-open intervals keep members disjoint, so
    // the family is exactly orthogonal on any grid.
    const double c = center + (n - 0.5 * (count - 1)) * width;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(grid.n_points);
    int hits = 0;
    for (int k = 0; k < grid.n_points; ++k) {
        const double w = grid.point(k);
        if (w >= c - 0.5 * width && w < c + 0.5 * width) {
            v[k] = 1.0;
            ++hits;
        }
    }
    if (hits == 0)
        throw degenerate_error("monochromatic_bins: bin falls between grid points or off the grid");
    // A bin clipped by the grid edge holds fewer samples than an interior one.
    if (truncated) *truncated = (c - 0.5 * width < grid.min() || c + 0.5 * width > grid.max());
    const double norm = std::sqrt(static_cast<double>(hits) * grid.step());
    return {grid, v / norm};
}

} // namespace

SpectralAmplitude ModeFamily::member(int n, const FrequencyGrid& grid, bool* truncated) const {
    if (n < 0 || n >= max_order)
        throw config_error("ModeFamily: member index out of range");
    switch (kind) {
    case ModeKind::hermite_gauss:
        return hermite_gauss(n, center, width, grid, truncated);
    case ModeKind::monochromatic_bins:
        return monochromatic_bin(n, center, width, max_order, grid, truncated);
    }
    throw config_error("ModeFamily: unknown kind");
}

std::vector<SpectralAmplitude> ModeFamily::members(const FrequencyGrid& grid) const {
    std::vector<SpectralAmplitude> out;
    out.reserve(max_order);
    for (int n = 0; n < max_order; ++n) out.push_back(member(n, grid));
    return out;
}

} // namespace biphoton
