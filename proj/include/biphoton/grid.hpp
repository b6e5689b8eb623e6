#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "biphoton/errors.hpp"

namespace biphoton {

using complexd = std::complex<double>;

// Uniform 1D frequency axis. Frequencies are detunings from a common carrier,
// in units of an arbitrary reference bandwidth; all physics downstream is
// expressed on such axes, so the unit never appears explicitly.
struct FrequencyGrid {
    double center = 0.0;
    double span = 0.0;
    int n_points = 0;

    double step() const { return span / (n_points - 1); }
    double min() const { return center - 0.5 * span; }
    double max() const { return center + 0.5 * span; }
    double point(int k) const { return min() + k * step(); }

    Eigen::VectorXd points() const {
        Eigen::VectorXd p(n_points);
        for (int k = 0; k < n_points; ++k) p[k] = point(k);
        return p;
    }

    bool operator==(const FrequencyGrid& o) const {
        return center == o.center && span == o.span && n_points == o.n_points;
    }
};

// n_points >= 2, span > 0; throws config_error otherwise.
FrequencyGrid make_grid(double center, double span, int n_points);

// Library-wide default axis: 16 units of the largest width scale in the
// problem, 256 samples, centered on the carrier.
FrequencyGrid default_grid(double gamma_max = 1.0);

// Complex amplitude sampled on a FrequencyGrid. Values are continuum
// amplitudes (no quadrature weight baked in); inner products apply the step.
struct SpectralAmplitude {
    FrequencyGrid grid;
    Eigen::VectorXcd values;

    // Quadrature L2 norm, sqrt(sum |v_k|^2 * step).
    double norm() const;
};

// Riemann-sum inner product <a|b> = sum conj(a_k) b_k * step.
// Throws incompatible_grid_error unless both amplitudes share the same grid.
complexd inner_product(const SpectralAmplitude& a, const SpectralAmplitude& b);

// Linear interpolation of `a` onto `target`; zero outside a's grid.
SpectralAmplitude resample(const SpectralAmplitude& a, const FrequencyGrid& target);

// Linear interpolation of a sampled amplitude at a single frequency (zero
// outside the grid). Shared by JSA construction and the SFG detection path so
// that both probability routes see bit-identical pump/mode values.
complexd interpolate(const FrequencyGrid& grid, const Eigen::VectorXcd& values, double omega);

// Order-n Hermite-Gauss function H_n((w-center)/width) exp(-(w-center)^2/(2 width^2)),
// normalized to unit quadrature norm on the grid. Uses the normalized three-term
// recurrence, so high orders neither overflow nor underflow.
// If `truncated` is non-null it is set when the grid clips the mode: the
// pre-normalization quadrature norm deviates from the analytic norm by > 1%.
SpectralAmplitude hermite_gauss(int order, double center, double width,
                                const FrequencyGrid& grid, bool* truncated = nullptr);

enum class ModeKind {
    hermite_gauss,      // orthonormal pulse modes of a common center/width
    monochromatic_bins, // disjoint top-hat bins, the spectrometer-pixel limit
};

// Finite family of detection modes; member(n) realizes the n-th mode on a grid.
struct ModeFamily {
    ModeKind kind = ModeKind::hermite_gauss;
    double center = 0.0;
    double width = 1.0;
    int max_order = 1; // family size; members are indexed 0 .. max_order-1

    SpectralAmplitude member(int n, const FrequencyGrid& grid, bool* truncated = nullptr) const;
    std::vector<SpectralAmplitude> members(const FrequencyGrid& grid) const;
};

} // namespace biphoton
