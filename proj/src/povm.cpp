#include "biphoton/povm.hpp"

#include <cmath>

namespace biphoton {

double PovmElement::trace() const {
    double t = 0.0;
    for (double w : weights) t += w;
    return t;
}

PdcState measurement_jsa(const SpectralAmplitude& detect_mode, const PhaseMatchSpec& pm,
                         const CouplingChi& chi, const FrequencyGrid& grid_s,
                         const FrequencyGrid& grid_i) {
    // Upconversion is down-conversion read backwards: the detection mode plays
    // the pump. Delegating keeps source and retrodicted amplitudes bit-identical.
    return build_jsa(detect_mode, pm, chi, grid_s, grid_i);
}

SpectralAmplitude sfg_amplitude(const JointSpectralAmplitude& g, const PhaseMatchSpec& pm) {
    const FrequencyGrid& gs = g.grid_s;
    const FrequencyGrid& gi = g.grid_i;
    const double h = 0.5 * (gs.step() + gi.step());
    if (std::abs(gs.step() - gi.step()) > 1e-9 * h)
        throw incompatible_grid_error("sfg_amplitude: signal and idler grids must share one step");

    const Eigen::MatrixXcd phi = evaluate_phasematching(pm, gs, gi);

    // Lattice sums w_j + w_k land exactly on a step-h axis with n_s + n_i - 1
    // points. Along each sum line the difference frequency advances by 2h, so
    // sigma(nu_m) = -1/2 * (2h) * sum_{j+k=m} conj(Phi_jk) g_jk and the
    // quadrature reproduces the (w_s, w_i)-plane integral exactly: mode
    // projections of sigma match Born probabilities to rounding error.
    FrequencyGrid sum_grid = make_grid(gs.center + gi.center, gs.span + gi.span,
                                       gs.n_points + gi.n_points - 1);
    Eigen::VectorXcd sigma = Eigen::VectorXcd::Zero(sum_grid.n_points);
    for (int j = 0; j < gs.n_points; ++j)
        for (int k = 0; k < gi.n_points; ++k)
            sigma[j + k] += std::conj(phi(j, k)) * g.values(j, k);
    sigma *= -h;
    return {sum_grid, std::move(sigma)};
}

double born_probability(const JointSpectralAmplitude& g, const PovmElement& element) {
    double p = 0.0;
    for (size_t n = 0; n < element.components.size(); ++n)
        p += element.weights[n] * std::norm(jsa_inner_product(element.components[n], g));
    return p;
}

namespace {

// Flattens a two-photon amplitude to a quadrature-scaled state vector whose
// Euclidean norm equals the continuum norm; index = j * n_i + k.
Eigen::VectorXcd state_vector(const JointSpectralAmplitude& f) {
    const double scale = std::sqrt(f.step_product());
    Eigen::VectorXcd v(f.values.size());
    const int ni = static_cast<int>(f.values.cols());
    for (int j = 0; j < f.values.rows(); ++j)
        for (int k = 0; k < ni; ++k)
            v[j * ni + k] = f.values(j, k) * scale;
    return v;
}

} // namespace

double born_probability(const TwoPhotonDensity& rho, const PovmElement& element) {
    double p = 0.0;
    for (size_t n = 0; n < element.components.size(); ++n) {
        const JointSpectralAmplitude& c = element.components[n];
        if (!(c.grid_s == rho.grid_s) || !(c.grid_i == rho.grid_i))
            throw incompatible_grid_error("born_probability: element and state grids differ");
        const Eigen::VectorXcd psi = state_vector(c);
        p += element.weights[n] * (psi.adjoint() * rho.matrix * psi).real()(0, 0);
    }
    return p;
}

PovmElement projective_element(const SpectralAmplitude& detect_mode, const PhaseMatchSpec& pm,
                               const CouplingChi& chi, const FrequencyGrid& grid_s,
                               const FrequencyGrid& grid_i, std::string label) {
    PdcState st = measurement_jsa(detect_mode, pm, chi, grid_s, grid_i);
    PovmElement e;
    e.weights.push_back(st.weight);
    e.components.push_back(std::move(st.jsa));
    e.label = std::move(label);
    return e;
}

PovmElement mix_elements(const std::vector<double>& q, const std::vector<PovmElement>& elements) {
    if (q.size() != elements.size() || q.empty())
        throw config_error("mix_elements: need one probability per element");
    for (double qi : q)
        if (!(qi >= 0.0 && qi <= 1.0))
            throw config_error("mix_elements: weighting coefficients must lie in [0, 1]");

    PovmElement out;
    out.label = "mixture";
    for (size_t n = 0; n < elements.size(); ++n) {
        if (!elements[n].projective())
            throw config_error("mix_elements: constituents must be projective");
        if (!(elements[n].components[0].grid_s == elements[0].components[0].grid_s) ||
            !(elements[n].components[0].grid_i == elements[0].components[0].grid_i))
            throw incompatible_grid_error("mix_elements: constituents live on different grids");
        out.weights.push_back(q[n] * elements[n].weights[0]);
        out.components.push_back(elements[n].components[0]);
    }
    return out;
}

TwoPhotonDensity retrodicted_state(const PovmElement& element) {
    if (element.components.empty())
        throw config_error("retrodicted_state: element has no components");
    const FrequencyGrid& gs = element.components[0].grid_s;
    const FrequencyGrid& gi = element.components[0].grid_i;
    if (gs.n_points > 64 || gi.n_points > 64)
        throw resource_error("retrodicted_state: dense matrices are limited to 64 x 64 grids");

    const double tr = element.trace();
    if (tr < 1e-300)
        throw degenerate_error("retrodicted_state: element trace underflows");

    const int dim = gs.n_points * gi.n_points;
    TwoPhotonDensity rho{gs, gi, Eigen::MatrixXcd::Zero(dim, dim)};
    for (size_t n = 0; n < element.components.size(); ++n) {
        const Eigen::VectorXcd psi = state_vector(element.components[n]);
        rho.matrix.noalias() += (element.weights[n] / tr) * psi * psi.adjoint();
    }
    return rho;
}

double purity(const TwoPhotonDensity& rho) {
    // Tr(rho^2) = ||rho||_F^2 for Hermitian rho.
    return rho.matrix.squaredNorm();
}

double purity(const PovmElement& element) {
    const double tr = element.trace();
    if (tr < 1e-300)
        throw degenerate_error("purity: element trace underflows");
    const size_t n = element.components.size();
    // Tr(rho^2) = sum_{nm} p_n p_m |<Psi_n|Psi_m>|^2 with p_n = w_n / Tr.
    double out = 0.0;
    for (size_t a = 0; a < n; ++a) {
        for (size_t b = 0; b < n; ++b) {
            const double pa = element.weights[a] / tr, pb = element.weights[b] / tr;
            out += pa * pb * std::norm(jsa_inner_product(element.components[a],
                                                         element.components[b]));
        }
    }
    return out;
}

Eigen::MatrixXcd gram_matrix(const std::vector<PovmElement>& elements) {
    const int n = static_cast<int>(elements.size());
    Eigen::MatrixXcd g(n, n);
    for (int a = 0; a < n; ++a) {
        if (!elements[a].projective())
            throw config_error("gram_matrix: elements must be projective");
        for (int b = a; b < n; ++b) {
            g(a, b) = jsa_inner_product(elements[a].components[0], elements[b].components[0]);
            g(b, a) = std::conj(g(a, b));
        }
    }
    return g;
}

JointSpectralAmplitude element_apply(const PovmElement& element, const JointSpectralAmplitude& g) {
    JointSpectralAmplitude out{g.grid_s, g.grid_i,
                               Eigen::MatrixXcd::Zero(g.values.rows(), g.values.cols()), false};
    for (size_t n = 0; n < element.components.size(); ++n) {
        const complexd c = element.weights[n] * jsa_inner_product(element.components[n], g);
        out.values += c * element.components[n].values;
    }
    return out;
}

NullResult null_element(const ModeFamily& modes, const PhaseMatchSpec& pm,
                        const CouplingChi& chi, const FrequencyGrid& grid_s,
                        const FrequencyGrid& grid_i) {
    if (modes.max_order < 1)
        throw config_error("null_element: family must hold at least one mode");

    const Eigen::MatrixXcd phi = evaluate_phasematching(pm, grid_s, grid_i);
    const double peak = phi.cwiseAbs().maxCoeff();
    if (chi.magnitude * peak > 1.0)
        throw config_error("null_element: |chi| max|Phi| exceeds 1, no-click weights "
                           "would turn negative");

    NullResult res;
    res.null.grid_s = grid_s;
    res.null.grid_i = grid_i;
    res.null.diagonal = 1.0 - chi.magnitude * chi.magnitude *
                                  phi.cwiseAbs2().array();

    // Detection modes realized directly on the sum-frequency lattice, where
    // the element construction samples them without interpolation error.
    const FrequencyGrid sum_grid = make_grid(grid_s.center + grid_i.center,
                                             grid_s.span + grid_i.span,
                                             grid_s.n_points + grid_i.n_points - 1);
    std::vector<PovmElement> elements;
    elements.reserve(modes.max_order);
    for (int n = 0; n < modes.max_order; ++n)
        elements.push_back(projective_element(modes.member(n, sum_grid), pm, chi,
                                              grid_s, grid_i));

    // Probes: ground-mode pumps displaced across the central half of the grid
    // (sum frequencies within a quarter span of the center on each axis).
    const double reach = 0.25 * (grid_s.span + grid_i.span);
    const int n_probes = 9;
    const double chi2 = chi.magnitude * chi.magnitude;
    res.completeness_defect = 0.0;
    for (int p = 0; p < n_probes; ++p) {
        const double d = sum_grid.center + reach * (2.0 * p / (n_probes - 1) - 1.0);
        const SpectralAmplitude probe_pump = hermite_gauss(0, d, modes.width, sum_grid);
        const JointSpectralAmplitude probe =
            build_jsa(probe_pump, pm, chi, grid_s, grid_i).jsa;
        const SpectralAmplitude sigma = sfg_amplitude(probe, pm);
        const double limit = chi2 * sigma.norm() * sigma.norm();

        double captured = 0.0;
        for (const PovmElement& e : elements) captured += born_probability(probe, e);
        const double defect = (limit < 1e-300) ? 1.0 : 1.0 - captured / limit;
        res.probe_centers.push_back(d);
        res.probe_defects.push_back(defect);
        res.completeness_defect = std::max(res.completeness_defect, defect);
    }
    return res;
}

} // namespace biphoton
