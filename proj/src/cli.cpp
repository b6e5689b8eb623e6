#include "biphoton/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "biphoton/entanglement.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/grid.hpp"
#include "biphoton/jsa.hpp"
#include "biphoton/povm.hpp"
#include "biphoton/teleport.hpp"

namespace biphoton::cli {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Configuration access with path-qualified error messages.

std::string at(const std::string& where, const std::string& key) {
    return where.empty() ? key : where + "." + key;
}

void require_object(const json& j, const std::string& where) {
    if (!j.is_object())
        throw config_error("expected an object at '" + (where.empty() ? "<root>" : where) + "'");
}

void require_keys(const json& j, const std::string& where,
                  std::initializer_list<const char*> allowed) {
    require_object(j, where);
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) { known = true; break; }
        if (!known)
            throw config_error("unknown key '" + at(where, item.key()) + "'");
    }
}

double get_number(const json& j, const std::string& where) {
    if (!j.is_number())
        throw config_error("expected a number at '" + where + "'");
    return j.get<double>();
}

double opt_number(const json& j, const char* key, double fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    return get_number(j.at(key), at(where, key));
}

int opt_integer(const json& j, const char* key, int fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer())
        throw config_error("expected an integer at '" + at(where, key) + "'");
    return v.get<int>();
}

bool opt_boolean(const json& j, const char* key, bool fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_boolean())
        throw config_error("expected a boolean at '" + at(where, key) + "'");
    return v.get<bool>();
}

std::string opt_string(const json& j, const char* key, const std::string& fallback,
                       const std::string& where) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_string())
        throw config_error("expected a string at '" + at(where, key) + "'");
    return v.get<std::string>();
}

std::string need_string(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key))
        throw config_error("missing required key '" + at(where, key) + "'");
    return opt_string(j, key, {}, where);
}

// Bandwidths may be the string "inf" for the infinite-bandwidth regimes.
double opt_bandwidth(const json& j, const char* key, double fallback, const std::string& where,
                     bool allow_infinite) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    const std::string path = at(where, key);
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (allow_infinite && (s == "inf" || s == "infinity"))
            return std::numeric_limits<double>::infinity();
        throw config_error("expected a positive number" +
                           std::string(allow_infinite ? " or \"inf\"" : "") + " at '" + path + "'");
    }
    const double x = get_number(v, path);
    if (!(x > 0.0))
        throw config_error("expected a positive value at '" + path + "'");
    return x;
}

// ---------------------------------------------------------------------------
// Section parsers.

FrequencyGrid parse_grid(const json& j, const std::string& where) {
    require_keys(j, where, {"center", "span", "n_points"});
    const double center = opt_number(j, "center", 0.0, where);
    const double span = opt_number(j, "span", 16.0, where);
    const int n_points = opt_integer(j, "n_points", 256, where);
    if (n_points > 4096)
        throw resource_error("grid '" + where + "' exceeds 4096 points");
    return make_grid(center, span, n_points); // validates span/n_points
}

CouplingChi parse_chi(const json& j, const std::string& where) {
    require_keys(j, where, {"magnitude", "phase"});
    return CouplingChi(opt_number(j, "magnitude", 0.1, where),
                       opt_number(j, "phase", 0.0, where));
}

ModeFamily parse_modes(const json& j, const std::string& where) {
    require_keys(j, where, {"kind", "center", "width", "count"});
    ModeFamily family;
    const std::string kind = opt_string(j, "kind", "hermite_gauss", where);
    if (kind == "hermite_gauss")
        family.kind = ModeKind::hermite_gauss;
    else if (kind == "monochromatic_bins")
        family.kind = ModeKind::monochromatic_bins;
    else
        throw config_error("unknown mode kind '" + kind + "' at '" + at(where, "kind") + "'");
    family.center = opt_number(j, "center", 0.0, where);
    family.width = opt_bandwidth(j, "width", 1.0, where, false);
    family.max_order = opt_integer(j, "count", 6, where);
    if (family.max_order < 1 || family.max_order > 4096)
        throw config_error("'" + at(where, "count") + "' must be in [1, 4096]");
    return family;
}

PhaseMatchSpec parse_phasematching(const json& j, const std::string& where) {
    require_keys(j, where, {"kind", "angle_deg", "bandwidth", "profile"});
    const std::string kind = opt_string(j, "kind", "sinc", where);
    const double theta = opt_number(j, "angle_deg", 45.0, where) * M_PI / 180.0;
    const double bandwidth = opt_bandwidth(j, "bandwidth", 1.0, where, false);
    if (kind == "nu_prime_only") {
        if (!j.contains("profile"))
            throw config_error("'" + at(where, "profile") + "' is required for nu_prime_only");
        const json& p = j.at("profile");
        const std::string pw = at(where, "profile");
        require_keys(p, pw, {"order", "center", "width", "span", "n_points"});
        const int order = opt_integer(p, "order", 0, pw);
        const double center = opt_number(p, "center", 0.0, pw);
        const double width = opt_bandwidth(p, "width", 1.0, pw, false);
        const double span = opt_number(p, "span", 16.0 * width, pw);
        const int n_points = opt_integer(p, "n_points", 257, pw);
        if (order < 0)
            throw config_error("'" + at(pw, "order") + "' must be >= 0");
        return PhaseMatchSpec::difference_profile(
            hermite_gauss(order, center, width, make_grid(center, span, n_points)));
    }
    if (j.contains("profile"))
        throw config_error("'" + at(where, "profile") + "' is only valid for kind nu_prime_only");
    if (kind == "sinc") return PhaseMatchSpec::sinc_ridge(theta, bandwidth);
    if (kind == "gaussian") return PhaseMatchSpec::gaussian_ridge(theta, bandwidth);
    throw config_error("unknown phasematching kind '" + kind + "' at '" + at(where, "kind") + "'");
}

FrequencyGrid sum_frequency_grid(const FrequencyGrid& gs, const FrequencyGrid& gi) {
    return make_grid(gs.center + gi.center, gs.span + gi.span, gs.n_points + gi.n_points - 1);
}

struct SourceResult {
    JointSpectralAmplitude jsa;
    bool is_pdc = false;
    double weight = 0.0;
    bool pump_truncated = false;
    bool perturbative_warning = false;
};

SourceResult parse_source(const json& j, const std::string& where, const FrequencyGrid& grid_s,
                          const FrequencyGrid& grid_i) {
    require_object(j, where);
    const std::string type = need_string(j, "type", where);
    SourceResult out;
    if (type == "pdc") {
        require_keys(j, where, {"type", "pump", "phasematching", "chi"});
        const json pump_cfg = j.contains("pump") ? j.at("pump") : json::object();
        const std::string pw = at(where, "pump");
        require_keys(pump_cfg, pw, {"order", "center", "width"});
        const int order = opt_integer(pump_cfg, "order", 0, pw);
        const double center =
            opt_number(pump_cfg, "center", grid_s.center + grid_i.center, pw);
        const double width = opt_bandwidth(pump_cfg, "width", 1.0, pw, false);
        if (order < 0) throw config_error("'" + at(pw, "order") + "' must be >= 0");
        const PhaseMatchSpec pm =
            j.contains("phasematching")
                ? parse_phasematching(j.at("phasematching"), at(where, "phasematching"))
                : PhaseMatchSpec::sinc_ridge(M_PI / 4, 1.0);
        const CouplingChi chi =
            j.contains("chi") ? parse_chi(j.at("chi"), at(where, "chi")) : CouplingChi();
        const SpectralAmplitude pump =
            hermite_gauss(order, center, width, sum_frequency_grid(grid_s, grid_i));
        PdcState state = build_jsa(pump, pm, chi, grid_s, grid_i);
        out.jsa = std::move(state.jsa);
        out.is_pdc = true;
        out.weight = state.weight;
        out.pump_truncated = state.pump_truncated;
        out.perturbative_warning = chi.perturbative_warning();
        return out;
    }
    if (type == "gaussian") {
        require_keys(j, where, {"type", "gamma", "alpha"});
        GaussianJsaParams p;
        p.gamma = opt_bandwidth(j, "gamma", 1.0, where, false);
        p.alpha = opt_number(j, "alpha", 0.0, where);
        out.jsa = gaussian_jsa(p, grid_s, grid_i); // validates |alpha| < 1
        return out;
    }
    if (type == "cw_limit") {
        require_keys(j, where, {"type", "gamma_diff"});
        out.jsa = cw_limit_jsa(opt_bandwidth(j, "gamma_diff", 1.0, where, false), grid_s, grid_i);
        return out;
    }
    throw config_error("unknown source type '" + type + "' at '" + at(where, "type") + "'");
}

json to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
    return out;
}

json to_json(const std::vector<double>& v) { return json(v); }

json to_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(row);
    }
    return out;
}

json document_skeleton(const RunConfig& cfg) {
    json doc;
    doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    doc["command"] = cfg.command;
    doc["inputs"] = cfg.config;
    doc["results"] = json::object();
    return doc;
}

// ---------------------------------------------------------------------------
// Subcommands.

RunReport cmd_jsa(const RunConfig& cfg) {
    const json& c = cfg.config;
    require_keys(c, "", {"grid", "source"});
    const FrequencyGrid grid =
        parse_grid(c.contains("grid") ? c.at("grid") : json::object(), "grid");
    if (!c.contains("source")) throw config_error("missing required key 'source'");
    SourceResult src = parse_source(c.at("source"), "source", grid, grid);

    SchmidtData schmidt = schmidt_decompose(src.jsa);
    json lambda = json::array();
    for (std::size_t k = 0; k < schmidt.lambda.size() && k < 8; ++k)
        lambda.push_back(schmidt.lambda[k]);

    RunReport rep;
    rep.document = document_skeleton(cfg);
    rep.document["diagnostics"] = {{"grid_step", grid.step()},
                                   {"grid_n_points", grid.n_points},
                                   {"grid_span", grid.span}};
    json& res = rep.document["results"];
    res["norm"] = src.jsa.norm();
    res["schmidt_number"] = schmidt.schmidt_number;
    res["schmidt_lambda_leading"] = lambda;
    if (src.is_pdc) {
        res["weight"] = src.weight;
        res["pump_truncated"] = src.pump_truncated;
        res["perturbative_warning"] = src.perturbative_warning;
    }

    rep.payload.kind = Payload::Kind::complex_matrix;
    rep.payload.row_name = "omega_s";
    rep.payload.col_name = "omega_i";
    rep.payload.rows = src.jsa.grid_s.points();
    rep.payload.cols = src.jsa.grid_i.points();
    rep.payload.matrix = src.jsa.values;
    return rep;
}

RunReport cmd_povm(const RunConfig& cfg) {
    const json& c = cfg.config;
    require_keys(c, "",
                 {"grid", "phasematching", "chi", "modes", "mix_q", "n_max_sweep",
                  "report_negativity"});
    const FrequencyGrid grid =
        parse_grid(c.contains("grid") ? c.at("grid") : json::object(), "grid");
    const PhaseMatchSpec pm =
        c.contains("phasematching")
            ? parse_phasematching(c.at("phasematching"), "phasematching")
            : PhaseMatchSpec::sinc_ridge(M_PI / 4, 1.0);
    const CouplingChi chi = c.contains("chi") ? parse_chi(c.at("chi"), "chi") : CouplingChi();
    const ModeFamily modes =
        parse_modes(c.contains("modes") ? c.at("modes") : json::object(), "modes");

    const FrequencyGrid sum_grid = sum_frequency_grid(grid, grid);
    std::vector<PovmElement> elements;
    elements.reserve(modes.max_order);
    int truncated_modes = 0;
    for (int n = 0; n < modes.max_order; ++n) {
        bool truncated = false;
        SpectralAmplitude mode = modes.member(n, sum_grid, &truncated);
        truncated_modes += truncated ? 1 : 0;
        elements.push_back(
            projective_element(mode, pm, chi, grid, grid, "mode" + std::to_string(n)));
    }

    const Eigen::MatrixXcd gram = gram_matrix(elements);
    double gram_max_offdiag = 0.0;
    double gram_max_diag_error = 0.0;
    for (Eigen::Index r = 0; r < gram.rows(); ++r) {
        gram_max_diag_error = std::max(gram_max_diag_error, std::abs(gram(r, r) - 1.0));
        for (Eigen::Index q = 0; q < gram.cols(); ++q)
            if (r != q) gram_max_offdiag = std::max(gram_max_offdiag, std::abs(gram(r, q)));
    }

    std::vector<double> weights(elements.size()), purities(elements.size());
    for (std::size_t n = 0; n < elements.size(); ++n) {
        weights[n] = elements[n].trace();
        purities[n] = purity(elements[n]);
    }

    RunReport rep;
    rep.document = document_skeleton(cfg);
    rep.document["diagnostics"] = {{"grid_step", grid.step()},
                                   {"grid_n_points", grid.n_points},
                                   {"sum_grid_n_points", sum_grid.n_points},
                                   {"sum_grid_span", sum_grid.span},
                                   {"n_modes", modes.max_order}};
    json& res = rep.document["results"];
    res["weights"] = to_json(weights);
    res["purity_elements"] = to_json(purities);
    res["gram_re"] = to_json(Eigen::MatrixXd(gram.real()));
    res["gram_im"] = to_json(Eigen::MatrixXd(gram.imag()));
    res["gram_max_offdiag"] = gram_max_offdiag;
    res["gram_max_diag_error"] = gram_max_diag_error;
    res["truncated_modes"] = truncated_modes;
    res["perturbative_warning"] = chi.perturbative_warning();

    std::optional<PovmElement> mixed;
    if (c.contains("mix_q")) {
        const json& q = c.at("mix_q");
        if (!q.is_array()) throw config_error("'mix_q' must be an array of numbers");
        std::vector<double> qv;
        for (std::size_t k = 0; k < q.size(); ++k)
            qv.push_back(get_number(q.at(k), "mix_q[" + std::to_string(k) + "]"));
        mixed = mix_elements(qv, elements);
        res["purity_mixture"] = purity(*mixed);
        res["weight_mixture"] = mixed->trace();
    }

    NullResult null = null_element(modes, pm, chi, grid, grid);
    res["completeness_defect"] = null.completeness_defect;
    res["probe_centers"] = to_json(null.probe_centers);
    res["probe_defects"] = to_json(null.probe_defects);
    res["null_diagonal_min"] = null.null.diagonal.minCoeff();

    if (c.contains("n_max_sweep")) {
        const json& sweep = c.at("n_max_sweep");
        if (!sweep.is_array()) throw config_error("'n_max_sweep' must be an array of integers");
        json ns = json::array(), defects = json::array();
        for (std::size_t k = 0; k < sweep.size(); ++k) {
            const json& v = sweep.at(k);
            if (!v.is_number_integer() || v.get<int>() < 1)
                throw config_error("'n_max_sweep' entries must be positive integers");
            ModeFamily family = modes;
            family.max_order = v.get<int>();
            ns.push_back(family.max_order);
            defects.push_back(null_element(family, pm, chi, grid, grid).completeness_defect);
        }
        res["sweep_n_modes"] = ns;
        res["sweep_defect"] = defects;
    }

    if (opt_boolean(c, "report_negativity", false, "")) {
        const PovmElement& target = mixed ? *mixed : elements.front();
        TwoPhotonDensity rho = retrodicted_state(target); // resource-limited
        res["negativity"] = negativity(rho);
        res["retrodicted_purity"] = purity(rho);
    }

    rep.payload.kind = Payload::Kind::surface;
    rep.payload.row_name = "omega_s";
    rep.payload.col_name = "omega_i";
    rep.payload.rows = grid.points();
    rep.payload.cols = grid.points();
    rep.payload.surface = null.null.diagonal;
    return rep;
}

SweepRegime parse_regime(const std::string& s, const std::string& where) {
    if (s == "ideal_measurement") return SweepRegime::ideal_measurement;
    if (s == "ideal_state") return SweepRegime::ideal_state;
    if (s == "equal_bandwidths") return SweepRegime::equal_bandwidths;
    throw config_error("unknown regime '" + s + "' at '" + where + "'");
}

RunReport cmd_teleport(const RunConfig& cfg) {
    const json& c = cfg.config;
    require_keys(c, "", {"mode", "scenario", "n_points", "sweep"});
    const std::string mode = need_string(c, "mode", "");

    RunReport rep;
    rep.document = document_skeleton(cfg);
    json& res = rep.document["results"];

    if (mode == "check") {
        if (!c.contains("scenario"))
            throw config_error("mode \"check\" requires a 'scenario' section");
        const json& s = c.at("scenario");
        require_keys(s, "scenario", {"alpha", "beta", "gamma_s", "gamma_m", "gamma_c"});
        TeleportScenario sc;
        sc.alpha = opt_number(s, "alpha", 0.0, "scenario");
        sc.beta = opt_number(s, "beta", 0.0, "scenario");
        sc.gamma_s = opt_bandwidth(s, "gamma_s", 1.0, "scenario", true);
        sc.gamma_m = opt_bandwidth(s, "gamma_m", 1.0, "scenario", true);
        sc.gamma_c = opt_bandwidth(s, "gamma_c", 1.0, "scenario", false);
        const int n_points = opt_integer(c, "n_points", 256, "");
        if (n_points < 16 || n_points > 2048)
            throw config_error("'n_points' must be in [16, 2048]");

        RegimeCheck check = numeric_closed_form_check(sc, n_points);
        rep.document["diagnostics"] = {{"grid_n_points", n_points},
                                       {"sentinel_width", check.sentinel_width}};
        res["fidelity_numeric"] = check.numeric;
        res["fidelity_closed_form"] = check.closed_form;
        res["discrepancy"] = check.discrepancy;
        res["sentinel_width"] = check.sentinel_width;

        rep.payload.kind = Payload::Kind::scalars;
        rep.payload.scalars = {{"fidelity_numeric", check.numeric},
                               {"fidelity_closed_form", check.closed_form},
                               {"discrepancy", check.discrepancy}};
        return rep;
    }

    if (mode == "sweep") {
        const json s = c.contains("sweep") ? c.at("sweep") : json::object();
        require_keys(s, "sweep",
                     {"regime", "corr_min", "corr_max", "sigma_min", "sigma_max", "n_corr",
                      "n_sigma", "fixed_correlation", "vary_beta"});
        SweepSpec spec;
        spec.regime = parse_regime(opt_string(s, "regime", "ideal_measurement", "sweep"),
                                   "sweep.regime");
        spec.corr_min = opt_number(s, "corr_min", 0.0, "sweep");
        spec.corr_max = opt_number(s, "corr_max", 1.0, "sweep");
        spec.sigma_min = opt_number(s, "sigma_min", 0.1, "sweep");
        spec.sigma_max = opt_number(s, "sigma_max", 1.5, "sweep");
        spec.n_corr = opt_integer(s, "n_corr", 64, "sweep");
        spec.n_sigma = opt_integer(s, "n_sigma", 64, "sweep");
        spec.fixed_correlation = opt_number(s, "fixed_correlation", 1.0, "sweep");
        spec.vary_beta = opt_boolean(s, "vary_beta", false, "sweep");
        if (spec.n_corr < 1 || spec.n_corr > 2048 || spec.n_sigma < 1 || spec.n_sigma > 2048)
            throw config_error("'sweep.n_corr' and 'sweep.n_sigma' must be in [1, 2048]");

        SweepResult sweep = fidelity_sweep(spec);
        rep.document["diagnostics"] = {{"n_corr", spec.n_corr}, {"n_sigma", spec.n_sigma}};
        Eigen::Index rmax = 0, cmax = 0;
        const double fmax = sweep.fidelity.maxCoeff(&rmax, &cmax);
        res["fidelity_max"] = fmax;
        res["fidelity_max_correlation"] = sweep.correlation[rmax];
        res["fidelity_max_sigma"] = sweep.sigma[cmax];
        res["fidelity_mean"] = sweep.fidelity.mean();

        rep.payload.kind = Payload::Kind::surface;
        rep.payload.row_name = "correlation";
        rep.payload.col_name = "sigma";
        rep.payload.rows = sweep.correlation;
        rep.payload.cols = sweep.sigma;
        rep.payload.surface = sweep.fidelity;
        return rep;
    }

    throw config_error("unknown mode '" + mode + "'; expected \"check\" or \"sweep\"");
}

RunReport cmd_sfg(const RunConfig& cfg) {
    const json& c = cfg.config;
    require_keys(c, "", {"grid", "input", "phasematching", "chi", "modes"});
    const FrequencyGrid grid =
        parse_grid(c.contains("grid") ? c.at("grid") : json::object(), "grid");
    if (!c.contains("input")) throw config_error("missing required key 'input'");
    SourceResult src = parse_source(c.at("input"), "input", grid, grid);
    const PhaseMatchSpec pm =
        c.contains("phasematching")
            ? parse_phasematching(c.at("phasematching"), "phasematching")
            : PhaseMatchSpec::sinc_ridge(M_PI / 4, 1.0);
    const CouplingChi chi = c.contains("chi") ? parse_chi(c.at("chi"), "chi") : CouplingChi();
    const ModeFamily modes =
        parse_modes(c.contains("modes") ? c.at("modes") : json::object(), "modes");

    const SpectralAmplitude sigma = sfg_amplitude(src.jsa, pm);
    const double chi2 = chi.magnitude * chi.magnitude;

    std::vector<double> p_sfg(modes.max_order), p_born(modes.max_order),
        residual(modes.max_order);
    double max_residual = 0.0;
    for (int n = 0; n < modes.max_order; ++n) {
        SpectralAmplitude mode = modes.member(n, sigma.grid);
        p_sfg[n] = chi2 * std::norm(inner_product(mode, sigma));
        PovmElement element =
            projective_element(mode, pm, chi, grid, grid, "mode" + std::to_string(n));
        p_born[n] = born_probability(src.jsa, element);
        residual[n] = std::abs(p_sfg[n] - p_born[n]) / std::max(p_born[n], 1e-300);
        max_residual = std::max(max_residual, residual[n]);
    }

    RunReport rep;
    rep.document = document_skeleton(cfg);
    rep.document["diagnostics"] = {{"grid_step", grid.step()},
                                   {"grid_n_points", grid.n_points},
                                   {"sum_grid_n_points", sigma.grid.n_points},
                                   {"n_modes", modes.max_order}};
    json& res = rep.document["results"];
    res["sigma_norm"] = sigma.norm();
    res["capture_limit"] = chi2 * sigma.norm() * sigma.norm();
    res["p_sfg"] = to_json(p_sfg);
    res["p_born"] = to_json(p_born);
    res["relative_residual"] = to_json(residual);
    res["max_relative_residual"] = max_residual;
    res["perturbative_warning"] = chi.perturbative_warning();

    rep.payload.kind = Payload::Kind::columns;
    rep.payload.columns = {
        {"nu", sigma.grid.points()},
        {"re", Eigen::VectorXd(sigma.values.real())},
        {"im", Eigen::VectorXd(sigma.values.imag())},
    };
    return rep;
}

// ---------------------------------------------------------------------------
// Serialization.

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json payload_to_json(const Payload& p) {
    json out;
    switch (p.kind) {
    case Payload::Kind::none:
        break;
    case Payload::Kind::surface:
        out["kind"] = "surface";
        out["row_name"] = p.row_name;
        out["col_name"] = p.col_name;
        out["rows"] = to_json(p.rows);
        out["cols"] = to_json(p.cols);
        out["values"] = to_json(p.surface);
        break;
    case Payload::Kind::complex_matrix:
        out["kind"] = "complex_matrix";
        out["row_name"] = p.row_name;
        out["col_name"] = p.col_name;
        out["rows"] = to_json(p.rows);
        out["cols"] = to_json(p.cols);
        out["re"] = to_json(Eigen::MatrixXd(p.matrix.real()));
        out["im"] = to_json(Eigen::MatrixXd(p.matrix.imag()));
        break;
    case Payload::Kind::columns: {
        out["kind"] = "columns";
        json cols = json::array();
        for (const auto& [name, values] : p.columns)
            cols.push_back({{"name", name}, {"values", to_json(values)}});
        out["columns"] = cols;
        break;
    }
    case Payload::Kind::scalars: {
        out["kind"] = "scalars";
        json vals;
        for (const auto& [name, value] : p.scalars) vals[name] = value;
        out["values"] = vals;
        break;
    }
    }
    return out;
}

std::string payload_to_csv(const Payload& p) {
    std::ostringstream os;
    switch (p.kind) {
    case Payload::Kind::none:
        break;
    case Payload::Kind::surface: {
        os << p.row_name << '\\' << p.col_name;
        for (Eigen::Index c = 0; c < p.cols.size(); ++c) os << ',' << fmt_g(p.cols[c]);
        os << '\n';
        for (Eigen::Index r = 0; r < p.rows.size(); ++r) {
            os << fmt_g(p.rows[r]);
            for (Eigen::Index c = 0; c < p.cols.size(); ++c) os << ',' << fmt_g(p.surface(r, c));
            os << '\n';
        }
        break;
    }
    case Payload::Kind::complex_matrix: {
        os << p.row_name << ',' << p.col_name << ",re,im\n";
        for (Eigen::Index r = 0; r < p.rows.size(); ++r)
            for (Eigen::Index c = 0; c < p.cols.size(); ++c)
                os << fmt_g(p.rows[r]) << ',' << fmt_g(p.cols[c]) << ','
                   << fmt_g(p.matrix(r, c).real()) << ',' << fmt_g(p.matrix(r, c).imag())
                   << '\n';
        break;
    }
    case Payload::Kind::columns: {
        for (std::size_t k = 0; k < p.columns.size(); ++k)
            os << (k ? "," : "") << p.columns[k].first;
        os << '\n';
        const Eigen::Index n = p.columns.empty() ? 0 : p.columns.front().second.size();
        for (Eigen::Index r = 0; r < n; ++r) {
            for (std::size_t k = 0; k < p.columns.size(); ++k)
                os << (k ? "," : "") << fmt_g(p.columns[k].second[r]);
            os << '\n';
        }
        break;
    }
    case Payload::Kind::scalars: {
        os << "name,value\n";
        for (const auto& [name, value] : p.scalars) os << name << ',' << fmt_g(value) << '\n';
        break;
    }
    }
    return os.str();
}

void apply_overrides(json& config, const std::vector<std::string>& sets) {
    for (const std::string& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw config_error("--set expects dotted.path=value, got '" + kv + "'");
        const std::string path = kv.substr(0, eq);
        const std::string raw = kv.substr(eq + 1);
        json value = json::parse(raw, nullptr, /*allow_exceptions=*/false);
        if (value.is_discarded()) value = raw; // bare words become strings

        json* node = &config;
        std::size_t start = 0;
        std::vector<std::string> segments;
        while (true) {
            const auto dot = path.find('.', start);
            segments.push_back(path.substr(start, dot - start));
            if (dot == std::string::npos) break;
            start = dot + 1;
        }
        for (std::size_t k = 0; k + 1 < segments.size(); ++k) {
            if (segments[k].empty())
                throw config_error("--set path has an empty segment: '" + path + "'");
            json& next = (*node)[segments[k]];
            if (!next.is_object() && !next.is_null())
                throw config_error("--set path '" + path + "' descends into a non-object");
            if (next.is_null()) next = json::object();
            node = &next;
        }
        if (segments.back().empty())
            throw config_error("--set path has an empty segment: '" + path + "'");
        (*node)[segments.back()] = value;
    }
}

} // namespace

RunReport run_command(const RunConfig& cfg) {
    require_object(cfg.config, "");
    if (cfg.command == "jsa") return cmd_jsa(cfg);
    if (cfg.command == "povm") return cmd_povm(cfg);
    if (cfg.command == "teleport") return cmd_teleport(cfg);
    if (cfg.command == "sfg") return cmd_sfg(cfg);
    throw config_error("unknown command '" + cfg.command + "'");
}

void write_output(const RunConfig& cfg, const RunReport& report) {
    std::string body;
    if (cfg.format == "json") {
        json doc = report.document;
        doc["payload"] = payload_to_json(report.payload);
        body = doc.dump(2);
        body += '\n';
    } else if (cfg.format == "csv") {
        body = payload_to_csv(report.payload);
    } else {
        throw config_error("unknown format '" + cfg.format + "'; expected json or csv");
    }

    namespace fs = std::filesystem;
    const fs::path target(cfg.out_path);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open output file: " + tmp.string());
        f << body;
        if (!f.good()) throw std::runtime_error("failed writing output file: " + tmp.string());
    }
    fs::rename(tmp, target);
}

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-photon sum-frequency detection: joint spectra, measurement operators, "
                 "spectral teleportation",
                 kToolName};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    std::string config_path, out_path, format = "json";
    std::vector<std::string> sets;
    std::string chosen;
    const std::pair<const char*, const char*> commands[] = {
        {"jsa", "Build a joint spectral amplitude and report norm and Schmidt data"},
        {"povm", "Assemble detection operators: Gram matrix, purities, null element"},
        {"teleport", "Spectral teleportation fidelity: closed-form sweeps and numeric checks"},
        {"sfg", "Upconverted amplitude of a two-photon input and per-mode probabilities"},
    };
    for (const auto& [name, description] : commands) {
        CLI::App* sub = app.add_subcommand(name, description);
        sub->add_option("-c,--config", config_path, "JSON configuration file")->required();
        sub->add_option("--set", sets, "Override a config entry: dotted.path=value");
        sub->add_option("-o,--out", out_path, "Output file path")->required();
        sub->add_option("-f,--format", format, "Output format")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->callback([&chosen, name = std::string(name)] { chosen = name; });
    }

    std::vector<std::string> storage;
    storage.reserve(args.size() + 1);
    storage.push_back(kToolName);
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    argv.reserve(storage.size());
    for (std::string& s : storage) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "argument error: " << e.what() << '\n';
        return 2;
    }

    try {
        RunConfig rc;
        rc.command = chosen;
        rc.out_path = out_path;
        rc.format = format;
        std::ifstream f(config_path);
        if (!f) throw config_error("cannot open config file: " + config_path);
        rc.config = json::parse(f);
        apply_overrides(rc.config, sets);

        const auto t0 = std::chrono::steady_clock::now();
        RunReport report = run_command(rc);
        write_output(rc, report);
        const auto t1 = std::chrono::steady_clock::now();

        json doc = report.document;
        doc["wall_time_ms"] =
            std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count() / 1000.0;
        out << doc.dump(2) << '\n';
        return 0;
    } catch (const json::exception& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const degenerate_error& e) {
        err << "degeneracy: " << e.what() << '\n';
        return 3;
    } catch (const resource_error& e) {
        err << "resource limit: " << e.what() << '\n';
        return 4;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace biphoton::cli
