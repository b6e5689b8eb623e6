#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace biphoton::cli {

inline constexpr const char* kToolName = "biphoton-povm";
inline constexpr const char* kToolVersion = "0.1.0";

// A fully resolved run request: subcommand, merged configuration (file plus
// --set overrides, overrides winning), and output destination.
struct RunConfig {
    std::string command;            // jsa | povm | teleport | sfg
    nlohmann::json config;
    std::string out_path;
    std::string format = "json";    // json | csv
};

// Primary array product of a run. The report JSON carries scalars and small
// matrices; the payload is what lands in --out, as nested arrays (json) or
// CSV (csv).
struct Payload {
    enum class Kind { none, surface, complex_matrix, columns, scalars };
    Kind kind = Kind::none;

    std::string row_name, col_name;
    Eigen::VectorXd rows, cols;   // axis values for surface / complex_matrix
    Eigen::MatrixXd surface;      // Kind::surface (real, wide CSV layout)
    Eigen::MatrixXcd matrix;      // Kind::complex_matrix (long CSV layout)
    std::vector<std::pair<std::string, Eigen::VectorXd>> columns; // Kind::columns
    std::vector<std::pair<std::string, double>> scalars;          // Kind::scalars
};

struct RunReport {
    nlohmann::json document; // inputs echo, results, diagnostics, tool stamp
    Payload payload;
};

// Dispatches to the subcommand implementation; throws on invalid configuration
// (config_error), numerical degeneracy (degenerate_error) or resource limits
// (resource_error). Performs no I/O.
RunReport run_command(const RunConfig& cfg);

// Serializes the payload in the requested format and writes it atomically
// (temporary file in the target directory, then rename).
void write_output(const RunConfig& cfg, const RunReport& report);

// Full command-line entry: parses arguments, loads and merges configuration,
// runs, writes, prints the report (with wall time) to `out`. Returns the
// process exit code: 0 success, 2 configuration, 3 degeneracy, 4 resources.
int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace biphoton::cli
