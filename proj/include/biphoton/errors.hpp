#pragma once

#include <stdexcept>
#include <string>

namespace biphoton {

// Thrown for invalid parameters and malformed configuration (CLI exit code 2).
class config_error : public std::invalid_argument {
public:
    explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

// Thrown when two amplitudes that must share a grid do not (CLI exit code 2).
class incompatible_grid_error : public config_error {
public:
    explicit incompatible_grid_error(const std::string& what) : config_error(what) {}
};

// Thrown when a computation collapses numerically: vanishing normalization weight,
// zero-trace element, zero-overlap herald (CLI exit code 3).
class degenerate_error : public std::runtime_error {
public:
    explicit degenerate_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a request exceeds the dense-matrix budget, e.g. a density matrix
// over a grid larger than 64x64 (CLI exit code 4).
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace biphoton
