#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nldiff/multiplier.hpp"
#include "nldiff/torus.hpp"

namespace nldiff {

/// Everything a CLI run needs.  Defaults reproduce the jump-decay figure:
/// (-10, 10), delta = 1, beta = 1/3, sawtooth_pair, t in {0, 0.05, 0.1, 0.2}.
struct RunConfig {
    std::string command = "jump-decay";
    OperatorParams params{1, 1.0, 1.0 / 3.0};

    // domain [lo_i, hi_i] per axis; a single entry applies to every axis
    std::vector<double> lo{-10.0};
    std::vector<double> hi{10.0};
    int K = 131072;

    ProfileSpec profile;
    std::string input_field;  // CSV of coefficients; overrides `profile`
    bool sourced = false;     // the profile is the source b and u(0) = 0

    std::vector<double> times{0.0, 0.05, 0.1, 0.2};
    std::vector<double> delta_sweep{1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
    std::vector<double> beta_sweep;  // empty: n + {1, 1.5, 1.9, 1.99}
    std::vector<double> sobolev{0.0};

    std::optional<double> tolerance;  // overrides the command's main tolerance
    double certificate_tolerance = 1e-4;

    double nu_max = 500.0;  // multiplier grid
    int nu_points = 101;
    int plot_intervals = 1024;
    int scan_points = 200;

    std::string output_dir = "out";
    unsigned threads = 0;  // 0: NLDIFF_THREADS or 1
    std::uint64_t seed = 20240917;
    bool svg = true;

    TorusGeometry geometry() const;
    std::vector<double> beta_values() const;

    /// Throws ConfigError for inconsistent settings.
    void validate() const;

    bool operator==(const RunConfig&) const = default;
};

std::string to_json(const RunConfig& cfg);
/// Unknown keys, wrong types and invalid values raise ConfigError.
RunConfig config_from_json(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace nldiff
