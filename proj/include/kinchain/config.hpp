#pragma once

#include "kinchain/conservation.hpp"
#include "kinchain/grid.hpp"
#include "kinchain/params.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace kinchain {

enum class Scenario { state, evolve, check, report };

struct StateSpec {
    enum class Kind { wigner, gaussian, file } kind = Kind::wigner;
    int n = 0;                                  // wigner
    double sigma_x = 1.0, sigma_v = 1.0;        // gaussian
    double center_x = 0.0, center_v = 0.0;      // gaussian
    std::filesystem::path path;                 // file
};

struct ClosureSpec {
    enum class Kind { moyal, zero } kind = Kind::moyal;
    int k_max = 3;
    std::vector<double> potential; // empty: harmonic from params
};

struct RunConfig {
    Scenario scenario = Scenario::evolve;
    StateSpec state;
    PhysicalParams params;
    std::vector<AxisSpec> axes;     // explicit grid, or
    int grid_points = 0;            // oscillator box shorthand
    double grid_widths = 8.0;
    ClosureSpec closure;
    double dt = 0.0;
    int steps = 1;
    int snapshot_stride = 1;
    std::vector<EquationId> checks;
    std::filesystem::path out_dir = "out";
    std::map<std::string, double> tolerances;
};

// Parses and validates a JSON config document.  Unknown keys are rejected by
// name; schema violations name the offending key.
RunConfig parse_config(const std::string& text);

// Applies KEY=VALUE overrides (dotted paths into the document) before
// parsing.
RunConfig parse_config_file(const std::filesystem::path& path,
                            std::span<const std::string> overrides = {});

} // namespace kinchain
