#pragma once
#include <optional>
#include <string>
#include <vector>

#include "ksmix/evolve.hpp"

namespace ksmix {

enum class SweepAxis { A, ALPHA, BETA, N, MASS };
const char* to_string(SweepAxis a);

struct Sweep {
    SweepAxis axis = SweepAxis::A;
    std::vector<double> values;
};

enum class ExpectOutcome { NONE, BLOWUP, COMPLETED };

// One scenario file: a base run plus an optional one-axis parameter sweep.
struct Scenario {
    std::string name = "run";
    int version = 1;
    SimConfig base;
    std::optional<Sweep> sweep;
    std::string outputs;  // output directory; empty -> resolved by the runner
    std::vector<double> snapshot_times;
    ExpectOutcome expect = ExpectOutcome::NONE;
};

// Strict JSON: unknown keys are rejected with their full path, values are
// range-checked with the offending key named, absent keys take the SimConfig
// defaults.  `version` defaults to 1 and only 1 is accepted.
Scenario parse_config(const std::string& path);
Scenario parse_config_text(const std::string& text, const std::string& origin);

// Copy of base with one sweep value applied; rejects values that are illegal
// for the axis (e.g. fractional n).
SimConfig apply_sweep_value(const SimConfig& base, SweepAxis axis, double value);

// "A=1000", "n=128", ... (used for child directories and summary rows).
std::string sweep_point_label(SweepAxis axis, double value);

}  // namespace ksmix
