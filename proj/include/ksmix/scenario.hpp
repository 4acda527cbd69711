#pragma once
#include <optional>
#include <string>
#include <vector>

#include "ksmix/config.hpp"
#include "ksmix/diagnostics.hpp"

namespace ksmix {

// One sweep point after execution.  sup_linf is the largest sample magnitude
// seen across the diagnostic records; rage_avg and approx_distance are the
// summary observables (skipped for degenerate data, empty cells in the CSV).
struct ChildResult {
    std::string label;
    SimConfig config;
    SimStatus status = SimStatus::COMPLETED;
    double sup_linf = 0.0;
    std::optional<double> blowup_time;
    std::optional<double> rage_avg;
    std::optional<double> approx_distance;
    std::string dir;  // this child's output directory
};

struct ScenarioResult {
    std::string out_dir;
    std::vector<ChildResult> children;
    int exit_code = 0;  // worst child after the expect remapping
};

// scenario.outputs if set, else $KSMIX_OUTPUT_ROOT/<name>, else ./out/<name>.
std::string resolve_output_dir(const Scenario& sc);

// Runs every sweep point sequentially; writes per-child diag.csv, snapshots,
// verification.json, and a top-level summary.csv.  Output directories are
// created and probed for writability before any computation starts.
ScenarioResult run_scenario(const Scenario& sc);

// Pure transport of the scenario's initial datum under its flow (no
// dissipation, no chemotaxis); writes initial/final snapshots and a small CSV
// of low-mode energy versus time.
int run_transport_scenario(const Scenario& sc);

std::string summary_csv(const ScenarioResult& res);

}  // namespace ksmix
