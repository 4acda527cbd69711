#pragma once
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace ksmix::verify {

struct Outcome {
    bool pass = true;
    std::string detail;  // measured extrema / counts, for the report line
};

// Reusable named checks.  The numeric arguments scale the batteries so the
// quick suite and the full gate share one implementation.

// Single-mode eigenvalue match (2*pi*|k|)^alpha, alpha in {0.5,1,1.5}, d in {1,2}.
Outcome eigenvalue_exactness(double rel_tol);

// Singular-integral quadrature vs the spectral operator on a band-limited
// random field; d=1 n=256 (all nodes) and d=2 n=128 (strided node lattice).
Outcome quadrature_crosscheck(double rel_tol, int image_radius);

// |mean((-Delta)^{alpha/2} f)| <= 1e-13 * ||f||_2 over random fields.
Outcome meanzero_battery(int fields);

// Pointwise-power dissipation inequality over signed random fields,
// p in {2,4} x alpha in {0.5,1,1.5}; slack >= -1e-8 * ||f||_p^p.
Outcome cordoba_battery(int fields);

// Dichotomy falsification over (alpha,d,p) in {0.5,1,1.5}x{1,2}x{1,2}:
// no designated-branch violation below -slack_tol, no dichotomy failure.
Outcome falsify_battery(int trials, double slack_tol);

// Frozen closed-form values of the lemma constants and kernel normalization.
Outcome lemma_constant_oracles();

// maxprinciple_dichotomy never throws over an independent random battery.
Outcome dichotomy_totality(int fields);

// Corrupting C_lower by +10% scales the lower-branch tightness by exactly
// 1.1; corrupting by x100 must produce reported violations.
Outcome mutation_sensitivity();

// Semi-Lagrangian shear transport vs the closed-form characteristic solution.
Outcome transport_shear_exactness();

// Spectral divergence of every built-in flow kind is at rounding level.
Outcome divergence_free_all();

// With drift and advection off, the stepper reproduces exp(-|kappa|^alpha t)
// per mode to 1e-12 and keeps the mean bitwise.
Outcome linear_decay_exactness();

// Full nonlinear short run: the mean coefficient stays put to rounding.
Outcome mass_conservation_short();

// Mixing average: identity transport returns the initial low-mode energy
// exactly; a strong steady shear loses most of it.
Outcome rage_trivial_cases();

// Snapshot write/read round-trip is bit-exact (written under `dir`).
Outcome snapshot_roundtrip(const std::string& dir);

struct NamedCheck {
    std::string name;
    std::function<Outcome()> fn;
};

// Quick-suite scales (runtime budget: a few minutes total).
std::vector<NamedCheck> battery();

// Runs the checks whose name contains `filter` (all when empty), one report
// line each; returns 0 iff every executed check passed and at least one ran.
int run_battery(const std::string& filter, std::ostream& out);

}  // namespace ksmix::verify
