#pragma once
#include <array>
#include <cstdint>
#include <string>

#include "ksmix/field.hpp"

namespace ksmix {

enum class InitialKind { BUMP, TWO_BUMP, RANDOM_SMOOTH, SNAPSHOT };

struct InitialSpec {
    InitialKind kind = InitialKind::BUMP;
    double mass = 1.0;   // prescribed integral of the (nonnegative) datum
    double width = 0.2;  // Gaussian sigma of the periodicized bump profile
    std::array<double, 3> center{0.0, 0.0, 0.0};
    double separation = 0.35;  // two-bump center offset along the first axis
    std::uint64_t seed = 12345;
    double decay = 4.0;  // |rho_hat(k)| ~ (1+|k|)^{-decay} for random data
    std::string path;    // snapshot base path for kind SNAPSHOT
};

// Periodicized Gaussian bump, nonnegative, normalized so the discrete cell
// quadrature of the samples equals `mass` exactly.
ScalarField bump_field(const Grid& g, double mass, double width, const std::array<double, 3>& center);

// Mean-zero random trigonometric field with prescribed spectral magnitude
// (1+|k|)^{-decay} and uniformly random phases; deterministic in (grid, seed).
ScalarField random_smooth_field(const Grid& g, std::uint64_t seed, double decay);

// Materialize a spec on a grid.  RANDOM_SMOOTH is shifted nonnegative and
// mass-normalized; SNAPSHOT must match the grid shape.
ScalarField make_initial(const InitialSpec& spec, const Grid& g);

}  // namespace ksmix
