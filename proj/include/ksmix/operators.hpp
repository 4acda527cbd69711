#pragma once
#include <array>

#include "ksmix/field.hpp"

namespace ksmix {

// (-Delta)^{alpha/2}: spectral multiplier |kappa|^alpha, kappa = 2*pi*k.
// alpha in (0,2]; the zero mode maps to 0, so the output has exact zero mean.
ScalarField frac_laplacian(const ScalarField& f, double alpha);

// Normalization constant of the singular-integral form,
// C_{alpha,d} = 2^alpha Gamma((d+alpha)/2) / (pi^{d/2} |Gamma(-alpha/2)|),
// defined for alpha in (0,2) only.
double frac_constant(double alpha, int d);

// Pointwise singular-integral evaluation of (-Delta)^{alpha/2} f at a grid
// node: midpoint quadrature of the periodic kernel sum over lattice images
// |m|_inf <= image_radius, principal value by symmetric pairing.  tail_bound
// is an integral-test estimate of the truncated image tail (an error bar on
// value, not folded into it).
struct QuadratureResult {
    double value = 0.0;
    double tail_bound = 0.0;
};
QuadratureResult frac_laplacian_quadrature_report(const ScalarField& f, double alpha,
                                                  const std::array<int, 3>& node, int image_radius);
double frac_laplacian_quadrature(const ScalarField& f, double alpha, const std::array<int, 3>& node,
                                 int image_radius);

// Attractive drift B(rho) = grad((-Delta)^{-(d+2-beta)/2} rho) acting on the
// mean-zero part; spectral symbol i*kappa*|kappa|^{-(d+2-beta)}.  beta in
// [2, max(d,2)] (at d=1 only beta=2 is admitted).
VectorField attractive_drift(const ScalarField& rho, double beta);

// grad(rho) . B(rho) + rho * div B(rho), with div B realized as the multiplier
// -|kappa|^{beta-d} on the mean-zero part (beta = d: -(rho - mean)); products
// dealiased.  Mean of the result vanishes (divergence form).
ScalarField div_rho_drift(const ScalarField& rho, double beta);

// (-Delta)^{-s/2}... inverse of order s: multiplier |kappa|^{-s} on the
// mean-zero part, zero mode -> 0.  s > 0.
ScalarField inv_frac_laplacian(const ScalarField& f, double s);

// Homogeneous Sobolev seminorm (sum over k != 0 of |kappa|^{2s} |c_k|^2)^{1/2}.
double sobolev_seminorm(const ScalarField& f, double s);

// Orthogonal projection onto the span of the N lowest torus eigenfunctions,
// ordered by (|k|^2, lexicographic k), k=0 first.  Conjugate mode pairs enter
// together as their cosine/sine combinations so real fields stay real; if N
// splits a pair, the cosine combination is kept.
ScalarField project_low(const ScalarField& f, int N);

}  // namespace ksmix
