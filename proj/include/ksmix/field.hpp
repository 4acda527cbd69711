#pragma once
#include <Eigen/Core>
#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "ksmix/grid.hpp"

namespace ksmix {

using ArrayXd = Eigen::ArrayXd;
using ArrayXcd = Eigen::ArrayXcd;

// Real scalar field on the torus, stored as samples and/or half-spectrum
// coefficients with lazy one-way sync.  Spectral entries are in coefficient
// units: entry k=0 is the mean.  Stored entries carry the raw DFT phase of the
// node layout; coefficient() converts to the true Fourier coefficient of the
// [-1/2,1/2)^d box (they differ by (-1)^{k_0+...+k_{d-1}}).
class ScalarField {
  public:
    ScalarField() = default;
    explicit ScalarField(const Grid& g);  // zero field

    static ScalarField from_samples(const Grid& g, ArrayXd samples);
    static ScalarField from_spectrum(const Grid& g, ArrayXcd spec);

    const Grid& grid() const { return grid_; }
    bool empty() const { return grid_.d == 0; }

    const ArrayXd& samples() const;
    const ArrayXcd& spectrum() const;

    // True box coefficient at signed mode k (any representative; conjugate
    // symmetry is applied when k falls in the unstored half).
    std::complex<double> coefficient(const std::array<int, 3>& k) const;

    // Point value of the trigonometric interpolant at an arbitrary coordinate
    // (exact at nodes); O(specn) direct summation.
    double eval(const std::array<double, 3>& x) const;

    void set_samples(ArrayXd samples);
    void set_spectrum(ArrayXcd spec);

  private:
    Grid grid_;
    mutable ArrayXd samples_;
    mutable ArrayXcd spec_;
    mutable bool have_samples_ = false;
    mutable bool have_spec_ = false;
    void sync_samples() const;
    void sync_spec() const;
};

// d-component vector field; components share one grid.
class VectorField {
  public:
    VectorField() = default;
    explicit VectorField(const Grid& g);
    const Grid& grid() const { return grid_; }
    ScalarField& comp(int a) { return comps_[a]; }
    const ScalarField& comp(int a) const { return comps_[a]; }

  private:
    Grid grid_;
    std::array<ScalarField, 3> comps_;
};

// Sample a function at the grid nodes; rejects non-finite values.
ScalarField from_function(const Grid& g, const std::function<double(const std::array<double, 3>&)>& f);

// Module-level transform interface (delegates to the lazy field sync).
ArrayXcd transform(const ScalarField& f);
ScalarField inverse_transform(const Grid& g, const ArrayXcd& spec);

// Zero every mode with any |k_a| > floor(n/3) (the 2/3 rule); idempotent.
ScalarField dealias(const ScalarField& f);
int dealias_cutoff(const Grid& g);

// L^p norm with the cell-measure quadrature h^d sum |f|^p; p in [1, inf].
// Pass p = infinity (or p_inf) for the max norm.
double lp_norm(const ScalarField& f, double p);
double mean(const ScalarField& f);
inline constexpr double p_inf = std::numeric_limits<double>::infinity();

}  // namespace ksmix
