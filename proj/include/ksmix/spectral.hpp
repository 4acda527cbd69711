#pragma once
#include <complex>

#include "ksmix/grid.hpp"

namespace ksmix {

// Per-grid FFTW plan cache.  Forward is real-to-complex scaled by 1/n^d so the
// k=0 entry equals the mean; backward is the unscaled inverse, so
// backward(forward(x)) == x up to rounding.  Plans use FFTW_ESTIMATE: plan
// selection must not depend on runtime timing or results would differ bitwise
// between processes.
class SpectralEngine {
  public:
    static const SpectralEngine& get(const Grid& g);

    void forward(const double* in, std::complex<double>* out) const;
    void backward(const std::complex<double>* in, double* out) const;

    const Grid& grid() const { return grid_; }

    SpectralEngine(const SpectralEngine&) = delete;
    SpectralEngine& operator=(const SpectralEngine&) = delete;
    ~SpectralEngine();

  private:
    explicit SpectralEngine(const Grid& g);

    Grid grid_;
    double scale_;
    void* plan_fwd_ = nullptr;  // fftw_plan, kept opaque here
    void* plan_bwd_ = nullptr;
    double* rbuf_ = nullptr;
    void* cbuf_ = nullptr;  // fftw_complex*
};

}  // namespace ksmix
