#include "ksmix/spectral.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>

namespace ksmix {

SpectralEngine::SpectralEngine(const Grid& g) : grid_(g) {
    scale_ = 1.0 / static_cast<double>(g.cells);
    rbuf_ = fftw_alloc_real(g.cells);
    fftw_complex* cb = fftw_alloc_complex(g.specn);
    cbuf_ = cb;
    std::memset(rbuf_, 0, sizeof(double) * g.cells);
    std::memset(cb, 0, sizeof(fftw_complex) * g.specn);
    int dims[3] = {g.n, g.n, g.n};
    plan_fwd_ = fftw_plan_dft_r2c(g.d, dims, rbuf_, cb, FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft_c2r(g.d, dims, cb, rbuf_, FFTW_ESTIMATE);
}

SpectralEngine::~SpectralEngine() {
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
    fftw_free(rbuf_);
    fftw_free(static_cast<fftw_complex*>(cbuf_));
}

const SpectralEngine& SpectralEngine::get(const Grid& g) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<SpectralEngine>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[{g.d, g.n}];
    if (!slot) slot.reset(new SpectralEngine(g));
    return *slot;
}

void SpectralEngine::forward(const double* in, std::complex<double>* out) const {
    // Copy through the planning buffers: r2c would not destroy its input, but
    // routing every call the same way keeps alignment identical to the plan.
    std::memcpy(rbuf_, in, sizeof(double) * grid_.cells);
    fftw_complex* cb = static_cast<fftw_complex*>(cbuf_);
    fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_fwd_), rbuf_, cb);
    const double s = scale_;
    for (std::int64_t i = 0; i < grid_.specn; ++i)
        out[i] = std::complex<double>(cb[i][0] * s, cb[i][1] * s);
}

void SpectralEngine::backward(const std::complex<double>* in, double* out) const {
    // Multi-dimensional c2r destroys its input, so the copy is mandatory here.
    fftw_complex* cb = static_cast<fftw_complex*>(cbuf_);
    std::memcpy(cb, in, sizeof(fftw_complex) * grid_.specn);
    fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_bwd_), cb, rbuf_);
    std::memcpy(out, rbuf_, sizeof(double) * grid_.cells);
}

}  // namespace ksmix
