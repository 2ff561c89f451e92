#include "formbound/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>

namespace formbound {

namespace {

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct Workspace {
    std::size_t n_real = 0;
    std::size_t n_cplx = 0;
    double* real = nullptr;
    fftw_complex* cplx = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;

    Workspace(int d, int n) {
        std::vector<int> dims(d, n);
        n_real = 1;
        for (int j = 0; j < d; ++j) n_real *= static_cast<std::size_t>(n);
        n_cplx = n_real / n * (n / 2 + 1);
        real = fftw_alloc_real(n_real);
        cplx = fftw_alloc_complex(n_cplx);
        std::lock_guard<std::mutex> lock(planner_mutex());
        // FFTW_ESTIMATE keeps planning deterministic run to run.
        fwd = fftw_plan_dft_r2c(d, dims.data(), real, cplx, FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r(d, dims.data(), cplx, real, FFTW_ESTIMATE);
    }
    ~Workspace() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(inv);
        fftw_free(real);
        fftw_free(cplx);
    }
    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;
};

Workspace& workspace_for(const TorusGrid& g) {
    thread_local std::map<std::pair<int, int>, std::unique_ptr<Workspace>> cache;
    auto key = std::make_pair(g.dim(), g.n());
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<Workspace>(g.dim(), g.n())).first;
    return *it->second;
}

}  // namespace

SpectralField fft_forward(const ScalarField& u) {
    const TorusGrid& g = *u.grid();
    Workspace& ws = workspace_for(g);
    std::memcpy(ws.real, u.data(), ws.n_real * sizeof(double));
    fftw_execute(ws.fwd);
    SpectralField out(u.grid());
    const double scale = 1.0 / static_cast<double>(g.size());
    const auto* src = reinterpret_cast<const std::complex<double>*>(ws.cplx);
    for (std::size_t i = 0; i < ws.n_cplx; ++i) out[i] = src[i] * scale;
    return out;
}

ScalarField fft_inverse(const SpectralField& c) {
    const TorusGrid& g = *c.grid();
    Workspace& ws = workspace_for(g);
    std::memcpy(ws.cplx, c.data(), ws.n_cplx * sizeof(fftw_complex));
    fftw_execute(ws.inv);
    ScalarField out(c.grid());
    std::memcpy(out.data(), ws.real, ws.n_real * sizeof(double));
    return out;
}

}  // namespace formbound
