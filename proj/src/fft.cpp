#include "isac/fft.hpp"

#include <cmath>
#include <complex>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>

#include <fftw3.h>

namespace isac {

namespace {

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n)
        : ptr(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))), size(n) {
        if (!ptr) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(ptr); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;

    fftw_complex* ptr;
    std::size_t size;
};

/// In-place plans for one grid shape: inverse along columns (subcarriers),
/// forward along rows (symbols).
struct PlanPair {
    fftw_plan along_subcarriers = nullptr;
    fftw_plan along_symbols = nullptr;

    PlanPair(int n, int m) {
        FftwBuffer scratch(static_cast<std::size_t>(n) * m);
        // Column-major: subcarrier index contiguous.
        along_subcarriers = fftw_plan_many_dft(1, &n, m, scratch.ptr, nullptr, 1, n, scratch.ptr, nullptr, 1, n,
                                               FFTW_BACKWARD, FFTW_ESTIMATE);
        along_symbols = fftw_plan_many_dft(1, &m, n, scratch.ptr, nullptr, n, 1, scratch.ptr, nullptr, n, 1,
                                           FFTW_FORWARD, FFTW_ESTIMATE);
        if (!along_subcarriers || !along_symbols) throw std::runtime_error("FFTW plan creation failed");
    }
    ~PlanPair() {
        fftw_destroy_plan(along_subcarriers);
        fftw_destroy_plan(along_symbols);
    }
    PlanPair(const PlanPair&) = delete;
    PlanPair& operator=(const PlanPair&) = delete;
};

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is.
std::mutex plan_mutex;

const PlanPair& plans_for(int n, int m) {
    static std::map<std::pair<int, int>, std::unique_ptr<PlanPair>> cache;
    std::lock_guard lock(plan_mutex);
    auto& slot = cache[{n, m}];
    if (!slot) slot = std::make_unique<PlanPair>(n, m);
    return *slot;
}

}  // namespace

CGrid delay_doppler_transform(const CGrid& h) {
    const int n = static_cast<int>(h.rows());
    const int m = static_cast<int>(h.cols());
    const PlanPair& plans = plans_for(n, m);

    // Aligned scratch so the plans' alignment assumptions hold.
    FftwBuffer buf(static_cast<std::size_t>(n) * m);
    static_assert(sizeof(fftw_complex) == sizeof(std::complex<double>));
    std::memcpy(buf.ptr, h.data(), sizeof(fftw_complex) * buf.size);
    fftw_execute_dft(plans.along_subcarriers, buf.ptr, buf.ptr);
    fftw_execute_dft(plans.along_symbols, buf.ptr, buf.ptr);

    CGrid out(n, m);
    std::memcpy(static_cast<void*>(out.data()), buf.ptr, sizeof(fftw_complex) * buf.size);
    out *= 1.0 / std::sqrt(static_cast<double>(n) * static_cast<double>(m));
    return out;
}

}  // namespace isac
