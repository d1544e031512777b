#include "mslln/convolution.hpp"

#include "mslln/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>

namespace mslln {

namespace {

constexpr std::size_t kBlock = 256;
constexpr std::size_t kDirectWorkLimit = std::size_t{1} << 24;

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};
template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_alloc(std::size_t count) {
    void* p = fftw_malloc(sizeof(T) * count);
    if (!p) throw Error("fftw_malloc failed");
    return FftwBuffer<T>(static_cast<T*>(p));
}

struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

// FFTW planning is not thread-safe; plans are created once per size under a
// lock and then executed with the new-array interface, which is.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    PlanPair get(std::size_t n) {
        std::lock_guard lock(mutex_);
        if (auto it = plans_.find(n); it != plans_.end()) return it->second;
        auto real = fftw_alloc<double>(n);
        auto spec = fftw_alloc<fftw_complex>(n / 2 + 1);
        const int size = static_cast<int>(n);
        PlanPair p;
        p.forward = fftw_plan_dft_r2c_1d(size, real.get(), spec.get(), FFTW_ESTIMATE);
        p.backward = fftw_plan_dft_c2r_1d(size, spec.get(), real.get(), FFTW_ESTIMATE);
        if (!p.forward || !p.backward) throw Error("fftw planning failed");
        plans_.emplace(n, p);
        return p;
    }

private:
    PlanCache() = default;
    ~PlanCache() {
        for (auto& [n, p] : plans_) {
            fftw_destroy_plan(p.forward);
            fftw_destroy_plan(p.backward);
        }
    }
    std::mutex mutex_;
    std::map<std::size_t, PlanPair> plans_;
};

std::vector<double> direct(std::span<const double> taps, std::span<const double> signal, std::size_t n) {
    std::vector<double> out(n, 0.0);
    const std::size_t width = taps.size();
    std::vector<std::size_t> nonzero;
    for (std::size_t i = 0; i < width; ++i)
        if (taps[i] != 0.0) nonzero.push_back(i);
    const std::size_t shift = width - 1;
    for (std::size_t block = 0; block < n; block += kBlock) {
        const std::size_t end = std::min(n, block + kBlock);
        for (std::size_t o = block; o < end; ++o) {
            double acc = 0.0;
            for (std::size_t i : nonzero) acc += taps[i] * signal[o + shift - i];
            out[o] = acc;
        }
    }
    return out;
}

std::vector<double> via_fft(std::span<const double> taps, std::span<const double> signal, std::size_t n) {
    const std::size_t size = std::bit_ceil(std::max<std::size_t>(signal.size(), 2));
    const std::size_t bins = size / 2 + 1;
    const PlanPair plan = PlanCache::instance().get(size);

    auto real = fftw_alloc<double>(size);
    auto sig_hat = fftw_alloc<fftw_complex>(bins);
    auto tap_hat = fftw_alloc<fftw_complex>(bins);

    std::fill(real.get(), real.get() + size, 0.0);
    std::copy(taps.begin(), taps.end(), real.get());
    fftw_execute_dft_r2c(plan.forward, real.get(), tap_hat.get());

    std::fill(real.get(), real.get() + size, 0.0);
    std::copy(signal.begin(), signal.end(), real.get());
    fftw_execute_dft_r2c(plan.forward, real.get(), sig_hat.get());

    for (std::size_t b = 0; b < bins; ++b) {
        const double re = sig_hat[b][0] * tap_hat[b][0] - sig_hat[b][1] * tap_hat[b][1];
        const double im = sig_hat[b][0] * tap_hat[b][1] + sig_hat[b][1] * tap_hat[b][0];
        sig_hat[b][0] = re;
        sig_hat[b][1] = im;
    }
    fftw_execute_dft_c2r(plan.backward, sig_hat.get(), real.get());

    const double inv = 1.0 / static_cast<double>(size);
    const std::size_t offset = taps.size() - 1;
    std::vector<double> out(n);
    for (std::size_t o = 0; o < n; ++o) out[o] = real[o + offset] * inv;
    return out;
}

}  // namespace

std::vector<double> convolve_window(std::span<const double> taps, std::span<const double> signal,
                                    ConvolutionStrategy strategy) {
    if (taps.empty() || taps.size() % 2 == 0) throw ValidationError("convolve_window: taps must have odd length 2L+1");
    if (signal.size() < taps.size()) throw ValidationError("convolve_window: signal shorter than kernel");
    const std::size_t n = signal.size() - (taps.size() - 1);
    if (strategy == ConvolutionStrategy::Auto) {
        const auto active = static_cast<std::size_t>(std::count_if(taps.begin(), taps.end(), [](double t) { return t != 0.0; }));
        strategy = n * active <= kDirectWorkLimit ? ConvolutionStrategy::Direct : ConvolutionStrategy::Fft;
    }
    return strategy == ConvolutionStrategy::Direct ? direct(taps, signal, n) : via_fft(taps, signal, n);
}

}  // namespace mslln
