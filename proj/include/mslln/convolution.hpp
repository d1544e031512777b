#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mslln {

enum class ConvolutionStrategy {
    Auto,    // direct for small problems, FFT otherwise
    Direct,  // blocked direct sum, fixed order per output
    Fft,     // FFTW real transforms, zero-padded to a power of two
};

// Windowed convolution with a symmetric-support kernel of half-width L:
//
//   out[o] = sum_{i=0}^{2L} taps[i] * signal[o + 2L - i],  o = 0..n-1
//
// so signal must hold n + 2L values. With taps[i] = c_{i-L} and
// signal[i] = xi_{first + i} this is x_k = sum_j c_j xi_{k-j}.
// Output is a pure function of the inputs and the strategy.
std::vector<double> convolve_window(std::span<const double> taps, std::span<const double> signal,
                                    ConvolutionStrategy strategy = ConvolutionStrategy::Auto);

}  // namespace mslln
