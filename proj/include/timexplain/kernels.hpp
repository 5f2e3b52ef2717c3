#pragma once

// Data-parallel inner loops. Each kernel in `timexplain::kernels` is
// OpenMP-parallel; `timexplain::kernels::reference` holds plain serial
// versions used as test oracles and benchmark baselines.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "timexplain/core.hpp"

namespace timexplain::kernels {

/// Number of worker threads OpenMP regions will use.
int max_threads() noexcept;
/// Caps OpenMP parallelism for subsequent regions (values < 1 are ignored).
void set_max_threads(int threads) noexcept;

/// bins[w] = sum_t x[t] exp(-2 pi i w t / d) for w in [0, d/2]. `bins` must
/// hold d/2 + 1 entries.
void rdft_direct(std::span<const double> x, std::span<std::complex<double>> bins);

/// Inverse of rdft_direct for a length-d signal. Imaginary parts of the DC
/// and (even d) Nyquist bins are ignored.
void irdft_direct(std::span<const std::complex<double>> bins, std::span<double> out);

/// Causal FIR filter over `input`: out[n] = sum_k taps[k] input[n - k], with
/// zero initial conditions.
void fir_causal(std::span<const double> taps, std::span<const double> input, std::span<double> out);

/// Row-major |queries| x |references| matrix of Euclidean distances.
std::vector<double> euclidean_distances(std::span<const TimeSeries> queries,
                                        std::span<const TimeSeries> references);

namespace reference {

void rdft_direct(std::span<const double> x, std::span<std::complex<double>> bins);
void irdft_direct(std::span<const std::complex<double>> bins, std::span<double> out);
void fir_causal(std::span<const double> taps, std::span<const double> input, std::span<double> out);
std::vector<double> euclidean_distances(std::span<const TimeSeries> queries,
                                        std::span<const TimeSeries> references);

}  // namespace reference
}  // namespace timexplain::kernels
