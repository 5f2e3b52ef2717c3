#include "timexplain/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <omp.h>

namespace timexplain::kernels {

namespace {

// Below these sizes the fork/join cost outweighs the loop.
constexpr std::ptrdiff_t kMinParallelBins = 64;
constexpr std::ptrdiff_t kMinParallelSamples = 2048;
constexpr std::ptrdiff_t kMinParallelRows = 4;

// Twiddle table e^{-2 pi i j / d}; indexing by (w * t) mod d keeps the angle
// exact for every product, unlike evaluating sin/cos of 2 pi w t / d.
std::vector<std::complex<double>> twiddles(std::size_t d) {
  std::vector<std::complex<double>> table(d);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double angle = step * static_cast<double>(j);
    table[j] = {std::cos(angle), -std::sin(angle)};
  }
  return table;
}

}  // namespace

int max_threads() noexcept { return omp_get_max_threads(); }

void set_max_threads(int threads) noexcept {
  if (threads >= 1) omp_set_num_threads(threads);
}

void rdft_direct(std::span<const double> x, std::span<std::complex<double>> bins) {
  const auto d = static_cast<std::ptrdiff_t>(x.size());
  const auto half = d / 2;
  const auto table = twiddles(x.size());

#pragma omp parallel for schedule(static) if (half + 1 >= kMinParallelBins)
  for (std::ptrdiff_t w = 0; w <= half; ++w) {
    double re = 0.0;
    double im = 0.0;
    std::ptrdiff_t idx = 0;
    for (std::ptrdiff_t t = 0; t < d; ++t) {
      re += x[t] * table[idx].real();
      im += x[t] * table[idx].imag();
      idx += w;
      if (idx >= d) idx -= d;
    }
    bins[w] = {re, im};
  }
  bins[0].imag(0.0);
  if (d % 2 == 0) bins[half].imag(0.0);
}

void irdft_direct(std::span<const std::complex<double>> bins, std::span<double> out) {
  const auto d = static_cast<std::ptrdiff_t>(out.size());
  const auto half = d / 2;
  const bool even = d % 2 == 0;
  const auto table = twiddles(out.size());
  const double inv = 1.0 / static_cast<double>(d);

#pragma omp parallel for schedule(static) if (d >= kMinParallelBins)
  for (std::ptrdiff_t t = 0; t < d; ++t) {
    double acc = bins[0].real();
    std::ptrdiff_t idx = t;
    const std::ptrdiff_t last = even ? half - 1 : half;
    for (std::ptrdiff_t w = 1; w <= last; ++w) {
      // Re(X_w e^{+i theta}) with table holding e^{-i theta}.
      acc += 2.0 * (bins[w].real() * table[idx].real() + bins[w].imag() * table[idx].imag());
      idx += t;
      if (idx >= d) idx -= d;
    }
    if (even) acc += (t % 2 == 0 ? 1.0 : -1.0) * bins[half].real();
    out[t] = acc * inv;
  }
}

void fir_causal(std::span<const double> taps, std::span<const double> input, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(input.size());
  const auto taps_count = static_cast<std::ptrdiff_t>(taps.size());

#pragma omp parallel for schedule(static) if (n * taps_count >= kMinParallelSamples * 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    const std::ptrdiff_t kmax = std::min(taps_count - 1, i);
    for (std::ptrdiff_t k = 0; k <= kmax; ++k) acc += taps[k] * input[i - k];
    out[i] = acc;
  }
}

std::vector<double> euclidean_distances(std::span<const TimeSeries> queries,
                                        std::span<const TimeSeries> references) {
  const auto rows = static_cast<std::ptrdiff_t>(queries.size());
  const auto cols = static_cast<std::ptrdiff_t>(references.size());
  std::vector<double> out(static_cast<std::size_t>(rows * cols));

#pragma omp parallel for schedule(static) if (rows >= kMinParallelRows)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const auto q = queries[i].values();
    for (std::ptrdiff_t j = 0; j < cols; ++j) {
      const auto r = references[j].values();
      double acc = 0.0;
      for (std::size_t t = 0; t < q.size(); ++t) {
        const double diff = q[t] - r[t];
        acc += diff * diff;
      }
      out[i * cols + j] = std::sqrt(acc);
    }
  }
  return out;
}

}  // namespace timexplain::kernels
