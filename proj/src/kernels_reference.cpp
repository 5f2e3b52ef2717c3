#include <cmath>
#include <numbers>

#include "timexplain/kernels.hpp"

namespace timexplain::kernels::reference {

void rdft_direct(std::span<const double> x, std::span<std::complex<double>> bins) {
  const std::size_t d = x.size();
  for (std::size_t w = 0; w <= d / 2; ++w) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t t = 0; t < d; ++t) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((w * t) % d) /
                           static_cast<double>(d);
      acc += x[t] * std::polar(1.0, angle);
    }
    bins[w] = acc;
  }
  bins[0].imag(0.0);
  if (d % 2 == 0) bins[d / 2].imag(0.0);
}

void irdft_direct(std::span<const std::complex<double>> bins, std::span<double> out) {
  const std::size_t d = out.size();
  // Rebuild the full Hermitian spectrum and evaluate the complex inverse sum.
  std::vector<std::complex<double>> full(d);
  for (std::size_t w = 0; w <= d / 2; ++w) full[w] = bins[w];
  full[0].imag(0.0);
  if (d % 2 == 0) full[d / 2].imag(0.0);
  for (std::size_t w = d / 2 + 1; w < d; ++w) full[w] = std::conj(full[d - w]);
  for (std::size_t t = 0; t < d; ++t) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t w = 0; w < d; ++w) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((w * t) % d) /
                           static_cast<double>(d);
      acc += full[w] * std::polar(1.0, angle);
    }
    out[t] = acc.real() / static_cast<double>(d);
  }
}

void fir_causal(std::span<const double> taps, std::span<const double> input, std::span<double> out) {
  for (std::size_t i = 0; i < input.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < taps.size() && k <= i; ++k) acc += taps[k] * input[i - k];
    out[i] = acc;
  }
}

std::vector<double> euclidean_distances(std::span<const TimeSeries> queries,
                                        std::span<const TimeSeries> references) {
  std::vector<double> out;
  out.reserve(queries.size() * references.size());
  for (const auto& q : queries) {
    for (const auto& r : references) {
      double acc = 0.0;
      for (std::size_t t = 0; t < q.size(); ++t) acc += (q[t] - r[t]) * (q[t] - r[t]);
      out.push_back(std::sqrt(acc));
    }
  }
  return out;
}

}  // namespace timexplain::kernels::reference
