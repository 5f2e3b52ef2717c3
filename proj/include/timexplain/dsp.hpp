#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "timexplain/core.hpp"

namespace timexplain::dsp {

/// Half spectrum of a real series: 1 + floor(d/2) bins, with real DC and (for
/// even d) real Nyquist bins.
class Spectrum {
 public:
  Spectrum(std::vector<std::complex<double>> bins, std::size_t original_length);

  std::span<const std::complex<double>> bins() const noexcept { return bins_; }
  const std::complex<double>& operator[](std::size_t w) const noexcept { return bins_[w]; }
  std::size_t size() const noexcept { return bins_.size(); }
  std::size_t original_length() const noexcept { return original_length_; }

 private:
  std::vector<std::complex<double>> bins_;
  std::size_t original_length_;
};

Spectrum rdft(const TimeSeries& x);
Spectrum rdft(std::span<const double> x);
TimeSeries irdft(const Spectrum& spectrum);
/// Inverse without the TimeSeries finiteness/length wrapper.
std::vector<double> irdft_values(const Spectrum& spectrum);

/// Inclusive range of stopped frequency bins.
struct StopBand {
  std::size_t low;
  std::size_t high;

  friend bool operator==(const StopBand&, const StopBand&) = default;
};

/// Linear-phase (type I) FIR filter: odd length, symmetric taps.
class FirFilter {
 public:
  explicit FirFilter(std::vector<double> coefficients);

  static FirFilter identity() { return FirFilter({1.0}); }

  std::span<const double> coefficients() const noexcept { return coefficients_; }
  std::size_t length() const noexcept { return coefficients_.size(); }
  /// Real amplitude response A(w); the frequency response is e^{-i w (L-1)/2} A(w).
  double amplitude(double omega) const noexcept;
  /// Amplitude at frequency bin `bin` of a length-d series.
  double amplitude_at_bin(double bin, std::size_t d) const noexcept;

 private:
  std::vector<double> coefficients_;
};

/// Largest odd integer <= max(floor(d/2), 3).
std::size_t default_filter_length(std::size_t d);

/// Reusable least-squares bandstop designer for one (d, L) pair. The Gram
/// matrix of the cosine basis over [0, pi] does not depend on the bands, so
/// it is factored once and each design only builds a new right-hand side.
class FirlsDesigner {
 public:
  FirlsDesigner(std::size_t d, std::size_t length);

  std::size_t series_length() const noexcept { return d_; }
  std::size_t filter_length() const noexcept { return length_; }
  FirFilter design(std::span<const StopBand> stop_bands) const;

 private:
  struct Factorization;
  std::size_t d_;
  std::size_t length_;
  std::shared_ptr<const Factorization> factorization_;
};

/// Least-squares bandstop design. The desired amplitude is 0 on every stop
/// band, 1 elsewhere, with one-bin linear ramps outside each band edge. The
/// squared error is integrated over [0, pi] and minimised subject to unit DC
/// gain, which leaves bin 0 untouched for every design.
FirFilter design_firls_bandstop(std::span<const StopBand> stop_bands, std::size_t d,
                                std::size_t length);

/// Forward-backward filtering with periodic extension of (L-1) samples per
/// side; the result equals iRDFT(A(w)^2 * RDFT(x)).
TimeSeries apply_zero_phase(const FirFilter& filter, const TimeSeries& x);

}  // namespace timexplain::dsp
