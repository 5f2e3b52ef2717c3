#include "timexplain/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "timexplain/kernels.hpp"

namespace timexplain::dsp {

Spectrum::Spectrum(std::vector<std::complex<double>> bins, std::size_t original_length)
    : bins_(std::move(bins)), original_length_(original_length) {
  if (original_length_ < 2 || bins_.size() != original_length_ / 2 + 1) {
    throw Error(ErrorKind::InvalidLength,
                "spectrum of a length-" + std::to_string(original_length_) + " series needs " +
                    std::to_string(original_length_ / 2 + 1) + " bins");
  }
  if (bins_.front().imag() != 0.0 ||
      (original_length_ % 2 == 0 && bins_.back().imag() != 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "DC and Nyquist bins must be real");
  }
}

Spectrum rdft(std::span<const double> x) {
  std::vector<std::complex<double>> bins(x.size() / 2 + 1);
  kernels::rdft_direct(x, bins);
  return Spectrum(std::move(bins), x.size());
}

Spectrum rdft(const TimeSeries& x) { return rdft(x.values()); }

std::vector<double> irdft_values(const Spectrum& spectrum) {
  std::vector<double> out(spectrum.original_length());
  kernels::irdft_direct(spectrum.bins(), out);
  return out;
}

TimeSeries irdft(const Spectrum& spectrum) { return TimeSeries(irdft_values(spectrum)); }

FirFilter::FirFilter(std::vector<double> coefficients) : coefficients_(std::move(coefficients)) {
  if (coefficients_.size() % 2 == 0) {
    throw Error(ErrorKind::InvalidFilterLength, "FIR filter length must be odd");
  }
  const std::size_t n = coefficients_.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    if (std::abs(coefficients_[i] - coefficients_[n - 1 - i]) > 1e-10) {
      throw Error(ErrorKind::InvalidArgument, "FIR filter taps must be symmetric");
    }
  }
}

double FirFilter::amplitude(double omega) const noexcept {
  const std::size_t half = coefficients_.size() / 2;
  double acc = coefficients_[half];
  for (std::size_t n = 1; n <= half; ++n) {
    acc += 2.0 * coefficients_[half - n] * std::cos(static_cast<double>(n) * omega);
  }
  return acc;
}

double FirFilter::amplitude_at_bin(double bin, std::size_t d) const noexcept {
  return amplitude(2.0 * std::numbers::pi * bin / static_cast<double>(d));
}

std::size_t default_filter_length(std::size_t d) {
  const std::size_t base = std::max<std::size_t>(d / 2, 3);
  return base % 2 == 1 ? base : base - 1;
}

namespace {

// Piece of the desired amplitude: linear from gain0 at w0 to gain1 at w1.
struct Segment {
  double w0, w1, gain0, gain1;
};

// Integral of cos(k w) over [w0, w1].
double cos_integral(double k, double w0, double w1) {
  if (k == 0.0) return w1 - w0;
  return (std::sin(k * w1) - std::sin(k * w0)) / k;
}

// Integral of (w - w0) cos(k w) over [w0, w1].
double ramp_cos_integral(double k, double w0, double w1) {
  const double width = w1 - w0;
  if (k == 0.0) return 0.5 * width * width;
  return width * std::sin(k * w1) / k + (std::cos(k * w1) - std::cos(k * w0)) / (k * k);
}

std::vector<Segment> desired_response(std::span<const StopBand> bands, std::size_t d) {
  const double nyquist_bin = static_cast<double>(d) / 2.0;
  // Breakpoints (bin, gain) of the piecewise-linear desired amplitude.
  std::vector<std::pair<double, double>> points{{0.0, 1.0}};
  for (const auto& band : bands) {
    const auto low = static_cast<double>(band.low);
    const auto high = static_cast<double>(band.high);
    points.emplace_back(low - 1.0, 1.0);
    points.emplace_back(low, 0.0);
    points.emplace_back(high, 0.0);
    points.emplace_back(high + 1.0, 1.0);
  }
  points.emplace_back(nyquist_bin, 1.0);

  std::vector<Segment> segments;
  const double to_omega = 2.0 * std::numbers::pi / static_cast<double>(d);
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    auto [b0, g0] = points[i];
    auto [b1, g1] = points[i + 1];
    if (b0 >= nyquist_bin) break;
    if (b1 > nyquist_bin) {
      g1 = g0 + (g1 - g0) * (nyquist_bin - b0) / (b1 - b0);
      b1 = nyquist_bin;
    }
    if (b1 <= b0) continue;
    segments.push_back({b0 * to_omega, b1 * to_omega, g0, g1});
  }
  return segments;
}

void validate_bands(std::span<const StopBand> bands, std::size_t d) {
  for (std::size_t i = 0; i < bands.size(); ++i) {
    const auto& band = bands[i];
    if (band.low < 1 || band.high > d / 2 || band.low > band.high) {
      throw Error(ErrorKind::BandOutOfRange,
                  "stop band [" + std::to_string(band.low) + ", " + std::to_string(band.high) +
                      "] outside bins [1, " + std::to_string(d / 2) + "]");
    }
    if (i == 0) continue;
    const auto& prev = bands[i - 1];
    if (band.low <= prev.high) {
      throw Error(ErrorKind::OverlappingBands, "stop bands overlap or are unsorted");
    }
    if (band.low - prev.high < 2) {
      throw Error(ErrorKind::SingularDesignSystem,
                  "no passband between stop bands ending at bin " + std::to_string(prev.high) +
                      " and starting at bin " + std::to_string(band.low));
    }
  }
}

}  // namespace

struct FirlsDesigner::Factorization {
  Eigen::FullPivLU<Eigen::MatrixXd> lu;
};

FirlsDesigner::FirlsDesigner(std::size_t d, std::size_t length) : d_(d), length_(length) {
  if (length % 2 == 0 || length < 3 || length > d) {
    throw Error(ErrorKind::InvalidFilterLength,
                "filter length " + std::to_string(length) + " must be odd and within [3, " +
                    std::to_string(d) + "]");
  }
  // Unknowns a_0..a_M with A(w) = sum_n a_n cos(n w); a_0 = h[M], a_n = 2 h[M-n].
  // The desired response is specified on all of [0, pi], so the Gram matrix
  // is the integral of cos(m w) cos(n w) over that whole interval.
  const auto unknowns = static_cast<Eigen::Index>((length - 1) / 2 + 1);
  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(unknowns + 1, unknowns + 1);
  const double pi = std::numbers::pi;
  for (Eigen::Index m = 0; m < unknowns; ++m) {
    const auto km = static_cast<double>(m);
    for (Eigen::Index n = 0; n < unknowns; ++n) {
      const auto kn = static_cast<double>(n);
      system(m, n) = 0.5 * (cos_integral(std::abs(km - kn), 0.0, pi) +
                            cos_integral(km + kn, 0.0, pi));
    }
  }
  // Lagrange row: A(0) = sum_n a_n = 1.
  system.row(unknowns).head(unknowns).setOnes();
  system.col(unknowns).head(unknowns).setOnes();

  auto factorization = std::make_shared<Factorization>();
  factorization->lu.compute(system);
  factorization->lu.setThreshold(1e-12);
  if (!factorization->lu.isInvertible()) {
    throw Error(ErrorKind::SingularDesignSystem, "least-squares design system is singular");
  }
  factorization_ = std::move(factorization);
}

FirFilter FirlsDesigner::design(std::span<const StopBand> stop_bands) const {
  validate_bands(stop_bands, d_);
  const std::size_t half = (length_ - 1) / 2;
  const auto unknowns = static_cast<Eigen::Index>(half + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(unknowns + 1);
  for (const auto& seg : desired_response(stop_bands, d_)) {
    const double slope = (seg.gain1 - seg.gain0) / (seg.w1 - seg.w0);
    for (Eigen::Index m = 0; m < unknowns; ++m) {
      const auto km = static_cast<double>(m);
      rhs(m) += seg.gain0 * cos_integral(km, seg.w0, seg.w1) +
                slope * ramp_cos_integral(km, seg.w0, seg.w1);
    }
  }
  rhs(unknowns) = 1.0;
  const Eigen::VectorXd solution = factorization_->lu.solve(rhs);

  std::vector<double> taps(length_);
  taps[half] = solution(0);
  for (std::size_t n = 1; n <= half; ++n) {
    const double tap = 0.5 * solution(static_cast<Eigen::Index>(n));
    taps[half - n] = tap;
    taps[half + n] = tap;
  }
  return FirFilter(std::move(taps));
}

FirFilter design_firls_bandstop(std::span<const StopBand> stop_bands, std::size_t d,
                                std::size_t length) {
  return FirlsDesigner(d, length).design(stop_bands);
}

TimeSeries apply_zero_phase(const FirFilter& filter, const TimeSeries& x) {
  const std::size_t d = x.size();
  const std::size_t length = filter.length();
  if (length > d) {
    throw Error(ErrorKind::FilterLongerThanSeries,
                "filter length " + std::to_string(length) + " exceeds series length " +
                    std::to_string(d));
  }
  const std::size_t pad = length - 1;
  std::vector<double> padded(d + 2 * pad);
  for (std::size_t i = 0; i < padded.size(); ++i) {
    // Index i in the padded buffer maps to sample (i - pad) mod d.
    padded[i] = x[(i + d - pad) % d];
  }

  std::vector<double> forward(padded.size());
  kernels::fir_causal(filter.coefficients(), padded, forward);
  std::reverse(forward.begin(), forward.end());
  std::vector<double> backward(padded.size());
  kernels::fir_causal(filter.coefficients(), forward, backward);
  std::reverse(backward.begin(), backward.end());

  return TimeSeries(std::vector<double>(backward.begin() + static_cast<std::ptrdiff_t>(pad),
                                        backward.begin() + static_cast<std::ptrdiff_t>(pad + d)));
}

}  // namespace timexplain::dsp
