#include <doctest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "timexplain/dsp.hpp"
#include "timexplain/kernels.hpp"

using namespace timexplain;
using namespace timexplain::dsp;

namespace {

void check_bins(const Spectrum& s, std::initializer_list<std::complex<double>> expected) {
  REQUIRE(s.size() == expected.size());
  std::size_t w = 0;
  for (auto e : expected) {
    CHECK(std::abs(s[w] - e) < 1e-12);
    ++w;
  }
}

ErrorKind design_error(std::vector<StopBand> bands, std::size_t d, std::size_t length) {
  try {
    design_firls_bandstop(bands, d, length);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("rdft examples") {
  check_bins(rdft(TimeSeries({1, 1, 1, 1})), {4.0, 0.0, 0.0});
  check_bins(rdft(TimeSeries({1, -1, 1, -1})), {0.0, 0.0, 4.0});
  check_bins(rdft(TimeSeries({0, 0, 0, 0, 0})), {0.0, 0.0, 0.0});
}

TEST_CASE("irdft examples") {
  const auto a = irdft(Spectrum({4.0, 0.0, 0.0}, 4));
  const auto b = irdft(Spectrum({8.0, 0.0, 4.0}, 4));
  for (std::size_t t = 0; t < 4; ++t) {
    CHECK(a[t] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b[t] == doctest::Approx(t % 2 == 0 ? 3.0 : 1.0).epsilon(1e-12));
  }
}

TEST_CASE("spectrum validates its shape") {
  CHECK_THROWS_AS(Spectrum({1.0, 0.0}, 4), Error);
  CHECK_THROWS_AS(Spectrum({std::complex<double>(1.0, 1.0), 0.0, 0.0}, 4), Error);
  CHECK_THROWS_AS(Spectrum({1.0, 0.0, std::complex<double>(0.0, 1.0)}, 4), Error);
  CHECK_NOTHROW(Spectrum({1.0, 0.0, std::complex<double>(0.0, 1.0)}, 5));
}

TEST_CASE("rdft matches the textbook DFT and inverts") {
  std::mt19937_64 rng(11);
  for (std::size_t d : {2u, 3u, 5u, 8u, 13u, 31u, 64u, 97u, 128u, 257u}) {
    const auto x = testing::random_series(d, rng);
    const auto s = rdft(x);
    const auto oracle = testing::naive_dft(x.values());
    REQUIRE(s.size() == d / 2 + 1);
    for (std::size_t w = 0; w < s.size(); ++w) CHECK(std::abs(s[w] - oracle[w]) < 1e-9);
    const auto back = irdft(s);
    for (std::size_t t = 0; t < d; ++t) CHECK(std::abs(back[t] - x[t]) < 1e-10);
  }
}

TEST_CASE("Parseval and linearity") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 2 + rng() % 200;
    const auto x = testing::random_series(d, rng);
    const auto y = testing::random_series(d, rng);
    const auto sx = rdft(x);
    double energy = 0.0;
    for (double v : x) energy += v * v;
    double spectral = std::norm(sx[0]);
    for (std::size_t w = 1; w < sx.size(); ++w) {
      const bool nyquist = d % 2 == 0 && w == d / 2;
      spectral += (nyquist ? 1.0 : 2.0) * std::norm(sx[w]);
    }
    CHECK(std::abs(energy - spectral / static_cast<double>(d)) < 1e-8);

    const double a = 1.7;
    const double b = -0.3;
    std::vector<double> combo(d);
    for (std::size_t t = 0; t < d; ++t) combo[t] = a * x[t] + b * y[t];
    const auto sc = rdft(TimeSeries(combo));
    const auto sy = rdft(y);
    for (std::size_t w = 0; w < sc.size(); ++w) CHECK(std::abs(sc[w] - (a * sx[w] + b * sy[w])) < 1e-9);
  }
}

TEST_CASE("parallel kernels agree with the serial reference") {
  std::mt19937_64 rng(13);
  for (std::size_t d : {2u, 7u, 64u, 129u, 300u}) {
    const auto x = testing::random_values(d, rng);
    std::vector<std::complex<double>> fast(d / 2 + 1);
    std::vector<std::complex<double>> slow(d / 2 + 1);
    kernels::rdft_direct(x, fast);
    kernels::reference::rdft_direct(x, slow);
    for (std::size_t w = 0; w < fast.size(); ++w) CHECK(std::abs(fast[w] - slow[w]) < 1e-9);
    std::vector<double> inv_fast(d);
    std::vector<double> inv_slow(d);
    kernels::irdft_direct(fast, inv_fast);
    kernels::reference::irdft_direct(slow, inv_slow);
    for (std::size_t t = 0; t < d; ++t) CHECK(std::abs(inv_fast[t] - inv_slow[t]) < 1e-10);

    const auto taps = testing::random_values(9, rng);
    std::vector<double> fir_fast(d);
    std::vector<double> fir_slow(d);
    kernels::fir_causal(taps, x, fir_fast);
    kernels::reference::fir_causal(taps, x, fir_slow);
    for (std::size_t t = 0; t < d; ++t) CHECK(std::abs(fir_fast[t] - fir_slow[t]) < 1e-12);
  }
  std::vector<TimeSeries> q;
  std::vector<TimeSeries> r;
  for (int i = 0; i < 6; ++i) q.push_back(testing::random_series(40, rng));
  for (int i = 0; i < 9; ++i) r.push_back(testing::random_series(40, rng));
  CHECK(kernels::euclidean_distances(q, r) == kernels::reference::euclidean_distances(q, r));
}

TEST_CASE("fir filter invariants") {
  CHECK_THROWS_AS(FirFilter({1.0, 2.0}), Error);
  CHECK_THROWS_AS(FirFilter({1.0, 2.0, 3.0}), Error);
  const FirFilter f({0.25, 0.5, 0.25});
  CHECK(f.amplitude(0.0) == doctest::Approx(1.0));
  CHECK(default_filter_length(256) == 127);
  CHECK(default_filter_length(10) == 5);
  CHECK(default_filter_length(4) == 3);
}

TEST_CASE("firls all-pass design") {
  const auto f = design_firls_bandstop({}, 64, 31);
  for (std::size_t w = 0; w <= 32; ++w) CHECK(std::abs(f.amplitude_at_bin(static_cast<double>(w), 64) - 1.0) < 1e-6);
}

TEST_CASE("firls full-range stop band") {
  const std::size_t d = 64;
  const std::vector<StopBand> bands{{1, d / 2}};
  const auto f = design_firls_bandstop(bands, d, default_filter_length(d));
  CHECK(std::abs(f.amplitude_at_bin(16.0, d)) <= 0.1);
  CHECK(f.amplitude_at_bin(0.0, d) >= 0.9);
}

TEST_CASE("firls bandstop of the reference shape") {
  const std::vector<StopBand> bands{{40, 60}};
  const auto f = design_firls_bandstop(bands, 256, 101);
  CHECK(std::abs(f.amplitude_at_bin(50.0, 256)) <= 0.05);
  CHECK(std::abs(f.amplitude_at_bin(10.0, 256)) >= 0.9);
  CHECK(std::abs(f.amplitude_at_bin(100.0, 256)) >= 0.9);
  const auto h = f.coefficients();
  for (std::size_t i = 0; i < h.size(); ++i) CHECK(std::abs(h[i] - h[h.size() - 1 - i]) < 1e-10);

  const auto x = testing::sinusoid(256, 50.0);
  const auto y = apply_zero_phase(f, x);
  CHECK(testing::rms(y.values()) <= 0.01 * testing::rms(x.values()));
}

TEST_CASE("firls rejects invalid layouts") {
  CHECK(design_error({{10, 20}, {15, 30}}, 128, 31) == ErrorKind::OverlappingBands);
  CHECK(design_error({{0, 5}}, 128, 31) == ErrorKind::BandOutOfRange);
  CHECK(design_error({{10, 65}}, 128, 31) == ErrorKind::BandOutOfRange);
  CHECK(design_error({{10, 20}}, 128, 30) == ErrorKind::InvalidFilterLength);
  CHECK(design_error({{10, 20}}, 16, 17) == ErrorKind::InvalidFilterLength);
  CHECK(design_error({{10, 20}, {21, 30}}, 128, 31) == ErrorKind::SingularDesignSystem);
}

TEST_CASE("zero-phase application") {
  std::mt19937_64 rng(14);
  const auto x = testing::random_series(64, rng);
  CHECK(apply_zero_phase(FirFilter::identity(), x) == x);

  const std::vector<StopBand> bands{{5, 9}};
  const auto f = design_firls_bandstop(bands, 64, 31);
  const auto flat = apply_zero_phase(f, TimeSeries(std::vector<double>(64, 2.5)));
  for (double v : flat) CHECK(std::abs(v - 2.5) < 1e-6);

  const auto y = apply_zero_phase(f, x);
  const auto oracle = testing::frequency_domain_filter(f.coefficients(), x.values());
  for (std::size_t t = 0; t < 64; ++t) CHECK(std::abs(y[t] - oracle[t]) < 1e-9);

  CHECK_THROWS_AS(apply_zero_phase(f, testing::random_series(16, rng)), Error);
}

TEST_CASE("all-pass zero-phase filtering introduces no lag") {
  std::mt19937_64 rng(15);
  const auto x = testing::random_series(128, rng);
  const auto f = design_firls_bandstop({}, 128, 63);
  const auto y = apply_zero_phase(f, x);
  long best = 0;
  double best_value = -1e300;
  for (long lag = -20; lag <= 20; ++lag) {
    double acc = 0.0;
    for (long t = 0; t < 128; ++t) acc += x[static_cast<std::size_t>(t)] * y[static_cast<std::size_t>((t + lag + 128) % 128)];
    if (acc > best_value) {
      best_value = acc;
      best = lag;
    }
  }
  CHECK(best == 0);
}
