#include <doctest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "timexplain/dsp.hpp"
#include "timexplain/mappings.hpp"

using namespace timexplain;
using namespace timexplain::mappings;

namespace {

std::vector<std::size_t> kappa(const SliceAssignment& s) {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < s.length(); ++t) out.push_back(s.slice(t));
  return out;
}

std::vector<TimeSeries> two_series() { return {TimeSeries({1, 3}), TimeSeries({5, 7})}; }

double mean_of(const TimeSeries& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double pop_std(const TimeSeries& x) {
  const double m = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size()));
}

}  // namespace

TEST_CASE("slice assignment examples") {
  CHECK(kappa(make_slice_assignment(6, 3)) == std::vector<std::size_t>{0, 0, 1, 1, 2, 2});
  CHECK(kappa(make_slice_assignment(7, 3)) == std::vector<std::size_t>{0, 0, 0, 1, 1, 2, 2});
  CHECK(kappa(make_slice_assignment(5, 5)) == std::vector<std::size_t>{0, 1, 2, 3, 4});
  CHECK_THROWS_AS(make_slice_assignment(5, 6), Error);
  CHECK_THROWS_AS(make_slice_assignment(5, 0), Error);
}

TEST_CASE("band assignment examples") {
  const auto b = make_band_assignment(128, 4);
  CHECK(std::vector<std::size_t>(b.edges().begin(), b.edges().end()) ==
        std::vector<std::size_t>{1, 5, 17, 36, 65});
  const auto one = make_band_assignment(64, 1);
  CHECK(std::vector<std::size_t>(one.edges().begin(), one.edges().end()) ==
        std::vector<std::size_t>{1, 33});
  const auto five = make_band_assignment(10, 5);
  for (std::size_t k = 0; k < 5; ++k) CHECK(five.width(k) == 1);
  CHECK_FALSE(b.band(0).has_value());
  CHECK(b.band(4) == 0u);
  CHECK(b.band(5) == 1u);
  CHECK(b.band(64) == 3u);
  CHECK_THROWS_AS(make_band_assignment(10, 6), Error);
}

TEST_CASE("band assignments partition the spectrum with non-decreasing widths") {
  for (std::size_t d = 2; d <= 512; ++d) {
    for (std::size_t n = 1; n <= d / 2; ++n) {
      const auto b = make_band_assignment(d, n);
      REQUIRE(b.fragments() == n);
      REQUIRE(b.edges().front() == 1);
      REQUIRE(b.edges().back() == d / 2 + 1);
      for (std::size_t k = 0; k < n; ++k) {
        REQUIRE(b.width(k) >= 1);
        if (k > 0) REQUIRE(b.width(k) >= b.width(k - 1));
      }
    }
  }
}

TEST_CASE("replacement series examples") {
  const auto s = two_series();
  CHECK(build_replacement(ReplacementKind::Zero, {}, 3, 0) == TimeSeries({0, 0, 0}));
  CHECK(build_replacement(ReplacementKind::LocalMean, s, 2, 0) == TimeSeries({3, 5}));
  CHECK(build_replacement(ReplacementKind::GlobalMean, s, 2, 0) == TimeSeries({4, 4}));
  const auto drawn = build_replacement(ReplacementKind::Sample, s, 2, 5);
  CHECK((drawn == s[0] || drawn == s[1]));
  CHECK(build_replacement(ReplacementKind::LocalNoise, s, 2, 9) ==
        build_replacement(ReplacementKind::LocalNoise, s, 2, 9));
  CHECK_THROWS_AS(build_replacement(ReplacementKind::LocalMean, {}, 2, 0), Error);
  const std::vector<TimeSeries> single{TimeSeries({1, 2})};
  try {
    build_replacement(ReplacementKind::LocalNoise, single, 2, 0);
    FAIL("expected VarianceUndefined");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::VarianceUndefined);
  }
  CHECK_NOTHROW(build_replacement(ReplacementKind::GlobalNoise, single, 2, 0));
}

TEST_CASE("noise replacements follow the reference moments") {
  std::mt19937_64 rng(3);
  std::vector<TimeSeries> s;
  for (int i = 0; i < 5; ++i) {
    auto v = testing::random_values(4000, rng, 2.0);
    for (auto& x : v) x += 10.0;
    s.emplace_back(std::move(v));
  }
  const auto g = build_replacement(ReplacementKind::GlobalNoise, s, 4000, 1);
  CHECK(mean_of(g) == doctest::Approx(10.0).epsilon(0.02));
  CHECK(pop_std(g) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("time slice map") {
  const auto h = MappingFunction::time_slice(TimeSeries({1, 2, 3, 4}), 2, TimeSeries({0, 0, 0, 0}));
  CHECK(h(SimplifiedInput::parse("01")) == TimeSeries({0, 0, 3, 4}));
  CHECK(h(SimplifiedInput::ones(2)) == TimeSeries({1, 2, 3, 4}));
  CHECK(h(SimplifiedInput::zeros(2)) == TimeSeries({0, 0, 0, 0}));
  CHECK_THROWS_AS(h(SimplifiedInput::ones(3)), Error);
}

TEST_CASE("time slice map keeps enabled samples bit-identical") {
  std::mt19937_64 rng(4);
  const auto x = testing::random_series(50, rng);
  const auto r = testing::random_series(50, rng);
  const auto h = MappingFunction::time_slice(x, 7, r);
  const auto& slices = *h.slices();
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::uint8_t> bits(7);
    for (auto& b : bits) b = rng() % 2;
    const SimplifiedInput z(bits);
    const auto y = h(z);
    for (std::size_t t = 0; t < 50; ++t) CHECK(y[t] == (z.active(slices.slice(t)) ? x[t] : r[t]));
  }
}

TEST_CASE("frequency patch map") {
  const auto h = MappingFunction::freq_patch(TimeSeries({2, 2, 2, 2}), 1, TimeSeries({1, -1, 1, -1}));
  const auto y = h(SimplifiedInput::zeros(1));
  const double expected[] = {3, 1, 3, 1};
  for (std::size_t t = 0; t < 4; ++t) CHECK(std::abs(y[t] - expected[t]) < 1e-12);

  std::mt19937_64 rng(5);
  const auto x = testing::random_series(37, rng);
  const auto r = testing::random_series(37, rng);
  const auto self = MappingFunction::freq_patch(x, 4, x);
  const auto hp = MappingFunction::freq_patch(x, 4, r);
  for (int trial = 0; trial < 16; ++trial) {
    std::vector<std::uint8_t> bits(4);
    for (std::size_t k = 0; k < 4; ++k) bits[k] = (trial >> k) & 1;
    const SimplifiedInput z(bits);
    const auto a = self(z);
    for (std::size_t t = 0; t < 37; ++t) CHECK(std::abs(a[t] - x[t]) < 1e-10);
    CHECK(std::abs(mean_of(hp(z)) - mean_of(x)) < 1e-10);
  }
}

TEST_CASE("frequency filter map") {
  const std::size_t d = 256;
  const auto x = testing::sinusoid(d, 52.0);
  const auto h = MappingFunction::freq_filter(x, 4);
  CHECK(h.bands()->edges()[2] == 33);
  CHECK(h.bands()->edges()[3] == 72);
  CHECK(h(SimplifiedInput::ones(4)) == x);
  const auto stopped = h(SimplifiedInput::parse("1101"));
  CHECK(testing::rms(stopped.values()) <= 0.05 * testing::rms(x.values()));
}

TEST_CASE("frequency filter keeps an enabled band between disabled neighbours") {
  const std::size_t d = 256;
  const auto probe = MappingFunction::freq_filter(testing::sinusoid(d, 1.0), 6);
  const auto edges = probe.bands()->edges();
  const double centre = std::floor((static_cast<double>(edges[3]) + static_cast<double>(edges[4] - 1)) / 2.0);
  const auto x = testing::sinusoid(d, centre);
  const auto h = MappingFunction::freq_filter(x, 6);
  const auto y = h(SimplifiedInput::parse("110101"));
  CHECK(testing::rms(y.values()) >= 0.7 * testing::rms(x.values()));
}

TEST_CASE("adjacent disabled bands are merged into one stop band") {
  const auto bands = make_band_assignment(128, 4);
  const auto stops = disabled_stop_bands(bands, SimplifiedInput::parse("1001"));
  REQUIRE(stops.size() == 1);
  CHECK(stops[0] == dsp::StopBand{5, 35});
  const auto split = disabled_stop_bands(bands, SimplifiedInput::parse("1010"));
  REQUIRE(split.size() == 2);
  CHECK(split[0] == dsp::StopBand{5, 16});
  CHECK(split[1] == dsp::StopBand{36, 64});
}

TEST_CASE("statistics map") {
  const auto a = MappingFunction::statistics(TimeSeries({0, 1, 2, 3}), ReplacementStatistics{0.0, 1.0});
  const auto y = a(SimplifiedInput::parse("01"));
  const double expected[] = {-1.5, -0.5, 0.5, 1.5};
  for (std::size_t t = 0; t < 4; ++t) CHECK(y[t] == doctest::Approx(expected[t]).epsilon(1e-12));
  CHECK(a(SimplifiedInput::ones(2)) == TimeSeries({0, 1, 2, 3}));

  const auto b = MappingFunction::statistics(TimeSeries({0, 2}), ReplacementStatistics{5.0, 2.0});
  const auto z = b(SimplifiedInput::parse("10"));
  CHECK(z[0] == doctest::Approx(-1.0));
  CHECK(z[1] == doctest::Approx(3.0));

  const auto flat = MappingFunction::statistics(TimeSeries({1, 1, 1}), ReplacementStatistics{0.0, 1.0});
  CHECK_THROWS_AS(flat(SimplifiedInput::parse("10")), Error);
  CHECK_NOTHROW(flat(SimplifiedInput::parse("01")));
}

TEST_CASE("statistics map with everything disabled takes the replacement moments") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = testing::random_series(30, rng, 3.0);
    const ReplacementStatistics target{std::normal_distribution<double>(0, 5)(rng),
                                       std::uniform_real_distribution<double>(0.1, 4)(rng)};
    const auto y = MappingFunction::statistics(x, target)(SimplifiedInput::zeros(2));
    CHECK(std::abs(mean_of(y) - target.mean) < 1e-10);
    CHECK(std::abs(pop_std(y) - target.stddev) < 1e-10);
  }
}

TEST_CASE("identity h_x(1) = x for every mapping and replacement") {
  std::mt19937_64 rng(8);
  std::vector<TimeSeries> reference;
  for (int i = 0; i < 6; ++i) reference.push_back(testing::random_series(48, rng));
  for (auto replacement : {ReplacementKind::Zero, ReplacementKind::LocalMean, ReplacementKind::GlobalMean,
                           ReplacementKind::LocalNoise, ReplacementKind::GlobalNoise, ReplacementKind::Sample}) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto x = testing::random_series(48, rng);
      const auto r = build_replacement(replacement, reference, 48, rng());
      CHECK(MappingFunction::time_slice(x, 9, r)(SimplifiedInput::ones(9)) == x);
      CHECK(MappingFunction::statistics(x, r)(SimplifiedInput::ones(2)) == x);
      const auto patched = MappingFunction::freq_patch(x, 4, r)(SimplifiedInput::ones(4));
      for (std::size_t t = 0; t < 48; ++t) CHECK(std::abs(patched[t] - x[t]) <= 1e-10);
      CHECK(MappingFunction::freq_filter(x, 4)(SimplifiedInput::ones(4)) == x);
    }
  }
}
