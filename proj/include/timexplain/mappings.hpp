#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "timexplain/core.hpp"
#include "timexplain/dsp.hpp"

namespace timexplain::mappings {

enum class MappingKind { TimeSlice, FreqFilter, FreqPatch, Statistics };
enum class ReplacementKind { Zero, LocalMean, GlobalMean, LocalNoise, GlobalNoise, Sample };

std::string_view to_string(MappingKind kind) noexcept;
std::string_view to_string(ReplacementKind kind) noexcept;
/// Accepts both "time-slice" and "time_slice" spellings.
MappingKind parse_mapping_kind(std::string_view text);
ReplacementKind parse_replacement_kind(std::string_view text);

/// Sample replacement depends on one drawn series; all others on the whole set.
constexpr bool is_series_dependent(ReplacementKind kind) noexcept {
  return kind == ReplacementKind::Sample;
}
constexpr bool is_frequency_kind(MappingKind kind) noexcept {
  return kind == MappingKind::FreqFilter || kind == MappingKind::FreqPatch;
}

/// kappa for the time domain: contiguous slices whose lengths differ by at
/// most one, longer slices first. Slice numbers are 0-based here.
class SliceAssignment {
 public:
  SliceAssignment(std::size_t d, std::size_t fragments);

  std::size_t length() const noexcept { return slice_of_.size(); }
  std::size_t fragments() const noexcept { return starts_.size() - 1; }
  std::size_t slice(std::size_t t) const noexcept { return slice_of_[t]; }
  /// Start index of each slice followed by d.
  std::span<const std::size_t> boundaries() const noexcept { return starts_; }

 private:
  std::vector<std::size_t> slice_of_;
  std::vector<std::size_t> starts_;
};

SliceAssignment make_slice_assignment(std::size_t d, std::size_t fragments);

/// kappa for the frequency domain: band k (0-based) covers bins
/// [edges[k], edges[k+1]). Bin 0 belongs to no band.
class BandAssignment {
 public:
  BandAssignment(std::size_t d, std::vector<std::size_t> edges);

  std::size_t length() const noexcept { return d_; }
  std::size_t fragments() const noexcept { return edges_.size() - 1; }
  std::span<const std::size_t> edges() const noexcept { return edges_; }
  std::size_t width(std::size_t k) const noexcept { return edges_[k + 1] - edges_[k]; }
  /// Band of bin w, or nullopt for the DC bin.
  std::optional<std::size_t> band(std::size_t bin) const noexcept;

 private:
  std::size_t d_;
  std::vector<std::size_t> edges_;
};

/// Quadratically growing bands: interior edges 1 + round((d/2 - 1)(k/d')^2),
/// repaired to be strictly increasing, with widths then sorted ascending.
BandAssignment make_band_assignment(std::size_t d, std::size_t fragments);

/// Materialises a replacement series r of length d. Noise kinds and sample
/// draw from an RNG seeded with `seed`.
TimeSeries build_replacement(ReplacementKind kind, std::span<const TimeSeries> reference,
                             std::size_t d, std::uint64_t seed);

struct ReplacementStatistics {
  double mean;
  double stddev;
};

/// Population mean and standard deviation (divisor d).
ReplacementStatistics population_statistics(std::span<const double> values);

/// h_x: I' -> I. Immutable once built; evaluation is pure and thread-safe.
class MappingFunction {
 public:
  static MappingFunction time_slice(TimeSeries specimen, std::size_t fragments,
                                    TimeSeries replacement);
  static MappingFunction freq_patch(TimeSeries specimen, std::size_t fragments, TimeSeries patch);
  /// `filter_length` defaults to dsp::default_filter_length(d).
  static MappingFunction freq_filter(TimeSeries specimen, std::size_t fragments,
                                     std::optional<std::size_t> filter_length = std::nullopt);
  static MappingFunction statistics(TimeSeries specimen, ReplacementStatistics replacement);
  /// Replacement statistics taken from the replacement series.
  static MappingFunction statistics(TimeSeries specimen, const TimeSeries& replacement);

  MappingKind kind() const noexcept { return kind_; }
  std::size_t fragment_count() const noexcept { return fragments_; }
  const TimeSeries& specimen() const noexcept { return specimen_; }
  const std::optional<SliceAssignment>& slices() const noexcept { return slices_; }
  const std::optional<BandAssignment>& bands() const noexcept { return bands_; }
  const std::optional<TimeSeries>& replacement() const noexcept { return replacement_; }
  const std::optional<ReplacementStatistics>& replacement_statistics() const noexcept {
    return replacement_stats_;
  }
  /// Slice boundaries or band edges; empty for the statistics mapping.
  std::vector<std::size_t> fragment_edges() const;

  TimeSeries operator()(const SimplifiedInput& z) const;

 private:
  MappingFunction(MappingKind kind, TimeSeries specimen, std::size_t fragments);

  friend TimeSeries time_slice_map(const MappingFunction&, const SimplifiedInput&);
  friend TimeSeries freq_patch_map(const MappingFunction&, const SimplifiedInput&);
  friend TimeSeries freq_filter_map(const MappingFunction&, const SimplifiedInput&);
  friend TimeSeries statistics_map(const MappingFunction&, const SimplifiedInput&);

  MappingKind kind_;
  TimeSeries specimen_;
  std::size_t fragments_;
  std::optional<SliceAssignment> slices_;
  std::optional<BandAssignment> bands_;
  std::optional<TimeSeries> replacement_;
  std::optional<ReplacementStatistics> replacement_stats_;
  std::optional<dsp::Spectrum> specimen_spectrum_;
  std::optional<dsp::Spectrum> patch_spectrum_;
  std::optional<dsp::FirlsDesigner> designer_;
};

TimeSeries time_slice_map(const MappingFunction& h, const SimplifiedInput& z);
TimeSeries freq_patch_map(const MappingFunction& h, const SimplifiedInput& z);
TimeSeries freq_filter_map(const MappingFunction& h, const SimplifiedInput& z);
TimeSeries statistics_map(const MappingFunction& h, const SimplifiedInput& z);

/// Stop bands cut by the filter mapping for `z`: disabled bands, with runs of
/// adjacent disabled bands merged.
std::vector<dsp::StopBand> disabled_stop_bands(const BandAssignment& bands, const SimplifiedInput& z);

}  // namespace timexplain::mappings
