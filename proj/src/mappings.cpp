#include "timexplain/mappings.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "timexplain/random.hpp"

namespace timexplain::mappings {

std::string_view to_string(MappingKind kind) noexcept {
  switch (kind) {
    case MappingKind::TimeSlice: return "time_slice";
    case MappingKind::FreqFilter: return "freq_filter";
    case MappingKind::FreqPatch: return "freq_patch";
    case MappingKind::Statistics: return "statistics";
  }
  return "unknown";
}

std::string_view to_string(ReplacementKind kind) noexcept {
  switch (kind) {
    case ReplacementKind::Zero: return "zero";
    case ReplacementKind::LocalMean: return "local_mean";
    case ReplacementKind::GlobalMean: return "global_mean";
    case ReplacementKind::LocalNoise: return "local_noise";
    case ReplacementKind::GlobalNoise: return "global_noise";
    case ReplacementKind::Sample: return "sample";
  }
  return "unknown";
}

namespace {

std::string normalized(std::string_view text) {
  std::string out(text);
  std::replace(out.begin(), out.end(), '-', '_');
  return out;
}

}  // namespace

MappingKind parse_mapping_kind(std::string_view text) {
  const auto name = normalized(text);
  for (auto kind : {MappingKind::TimeSlice, MappingKind::FreqFilter, MappingKind::FreqPatch,
                    MappingKind::Statistics}) {
    if (name == to_string(kind)) return kind;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown mapping '" + std::string(text) + "'");
}

ReplacementKind parse_replacement_kind(std::string_view text) {
  const auto name = normalized(text);
  for (auto kind : {ReplacementKind::Zero, ReplacementKind::LocalMean, ReplacementKind::GlobalMean,
                    ReplacementKind::LocalNoise, ReplacementKind::GlobalNoise,
                    ReplacementKind::Sample}) {
    if (name == to_string(kind)) return kind;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown replacement '" + std::string(text) + "'");
}

SliceAssignment::SliceAssignment(std::size_t d, std::size_t fragments) {
  if (fragments < 1 || fragments > d) {
    throw Error(ErrorKind::FragmentCountOutOfRange,
                "slice count " + std::to_string(fragments) + " outside [1, " + std::to_string(d) +
                    "]");
  }
  const std::size_t base = d / fragments;
  const std::size_t longer = d % fragments;
  slice_of_.reserve(d);
  starts_.reserve(fragments + 1);
  for (std::size_t k = 0; k < fragments; ++k) {
    starts_.push_back(slice_of_.size());
    const std::size_t len = base + (k < longer ? 1 : 0);
    slice_of_.insert(slice_of_.end(), len, k);
  }
  starts_.push_back(d);
}

SliceAssignment make_slice_assignment(std::size_t d, std::size_t fragments) {
  return SliceAssignment(d, fragments);
}

BandAssignment::BandAssignment(std::size_t d, std::vector<std::size_t> edges)
    : d_(d), edges_(std::move(edges)) {
  if (edges_.size() < 2 || edges_.front() != 1 || edges_.back() != d / 2 + 1) {
    throw Error(ErrorKind::InvalidArgument, "band edges must run from bin 1 to floor(d/2) + 1");
  }
  for (std::size_t k = 1; k < edges_.size(); ++k) {
    if (edges_[k] <= edges_[k - 1]) {
      throw Error(ErrorKind::InvalidArgument, "band edges must be strictly increasing");
    }
  }
}

std::optional<std::size_t> BandAssignment::band(std::size_t bin) const noexcept {
  if (bin == 0 || bin >= edges_.back()) return std::nullopt;
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), bin);
  return static_cast<std::size_t>(it - edges_.begin()) - 1;
}

BandAssignment make_band_assignment(std::size_t d, std::size_t fragments) {
  const std::size_t bins = d / 2;
  if (fragments < 1 || fragments > bins) {
    throw Error(ErrorKind::FragmentCountOutOfRange,
                "band count " + std::to_string(fragments) + " outside [1, " +
                    std::to_string(bins) + "]");
  }
  std::vector<std::size_t> edges(fragments + 1);
  edges.front() = 1;
  edges.back() = bins + 1;
  const auto span = static_cast<double>(bins - 1);
  for (std::size_t k = 1; k < fragments; ++k) {
    const double ratio = static_cast<double>(k) / static_cast<double>(fragments);
    edges[k] = 1 + static_cast<std::size_t>(std::lround(span * ratio * ratio));
  }
  for (std::size_t k = 1; k <= fragments; ++k) {
    if (edges[k] <= edges[k - 1]) edges[k] = edges[k - 1] + 1;
  }
  // Rounding can leave a narrower band after a wider one.
  std::vector<std::size_t> widths(fragments);
  for (std::size_t k = 0; k < fragments; ++k) widths[k] = edges[k + 1] - edges[k];
  std::sort(widths.begin(), widths.end());
  for (std::size_t k = 0; k < fragments; ++k) edges[k + 1] = edges[k] + widths[k];
  return BandAssignment(d, std::move(edges));
}

ReplacementStatistics population_statistics(std::span<const double> values) {
  const auto n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / n)};
}

TimeSeries build_replacement(ReplacementKind kind, std::span<const TimeSeries> reference,
                             std::size_t d, std::uint64_t seed) {
  if (kind == ReplacementKind::Zero) return TimeSeries(std::vector<double>(d, 0.0));
  if (reference.empty()) {
    throw Error(ErrorKind::EmptyReference,
                std::string(to_string(kind)) + " replacement needs a non-empty reference set");
  }
  for (const auto& s : reference) {
    if (s.size() != d) {
      throw Error(ErrorKind::DimensionMismatch,
                  "reference series length " + std::to_string(s.size()) +
                      " differs from specimen length " + std::to_string(d));
    }
  }
  const auto count = static_cast<double>(reference.size());
  Rng rng(seed);

  if (kind == ReplacementKind::Sample) {
    std::uniform_int_distribution<std::size_t> pick(0, reference.size() - 1);
    return reference[pick(rng)];
  }

  std::vector<double> local_mean(d, 0.0);
  for (const auto& s : reference) {
    for (std::size_t t = 0; t < d; ++t) local_mean[t] += s[t];
  }
  for (auto& v : local_mean) v /= count;

  switch (kind) {
    case ReplacementKind::LocalMean:
      return TimeSeries(std::move(local_mean));

    case ReplacementKind::LocalNoise: {
      if (reference.size() < 2) {
        throw Error(ErrorKind::VarianceUndefined, "local noise needs at least 2 reference series");
      }
      std::vector<double> out(d);
      for (std::size_t t = 0; t < d; ++t) {
        double ss = 0.0;
        for (const auto& s : reference) ss += (s[t] - local_mean[t]) * (s[t] - local_mean[t]);
        const double sigma = std::sqrt(ss / (count - 1.0));
        std::normal_distribution<double> noise(local_mean[t], sigma);
        out[t] = sigma > 0.0 ? noise(rng) : local_mean[t];
      }
      return TimeSeries(std::move(out));
    }

    case ReplacementKind::GlobalMean:
    case ReplacementKind::GlobalNoise: {
      const double total = static_cast<double>(d) * count;
      double grand = 0.0;
      for (const auto& s : reference) grand = std::accumulate(s.begin(), s.end(), grand);
      grand /= total;
      if (kind == ReplacementKind::GlobalMean) return TimeSeries(std::vector<double>(d, grand));
      if (total < 2.0) {
        throw Error(ErrorKind::VarianceUndefined, "global noise needs at least 2 values");
      }
      double ss = 0.0;
      for (const auto& s : reference) {
        for (double v : s) ss += (v - grand) * (v - grand);
      }
      const double sigma = std::sqrt(ss / (total - 1.0));
      std::vector<double> out(d, grand);
      if (sigma > 0.0) {
        std::normal_distribution<double> noise(grand, sigma);
        for (auto& v : out) v = noise(rng);
      }
      return TimeSeries(std::move(out));
    }

    default:
      break;
  }
  throw Error(ErrorKind::InvalidArgument, "unhandled replacement kind");
}

MappingFunction::MappingFunction(MappingKind kind, TimeSeries specimen, std::size_t fragments)
    : kind_(kind), specimen_(std::move(specimen)), fragments_(fragments) {}

MappingFunction MappingFunction::time_slice(TimeSeries specimen, std::size_t fragments,
                                            TimeSeries replacement) {
  if (replacement.size() != specimen.size()) {
    throw Error(ErrorKind::DimensionMismatch, "replacement length differs from specimen length");
  }
  MappingFunction h(MappingKind::TimeSlice, std::move(specimen), fragments);
  h.slices_ = make_slice_assignment(h.specimen_.size(), fragments);
  h.replacement_ = std::move(replacement);
  return h;
}

MappingFunction MappingFunction::freq_patch(TimeSeries specimen, std::size_t fragments,
                                            TimeSeries patch) {
  if (patch.size() != specimen.size()) {
    throw Error(ErrorKind::DimensionMismatch, "patch length differs from specimen length");
  }
  MappingFunction h(MappingKind::FreqPatch, std::move(specimen), fragments);
  h.bands_ = make_band_assignment(h.specimen_.size(), fragments);
  h.specimen_spectrum_ = dsp::rdft(h.specimen_);
  h.patch_spectrum_ = dsp::rdft(patch);
  h.replacement_ = std::move(patch);
  return h;
}

MappingFunction MappingFunction::freq_filter(TimeSeries specimen, std::size_t fragments,
                                             std::optional<std::size_t> filter_length) {
  MappingFunction h(MappingKind::FreqFilter, std::move(specimen), fragments);
  const std::size_t d = h.specimen_.size();
  h.bands_ = make_band_assignment(d, fragments);
  const std::size_t length = filter_length.value_or(dsp::default_filter_length(d));
  if (length > d) {
    throw Error(ErrorKind::FilterLongerThanSeries,
                "filter length " + std::to_string(length) + " exceeds series length " +
                    std::to_string(d));
  }
  h.designer_.emplace(d, length);
  return h;
}

MappingFunction MappingFunction::statistics(TimeSeries specimen, ReplacementStatistics replacement) {
  if (!std::isfinite(replacement.mean) || !std::isfinite(replacement.stddev) ||
      replacement.stddev < 0.0) {
    throw Error(ErrorKind::InvalidArgument, "replacement statistics must be finite, stddev >= 0");
  }
  MappingFunction h(MappingKind::Statistics, std::move(specimen), 2);
  h.replacement_stats_ = replacement;
  return h;
}

MappingFunction MappingFunction::statistics(TimeSeries specimen, const TimeSeries& replacement) {
  auto h = statistics(std::move(specimen), population_statistics(replacement.values()));
  h.replacement_ = replacement;
  return h;
}

std::vector<std::size_t> MappingFunction::fragment_edges() const {
  if (slices_) return {slices_->boundaries().begin(), slices_->boundaries().end()};
  if (bands_) return {bands_->edges().begin(), bands_->edges().end()};
  return {};
}

TimeSeries MappingFunction::operator()(const SimplifiedInput& z) const {
  switch (kind_) {
    case MappingKind::TimeSlice: return time_slice_map(*this, z);
    case MappingKind::FreqFilter: return freq_filter_map(*this, z);
    case MappingKind::FreqPatch: return freq_patch_map(*this, z);
    case MappingKind::Statistics: return statistics_map(*this, z);
  }
  throw Error(ErrorKind::InvalidArgument, "unhandled mapping kind");
}

namespace {

void check_dimension(const MappingFunction& h, const SimplifiedInput& z, MappingKind expected) {
  if (h.kind() != expected) {
    throw Error(ErrorKind::InvalidArgument,
                "mapping is " + std::string(to_string(h.kind())) + ", not " +
                    std::string(to_string(expected)));
  }
  if (z.size() != h.fragment_count()) {
    throw Error(ErrorKind::DimensionMismatch,
                "simplified input has " + std::to_string(z.size()) + " entries, mapping has " +
                    std::to_string(h.fragment_count()) + " fragments");
  }
}

}  // namespace

TimeSeries time_slice_map(const MappingFunction& h, const SimplifiedInput& z) {
  check_dimension(h, z, MappingKind::TimeSlice);
  const auto& x = h.specimen_;
  const auto& r = *h.replacement_;
  std::vector<double> out(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    out[t] = z.active(h.slices_->slice(t)) ? x[t] : r[t];
  }
  return TimeSeries(std::move(out));
}

TimeSeries freq_patch_map(const MappingFunction& h, const SimplifiedInput& z) {
  check_dimension(h, z, MappingKind::FreqPatch);
  const auto& x_bins = *h.specimen_spectrum_;
  const auto& r_bins = *h.patch_spectrum_;
  std::vector<std::complex<double>> mixed(x_bins.size());
  mixed[0] = x_bins[0];
  for (std::size_t w = 1; w < mixed.size(); ++w) {
    mixed[w] = z.active(*h.bands_->band(w)) ? x_bins[w] : r_bins[w];
  }
  return dsp::irdft(dsp::Spectrum(std::move(mixed), h.specimen_.size()));
}

std::vector<dsp::StopBand> disabled_stop_bands(const BandAssignment& bands,
                                               const SimplifiedInput& z) {
  std::vector<dsp::StopBand> stops;
  const auto edges = bands.edges();
  for (std::size_t k = 0; k < bands.fragments(); ++k) {
    if (z.active(k)) continue;
    const std::size_t low = edges[k];
    const std::size_t high = edges[k + 1] - 1;
    if (!stops.empty() && stops.back().high + 1 == low) {
      stops.back().high = high;
    } else {
      stops.push_back({low, high});
    }
  }
  return stops;
}

TimeSeries freq_filter_map(const MappingFunction& h, const SimplifiedInput& z) {
  check_dimension(h, z, MappingKind::FreqFilter);
  if (z.all_ones()) return h.specimen_;
  const auto stops = disabled_stop_bands(*h.bands_, z);
  return dsp::apply_zero_phase(h.designer_->design(stops), h.specimen_);
}

TimeSeries statistics_map(const MappingFunction& h, const SimplifiedInput& z) {
  check_dimension(h, z, MappingKind::Statistics);
  if (z.all_ones()) return h.specimen_;
  const auto& x = h.specimen_;
  const auto own = population_statistics(x.values());
  const auto& repl = *h.replacement_stats_;

  const double target_mean = z.active(0) ? own.mean : repl.mean;
  double scale = 1.0;
  if (!z.active(1)) {
    if (own.stddev == 0.0) {
      throw Error(ErrorKind::ZeroVariance,
                  "cannot replace the standard deviation of a constant specimen");
    }
    scale = repl.stddev / own.stddev;
  }
  std::vector<double> out(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) out[t] = (x[t] - own.mean) * scale + target_mean;
  return TimeSeries(std::move(out));
}

}  // namespace timexplain::mappings
