#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "timexplain/error.hpp"

namespace timexplain {

using ClassId = std::string;

/// Fixed-length, finite, real-valued series (length >= 2).
class TimeSeries {
 public:
  explicit TimeSeries(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t t) const noexcept { return values_[t]; }

  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  std::vector<double> values_;
};

/// Binary vector z' selecting which fragments are active.
class SimplifiedInput {
 public:
  explicit SimplifiedInput(std::vector<std::uint8_t> bits);

  static SimplifiedInput ones(std::size_t fragments);
  static SimplifiedInput zeros(std::size_t fragments);
  /// Parses a string of '0'/'1' characters.
  static SimplifiedInput parse(std::string_view bits);

  std::size_t size() const noexcept { return bits_.size(); }
  bool active(std::size_t k) const noexcept { return bits_[k] != 0; }
  std::size_t count() const noexcept;
  bool all_ones() const noexcept { return count() == size(); }
  bool all_zeros() const noexcept { return count() == 0; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  SimplifiedInput complement() const;
  std::string to_string() const;

  friend bool operator==(const SimplifiedInput&, const SimplifiedInput&) = default;
  friend auto operator<=>(const SimplifiedInput&, const SimplifiedInput&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Reference set S of equal-length series with optional class labels.
class LabeledDataset {
 public:
  LabeledDataset(std::vector<TimeSeries> series,
                 std::optional<std::vector<ClassId>> labels = std::nullopt);

  std::size_t size() const noexcept { return series_.size(); }
  bool empty() const noexcept { return series_.empty(); }
  /// Common series length d (0 for an empty dataset).
  std::size_t length() const noexcept;
  const std::vector<TimeSeries>& series() const noexcept { return series_; }
  const TimeSeries& operator[](std::size_t i) const noexcept { return series_[i]; }

  bool has_labels() const noexcept { return labels_.has_value(); }
  const std::vector<ClassId>& labels() const;
  const ClassId& label(std::size_t i) const { return labels().at(i); }

  /// Distinct classes in lexicographic order.
  std::vector<ClassId> classes() const;
  /// S^c: the series whose label equals `cls`, in original order.
  LabeledDataset partition(const ClassId& cls) const;

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;

 private:
  std::vector<TimeSeries> series_;
  std::optional<std::vector<ClassId>> labels_;
};

/// Tolerance on |sum(phi) - (prediction - base_value)|.
inline constexpr double kAdditivityTolerance = 1e-8;

/// Coefficients of the local linear explanation model with its intercept
/// f(h_x(0)) and the explained prediction f(x).
class ImpactVector {
 public:
  ImpactVector(std::vector<double> phi, double base_value, double prediction);

  std::span<const double> phi() const noexcept { return phi_; }
  double phi(std::size_t k) const noexcept { return phi_[k]; }
  double base_value() const noexcept { return base_value_; }
  double prediction() const noexcept { return prediction_; }
  std::size_t fragment_count() const noexcept { return phi_.size(); }

  /// |sum(phi) - (prediction - base_value)|.
  double additivity_gap() const noexcept;
  /// Entrywise scaling of phi, base value and prediction.
  ImpactVector scaled(double factor) const;

  friend bool operator==(const ImpactVector&, const ImpactVector&) = default;

 private:
  std::vector<double> phi_;
  double base_value_;
  double prediction_;
};

/// Entrywise mean of equal-length impact vectors, summed in the given order.
ImpactVector mean_impact(std::span<const ImpactVector> vectors);

struct ClassExplanation {
  std::map<ClassId, ImpactVector> per_class;
  /// (c, c') -> phi^{c,c'}; present only when intermediates are retained.
  std::optional<std::map<std::pair<ClassId, ClassId>, ImpactVector>> intermediates;
};

LabeledDataset validate_dataset(const std::vector<std::vector<double>>& raw_series,
                                const std::optional<std::vector<ClassId>>& raw_labels = std::nullopt);

}  // namespace timexplain
