#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "timexplain/core.hpp"

namespace timexplain::models {

/// Row-major |rows| x |classes| probability table.
class ProbabilityMatrix {
 public:
  ProbabilityMatrix() = default;
  ProbabilityMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}
  ProbabilityMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const noexcept {
    return std::span<const double>(values_).subspan(r * cols_, cols_);
  }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const ProbabilityMatrix&, const ProbabilityMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

inline constexpr double kRowSumTolerance = 1e-9;
inline constexpr double kDistanceEpsilon = 1e-9;

/// Returns an empty string when every row is a probability vector (entries
/// in [0, 1], sums within kRowSumTolerance of 1), else a description.
std::string describe_probability_violation(const ProbabilityMatrix& probs);

/// Black-box classifier f: one probability per class for every input series.
/// Implementations must be pure and safe to call from several threads.
class ProbabilisticModel {
 public:
  virtual ~ProbabilisticModel() = default;

  virtual const std::vector<ClassId>& classes() const = 0;
  virtual ProbabilityMatrix predict(std::span<const TimeSeries> batch) const = 0;
};

/// Inverse-distance weighted k-nearest-neighbour vote under whole-series
/// Euclidean distance. Distance ties go to the lower training index.
class KnnModel final : public ProbabilisticModel {
 public:
  KnnModel(LabeledDataset train, std::size_t k);

  const std::vector<ClassId>& classes() const override { return classes_; }
  ProbabilityMatrix predict(std::span<const TimeSeries> batch) const override;
  std::size_t k() const noexcept { return k_; }

 private:
  LabeledDataset train_;
  std::size_t k_;
  std::vector<ClassId> classes_;
  std::vector<std::size_t> class_of_;
};

/// Nearest centroid over RDFT magnitude spectra with inverse-distance
/// weighting. Blind to circular shifts by construction.
class SpectrumCentroidModel final : public ProbabilisticModel {
 public:
  explicit SpectrumCentroidModel(const LabeledDataset& train);

  const std::vector<ClassId>& classes() const override { return classes_; }
  ProbabilityMatrix predict(std::span<const TimeSeries> batch) const override;
  std::span<const double> centroid(std::size_t cls) const { return centroids_.at(cls); }

 private:
  std::vector<ClassId> classes_;
  std::vector<std::vector<double>> centroids_;
  std::size_t length_;
};

/// |RDFT(x)| for each bin.
std::vector<double> magnitude_spectrum(const TimeSeries& x);

}  // namespace timexplain::models
