#include "timexplain/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "timexplain/dsp.hpp"
#include "timexplain/kernels.hpp"

namespace timexplain::models {

ProbabilityMatrix::ProbabilityMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw Error(ErrorKind::DimensionMismatch, "probability matrix size mismatch");
  }
}

std::string describe_probability_violation(const ProbabilityMatrix& probs) {
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    double total = 0.0;
    for (double p : probs.row(r)) {
      if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
        return "row " + std::to_string(r) + " has an entry outside [0, 1]";
      }
      total += p;
    }
    if (std::abs(total - 1.0) > kRowSumTolerance) {
      return "row " + std::to_string(r) + " sums to " + std::to_string(total);
    }
  }
  return {};
}

namespace {

// Normalises inverse-distance weights accumulated per class into a row.
void normalise_row(ProbabilityMatrix& out, std::size_t row) {
  double total = 0.0;
  for (std::size_t c = 0; c < out.cols(); ++c) total += out(row, c);
  for (std::size_t c = 0; c < out.cols(); ++c) out(row, c) /= total;
}

void check_batch_length(std::span<const TimeSeries> batch, std::size_t length) {
  for (const auto& s : batch) {
    if (s.size() != length) {
      throw Error(ErrorKind::DimensionMismatch,
                  "input length " + std::to_string(s.size()) + " differs from training length " +
                      std::to_string(length));
    }
  }
}

}  // namespace

KnnModel::KnnModel(LabeledDataset train, std::size_t k) : train_(std::move(train)), k_(k) {
  if (train_.empty()) throw Error(ErrorKind::EmptyTrainingSet, "knn needs training series");
  if (k_ < 1 || k_ > train_.size()) {
    throw Error(ErrorKind::InvalidArgument,
                "k = " + std::to_string(k_) + " outside [1, " + std::to_string(train_.size()) + "]");
  }
  classes_ = train_.classes();
  class_of_.reserve(train_.size());
  for (const auto& label : train_.labels()) {
    class_of_.push_back(static_cast<std::size_t>(
        std::lower_bound(classes_.begin(), classes_.end(), label) - classes_.begin()));
  }
}

ProbabilityMatrix KnnModel::predict(std::span<const TimeSeries> batch) const {
  check_batch_length(batch, train_.length());
  const auto distances = kernels::euclidean_distances(batch, train_.series());
  const std::size_t n_train = train_.size();
  ProbabilityMatrix out(batch.size(), classes_.size());
  std::vector<std::size_t> order(n_train);
  for (std::size_t r = 0; r < batch.size(); ++r) {
    const double* row = distances.data() + r * n_train;
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k_), order.end(),
                      [row](std::size_t a, std::size_t b) {
                        return row[a] < row[b] || (row[a] == row[b] && a < b);
                      });
    for (std::size_t i = 0; i < k_; ++i) {
      const std::size_t j = order[i];
      out(r, class_of_[j]) += 1.0 / (row[j] + kDistanceEpsilon);
    }
    normalise_row(out, r);
  }
  return out;
}

std::vector<double> magnitude_spectrum(const TimeSeries& x) {
  const auto spectrum = dsp::rdft(x);
  std::vector<double> out(spectrum.size());
  for (std::size_t w = 0; w < spectrum.size(); ++w) out[w] = std::abs(spectrum[w]);
  return out;
}

SpectrumCentroidModel::SpectrumCentroidModel(const LabeledDataset& train)
    : length_(train.length()) {
  if (train.empty()) throw Error(ErrorKind::EmptyTrainingSet, "centroid model needs training series");
  classes_ = train.classes();
  for (const auto& cls : classes_) {
    const auto members = train.partition(cls);
    if (members.empty()) throw Error(ErrorKind::EmptyClass, "class " + cls + " has no series");
    std::vector<double> centroid(length_ / 2 + 1, 0.0);
    for (const auto& s : members.series()) {
      const auto mags = magnitude_spectrum(s);
      for (std::size_t w = 0; w < mags.size(); ++w) centroid[w] += mags[w];
    }
    for (auto& v : centroid) v /= static_cast<double>(members.size());
    centroids_.push_back(std::move(centroid));
  }
}

ProbabilityMatrix SpectrumCentroidModel::predict(std::span<const TimeSeries> batch) const {
  check_batch_length(batch, length_);
  ProbabilityMatrix out(batch.size(), classes_.size());
  const auto rows = static_cast<std::ptrdiff_t>(batch.size());

#pragma omp parallel for schedule(static) if (rows >= 8)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    const auto mags = magnitude_spectrum(batch[static_cast<std::size_t>(r)]);
    const auto row = static_cast<std::size_t>(r);
    for (std::size_t c = 0; c < centroids_.size(); ++c) {
      double acc = 0.0;
      for (std::size_t w = 0; w < mags.size(); ++w) {
        const double diff = mags[w] - centroids_[c][w];
        acc += diff * diff;
      }
      out(row, c) = 1.0 / (std::sqrt(acc) + kDistanceEpsilon);
    }
    normalise_row(out, row);
  }
  return out;
}

}  // namespace timexplain::models
