#include "timexplain/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace timexplain {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidLength: return "InvalidLength";
    case ErrorKind::NonUniformLength: return "NonUniformLength";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::LabelCountMismatch: return "LabelCountMismatch";
    case ErrorKind::AdditivityViolation: return "AdditivityViolation";
    case ErrorKind::OverlappingBands: return "OverlappingBands";
    case ErrorKind::BandOutOfRange: return "BandOutOfRange";
    case ErrorKind::SingularDesignSystem: return "SingularDesignSystem";
    case ErrorKind::InvalidFilterLength: return "InvalidFilterLength";
    case ErrorKind::FilterLongerThanSeries: return "FilterLongerThanSeries";
    case ErrorKind::FragmentCountOutOfRange: return "FragmentCountOutOfRange";
    case ErrorKind::EmptyReference: return "EmptyReference";
    case ErrorKind::VarianceUndefined: return "VarianceUndefined";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ZeroVariance: return "ZeroVariance";
    case ErrorKind::DegenerateCoalition: return "DegenerateCoalition";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::TooManyFragments: return "TooManyFragments";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::MissingLabels: return "MissingLabels";
    case ErrorKind::EmptyClass: return "EmptyClass";
    case ErrorKind::AllUndefined: return "AllUndefined";
    case ErrorKind::IncompatibleExplanations: return "IncompatibleExplanations";
    case ErrorKind::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ProtocolViolation: return "ProtocolViolation";
    case ErrorKind::Timeout: return "Timeout";
    case ErrorKind::ProcessExit: return "ProcessExit";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

TimeSeries::TimeSeries(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) {
    throw Error(ErrorKind::InvalidLength,
                "time series needs at least 2 samples, got " + std::to_string(values_.size()));
  }
  for (std::size_t t = 0; t < values_.size(); ++t) {
    if (!std::isfinite(values_[t])) {
      throw Error(ErrorKind::NonFiniteValue, "non-finite value at index " + std::to_string(t));
    }
  }
}

SimplifiedInput::SimplifiedInput(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  if (bits_.empty()) {
    throw Error(ErrorKind::InvalidLength, "simplified input needs at least one fragment");
  }
  for (auto b : bits_) {
    if (b > 1) {
      throw Error(ErrorKind::InvalidArgument, "simplified input entries must be 0 or 1");
    }
  }
}

SimplifiedInput SimplifiedInput::ones(std::size_t fragments) {
  return SimplifiedInput(std::vector<std::uint8_t>(fragments, 1));
}

SimplifiedInput SimplifiedInput::zeros(std::size_t fragments) {
  return SimplifiedInput(std::vector<std::uint8_t>(fragments, 0));
}

SimplifiedInput SimplifiedInput::parse(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char ch : text) {
    if (ch != '0' && ch != '1') {
      throw Error(ErrorKind::InvalidArgument, "mask may only contain '0' and '1'");
    }
    bits.push_back(static_cast<std::uint8_t>(ch - '0'));
  }
  return SimplifiedInput(std::move(bits));
}

std::size_t SimplifiedInput::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

SimplifiedInput SimplifiedInput::complement() const {
  std::vector<std::uint8_t> flipped(bits_.size());
  std::transform(bits_.begin(), bits_.end(), flipped.begin(),
                 [](std::uint8_t b) { return static_cast<std::uint8_t>(1 - b); });
  return SimplifiedInput(std::move(flipped));
}

std::string SimplifiedInput::to_string() const {
  std::string out;
  out.reserve(bits_.size());
  for (auto b : bits_) out.push_back(static_cast<char>('0' + b));
  return out;
}

LabeledDataset::LabeledDataset(std::vector<TimeSeries> series,
                               std::optional<std::vector<ClassId>> labels)
    : series_(std::move(series)), labels_(std::move(labels)) {
  for (std::size_t i = 1; i < series_.size(); ++i) {
    if (series_[i].size() != series_[0].size()) {
      throw Error(ErrorKind::NonUniformLength,
                  "series " + std::to_string(i) + " has length " +
                      std::to_string(series_[i].size()) + ", expected " +
                      std::to_string(series_[0].size()));
    }
  }
  if (labels_ && labels_->size() != series_.size()) {
    throw Error(ErrorKind::LabelCountMismatch,
                std::to_string(labels_->size()) + " labels for " +
                    std::to_string(series_.size()) + " series");
  }
}

std::size_t LabeledDataset::length() const noexcept {
  return series_.empty() ? 0 : series_.front().size();
}

const std::vector<ClassId>& LabeledDataset::labels() const {
  if (!labels_) throw Error(ErrorKind::MissingLabels, "dataset has no labels");
  return *labels_;
}

std::vector<ClassId> LabeledDataset::classes() const {
  const std::set<ClassId> unique(labels().begin(), labels().end());
  return {unique.begin(), unique.end()};
}

LabeledDataset LabeledDataset::partition(const ClassId& cls) const {
  std::vector<TimeSeries> members;
  std::vector<ClassId> member_labels;
  const auto& all = labels();
  for (std::size_t i = 0; i < series_.size(); ++i) {
    if (all[i] == cls) {
      members.push_back(series_[i]);
      member_labels.push_back(cls);
    }
  }
  return LabeledDataset(std::move(members), std::move(member_labels));
}

ImpactVector::ImpactVector(std::vector<double> phi, double base_value, double prediction)
    : phi_(std::move(phi)), base_value_(base_value), prediction_(prediction) {
  if (phi_.empty()) {
    throw Error(ErrorKind::InvalidLength, "impact vector needs at least one fragment");
  }
  if (!std::isfinite(base_value_) || !std::isfinite(prediction_) ||
      !std::all_of(phi_.begin(), phi_.end(), [](double v) { return std::isfinite(v); })) {
    throw Error(ErrorKind::NonFiniteValue, "impact vector contains a non-finite value");
  }
  const double scale = std::max({1.0, std::abs(prediction_), std::abs(base_value_)});
  if (additivity_gap() > kAdditivityTolerance * scale) {
    throw Error(ErrorKind::AdditivityViolation,
                "sum of impacts differs from prediction - base value by " +
                    std::to_string(additivity_gap()));
  }
}

double ImpactVector::additivity_gap() const noexcept {
  const double total = std::accumulate(phi_.begin(), phi_.end(), 0.0);
  return std::abs(total - (prediction_ - base_value_));
}

ImpactVector ImpactVector::scaled(double factor) const {
  std::vector<double> phi(phi_);
  for (auto& v : phi) v *= factor;
  return ImpactVector(std::move(phi), base_value_ * factor, prediction_ * factor);
}

ImpactVector mean_impact(std::span<const ImpactVector> vectors) {
  if (vectors.empty()) {
    throw Error(ErrorKind::InvalidArgument, "cannot average zero impact vectors");
  }
  const std::size_t fragments = vectors.front().fragment_count();
  std::vector<double> phi(fragments, 0.0);
  double base = 0.0;
  double prediction = 0.0;
  for (const auto& v : vectors) {
    if (v.fragment_count() != fragments) {
      throw Error(ErrorKind::DimensionMismatch, "impact vectors differ in fragment count");
    }
    for (std::size_t k = 0; k < fragments; ++k) phi[k] += v.phi(k);
    base += v.base_value();
    prediction += v.prediction();
  }
  const double inv = 1.0 / static_cast<double>(vectors.size());
  for (auto& p : phi) p *= inv;
  return ImpactVector(std::move(phi), base * inv, prediction * inv);
}

LabeledDataset validate_dataset(const std::vector<std::vector<double>>& raw_series,
                                const std::optional<std::vector<ClassId>>& raw_labels) {
  if (raw_series.empty()) {
    throw Error(ErrorKind::EmptyReference, "dataset contains no series");
  }
  for (std::size_t i = 1; i < raw_series.size(); ++i) {
    if (raw_series[i].size() != raw_series[0].size()) {
      throw Error(ErrorKind::NonUniformLength,
                  "series " + std::to_string(i) + " has length " +
                      std::to_string(raw_series[i].size()) + ", expected " +
                      std::to_string(raw_series[0].size()));
    }
  }
  std::vector<TimeSeries> series;
  series.reserve(raw_series.size());
  for (std::size_t i = 0; i < raw_series.size(); ++i) {
    try {
      series.emplace_back(raw_series[i]);
    } catch (const Error& e) {
      throw Error(e.kind(), "series " + std::to_string(i) + ": " + e.what());
    }
  }
  return LabeledDataset(std::move(series), raw_labels);
}

}  // namespace timexplain
