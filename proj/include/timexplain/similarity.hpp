#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "timexplain/core.hpp"

namespace timexplain::similarity {

/// Pearson correlation over the correlation points (phi_k, psi_k). Returns
/// nullopt when either vector is constant.
std::optional<double> pearson_similarity(const ImpactVector& phi, const ImpactVector& psi);
std::optional<double> pearson_similarity(std::span<const double> phi, std::span<const double> psi);

/// Median of the defined coefficients; even counts average the central pair.
double median_similarity(std::span<const std::optional<double>> coefficients);

enum class Domain { Time, Frequency, Unspecified };

struct SimilarityMatrix {
  std::vector<std::string> models;
  /// Row-major |models| x |models|; NaN where no specimen gave a defined
  /// coefficient.
  std::vector<double> values;
  Domain domain = Domain::Unspecified;

  double operator()(std::size_t i, std::size_t j) const { return values[i * models.size() + j]; }
};

using ExplanationKey = std::pair<std::string, std::string>;  // (model, specimen)

/// Entry (m1, m2) is the median over specimens of pearson_similarity. Every
/// model must explain every specimen, with one d' per specimen.
SimilarityMatrix build_matrix(const std::map<ExplanationKey, ImpactVector>& explanations,
                              Domain domain = Domain::Unspecified);

/// Header row and first column hold the model identifiers.
std::string to_csv(const SimilarityMatrix& matrix);

}  // namespace timexplain::similarity
