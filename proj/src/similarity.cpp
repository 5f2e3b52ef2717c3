#include "timexplain/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "timexplain/io.hpp"

namespace timexplain::similarity {

std::optional<double> pearson_similarity(std::span<const double> phi, std::span<const double> psi) {
  if (phi.size() != psi.size()) {
    throw Error(ErrorKind::IncompatibleExplanations,
                "impact vectors have " + std::to_string(phi.size()) + " and " +
                    std::to_string(psi.size()) + " fragments");
  }
  if (phi.size() < 2) {
    throw Error(ErrorKind::IncompatibleExplanations, "correlation needs at least 2 fragments");
  }
  const double n = static_cast<double>(phi.size());
  double mean_a = 0.0;
  double mean_b = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    mean_a += phi[k];
    mean_b += psi[k];
  }
  mean_a /= n;
  mean_b /= n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const double a = phi[k] - mean_a;
    const double b = psi[k] - mean_b;
    sab += a * b;
    saa += a * a;
    sbb += b * b;
  }
  if (saa <= 0.0 || sbb <= 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::optional<double> pearson_similarity(const ImpactVector& phi, const ImpactVector& psi) {
  return pearson_similarity(phi.phi(), psi.phi());
}

double median_similarity(std::span<const std::optional<double>> coefficients) {
  std::vector<double> defined;
  for (const auto& c : coefficients) {
    if (c) defined.push_back(*c);
  }
  if (defined.empty()) throw Error(ErrorKind::AllUndefined, "no defined correlation coefficient");
  std::sort(defined.begin(), defined.end());
  const std::size_t mid = defined.size() / 2;
  if (defined.size() % 2 == 1) return defined[mid];
  return (defined[mid - 1] + defined[mid]) / 2.0;
}

SimilarityMatrix build_matrix(const std::map<ExplanationKey, ImpactVector>& explanations,
                              Domain domain) {
  std::set<std::string> model_set;
  std::set<std::string> specimen_set;
  for (const auto& [key, _] : explanations) {
    model_set.insert(key.first);
    specimen_set.insert(key.second);
  }
  SimilarityMatrix out;
  out.domain = domain;
  out.models.assign(model_set.begin(), model_set.end());
  const std::size_t m = out.models.size();
  out.values.assign(m * m, std::numeric_limits<double>::quiet_NaN());

  for (const auto& specimen : specimen_set) {
    std::optional<std::size_t> fragments;
    for (const auto& model : out.models) {
      const auto it = explanations.find({model, specimen});
      if (it == explanations.end()) {
        throw Error(ErrorKind::IncompatibleExplanations,
                    "model '" + model + "' has no explanation of specimen '" + specimen + "'");
      }
      if (fragments && *fragments != it->second.fragment_count()) {
        throw Error(ErrorKind::IncompatibleExplanations,
                    "specimen '" + specimen + "' is explained with " + std::to_string(*fragments) +
                        " and " + std::to_string(it->second.fragment_count()) + " fragments");
      }
      fragments = it->second.fragment_count();
    }
  }

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      std::vector<std::optional<double>> coefficients;
      for (const auto& specimen : specimen_set) {
        coefficients.push_back(pearson_similarity(explanations.at({out.models[i], specimen}),
                                                  explanations.at({out.models[j], specimen})));
      }
      const bool any = std::any_of(coefficients.begin(), coefficients.end(),
                                   [](const auto& c) { return c.has_value(); });
      const double median = any ? median_similarity(coefficients)
                                : std::numeric_limits<double>::quiet_NaN();
      out.values[i * m + j] = median;
      out.values[j * m + i] = median;
    }
  }
  return out;
}

std::string to_csv(const SimilarityMatrix& matrix) {
  std::string csv = "model";
  for (const auto& name : matrix.models) csv += "," + name;
  csv += "\n";
  const std::size_t m = matrix.models.size();
  for (std::size_t i = 0; i < m; ++i) {
    csv += matrix.models[i];
    for (std::size_t j = 0; j < m; ++j) {
      const double v = matrix(i, j);
      csv += ",";
      csv += std::isnan(v) ? std::string("nan") : io::to_text(v);
    }
    csv += "\n";
  }
  return csv;
}

}  // namespace timexplain::similarity
