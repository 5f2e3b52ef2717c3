#include "timexplain/shap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>

#include <Eigen/Dense>

#include "timexplain/random.hpp"

namespace timexplain::shap {

namespace {

constexpr double kRidge = 1e-10;
constexpr std::size_t kMaxExactFragments = 20;

double log_binomial(std::size_t n, std::size_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

}  // namespace

double shapley_kernel_weight(std::size_t fragments, std::size_t size) {
  if (size == 0 || size >= fragments) {
    throw Error(ErrorKind::DegenerateCoalition,
                "coalition size " + std::to_string(size) + " of " + std::to_string(fragments) +
                    " has infinite kernel weight");
  }
  const auto s = static_cast<double>(size);
  const auto m = static_cast<double>(fragments);
  return (m - 1.0) / (std::exp(log_binomial(fragments, size)) * s * (m - s));
}

CoalitionSample sample_coalitions(std::size_t fragments, std::size_t budget, std::uint64_t seed) {
  if (fragments < 1) throw Error(ErrorKind::InvalidArgument, "need at least one fragment");
  if (budget < 2) throw Error(ErrorKind::InvalidArgument, "coalition budget must be >= 2");

  CoalitionSample sample;
  sample.fragments = fragments;
  if (fragments < 63 && (std::uint64_t{1} << fragments) - 2 <= budget) {
    sample.exact = true;
    const std::uint64_t full = (std::uint64_t{1} << fragments) - 1;
    for (std::uint64_t mask = 1; mask < full; ++mask) {
      std::vector<std::uint8_t> bits(fragments);
      for (std::size_t k = 0; k < fragments; ++k) bits[k] = static_cast<std::uint8_t>((mask >> k) & 1U);
      sample.coalitions.emplace_back(std::move(bits));
      sample.weights.push_back(
          shapley_kernel_weight(fragments, static_cast<std::size_t>(std::popcount(mask))));
    }
    return sample;
  }

  // Size s is drawn with probability proportional to C(d', s) pi(s), which
  // is proportional to 1 / (s (d' - s)).
  std::vector<double> size_mass(fragments - 1);
  for (std::size_t s = 1; s < fragments; ++s) {
    size_mass[s - 1] = 1.0 / (static_cast<double>(s) * static_cast<double>(fragments - s));
  }
  std::discrete_distribution<std::size_t> size_dist(size_mass.begin(), size_mass.end());
  Rng rng(seed);

  const std::size_t target = budget - budget % 2;
  const std::size_t max_draws = 100 * budget + 1000;
  std::map<SimplifiedInput, std::size_t> index;
  std::vector<std::size_t> order(fragments);

  auto add = [&](SimplifiedInput z) {
    auto [it, inserted] = index.try_emplace(z, sample.coalitions.size());
    if (inserted) {
      sample.coalitions.push_back(std::move(z));
      sample.weights.push_back(1.0);
    } else {
      sample.weights[it->second] += 1.0;
    }
  };

  for (std::size_t draw = 0; draw < max_draws && sample.coalitions.size() < target; ++draw) {
    const std::size_t size = size_dist(rng) + 1;
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::uint8_t> bits(fragments, 0);
    for (std::size_t i = 0; i < size; ++i) bits[order[i]] = 1;
    SimplifiedInput z(std::move(bits));
    auto complement = z.complement();
    add(std::move(z));
    add(std::move(complement));
  }
  return sample;
}

std::uint64_t coalition_mask(const SimplifiedInput& z) {
  if (z.size() > 64) throw Error(ErrorKind::TooManyFragments, "mask needs at most 64 fragments");
  std::uint64_t mask = 0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (z.active(k)) mask |= std::uint64_t{1} << k;
  }
  return mask;
}

std::vector<ImpactVector> solve_explanations(const CoalitionSample& sample,
                                             std::span<const double> outputs,
                                             std::span<const double> fx,
                                             std::span<const double> f0) {
  const std::size_t columns = fx.size();
  if (f0.size() != columns || outputs.size() != sample.coalitions.size() * columns ||
      sample.weights.size() != sample.coalitions.size()) {
    throw Error(ErrorKind::DimensionMismatch, "coalition sample and model outputs disagree in size");
  }
  if (columns == 0) return {};

  const std::size_t fragments = sample.fragments;
  if (fragments < 1) throw Error(ErrorKind::InvalidArgument, "coalition sample has no fragments");

  // Merge identical coalitions, summing their weights.
  std::map<SimplifiedInput, std::size_t> index;
  std::vector<std::size_t> first_row;
  std::vector<double> merged_weight;
  for (std::size_t i = 0; i < sample.coalitions.size(); ++i) {
    const auto& z = sample.coalitions[i];
    if (z.size() != fragments) {
      throw Error(ErrorKind::DimensionMismatch, "coalitions differ in fragment count");
    }
    if (z.all_ones() || z.all_zeros()) {
      throw Error(ErrorKind::DegenerateCoalition,
                  "all-ones and all-zeros coalitions are constraints, not samples");
    }
    if (!(sample.weights[i] > 0.0) || !std::isfinite(sample.weights[i])) {
      throw Error(ErrorKind::InvalidArgument, "coalition weights must be finite and positive");
    }
    auto [it, inserted] = index.try_emplace(z, first_row.size());
    if (inserted) {
      first_row.push_back(i);
      merged_weight.push_back(sample.weights[i]);
    } else {
      merged_weight[it->second] += sample.weights[i];
    }
  }

  std::vector<ImpactVector> result;
  result.reserve(columns);

  if (fragments == 1) {
    // No free coefficients: the constraint fixes phi.
    for (std::size_t c = 0; c < columns; ++c) result.emplace_back(std::vector<double>{fx[c] - f0[c]}, f0[c], fx[c]);
    return result;
  }

  const auto rows = static_cast<Eigen::Index>(first_row.size());
  const auto free = static_cast<Eigen::Index>(fragments - 1);
  const double weight_total = std::accumulate(merged_weight.begin(), merged_weight.end(), 0.0);

  // phi_last = delta - sum(others); columns of X are z_k - z_last.
  Eigen::MatrixXd design(rows, free);
  Eigen::VectorXd weights(rows);
  Eigen::VectorXd last(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& z = sample.coalitions[first_row[static_cast<std::size_t>(r)]];
    const double z_last = z.active(fragments - 1) ? 1.0 : 0.0;
    last(r) = z_last;
    for (Eigen::Index k = 0; k < free; ++k) {
      design(r, k) = (z.active(static_cast<std::size_t>(k)) ? 1.0 : 0.0) - z_last;
    }
    weights(r) = merged_weight[static_cast<std::size_t>(r)] / weight_total;
  }

  const Eigen::MatrixXd weighted = weights.cwiseSqrt().asDiagonal() * design;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(weighted);
  qr.setThreshold(1e-10);
  if (rows < free || qr.rank() < free) {
    throw Error(ErrorKind::RankDeficient,
                std::to_string(rows) + " distinct coalitions cannot determine " +
                    std::to_string(fragments) + " impacts");
  }

  Eigen::MatrixXd normal = design.transpose() * weights.asDiagonal() * design;
  normal.diagonal().array() += kRidge;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);

  for (std::size_t c = 0; c < columns; ++c) {
    const double delta = fx[c] - f0[c];
    Eigen::VectorXd target(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const std::size_t row = first_row[static_cast<std::size_t>(r)];
      target(r) = outputs[row * columns + c] - f0[c] - last(r) * delta;
    }
    const Eigen::VectorXd rhs = design.transpose() * weights.asDiagonal() * target;
    const Eigen::VectorXd beta = ldlt.solve(rhs);

    std::vector<double> phi(fragments);
    double partial = 0.0;
    for (Eigen::Index k = 0; k < free; ++k) {
      phi[static_cast<std::size_t>(k)] = beta(k);
      partial += beta(k);
    }
    phi[fragments - 1] = delta - partial;
    result.emplace_back(std::move(phi), f0[c], fx[c]);
  }
  return result;
}

ImpactVector solve_explanation(const CoalitionSample& sample, std::span<const double> outputs,
                               double fx, double f0) {
  const double fx_arr[] = {fx};
  const double f0_arr[] = {f0};
  auto all = solve_explanations(sample, outputs, fx_arr, f0_arr);
  return std::move(all.front());
}

ImpactVector exact_shapley(std::span<const double> values) {
  if (values.size() < 2 || !std::has_single_bit(values.size())) {
    throw Error(ErrorKind::InvalidArgument, "need one value per coalition (2^d' entries)");
  }
  const auto fragments = static_cast<std::size_t>(std::countr_zero(values.size()));
  if (fragments > kMaxExactFragments) {
    throw Error(ErrorKind::TooManyFragments,
                std::to_string(fragments) + " fragments exceed the enumeration limit of " +
                    std::to_string(kMaxExactFragments));
  }
  // weight[s] = s! (d' - s - 1)! / d'!
  std::vector<double> weight(fragments);
  for (std::size_t s = 0; s < fragments; ++s) {
    weight[s] = std::exp(std::lgamma(static_cast<double>(s) + 1.0) +
                         std::lgamma(static_cast<double>(fragments - s)) -
                         std::lgamma(static_cast<double>(fragments) + 1.0));
  }
  std::vector<double> phi(fragments, 0.0);
  for (std::size_t k = 0; k < fragments; ++k) {
    const std::uint64_t bit = std::uint64_t{1} << k;
    for (std::uint64_t mask = 0; mask < values.size(); ++mask) {
      if (mask & bit) continue;
      phi[k] += weight[static_cast<std::size_t>(std::popcount(mask))] *
                (values[mask | bit] - values[mask]);
    }
  }
  // Efficiency holds analytically; absorb rounding so the vector validates.
  const double target = values.back() - values.front();
  const double drift = target - std::accumulate(phi.begin(), phi.end(), 0.0);
  for (auto& p : phi) p += drift / static_cast<double>(fragments);
  return ImpactVector(std::move(phi), values.front(), values.back());
}

}  // namespace timexplain::shap
