#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "timexplain/core.hpp"

namespace timexplain::shap {

/// Shapley kernel pi(s) = (d' - 1) / (C(d', s) s (d' - s)) for 1 <= s <= d' - 1.
double shapley_kernel_weight(std::size_t fragments, std::size_t size);

/// Proper coalitions (never all-ones or all-zeros) with their regression
/// weights. Exact mode enumerates every coalition with kernel weights; sampled
/// mode weights each unique coalition by how often it was drawn.
struct CoalitionSample {
  std::size_t fragments = 0;
  std::vector<SimplifiedInput> coalitions;
  std::vector<double> weights;
  bool exact = false;
};

/// Exact mode when 2^{d'} - 2 <= budget. Otherwise draws coalition sizes with
/// probability proportional to C(d', s) pi(s), emits each draw with its
/// complement and merges repeats, until `budget` distinct coalitions exist.
CoalitionSample sample_coalitions(std::size_t fragments, std::size_t budget, std::uint64_t seed);

/// Constrained weighted least squares: minimises
///   sum_i w_i (f_i - f0 - <phi, z_i>)^2  s.t.  sum(phi) = fx - f0.
/// `outputs[i]` is f(h_x(z_i)).
ImpactVector solve_explanation(const CoalitionSample& sample, std::span<const double> outputs,
                               double fx, double f0);

/// Same regression for several model outputs at once (one column per output),
/// sharing the factorisation. `outputs` is row-major |coalitions| x |fx|.
std::vector<ImpactVector> solve_explanations(const CoalitionSample& sample,
                                             std::span<const double> outputs,
                                             std::span<const double> fx,
                                             std::span<const double> f0);

/// Bit k of the returned mask is fragment k.
std::uint64_t coalition_mask(const SimplifiedInput& z);

/// Classic Shapley values by full enumeration. `values[mask]` is v of the
/// coalition whose active fragments are the set bits of `mask`; the size of
/// `values` must be 2^{d'} with d' <= 20.
ImpactVector exact_shapley(std::span<const double> values);

}  // namespace timexplain::shap
