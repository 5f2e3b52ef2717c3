#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "timexplain/core.hpp"
#include "timexplain/mappings.hpp"
#include "timexplain/models.hpp"

namespace timexplain::explain {

inline constexpr std::size_t kDefaultRuns = 10;
inline constexpr std::size_t kDefaultBudget = 1000;
inline constexpr std::size_t kMaxAutoFragments = 30;

struct ExplainConfig {
  mappings::MappingKind mapping = mappings::MappingKind::TimeSlice;
  /// nullopt selects auto_fragments().
  std::optional<std::size_t> fragments;
  mappings::ReplacementKind replacement = mappings::ReplacementKind::Sample;
  std::size_t runs = kDefaultRuns;
  std::size_t budget = kDefaultBudget;
  std::uint64_t seed = 0;
  bool environment_classes = true;
  /// Filter length for the filter mapping; nullopt uses the dsp default.
  std::optional<std::size_t> filter_length;
  /// Keep phi^{c,c'} in the result.
  bool retain_intermediates = false;
  /// Worker threads for independent solver runs; 0 uses the OpenMP default.
  int threads = 0;
};

/// min(floor(d/5), 30) slices, min(floor(d/10), 30) bands, or 2 statistics,
/// clamped to the valid range of the mapping.
std::size_t auto_fragments(mappings::MappingKind kind, std::size_t d);

/// d' for `cfg` on series of length d; validates explicit counts.
std::size_t resolve_fragments(const ExplainConfig& cfg, std::size_t d);

/// Throws InvalidConfig when runs or budget are out of range.
void validate_config(const ExplainConfig& cfg);

/// Slice boundaries or band edges that d' fragments induce on length d.
std::vector<std::size_t> fragment_edges(mappings::MappingKind kind, std::size_t d,
                                        std::size_t fragments);

/// Vector-valued black box. `evaluate` returns a row-major
/// |batch| x |outputs| table and must be safe to call concurrently.
struct ModelFunction {
  std::vector<ClassId> outputs;
  std::function<std::vector<double>(std::span<const TimeSeries>)> evaluate;
};

/// Adapts a classifier: one output per class, in the model's class order.
/// The model must outlive the returned function.
ModelFunction model_function(const models::ProbabilisticModel& model);

struct ExplainReport {
  std::size_t fragments = 0;
  std::vector<std::size_t> edges;
  /// Environments in evaluation order (a single pooled one without
  /// environment classes).
  std::vector<ClassId> environments;
  /// Solver runs actually made per environment.
  std::vector<std::size_t> runs;
  /// Coalitions per solver run, from the first run.
  std::size_t coalitions = 0;
  bool exact = false;
  std::size_t model_queries = 0;
  std::vector<std::string> warnings;
};

/// Explains a single-output model against the whole reference set.
ImpactVector explain_single(const ModelFunction& f, const TimeSeries& x, const ExplainConfig& cfg,
                            const LabeledDataset& reference, ExplainReport* report = nullptr);

/// Explains every output of `f` with environment classes drawn from the
/// labels of `reference` (one per output of `f`), or against the pooled set
/// when cfg.environment_classes is false.
ClassExplanation explain_classifier(const ModelFunction& f, const TimeSeries& x,
                                    const ExplainConfig& cfg, const LabeledDataset& reference,
                                    ExplainReport* report = nullptr);

}  // namespace timexplain::explain
