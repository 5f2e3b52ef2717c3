#include "timexplain/explain.hpp"

#include <algorithm>
#include <exception>
#include <numeric>

#include <omp.h>

#include "timexplain/random.hpp"
#include "timexplain/shap.hpp"

namespace timexplain::explain {

using mappings::MappingFunction;
using mappings::MappingKind;
using mappings::ReplacementKind;

std::size_t auto_fragments(MappingKind kind, std::size_t d) {
  switch (kind) {
    case MappingKind::TimeSlice:
      return std::clamp<std::size_t>(std::min(d / 5, kMaxAutoFragments), 1, d);
    case MappingKind::FreqFilter:
    case MappingKind::FreqPatch:
      return std::clamp<std::size_t>(std::min(d / 10, kMaxAutoFragments), 1, std::max<std::size_t>(d / 2, 1));
    case MappingKind::Statistics: return 2;
  }
  return 1;
}

std::size_t resolve_fragments(const ExplainConfig& cfg, std::size_t d) {
  if (!cfg.fragments) return auto_fragments(cfg.mapping, d);
  const std::size_t n = *cfg.fragments;
  const std::size_t upper = cfg.mapping == MappingKind::TimeSlice ? d
                            : cfg.mapping == MappingKind::Statistics ? 2
                                                                     : d / 2;
  const std::size_t lower = cfg.mapping == MappingKind::Statistics ? 2 : 1;
  if (n < lower || n > upper) {
    throw Error(ErrorKind::FragmentCountOutOfRange,
                "fragment count " + std::to_string(n) + " outside [" + std::to_string(lower) + ", " +
                    std::to_string(upper) + "] for " + std::string(to_string(cfg.mapping)));
  }
  return n;
}

void validate_config(const ExplainConfig& cfg) {
  if (cfg.runs < 1) throw Error(ErrorKind::InvalidConfig, "runs must be at least 1");
  if (cfg.budget < 2) throw Error(ErrorKind::InvalidConfig, "coalition budget must be at least 2");
  if (cfg.threads < 0) throw Error(ErrorKind::InvalidConfig, "thread count must not be negative");
}

std::vector<std::size_t> fragment_edges(MappingKind kind, std::size_t d, std::size_t fragments) {
  switch (kind) {
    case MappingKind::TimeSlice: {
      const auto slices = mappings::make_slice_assignment(d, fragments);
      return {slices.boundaries().begin(), slices.boundaries().end()};
    }
    case MappingKind::FreqFilter:
    case MappingKind::FreqPatch: {
      const auto bands = mappings::make_band_assignment(d, fragments);
      return {bands.edges().begin(), bands.edges().end()};
    }
    case MappingKind::Statistics: return {};
  }
  return {};
}

ModelFunction model_function(const models::ProbabilisticModel& model) {
  return {model.classes(), [&model](std::span<const TimeSeries> batch) {
            const auto probs = model.predict(batch);
            return std::vector<double>(probs.values().begin(), probs.values().end());
          }};
}

namespace {

struct Environment {
  ClassId name;
  std::vector<TimeSeries> series;
};

struct Task {
  std::size_t env;
  std::size_t run;
  std::optional<std::size_t> draw;
};

struct TaskResult {
  std::vector<ImpactVector> impacts;
  std::size_t queries = 0;
  std::size_t coalitions = 0;
  bool exact = false;
};

// The filter mapping never looks at the reference set and zero replacement
// ignores its contents.
bool uses_reference(const ExplainConfig& cfg) {
  return cfg.mapping != MappingKind::FreqFilter && cfg.replacement != ReplacementKind::Zero;
}

bool draws_series(const ExplainConfig& cfg) {
  return cfg.mapping != MappingKind::FreqFilter && mappings::is_series_dependent(cfg.replacement);
}

MappingFunction build_mapping(const ExplainConfig& cfg, const TimeSeries& x, std::size_t fragments,
                              const Environment& env, const Task& task) {
  if (cfg.mapping == MappingKind::FreqFilter) {
    return MappingFunction::freq_filter(x, fragments, cfg.filter_length);
  }
  const TimeSeries r =
      task.draw ? env.series[*task.draw]
                : mappings::build_replacement(
                      cfg.replacement, env.series, x.size(),
                      derive_seed(cfg.seed, {seed_stream::kReplacement, task.env, task.run}));
  switch (cfg.mapping) {
    case MappingKind::TimeSlice: return MappingFunction::time_slice(x, fragments, r);
    case MappingKind::FreqPatch: return MappingFunction::freq_patch(x, fragments, r);
    case MappingKind::Statistics: return MappingFunction::statistics(x, r);
    case MappingKind::FreqFilter: break;
  }
  throw Error(ErrorKind::InvalidConfig, "unsupported mapping");
}

TaskResult run_task(const ModelFunction& f, const TimeSeries& x, const ExplainConfig& cfg,
                    std::size_t fragments, const Environment& env, const Task& task) {
  const auto h = build_mapping(cfg, x, fragments, env, task);
  const auto sample = shap::sample_coalitions(
      fragments, cfg.budget, derive_seed(cfg.seed, {seed_stream::kCoalitions, task.env, task.run}));

  std::vector<TimeSeries> batch;
  batch.reserve(sample.coalitions.size() + 2);
  batch.push_back(x);
  batch.push_back(h(SimplifiedInput::zeros(fragments)));
  for (const auto& z : sample.coalitions) batch.push_back(h(z));

  const std::size_t width = f.outputs.size();
  const auto out = f.evaluate(batch);
  if (out.size() != batch.size() * width) {
    throw Error(ErrorKind::DimensionMismatch,
                "model returned " + std::to_string(out.size()) + " values for " +
                    std::to_string(batch.size()) + " series and " + std::to_string(width) +
                    " outputs");
  }
  const std::span<const double> all(out);
  TaskResult result;
  result.impacts = shap::solve_explanations(sample, all.subspan(2 * width), all.subspan(0, width),
                                            all.subspan(width, width));
  result.queries = batch.size();
  result.coalitions = sample.coalitions.size();
  result.exact = sample.exact;
  return result;
}

// Runs every (environment, run) pair and returns, per environment, the
// run-averaged impact vector of every model output.
std::vector<std::vector<ImpactVector>> run_environments(const ModelFunction& f, const TimeSeries& x,
                                                        const ExplainConfig& cfg,
                                                        const std::vector<Environment>& envs,
                                                        ExplainReport& report) {
  const std::size_t d = x.size();
  const std::size_t fragments = resolve_fragments(cfg, d);
  report.fragments = fragments;
  report.edges = fragment_edges(cfg.mapping, d, fragments);

  std::vector<Task> tasks;
  for (std::size_t e = 0; e < envs.size(); ++e) {
    report.environments.push_back(envs[e].name);
    if (!draws_series(cfg)) {
      tasks.push_back({e, 0, std::nullopt});
      report.runs.push_back(1);
      continue;
    }
    const std::size_t available = envs[e].series.size();
    if (available == 0) {
      throw Error(ErrorKind::EmptyReference, "no reference series to draw from");
    }
    std::vector<std::size_t> order(available);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(cfg.seed, {seed_stream::kDraws, e}));
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t runs = std::min(cfg.runs, available);
    if (runs < cfg.runs) {
      report.warnings.push_back("environment '" + envs[e].name + "' has only " +
                                std::to_string(available) + " series; averaging " +
                                std::to_string(runs) + " runs instead of " +
                                std::to_string(cfg.runs));
    }
    for (std::size_t i = 0; i < runs; ++i) tasks.push_back({e, i, order[i]});
    report.runs.push_back(runs);
  }

  std::vector<TaskResult> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  auto body = [&](std::size_t i) {
    try {
      results[i] = run_task(f, x, cfg, fragments, envs[tasks[i].env], tasks[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const auto count = static_cast<std::ptrdiff_t>(tasks.size());
  if (cfg.threads == 1 || count < 2) {
    for (std::ptrdiff_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
  } else {
    const int threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
  }
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }

  report.coalitions = results.front().coalitions;
  report.exact = results.front().exact;
  for (const auto& r : results) report.model_queries += r.queries;

  const std::size_t width = f.outputs.size();
  std::vector<std::vector<ImpactVector>> per_env;
  std::size_t next = 0;
  for (std::size_t e = 0; e < envs.size(); ++e) {
    const std::size_t runs = report.runs[e];
    std::vector<ImpactVector> averaged;
    for (std::size_t c = 0; c < width; ++c) {
      std::vector<ImpactVector> per_run;
      per_run.reserve(runs);
      for (std::size_t i = 0; i < runs; ++i) per_run.push_back(results[next + i].impacts[c]);
      averaged.push_back(mean_impact(per_run));
    }
    next += runs;
    per_env.push_back(std::move(averaged));
  }
  return per_env;
}

void check_inputs(const ModelFunction& f, const TimeSeries& x, const ExplainConfig& cfg,
                  const LabeledDataset& reference) {
  validate_config(cfg);
  if (f.outputs.empty() || !f.evaluate) {
    throw Error(ErrorKind::InvalidArgument, "model function has no outputs");
  }
  if (!reference.empty() && reference.length() != x.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "reference series length " + std::to_string(reference.length()) +
                    " differs from specimen length " + std::to_string(x.size()));
  }
  if (uses_reference(cfg) && reference.empty()) {
    throw Error(ErrorKind::EmptyReference, std::string(to_string(cfg.replacement)) +
                                               " replacement needs a non-empty reference set");
  }
}

}  // namespace

ImpactVector explain_single(const ModelFunction& f, const TimeSeries& x, const ExplainConfig& cfg,
                            const LabeledDataset& reference, ExplainReport* report) {
  check_inputs(f, x, cfg, reference);
  if (f.outputs.size() != 1) {
    throw Error(ErrorKind::InvalidArgument, "explain_single needs a single-output model");
  }
  ExplainReport local;
  auto& rep = report ? *report : local;
  rep = ExplainReport{};
  const std::vector<Environment> envs{{"*", reference.series()}};
  return run_environments(f, x, cfg, envs, rep).front().front();
}

ClassExplanation explain_classifier(const ModelFunction& f, const TimeSeries& x,
                                    const ExplainConfig& cfg, const LabeledDataset& reference,
                                    ExplainReport* report) {
  check_inputs(f, x, cfg, reference);
  ExplainReport local;
  auto& rep = report ? *report : local;
  rep = ExplainReport{};

  std::vector<Environment> envs;
  if (cfg.environment_classes) {
    if (!reference.has_labels()) {
      throw Error(ErrorKind::MissingLabels, "environment classes need a labelled reference set");
    }
    for (const auto& cls : f.outputs) {
      auto part = reference.partition(cls);
      if (part.empty()) {
        throw Error(ErrorKind::EmptyClass, "reference set has no series of class '" + cls + "'");
      }
      envs.push_back({cls, part.series()});
    }
  } else {
    envs.push_back({"*", reference.series()});
  }

  // Without a reference-dependent replacement every environment is the same,
  // so one environment is evaluated and reused.
  const bool shared = cfg.environment_classes && !uses_reference(cfg);
  std::vector<Environment> evaluated;
  if (shared) {
    evaluated.push_back({"*", {}});
  } else {
    evaluated = envs;
  }
  const auto per_env = run_environments(f, x, cfg, evaluated, rep);

  ClassExplanation out;
  if (cfg.retain_intermediates && cfg.environment_classes) out.intermediates.emplace();
  for (std::size_t c = 0; c < f.outputs.size(); ++c) {
    std::vector<ImpactVector> intermediates;
    for (std::size_t e = 0; e < envs.size(); ++e) {
      intermediates.push_back(per_env[shared ? 0 : e][c]);
      if (out.intermediates) {
        out.intermediates->emplace(std::pair{f.outputs[c], envs[e].name}, intermediates.back());
      }
    }
    out.per_class.emplace(f.outputs[c], mean_impact(intermediates));
  }
  return out;
}

}  // namespace timexplain::explain
