#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "timexplain/explain.hpp"
#include "timexplain/external_model.hpp"
#include "timexplain/io.hpp"
#include "timexplain/kernels.hpp"
#include "timexplain/models.hpp"
#include "timexplain/random.hpp"
#include "timexplain/similarity.hpp"

namespace timexplain::cli {

namespace fs = std::filesystem;

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ProtocolViolation:
    case ErrorKind::Timeout:
    case ErrorKind::ProcessExit:
      return kExitModel;
    case ErrorKind::FragmentCountOutOfRange:
    case ErrorKind::InvalidConfig:
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidFilterLength:
    case ErrorKind::FilterLongerThanSeries:
    case ErrorKind::TooManyFragments:
      return kExitUsage;
    default:
      return kExitData;
  }
}

namespace {

struct Failure {
  int code;
  std::string message;
};

[[noreturn]] void usage_error(const std::string& message) { throw Failure{kExitUsage, message}; }
[[noreturn]] void data_error(const std::string& message) { throw Failure{kExitData, message}; }

struct MappingFlags {
  std::string mapping = "time-slice";
  std::string replacement = "sample";
  std::string fragments = "auto";
  std::optional<std::size_t> filter_length;
  std::uint64_t seed = 0;
};

void add_mapping_flags(CLI::App& cmd, MappingFlags& flags) {
  cmd.add_option("--mapping", flags.mapping, "time-slice, freq-patch, freq-filter or statistics")
      ->capture_default_str();
  cmd.add_option("--replacement", flags.replacement,
                 "zero, local-mean, global-mean, local-noise, global-noise or sample")
      ->capture_default_str();
  cmd.add_option("--fragments", flags.fragments, "number of fragments d' or 'auto'")
      ->capture_default_str();
  cmd.add_option("--filter-length", flags.filter_length, "FIR length for freq-filter (odd)");
  cmd.add_option("--seed", flags.seed, "random seed")->capture_default_str();
}

mappings::MappingKind mapping_kind(const std::string& text) {
  try {
    return mappings::parse_mapping_kind(text);
  } catch (const Error& e) {
    usage_error(std::string("--mapping: ") + e.what());
  }
}

mappings::ReplacementKind replacement_kind(const std::string& text) {
  try {
    return mappings::parse_replacement_kind(text);
  } catch (const Error& e) {
    usage_error(std::string("--replacement: ") + e.what());
  }
}

std::optional<std::size_t> fragment_flag(const std::string& text) {
  if (text == "auto") return std::nullopt;
  std::size_t n = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size() || n == 0) {
    usage_error("--fragments: expected 'auto' or a positive integer, got '" + text + "'");
  }
  return n;
}

LabeledDataset load(const std::string& path, const char* flag) {
  try {
    return io::read_ucr(path);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::IoError) data_error(std::string(flag) + ": " + e.what());
    throw Failure{exit_code(e.kind()), std::string(flag) + " " + path + ": " + e.what()};
  }
}

const TimeSeries& pick_specimen(const LabeledDataset& test, std::size_t index) {
  if (index >= test.size()) {
    data_error("--specimen " + std::to_string(index) + " out of range: test set has " +
               std::to_string(test.size()) + " series (valid 0.." +
               std::to_string(test.size() == 0 ? 0 : test.size() - 1) + ")");
  }
  return test[index];
}

std::optional<int> thread_cap() {
  const char* text = std::getenv("TIMEXPLAIN_THREADS");
  if (text == nullptr || *text == '\0') return std::nullopt;
  const std::string_view s(text);
  int n = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc() || end != s.data() + s.size() || n < 1) {
    usage_error("TIMEXPLAIN_THREADS must be a positive integer, got '" + std::string(s) + "'");
  }
  return n;
}

struct ModelFlags {
  std::string model = "knn";
  std::size_t k = 5;
  std::string command;
  std::string address;
  std::size_t timeout_ms = 30000;
};

std::unique_ptr<models::ProbabilisticModel> make_model(const ModelFlags& flags,
                                                       const LabeledDataset& train) {
  if (flags.model == "knn") {
    if (flags.k == 0 || flags.k > train.size()) {
      usage_error("--k must be in [1, " + std::to_string(train.size()) + "]");
    }
    return std::make_unique<models::KnnModel>(train, flags.k);
  }
  if (flags.model == "spectrum-centroid" || flags.model == "spectrum_centroid") {
    return std::make_unique<models::SpectrumCentroidModel>(train);
  }
  if (flags.model == "external") {
    const std::chrono::milliseconds timeout(flags.timeout_ms);
    if (flags.command.empty() == flags.address.empty()) {
      usage_error("--model external needs exactly one of --model-cmd or --model-addr");
    }
    if (!flags.command.empty()) return models::launch_external_model(flags.command, timeout);
    return models::connect_external_model(flags.address, timeout);
  }
  usage_error("--model: unknown model '" + flags.model + "'");
}

struct ExplainFlags {
  std::string train;
  std::string test;
  std::size_t specimen = 0;
  ModelFlags model;
  MappingFlags mapping;
  std::size_t samples = explain::kDefaultBudget;
  std::size_t runs = explain::kDefaultRuns;
  bool env_classes = true;
  bool intermediates = false;
  bool plot = true;
  std::string out;
};

int cmd_explain(const ExplainFlags& flags, std::ostream& err) {
  explain::ExplainConfig cfg;
  cfg.mapping = mapping_kind(flags.mapping.mapping);
  cfg.replacement = replacement_kind(flags.mapping.replacement);
  cfg.fragments = fragment_flag(flags.mapping.fragments);
  cfg.filter_length = flags.mapping.filter_length;
  cfg.seed = flags.mapping.seed;
  cfg.runs = flags.runs;
  cfg.budget = flags.samples;
  cfg.environment_classes = flags.env_classes;
  cfg.retain_intermediates = flags.intermediates;
  if (cfg.runs < 1) usage_error("--runs must be at least 1");
  if (cfg.budget < 2) usage_error("--samples must be at least 2");
  if (const auto cap = thread_cap()) {
    kernels::set_max_threads(*cap);
    cfg.threads = *cap;
  }

  const auto train = load(flags.train, "--train");
  const auto test = load(flags.test, "--test");
  const auto& x = pick_specimen(test, flags.specimen);
  if (!train.empty() && train.length() != x.size()) {
    data_error("--test series length " + std::to_string(x.size()) +
               " differs from --train series length " + std::to_string(train.length()));
  }
  if (cfg.environment_classes && !train.has_labels()) {
    err << "timexplain: warning: reference set is unlabelled; averaging without environment classes\n";
    cfg.environment_classes = false;
  }

  const auto model = make_model(flags.model, train);
  const auto f = explain::model_function(*model);
  explain::ExplainReport report;
  auto explanation = explain::explain_classifier(f, x, cfg, train, &report);
  for (const auto& w : report.warnings) err << "timexplain: warning: " << w << "\n";

  io::ExplanationDocument doc;
  doc.dataset = fs::path(flags.train).stem().string();
  doc.model = flags.model.model;
  doc.specimen_index = flags.specimen;
  if (test.has_labels()) doc.specimen_label = test.label(flags.specimen);
  if (doc.specimen_label && explanation.per_class.contains(*doc.specimen_label)) {
    doc.explained_class = *doc.specimen_label;
  } else {
    // Fall back to the predicted class.
    const auto best = std::max_element(
        explanation.per_class.begin(), explanation.per_class.end(),
        [](const auto& a, const auto& b) { return a.second.prediction() < b.second.prediction(); });
    doc.explained_class = best->first;
  }
  doc.mapping = {cfg.mapping, report.fragments, cfg.replacement, report.edges};
  doc.impacts = std::move(explanation.per_class);
  doc.intermediates = std::move(explanation.intermediates);
  doc.run = {cfg.runs, cfg.budget, cfg.seed, report.model_queries, cfg.environment_classes,
             report.exact};

  io::write_explanation(doc, flags.out);
  if (flags.plot) io::emit_plot_data(doc, x, fs::path(flags.out).replace_extension());
  return kExitOk;
}

struct CompareFlags {
  std::vector<std::string> explanations;
  std::string out;
};

int cmd_compare(const CompareFlags& flags) {
  std::map<similarity::ExplanationKey, ImpactVector> table;
  std::map<similarity::ExplanationKey, std::size_t> seen;
  std::optional<bool> frequency;
  for (const auto& path : flags.explanations) {
    io::ExplanationDocument doc;
    try {
      doc = io::read_explanation(path);
    } catch (const Error& e) {
      data_error(path + ": " + e.what());
    }
    const bool is_frequency = mappings::is_frequency_kind(doc.mapping.kind);
    if (frequency && *frequency != is_frequency) {
      data_error(path + ": cannot compare time-domain and frequency-domain explanations");
    }
    frequency = is_frequency;
    const std::string specimen = std::to_string(doc.specimen_index);
    // Repeated (model, specimen) pairs stand for different models that share
    // a name; number them by order of appearance.
    const auto occurrence = ++seen[{doc.model, specimen}];
    const std::string model =
        occurrence == 1 ? doc.model : doc.model + "#" + std::to_string(occurrence);
    table.emplace(similarity::ExplanationKey{model, specimen}, doc.explained());
  }
  const auto domain = frequency.value_or(false) ? similarity::Domain::Frequency
                                                : similarity::Domain::Time;
  const auto matrix = similarity::build_matrix(table, domain);
  io::write_text(flags.out, similarity::to_csv(matrix));
  return kExitOk;
}

struct PerturbFlags {
  std::string train;
  std::string test;
  std::size_t specimen = 0;
  MappingFlags mapping;
  std::string mask;
  std::string out;
};

int cmd_perturb(const PerturbFlags& flags) {
  const auto kind = mapping_kind(flags.mapping.mapping);
  const auto replacement = replacement_kind(flags.mapping.replacement);
  const auto test = load(flags.test, "--test");
  const auto& x = pick_specimen(test, flags.specimen);

  explain::ExplainConfig cfg;
  cfg.mapping = kind;
  cfg.fragments = fragment_flag(flags.mapping.fragments);
  const std::size_t fragments = explain::resolve_fragments(cfg, x.size());

  std::optional<SimplifiedInput> z;
  try {
    z = SimplifiedInput::parse(flags.mask);
  } catch (const Error& e) {
    usage_error(std::string("--mask: ") + e.what());
  }
  if (z->size() != fragments) {
    usage_error("--mask has " + std::to_string(z->size()) + " bits but the mapping has " +
                std::to_string(fragments) + " fragments");
  }

  std::vector<TimeSeries> reference;
  if (!flags.train.empty()) reference = load(flags.train, "--train").series();
  const auto seed = derive_seed(flags.mapping.seed, {seed_stream::kReplacement, 0, 0});
  auto replacement_series = [&] {
    return mappings::build_replacement(replacement, reference, x.size(), seed);
  };
  std::optional<mappings::MappingFunction> h;
  switch (kind) {
    case mappings::MappingKind::TimeSlice:
      h = mappings::MappingFunction::time_slice(x, fragments, replacement_series());
      break;
    case mappings::MappingKind::FreqPatch:
      h = mappings::MappingFunction::freq_patch(x, fragments, replacement_series());
      break;
    case mappings::MappingKind::FreqFilter:
      h = mappings::MappingFunction::freq_filter(x, fragments, flags.mapping.filter_length);
      break;
    case mappings::MappingKind::Statistics:
      h = mappings::MappingFunction::statistics(x, replacement_series());
      break;
  }
  const auto perturbed = (*h)(*z);
  std::string csv = "t,x,perturbed\n";
  for (std::size_t t = 0; t < x.size(); ++t) {
    csv += std::to_string(t) + "," + io::to_text(x[t]) + "," + io::to_text(perturbed[t]) + "\n";
  }
  io::write_text(flags.out, csv);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& err) {
  CLI::App app{"Perturbation-based SHAP explanations for time series classifiers", "timexplain"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  ExplainFlags ex;
  auto* explain_cmd = app.add_subcommand("explain", "Explain one test specimen");
  explain_cmd->add_option("--train", ex.train, "reference / training set (UCR format)")->required();
  explain_cmd->add_option("--test", ex.test, "test set (UCR format)")->required();
  explain_cmd->add_option("--specimen", ex.specimen, "0-based index into the test set")->required();
  explain_cmd->add_option("--model", ex.model.model, "knn, spectrum-centroid or external")
      ->capture_default_str();
  explain_cmd->add_option("--k", ex.model.k, "neighbours for the knn model")->capture_default_str();
  explain_cmd->add_option("--model-cmd", ex.model.command, "command that serves the model on stdio");
  explain_cmd->add_option("--model-addr", ex.model.address, "host:port of a model server");
  explain_cmd->add_option("--model-timeout-ms", ex.model.timeout_ms, "per-request timeout")
      ->capture_default_str();
  add_mapping_flags(*explain_cmd, ex.mapping);
  explain_cmd->add_option("--samples", ex.samples, "coalition budget per run")->capture_default_str();
  explain_cmd->add_option("--runs", ex.runs, "replacement draws to average")->capture_default_str();
  explain_cmd->add_flag("--env-classes,!--no-env-classes", ex.env_classes,
                        "average over environment classes (default on)");
  explain_cmd->add_flag("--intermediates", ex.intermediates, "keep per-environment impacts");
  explain_cmd->add_flag("!--no-plot", ex.plot, "skip the CSV/SVG plot files");
  explain_cmd->add_option("--out", ex.out, "explanation document (JSON)")->required();

  CompareFlags cmp;
  auto* compare_cmd = app.add_subcommand("compare", "Median-correlation matrix of explanations");
  compare_cmd->add_option("--explanations", cmp.explanations, "explanation documents")
      ->required()
      ->expected(2, -1);
  compare_cmd->add_option("--out", cmp.out, "output CSV")->required();

  PerturbFlags pt;
  auto* perturb_cmd = app.add_subcommand("perturb", "Write h_x(z') for one specimen");
  perturb_cmd->add_option("--train", pt.train, "reference set for replacement series");
  perturb_cmd->add_option("--test", pt.test, "test set (UCR format)")->required();
  perturb_cmd->add_option("--specimen", pt.specimen, "0-based index into the test set")
      ->capture_default_str();
  add_mapping_flags(*perturb_cmd, pt.mapping);
  perturb_cmd->add_option("--mask", pt.mask, "simplified input, e.g. 0110")->required();
  perturb_cmd->add_option("--out", pt.out, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    err << "timexplain: error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*explain_cmd) return cmd_explain(ex, err);
    if (*compare_cmd) return cmd_compare(cmp);
    if (*perturb_cmd) return cmd_perturb(pt);
  } catch (const Failure& f) {
    err << "timexplain: error: " << f.message << "\n";
    return f.code;
  } catch (const Error& e) {
    err << "timexplain: error: " << e.what() << " [" << to_string(e.kind()) << "]\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "timexplain: error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace timexplain::cli
