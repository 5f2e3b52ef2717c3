#include <doctest.h>

#include <atomic>
#include <cmath>
#include <random>

#include "test_support.hpp"
#include "timexplain/explain.hpp"
#include "timexplain/models.hpp"

using namespace timexplain;
using namespace timexplain::explain;
using mappings::MappingKind;
using mappings::ReplacementKind;

namespace {

// f(x) = sigmoid(w . x) as a single output.
ModelFunction linear_logistic(std::vector<double> w) {
  return {{"y"}, [w](std::span<const TimeSeries> batch) {
            std::vector<double> out;
            for (const auto& s : batch) {
              double acc = 0.0;
              for (std::size_t t = 0; t < s.size(); ++t) acc += w[t] * s[t];
              out.push_back(1.0 / (1.0 + std::exp(-acc)));
            }
            return out;
          }};
}

ModelFunction constant_model(std::vector<ClassId> outputs, double value) {
  const std::size_t width = outputs.size();
  return {std::move(outputs), [width, value](std::span<const TimeSeries> batch) {
            return std::vector<double>(batch.size() * width, value);
          }};
}

ModelFunction counting(const ModelFunction& f, std::atomic<std::size_t>& counter) {
  return {f.outputs, [f, &counter](std::span<const TimeSeries> batch) {
            counter += batch.size();
            return f.evaluate(batch);
          }};
}

ModelFunction scaled(const ModelFunction& f, double alpha) {
  return {f.outputs, [f, alpha](std::span<const TimeSeries> batch) {
            auto out = f.evaluate(batch);
            for (auto& v : out) v *= alpha;
            return out;
          }};
}

void check_close(const ImpactVector& a, const ImpactVector& b, double tol) {
  REQUIRE(a.fragment_count() == b.fragment_count());
  for (std::size_t k = 0; k < a.fragment_count(); ++k) CHECK(std::abs(a.phi(k) - b.phi(k)) <= tol);
  CHECK(std::abs(a.base_value() - b.base_value()) <= tol);
}

std::vector<double> weights(std::size_t d, std::mt19937_64& rng) { return testing::random_values(d, rng, 0.3); }

}  // namespace

TEST_CASE("auto fragment policy") {
  CHECK(auto_fragments(MappingKind::TimeSlice, 100) == 20);
  CHECK(auto_fragments(MappingKind::TimeSlice, 150) == 30);
  CHECK(auto_fragments(MappingKind::TimeSlice, 1000) == 30);
  CHECK(auto_fragments(MappingKind::TimeSlice, 4) == 1);
  CHECK(auto_fragments(MappingKind::FreqPatch, 100) == 10);
  CHECK(auto_fragments(MappingKind::FreqFilter, 1000) == 30);
  CHECK(auto_fragments(MappingKind::FreqFilter, 6) == 1);
  CHECK(auto_fragments(MappingKind::Statistics, 100) == 2);
  const ExplainConfig cfg;
  CHECK(cfg.budget == 1000);
  CHECK(cfg.runs == 10);
  CHECK(cfg.replacement == ReplacementKind::Sample);
  CHECK(cfg.environment_classes);
}

TEST_CASE("config and fragment validation") {
  ExplainConfig cfg;
  cfg.runs = 0;
  CHECK_THROWS_AS(validate_config(cfg), Error);
  cfg.runs = 1;
  cfg.budget = 1;
  CHECK_THROWS_AS(validate_config(cfg), Error);
  cfg.budget = 2;
  cfg.fragments = 101;
  CHECK_THROWS_AS(resolve_fragments(cfg, 100), Error);
  cfg.mapping = MappingKind::FreqPatch;
  cfg.fragments = 51;
  CHECK_THROWS_AS(resolve_fragments(cfg, 100), Error);
  cfg.fragments = 50;
  CHECK(resolve_fragments(cfg, 100) == 50);
  cfg.mapping = MappingKind::Statistics;
  cfg.fragments = 3;
  CHECK_THROWS_AS(resolve_fragments(cfg, 100), Error);
}

TEST_CASE("constant model gets zero impacts everywhere") {
  std::mt19937_64 rng(1);
  const auto ref = testing::localized_dataset(4, 40, 10, 20, rng);
  const auto x = testing::random_series(40, rng);
  const auto f = constant_model({"0", "1"}, 0.5);
  for (auto mapping : {MappingKind::TimeSlice, MappingKind::FreqPatch, MappingKind::FreqFilter,
                       MappingKind::Statistics}) {
    for (auto replacement : {ReplacementKind::Zero, ReplacementKind::LocalMean, ReplacementKind::GlobalMean,
                             ReplacementKind::LocalNoise, ReplacementKind::GlobalNoise, ReplacementKind::Sample}) {
      ExplainConfig cfg;
      cfg.mapping = mapping;
      cfg.replacement = replacement;
      cfg.runs = 2;
      cfg.budget = 64;
      const auto e = explain_classifier(f, x, cfg, ref);
      for (const auto& [cls, v] : e.per_class) {
        for (double p : v.phi()) CHECK(std::abs(p) < 1e-12);
      }
    }
  }
}

TEST_CASE("runs are capped by the reference size") {
  std::mt19937_64 rng(2);
  const auto x = testing::random_series(20, rng);
  const LabeledDataset one({testing::random_series(20, rng)});
  const auto f = linear_logistic(weights(20, rng));
  ExplainConfig cfg;
  cfg.fragments = 4;
  cfg.runs = 10;
  ExplainReport report;
  const auto many = explain_single(f, x, cfg, one, &report);
  CHECK(report.runs == std::vector<std::size_t>{1});
  CHECK(report.warnings.size() == 1);
  cfg.runs = 1;
  CHECK(explain_single(f, x, cfg, one) == many);
}

TEST_CASE("two runs average their per-run vectors") {
  std::mt19937_64 rng(3);
  const auto x = testing::random_series(24, rng);
  const auto r1 = testing::random_series(24, rng);
  const auto r2 = testing::random_series(24, rng);
  const auto f = linear_logistic(weights(24, rng));
  ExplainConfig cfg;
  cfg.fragments = 4;
  cfg.budget = 100;  // exact mode, so the coalition seed does not matter
  cfg.runs = 1;
  const auto a = explain_single(f, x, cfg, LabeledDataset({r1}));
  const auto b = explain_single(f, x, cfg, LabeledDataset({r2}));
  cfg.runs = 2;
  const auto both = explain_single(f, x, cfg, LabeledDataset({r1, r2}));
  for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(both.phi(k) - 0.5 * (a.phi(k) + b.phi(k))) < 1e-14);
}

TEST_CASE("identical environments reproduce the pooled explanation") {
  std::mt19937_64 rng(4);
  const auto x = testing::random_series(30, rng);
  const auto s1 = testing::random_series(30, rng);
  const auto s2 = testing::random_series(30, rng);
  const LabeledDataset ref({s1, s2, s1, s2}, std::vector<ClassId>{"a", "a", "b", "b"});
  const auto w = weights(30, rng);
  const auto single = linear_logistic(w);
  const ModelFunction pair{{"a", "b"}, [single](std::span<const TimeSeries> batch) {
                             const auto p = single.evaluate(batch);
                             std::vector<double> out;
                             for (double v : p) {
                               out.push_back(v);
                               out.push_back(1.0 - v);
                             }
                             return out;
                           }};
  ExplainConfig cfg;
  cfg.replacement = ReplacementKind::LocalMean;
  cfg.fragments = 5;
  const auto e = explain_classifier(pair, x, cfg, ref);
  const auto pooled = explain_single(single, x, cfg, ref);
  check_close(e.per_class.at("a"), pooled, 1e-12);
}

TEST_CASE("intermediates average to the final vectors") {
  std::mt19937_64 rng(5);
  const auto train = testing::localized_dataset(6, 40, 12, 20, rng);
  const models::KnnModel knn(train, 3);
  const auto x = testing::random_series(40, rng);
  ExplainConfig cfg;
  cfg.fragments = 8;
  cfg.runs = 3;
  cfg.budget = 200;
  cfg.retain_intermediates = true;
  const auto e = explain_classifier(model_function(knn), x, cfg, train);
  REQUIRE(e.intermediates);
  CHECK(e.intermediates->size() == 4);
  for (const auto& [cls, final] : e.per_class) {
    const auto& a = e.intermediates->at({cls, "0"});
    const auto& b = e.intermediates->at({cls, "1"});
    for (std::size_t k = 0; k < 8; ++k) CHECK(std::abs(final.phi(k) - 0.5 * (a.phi(k) + b.phi(k))) <= 1e-12);
  }
}

TEST_CASE("1-NN toy model points at the discriminating slice") {
  std::mt19937_64 rng(6);
  const std::size_t d = 20;
  const auto base = testing::random_values(d, rng);
  std::vector<TimeSeries> series;
  std::vector<ClassId> labels;
  for (int i = 0; i < 3; ++i) {
    auto same = base;
    auto bumped = base;
    for (std::size_t t = 0; t < d; ++t) {
      const double jitter = std::normal_distribution<double>(0.0, 0.01)(rng);
      same[t] += jitter;
      bumped[t] += jitter + (t >= 8 && t < 12 ? 3.0 : 0.0);
    }
    series.emplace_back(same);
    labels.push_back("1");
    series.emplace_back(bumped);
    labels.push_back("0");
  }
  const LabeledDataset train(series, labels);
  const models::KnnModel knn(train, 1);
  ExplainConfig cfg;
  cfg.fragments = 5;
  cfg.budget = 1000;  // exhaustive enumeration of the 30 coalitions
  ExplainReport report;
  const auto e = explain_classifier(model_function(knn), TimeSeries(base), cfg, train, &report);
  CHECK(report.exact);
  for (const auto& [cls, v] : e.per_class) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < 5; ++k) {
      if (std::abs(v.phi(k)) > std::abs(v.phi(best))) best = k;
    }
    CHECK(best == 2);
  }
}

TEST_CASE("scaling the model scales every impact") {
  std::mt19937_64 rng(7);
  const auto train = testing::localized_dataset(5, 32, 8, 16, rng);
  const models::KnnModel knn(train, 3);
  const auto f = model_function(knn);
  const auto x = testing::random_series(32, rng);
  ExplainConfig cfg;
  cfg.fragments = 6;
  cfg.runs = 4;
  cfg.budget = 40;
  cfg.retain_intermediates = true;
  const auto a = explain_classifier(f, x, cfg, train);
  const auto b = explain_classifier(scaled(f, 2.0), x, cfg, train);
  for (const auto& [cls, v] : a.per_class) check_close(b.per_class.at(cls), v.scaled(2.0), 1e-12);
  for (const auto& [key, v] : *a.intermediates) check_close(b.intermediates->at(key), v.scaled(2.0), 1e-12);
}

TEST_CASE("explanations are bit-identical across repeats and thread counts") {
  std::mt19937_64 rng(8);
  const auto train = testing::localized_dataset(6, 48, 20, 30, rng);
  const models::KnnModel knn(train, 3);
  const auto f = model_function(knn);
  const auto x = testing::random_series(48, rng);
  ExplainConfig cfg;
  cfg.budget = 300;
  cfg.seed = 99;
  cfg.threads = 1;
  const auto serial = explain_classifier(f, x, cfg, train);
  cfg.threads = 4;
  const auto parallel = explain_classifier(f, x, cfg, train);
  const auto again = explain_classifier(f, x, cfg, train);
  CHECK(serial.per_class == parallel.per_class);
  CHECK(parallel.per_class == again.per_class);
  cfg.seed = 100;
  CHECK(explain_classifier(f, x, cfg, train).per_class != serial.per_class);
}

TEST_CASE("query count accounting") {
  std::mt19937_64 rng(9);
  const auto train = testing::localized_dataset(6, 40, 10, 20, rng);
  const models::KnnModel knn(train, 3);
  const auto x = testing::random_series(40, rng);
  std::atomic<std::size_t> calls{0};
  const auto f = counting(model_function(knn), calls);

  ExplainConfig cfg;
  cfg.fragments = 8;
  cfg.budget = 100;
  cfg.runs = 4;
  ExplainReport report;
  explain_classifier(f, x, cfg, train, &report);
  CHECK(report.coalitions == 100);
  CHECK(report.model_queries == 2 * 4 * (100 + 2));
  CHECK(calls == report.model_queries);

  calls = 0;
  cfg.fragments = 3;
  explain_classifier(f, x, cfg, train, &report);
  CHECK(report.exact);
  CHECK(report.coalitions == 6);
  CHECK(report.model_queries == 2 * 4 * (6 + 2));
  CHECK(calls == report.model_queries);

  calls = 0;
  cfg.replacement = ReplacementKind::GlobalMean;
  explain_classifier(f, x, cfg, train, &report);
  CHECK(report.runs == std::vector<std::size_t>{1, 1});
  CHECK(calls == 2 * (6 + 2));
}

TEST_CASE("explain error paths") {
  std::mt19937_64 rng(10);
  const auto x = testing::random_series(20, rng);
  const auto f = constant_model({"a", "b"}, 0.5);
  ExplainConfig cfg;
  auto kind = [&](const LabeledDataset& ref) {
    try {
      explain_classifier(f, x, cfg, ref);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::IoError;
  };
  CHECK(kind(LabeledDataset({testing::random_series(20, rng)})) == ErrorKind::MissingLabels);
  CHECK(kind(LabeledDataset({testing::random_series(20, rng)}, std::vector<ClassId>{"a"})) ==
        ErrorKind::EmptyClass);
  CHECK(kind(LabeledDataset({}, std::vector<ClassId>{})) == ErrorKind::EmptyReference);
  CHECK(kind(LabeledDataset({testing::random_series(21, rng)}, std::vector<ClassId>{"a"})) ==
        ErrorKind::DimensionMismatch);
}

TEST_CASE("every emitted vector satisfies efficiency") {
  std::mt19937_64 rng(11);
  const auto train = testing::localized_dataset(5, 64, 20, 30, rng);
  const models::KnnModel knn(train, 3);
  const models::SpectrumCentroidModel centroid(train);
  for (const models::ProbabilisticModel* m : {static_cast<const models::ProbabilisticModel*>(&knn),
                                              static_cast<const models::ProbabilisticModel*>(&centroid)}) {
    for (auto mapping : {MappingKind::TimeSlice, MappingKind::FreqPatch, MappingKind::FreqFilter,
                         MappingKind::Statistics}) {
      ExplainConfig cfg;
      cfg.mapping = mapping;
      cfg.runs = 3;
      cfg.budget = 200;
      cfg.retain_intermediates = true;
      const auto e = explain_classifier(model_function(*m), train[0], cfg, train);
      for (const auto& [cls, v] : e.per_class) CHECK(v.additivity_gap() <= 1e-8);
      for (const auto& [key, v] : *e.intermediates) CHECK(v.additivity_gap() <= 1e-8);
    }
  }
}
