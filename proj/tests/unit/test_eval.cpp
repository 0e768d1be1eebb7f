#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "genraven/errors.hpp"
#include "genraven/eval.hpp"
#include "genraven/solver.hpp"
#include "json.hpp"
#include "test_support.hpp"

namespace genraven {
namespace {

using testing::filled;
using testing::obj;
using testing::rule;

std::vector<Sample> generator_samples(std::uint64_t seed, std::uint64_t per_rule, Split split = Split::Train) {
  GenConfig cfg;
  cfg.seed = seed;
  cfg.samples_per_rule = per_rule;
  cfg.held_out = {};
  cfg.split = split;
  return generate_dataset(cfg).samples;
}

std::vector<Sample> stripped(std::vector<Sample> v) {
  for (auto& s : v) s.label.reset();
  return v;
}

TEST(Consistency, GeneratorSamplesScorePerfectly) {
  const auto samples = stripped(generator_samples(1, 25));
  ASSERT_EQ(samples.size(), 1000u);
  const ConsistencyReport r = consistency_report(samples);
  EXPECT_EQ(r.n_samples, 1000u);
  EXPECT_DOUBLE_EQ(r.valid_row_fraction, 1.0);
  EXPECT_DOUBLE_EQ(r.c2_fraction, 1.0);
  EXPECT_DOUBLE_EQ(r.c3_fraction, 1.0);
  for (RuleId rule : rule_inventory()) EXPECT_GE(r.per_rule_c3_count[rule.index()], 25u) << rule.name();
}

TEST(Consistency, MixedDimensionSamples) {
  CounterRng rng(StreamKey{2, StreamLabel::Baseline, 0, 0});
  std::vector<Sample> samples(200);
  for (auto& s : samples) {
    s.rows[0] = generate_row(rule("CONST-SIZE"), rng);
    s.rows[1] = generate_row(rule("XOR-POSITION"), rng);
    s.rows[2] = generate_row(rule("PROG_M1-COLOR"), rng);
  }
  const ConsistencyReport r = consistency_report(samples);
  EXPECT_DOUBLE_EQ(r.valid_row_fraction, 1.0);
  EXPECT_DOUBLE_EQ(r.c2_fraction, 0.0);
  EXPECT_DOUBLE_EQ(r.c3_fraction, 0.0);
  EXPECT_EQ(r.per_rule_valid_row_count[rule("XOR-POSITION").index()], 200u);
}

TEST(Consistency, EmptyInputs) {
  const ConsistencyReport none = consistency_report({});
  EXPECT_EQ(none.n_samples, 0u);
  EXPECT_EQ(none.valid_row_fraction, 0.0);
  EXPECT_EQ(none.c3_fraction, 0.0);
  const std::vector<Sample> blank(10);
  const ConsistencyReport r = consistency_report(blank);
  EXPECT_EQ(r.valid_rows, 0u);
  EXPECT_EQ(r.c2_samples, 0u);
  EXPECT_EQ(r.c3_samples, 0u);
}

TEST(Consistency, MultiCreditAndSingletonCounts) {
  // CONST-SHAPE rows also satisfy OR-SHAPE and AND-SHAPE; all three are credited.
  CounterRng rng(StreamKey{3, StreamLabel::Baseline, 0, 0});
  std::vector<Sample> samples;
  for (int i = 0; i < 30; ++i) samples.push_back(generate_sample(rule("CONST-SHAPE"), rng));
  for (int i = 0; i < 20; ++i) samples.push_back(generate_sample(rule("PROG_M2-COLOR"), rng));
  const ConsistencyReport r = consistency_report(samples);
  EXPECT_EQ(r.per_rule_c3_count[rule("CONST-SHAPE").index()], 30u);
  EXPECT_EQ(r.per_rule_c3_count[rule("OR-SHAPE").index()], 30u);
  EXPECT_EQ(r.per_rule_c3_count[rule("AND-SHAPE").index()], 30u);
  EXPECT_EQ(r.per_rule_c3_singleton_count[rule("CONST-SHAPE").index()], 0u);
  EXPECT_DOUBLE_EQ(r.per_rule_c3_frequency_normalized[rule("CONST-SHAPE").index()], 30.0 / 50.0 * 40.0);

  const auto total = std::accumulate(r.per_rule_c3_count.begin(), r.per_rule_c3_count.end(), std::uint64_t{0});
  EXPECT_GE(total, r.c3_samples);
  const auto singles = std::accumulate(r.per_rule_c3_singleton_count.begin(),
                                       r.per_rule_c3_singleton_count.end(), std::uint64_t{0});
  EXPECT_LE(singles, r.c3_samples);
}

TEST(Consistency, SingletonOnlyCorpusCountsMatch) {
  // AND-POSITION cannot coincide with XOR or OR (that would need P1 = P2 or
  // empty sets), so each C3 sample is credited exactly once.
  CounterRng rng(StreamKey{4, StreamLabel::Baseline, 0, 0});
  std::vector<Sample> samples;
  for (int i = 0; i < 40; ++i) samples.push_back(generate_sample(rule("AND-POSITION"), rng));
  const ConsistencyReport r = consistency_report(samples);
  const auto total = std::accumulate(r.per_rule_c3_count.begin(), r.per_rule_c3_count.end(), std::uint64_t{0});
  EXPECT_EQ(total, r.c3_samples);
  EXPECT_EQ(r.per_rule_c3_singleton_count, r.per_rule_c3_count);
}

TEST(Consistency, InvariantsOnNoisyCorpora) {
  const auto rows = testing::mixed_rows(6000, 21);
  std::vector<Sample> samples;
  for (std::size_t i = 0; i + 2 < rows.size(); i += 3) samples.push_back(Sample{{rows[i], rows[i + 1], rows[i + 2]}, {}});
  const ConsistencyReport r = consistency_report(samples, 3);
  EXPECT_LE(r.c3_fraction, r.c2_fraction);
  EXPECT_LE(r.c2_fraction, 1.0);
  EXPECT_GE(r.valid_row_fraction, r.c3_fraction);
  EXPECT_GE(r.c3_fraction, 0.0);
  EXPECT_EQ(r, consistency_report(samples, 1));
  EXPECT_EQ(r, consistency_report(samples, 16));
}

TEST(ScoreCompletion, GroundTruthAndEmpty) {
  CounterRng rng(StreamKey{5, StreamLabel::Baseline, 0, 0});
  const Sample s = generate_sample(rule("OR-COLOR"), rng);
  const CompletionVerdict gt = score_completion(s, s.panel(8), s.label);
  EXPECT_TRUE(gt.c3);
  EXPECT_EQ(gt.matched_ground_truth, true);
  EXPECT_FALSE(gt.structural_failure);

  const CompletionVerdict empty = score_completion(s, Panel{}, s.label);
  EXPECT_FALSE(empty.c3);
  EXPECT_FALSE(empty.structural_failure);
  EXPECT_EQ(empty.matched_ground_truth, false);

  Panel bad = s.panel(8);
  bad.slots[0] = Slot{1, 2, 10};
  const CompletionVerdict malformed = score_completion(s, bad);
  EXPECT_TRUE(malformed.structural_failure);
  EXPECT_FALSE(malformed.c3);
  EXPECT_FALSE(malformed.matched_ground_truth);
}

TEST(ScoreCompletion, IgnoresTheTestsOwnNinthPanel) {
  CounterRng rng(StreamKey{6, StreamLabel::Baseline, 0, 0});
  const Sample s = generate_sample(rule("AND-POSITION"), rng);
  Sample masked = s;
  masked.panel(8) = Panel{};
  EXPECT_TRUE(score_completion(masked, s.panel(8)).c3);
}

TEST(ScoreCompletion, MalformedTestIsATestError) {
  CounterRng rng(StreamKey{7, StreamLabel::Baseline, 0, 0});
  Sample s = generate_sample(rule("CONST-NUMBER"), rng);
  const Panel ninth = s.panel(8);
  s.panel(3).slots[2] = Slot{9, 9, 9};
  EXPECT_THROW(score_completion(s, ninth), TestCaseError);
}

TEST(CompletionReport, OracleCompletionsScoreOne) {
  const auto tests = generator_samples(11, 50, Split::Test);
  std::vector<Sample> completions = tests;
  for (std::size_t i = 0; i < tests.size(); ++i) {
    CounterRng rng = completion_stream(1, i);
    completions[i].panel(8) =
        complete_panel(CompletionContext::from_sample(tests[i]), CompletionStrategy::First, rng).panel9;
  }
  RuleSet held_set;
  for (RuleId r : default_held_out()) held_set.insert(r);
  const CompletionReport r = completion_report(tests, completions, held_set);
  EXPECT_EQ(r.n_tests, 2000u);
  EXPECT_DOUBLE_EQ(r.overall_accuracy, 1.0);
  EXPECT_EQ(r.n_held_out, 250u);
  EXPECT_EQ(r.n_trained, 1750u);
  EXPECT_EQ(r.held_out_accuracy, 1.0);
  EXPECT_EQ(r.trained_accuracy, 1.0);
  for (RuleId rule : rule_inventory()) {
    EXPECT_EQ(r.n_tests_per_rule[rule.index()], 50u);
    EXPECT_EQ(r.per_rule_accuracy[rule.index()], 1.0);
  }
}

TEST(CompletionReport, RandomPanelsScoreNearZero) {
  const auto tests = generator_samples(12, 50, Split::Test);
  std::vector<Sample> completions = tests;
  CounterRng rng(StreamKey{12, StreamLabel::Baseline, 0, 0});
  for (auto& c : completions) {
    Panel p;
    for (auto& s : p.slots) {
      if (rng.uniform(0, 1)) s = Slot::of(obj(rng.uniform(0, 6), rng.uniform(0, 9), rng.uniform(0, 9)));
    }
    c.panel(8) = p;
  }
  const CompletionReport r = completion_report(tests, completions, {});
  EXPECT_LT(r.overall_accuracy, 0.05);
  EXPECT_FALSE(r.held_out_accuracy);
  EXPECT_EQ(r.n_held_out, 0u);

  // Overall accuracy is the test-weighted mean of the per-rule accuracies.
  double weighted = 0.0;
  for (RuleId rule : rule_inventory()) {
    weighted += *r.per_rule_accuracy[rule.index()] * static_cast<double>(r.n_tests_per_rule[rule.index()]);
  }
  EXPECT_NEAR(weighted / static_cast<double>(r.n_tests), r.overall_accuracy, 1e-12);
}

TEST(CompletionReport, Errors) {
  const auto tests = generator_samples(13, 1, Split::Test);
  const std::vector<Sample> shorter(tests.begin(), tests.end() - 1);
  EXPECT_THROW(completion_report(tests, shorter, {}), AlignmentError);
  const auto unlabeled = stripped(tests);
  EXPECT_THROW(completion_report(unlabeled, tests, {}), TestCaseError);
}

double two_pass_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

TEST(Pearson, MatchesTwoPassComputation) {
  const std::vector<std::vector<double>> xs = {
      {1, 2, 3, 4, 5},
      {0.96, 1.0, 0.42, 0.88, 0.7, 0.12, 0.55, 0.99},
      {1e6 + 1, 1e6 + 2, 1e6 + 4, 1e6 + 3, 1e6 + 7},
  };
  const std::vector<std::vector<double>> ys = {
      {2, 4, 5, 4, 5},
      {1.2, 1.9, 0.3, 0.8, 1.1, 0.05, 0.6, 2.4},
      {3, 1, 4, 1, 5},
  };
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const auto got = pearson(xs[k], ys[k]);
    ASSERT_TRUE(got);
    EXPECT_NEAR(*got, two_pass_pearson(xs[k], ys[k]), 1e-12);
  }
  // 2,4,5,4,5 against 1..5: r = 6 / sqrt(10 * 6) (hand computed).
  EXPECT_NEAR(*pearson(xs[0], ys[0]), 6.0 / std::sqrt(60.0), 1e-12);
  const std::vector<double> line = {1, 2, 3}, flat = {4, 4, 4};
  EXPECT_NEAR(*pearson(line, line), 1.0, 1e-12);
  EXPECT_FALSE(pearson(line, flat));
  EXPECT_FALSE(pearson(std::vector<double>{1}, std::vector<double>{2}));
  EXPECT_THROW(pearson(line, std::vector<double>{1, 2}), AlignmentError);
}

TEST(Reports, JsonAndCsvSchemas) {
  const auto samples = generator_samples(14, 2);
  const ConsistencyReport r = consistency_report(samples);
  const auto j = nlohmann::json::parse(to_json(r));
  EXPECT_EQ(j["schema_version"], kReportSchemaVersion);
  EXPECT_EQ(j["kind"], "consistency");
  EXPECT_EQ(j["per_rule"].size(), 40u);
  EXPECT_EQ(j["per_rule"][0]["rule"], "CONST-SHAPE");
  EXPECT_EQ(j["c3_fraction"], 1.0);
  const std::string csv = to_csv(r);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 41);
  EXPECT_EQ(csv.rfind("rule,index,", 0), 0u);
  EXPECT_EQ(to_json(r), to_json(consistency_report(samples)));

  std::vector<Sample> tests = samples;
  CompletionReport c = completion_report(tests, tests, RuleSet{rule("CONST-COLOR")});
  const auto cj = nlohmann::json::parse(to_json(c));
  EXPECT_EQ(cj["kind"], "completion");
  EXPECT_EQ(cj["overall_accuracy"], 1.0);
  EXPECT_TRUE(cj["held_out_accuracy"].is_number());
  EXPECT_EQ(cj["per_rule"][rule("CONST-COLOR").index()]["held_out"], true);
  const std::string ccsv = to_csv(c);
  EXPECT_EQ(std::count(ccsv.begin(), ccsv.end(), '\n'), 41);

  const auto corr = accuracy_frequency_correlation(c, r);
  EXPECT_FALSE(corr);  // every accuracy is 1.0
}

}  // namespace
}  // namespace genraven
