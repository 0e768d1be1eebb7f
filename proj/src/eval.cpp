#include "genraven/eval.hpp"

#include <cmath>
#include <vector>

#include "genraven/errors.hpp"
#include "json.hpp"
#include "parallel.hpp"
#include "text_format.hpp"

namespace genraven {

ConsistencyReport consistency_report(std::span<const Sample> samples, unsigned workers) {
  ConsistencyReport r;
  r.n_samples = samples.size();
  if (samples.empty()) return r;

  std::vector<SharedRules> shared(samples.size());
  detail::parallel_for(samples.size(), workers,
                       [&](std::size_t i) { shared[i] = shared_rules(samples[i]); });

  for (const SharedRules& s : shared) {
    for (const RuleSet& row : s.per_row) {
      if (!row.empty()) ++r.valid_rows;
      for (RuleId rule : row.members()) ++r.per_rule_valid_row_count[rule.index()];
    }
    if (s.c2()) ++r.c2_samples;
    if (s.c3()) {
      ++r.c3_samples;
      for (RuleId rule : s.all_shared.members()) ++r.per_rule_c3_count[rule.index()];
      if (s.all_shared.size() == 1) ++r.per_rule_c3_singleton_count[s.all_shared.first()->index()];
    }
  }
  const auto n = static_cast<double>(r.n_samples);
  r.valid_row_fraction = static_cast<double>(r.valid_rows) / (3.0 * n);
  r.c2_fraction = static_cast<double>(r.c2_samples) / n;
  r.c3_fraction = static_cast<double>(r.c3_samples) / n;
  for (std::size_t k = 0; k < kRuleCount; ++k) {
    r.per_rule_c3_frequency_normalized[k] =
        static_cast<double>(r.per_rule_c3_count[k]) / n * static_cast<double>(kRuleCount);
  }
  return r;
}

CompletionVerdict score_completion(const Sample& test, const Panel& completion,
                                   std::optional<RuleId> label) {
  for (int p = 0; p < kPanelsPerSample - 1; ++p) {
    if (!test.panel(p).structurally_valid()) {
      throw TestCaseError("test panel " + std::to_string(p) + " is malformed");
    }
  }
  CompletionVerdict v;
  if (label) v.matched_ground_truth = false;
  if (!completion.structurally_valid()) {
    v.structural_failure = true;
    return v;
  }
  Sample assembled = test;
  assembled.panel(kPanelsPerSample - 1) = completion;
  v.shared_rules = shared_rules(assembled).all_shared;
  v.c3 = !v.shared_rules.empty();
  if (label) v.matched_ground_truth = v.shared_rules.contains(*label);
  return v;
}

CompletionReport completion_report(std::span<const Sample> tests,
                                   std::span<const Sample> completions, RuleSet held_out) {
  if (tests.size() != completions.size()) {
    throw AlignmentError(std::to_string(tests.size()) + " tests but " +
                         std::to_string(completions.size()) + " completions");
  }
  CompletionReport r;
  r.held_out = held_out;
  r.n_tests = tests.size();
  std::uint64_t trained_correct = 0;
  std::uint64_t held_out_correct = 0;
  std::uint64_t matched = 0;
  for (std::size_t i = 0; i < tests.size(); ++i) {
    if (!tests[i].label) throw TestCaseError("test " + std::to_string(i) + " has no rule label");
    const RuleId rule = *tests[i].label;
    const CompletionVerdict v = score_completion(tests[i], completions[i].panel(8), rule);
    const auto k = static_cast<std::size_t>(rule.index());
    ++r.n_tests_per_rule[k];
    const bool is_held_out = held_out.contains(rule);
    (is_held_out ? r.n_held_out : r.n_trained) += 1;
    if (v.structural_failure) ++r.structural_failures;
    if (v.matched_ground_truth.value_or(false)) ++matched;
    if (v.c3) {
      ++r.n_correct;
      ++r.n_correct_per_rule[k];
      (is_held_out ? held_out_correct : trained_correct) += 1;
    }
  }
  const auto ratio = [](std::uint64_t num, std::uint64_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  r.overall_accuracy = ratio(r.n_correct, r.n_tests).value_or(0.0);
  r.trained_accuracy = ratio(trained_correct, r.n_trained);
  r.held_out_accuracy = ratio(held_out_correct, r.n_held_out);
  r.ground_truth_match_fraction = ratio(matched, r.n_tests).value_or(0.0);
  for (std::size_t k = 0; k < kRuleCount; ++k) {
    r.per_rule_accuracy[k] = ratio(r.n_correct_per_rule[k], r.n_tests_per_rule[k]);
  }
  return r;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw AlignmentError("pearson inputs differ in length");
  if (x.size() < 2) return std::nullopt;
  // Single pass, Welford-style co-moment updates on data shifted by the first
  // point, which keeps large common offsets from eating precision.
  const double x0 = x[0], y0 = y[0];
  double mean_x = 0.0, mean_y = 0.0, m2x = 0.0, m2y = 0.0, cxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    const double xi = x[i] - x0, yi = y[i] - y0;
    const double dx = xi - mean_x;
    const double dy = yi - mean_y;
    mean_x += dx / n;
    mean_y += dy / n;
    m2x += dx * (xi - mean_x);
    m2y += dy * (yi - mean_y);
    cxy += dx * (yi - mean_y);
  }
  if (m2x <= 0.0 || m2y <= 0.0) return std::nullopt;
  return cxy / std::sqrt(m2x * m2y);
}

std::optional<double> accuracy_frequency_correlation(const CompletionReport& completion,
                                                     const ConsistencyReport& consistency) {
  std::vector<double> acc, freq;
  for (std::size_t k = 0; k < kRuleCount; ++k) {
    if (!completion.per_rule_accuracy[k]) continue;
    acc.push_back(*completion.per_rule_accuracy[k]);
    freq.push_back(consistency.per_rule_c3_frequency_normalized[k]);
  }
  return pearson(acc, freq);
}

namespace {

nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::string to_json(const ConsistencyReport& r) {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = "consistency";
  j["n_samples"] = r.n_samples;
  j["valid_rows"] = r.valid_rows;
  j["c2_samples"] = r.c2_samples;
  j["c3_samples"] = r.c3_samples;
  j["valid_row_fraction"] = r.valid_row_fraction;
  j["c2_fraction"] = r.c2_fraction;
  j["c3_fraction"] = r.c3_fraction;
  j["c3_attribution"] = "multi-credit";
  auto& per_rule = j["per_rule"] = nlohmann::json::array();
  for (RuleId rule : rule_inventory()) {
    const auto k = static_cast<std::size_t>(rule.index());
    per_rule.push_back({{"rule", rule.name()},
                        {"index", rule.index()},
                        {"c3_count", r.per_rule_c3_count[k]},
                        {"c3_singleton_count", r.per_rule_c3_singleton_count[k]},
                        {"c3_frequency_normalized", r.per_rule_c3_frequency_normalized[k]},
                        {"valid_row_count", r.per_rule_valid_row_count[k]}});
  }
  return j.dump(2) + "\n";
}

std::string to_csv(const ConsistencyReport& r) {
  std::string out =
      "rule,index,relation,dimension,c3_count,c3_singleton_count,c3_frequency_normalized,"
      "valid_row_count\n";
  for (RuleId rule : rule_inventory()) {
    const auto k = static_cast<std::size_t>(rule.index());
    out += rule.name() + ',' + std::to_string(rule.index()) + ',' +
           std::string(relation_name(rule.relation())) + ',' +
           std::string(dimension_name(rule.dimension())) + ',' +
           std::to_string(r.per_rule_c3_count[k]) + ',' +
           std::to_string(r.per_rule_c3_singleton_count[k]) + ',' +
           detail::format_double(r.per_rule_c3_frequency_normalized[k]) + ',' +
           std::to_string(r.per_rule_valid_row_count[k]) + '\n';
  }
  return out;
}

std::string to_json(const CompletionReport& r) {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = "completion";
  j["criterion"] = "c3";
  j["n_tests"] = r.n_tests;
  j["n_correct"] = r.n_correct;
  j["overall_accuracy"] = r.overall_accuracy;
  j["n_trained"] = r.n_trained;
  j["n_held_out"] = r.n_held_out;
  j["trained_accuracy"] = optional_number(r.trained_accuracy);
  j["held_out_accuracy"] = optional_number(r.held_out_accuracy);
  j["ground_truth_match_fraction"] = r.ground_truth_match_fraction;
  j["structural_failures"] = r.structural_failures;
  auto& held = j["held_out"] = nlohmann::json::array();
  for (RuleId rule : r.held_out.members()) held.push_back(rule.name());
  auto& per_rule = j["per_rule"] = nlohmann::json::array();
  for (RuleId rule : rule_inventory()) {
    const auto k = static_cast<std::size_t>(rule.index());
    per_rule.push_back({{"rule", rule.name()},
                        {"index", rule.index()},
                        {"held_out", r.held_out.contains(rule)},
                        {"n_tests", r.n_tests_per_rule[k]},
                        {"n_correct", r.n_correct_per_rule[k]},
                        {"accuracy", optional_number(r.per_rule_accuracy[k])}});
  }
  return j.dump(2) + "\n";
}

std::string to_csv(const CompletionReport& r) {
  std::string out = "rule,index,held_out,n_tests,n_correct,accuracy\n";
  for (RuleId rule : rule_inventory()) {
    const auto k = static_cast<std::size_t>(rule.index());
    const auto& acc = r.per_rule_accuracy[k];
    out += rule.name() + ',' + std::to_string(rule.index()) + ',' +
           (r.held_out.contains(rule) ? "1" : "0") + ',' + std::to_string(r.n_tests_per_rule[k]) +
           ',' + std::to_string(r.n_correct_per_rule[k]) + ',' +
           (acc ? detail::format_double(*acc) : std::string()) + '\n';
  }
  return out;
}

}  // namespace genraven
