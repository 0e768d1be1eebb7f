#pragma once

// Consistency metrics for unconditional samples and accuracy metrics for
// panel completion.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "genraven/core.hpp"
#include "genraven/rules.hpp"

namespace genraven {

inline constexpr int kReportSchemaVersion = 1;

template <typename T>
using PerRule = std::array<T, kRuleCount>;

struct ConsistencyReport {
  std::uint64_t n_samples = 0;
  std::uint64_t valid_rows = 0;
  std::uint64_t c2_samples = 0;
  std::uint64_t c3_samples = 0;
  double valid_row_fraction = 0.0;
  double c2_fraction = 0.0;
  double c3_fraction = 0.0;
  /// A C3 sample credits every rule in its shared set.
  PerRule<std::uint64_t> per_rule_c3_count{};
  /// Only C3 samples whose shared set is a single rule.
  PerRule<std::uint64_t> per_rule_c3_singleton_count{};
  /// count / n_samples * 40.
  PerRule<double> per_rule_c3_frequency_normalized{};
  PerRule<std::uint64_t> per_rule_valid_row_count{};

  friend bool operator==(const ConsistencyReport&, const ConsistencyReport&) = default;
};

/// Rows are evaluated in parallel (`workers` = 0 uses every core); the
/// result does not depend on the worker count.
ConsistencyReport consistency_report(std::span<const Sample> samples, unsigned workers = 0);

struct CompletionVerdict {
  bool c3 = false;
  RuleSet shared_rules;
  std::optional<bool> matched_ground_truth;
  bool structural_failure = false;
};

/// Scores `completion` as the ninth panel of `test` (whose own ninth panel is
/// ignored). Throws TestCaseError when the first eight panels are malformed.
CompletionVerdict score_completion(const Sample& test, const Panel& completion,
                                   std::optional<RuleId> label = std::nullopt);

struct CompletionReport {
  std::uint64_t n_tests = 0;
  std::uint64_t n_correct = 0;
  double overall_accuracy = 0.0;
  std::uint64_t n_trained = 0;
  std::uint64_t n_held_out = 0;
  /// nullopt when the split has no tests.
  std::optional<double> trained_accuracy;
  std::optional<double> held_out_accuracy;
  PerRule<std::uint64_t> n_tests_per_rule{};
  PerRule<std::uint64_t> n_correct_per_rule{};
  PerRule<std::optional<double>> per_rule_accuracy{};
  /// Fraction of completions whose shared set contains the generating rule.
  double ground_truth_match_fraction = 0.0;
  std::uint64_t structural_failures = 0;
  RuleSet held_out;
};

/// Tests must be labelled; completions are aligned by index and only their
/// ninth panel is used. Throws AlignmentError on length mismatch.
CompletionReport completion_report(std::span<const Sample> tests,
                                   std::span<const Sample> completions, RuleSet held_out);

/// Pearson correlation; nullopt when fewer than two points or zero variance.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// Per-rule correlation between completion accuracy and normalized C3
/// frequency over rules that have completion tests.
std::optional<double> accuracy_frequency_correlation(const CompletionReport& completion,
                                                     const ConsistencyReport& consistency);

std::string to_json(const ConsistencyReport& r);
std::string to_csv(const ConsistencyReport& r);
std::string to_json(const CompletionReport& r);
std::string to_csv(const CompletionReport& r);

}  // namespace genraven
