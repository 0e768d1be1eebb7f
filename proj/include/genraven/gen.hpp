#pragma once

// Procedural generator. A row is built by fixing the structure demanded by
// the target rule (a value tuple, value sets, position sets or counts),
// filling every other dimension at random, and then re-drawing any
// non-target dimension that accidentally obeys a rule.

#include <array>
#include <cstdint>
#include <vector>

#include "genraven/core.hpp"
#include "genraven/manifest.hpp"
#include "genraven/random.hpp"

namespace genraven {

struct ValueTuple {
  std::array<int, 3> values{};
  friend bool operator==(const ValueTuple&, const ValueTuple&) = default;
};

/// All tuples in domain^3 obeying a CONST/PROG/ARITH relation, lexicographic.
std::vector<ValueTuple> value_tuple_support(Relation r, ValueDomain domain);

/// Uniform draw from value_tuple_support. Throws InfeasibleError when the
/// support is empty or the relation is a logic relation.
ValueTuple sample_value_tuple(Relation r, ValueDomain domain, CounterRng& rng);

/// Three bit sets; bit v stands for value v (value sets) or slot v (position sets).
using SetTriple = std::array<std::uint16_t, 3>;

/// S1, S2 uniform nonempty subsets with S1 != S2, S3 = op(S1, S2) nonempty and
/// every |Si| <= 9 so each panel can hold one object per value.
SetTriple sample_value_sets(Relation op, ValueDomain domain, CounterRng& rng);

/// P1, P2 uniform nonempty subsets of the 9 slots with P1 != P2 and
/// P3 = op(P1, P2) nonempty.
SetTriple sample_position_sets(Relation op, CounterRng& rng);

struct GenLimits {
  int max_stage_attempts = 100;
  int max_row_restarts = 10;
};

/// Row obeying `target` on which no rule of another dimension holds.
/// Throws GenerationFailure when the rejection budget runs out.
Row generate_row(RuleId target, CounterRng& rng, const GenLimits& limits = {});

/// Three independent rows under `target`, labelled with it.
Sample generate_sample(RuleId target, CounterRng& rng, const GenLimits& limits = {});

enum class Split { Train, Test, Control };

StreamLabel stream_label(Split s) noexcept;
const char* split_name(Split s) noexcept;

/// One rule per relation family, spread over dimensions.
std::vector<RuleId> default_held_out();

struct GenConfig {
  std::uint64_t seed = 0;
  /// Requested rules; empty means the whole inventory.
  std::vector<RuleId> rules;
  std::uint64_t samples_per_rule = 4000;
  std::vector<RuleId> held_out = default_held_out();
  /// Train excludes held-out rules; Test and Control use every requested rule.
  Split split = Split::Train;
  GenLimits limits;
  /// 0 picks std::thread::hardware_concurrency().
  unsigned workers = 0;
};

/// Rules actually generated for a configuration, in inventory order.
std::vector<RuleId> generated_rules(const GenConfig& cfg);

/// Stream that sample `index` of `rule` draws from.
CounterRng sample_stream(std::uint64_t seed, Split split, RuleId rule, std::uint64_t index);

struct Dataset {
  std::vector<Sample> samples;
  DatasetManifest manifest;
};

DatasetManifest make_manifest(const GenConfig& cfg);

/// Samples ordered rule-major (generated_rules order), then by index. Sample
/// (rule, i) is a pure function of (seed, split, rule, i).
Dataset generate_dataset(const GenConfig& cfg);

/// Generates samples [begin, end) of the flattened rule-major sequence; used
/// to stream very large datasets in chunks.
std::vector<Sample> generate_range(const GenConfig& cfg, std::uint64_t begin, std::uint64_t end);

}  // namespace genraven
