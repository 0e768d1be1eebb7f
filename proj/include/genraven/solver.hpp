#pragma once

// Exact completion oracle for the ninth panel.

#include <array>
#include <cstdint>
#include <optional>

#include "genraven/core.hpp"
#include "genraven/random.hpp"

namespace genraven {

struct CompletionContext {
  std::array<Row, 2> rows12{};
  /// Panels 7 and 8 (first two panels of row 3).
  std::array<Panel, 2> prefix3{};

  /// Context of a full sample with its ninth panel dropped.
  static CompletionContext from_sample(const Sample& s);
  bool structurally_valid() const noexcept;
};

struct CompletionResult {
  Panel panel9;
  RuleId used_rule;
  RuleSet candidates;
};

enum class CompletionStrategy { First, Random };

/// True iff some third panel would make (first, second, third) obey `r`.
/// Invalid or empty panels are never feasible.
bool prefix_feasible(RuleId r, const Panel& first, const Panel& second);

/// Rules for which a completion exists given only the first two panels of a
/// row; its size measures how ambiguous the row is before panel 3 is seen.
RuleSet prefix_consistent_rules(const Panel& first, const Panel& second);

/// applicable(row1) & applicable(row2), restricted to rules feasible for the
/// row-3 prefix. Throws InvalidContext for structurally invalid panels.
RuleSet candidate_rules(const CompletionContext& ctx);

/// A panel making (prefix[0], prefix[1], panel) obey `r`, or nullopt when no
/// such panel exists. Only `r` is guaranteed; other dimensions are random.
std::optional<Panel> third_panel_for_rule(RuleId r, const std::array<Panel, 2>& prefix,
                                          CounterRng& rng);

/// Throws NoSharedRule when rows 1-2 share nothing, AllInfeasible when every
/// shared rule is blocked by the prefix, InvalidContext for malformed input.
CompletionResult complete_panel(const CompletionContext& ctx, CompletionStrategy strategy,
                                CounterRng& rng);

/// Stream used for completing context `index` under `seed`.
CounterRng completion_stream(std::uint64_t seed, std::uint64_t index);

}  // namespace genraven
