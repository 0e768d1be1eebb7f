#pragma once

// Exact rule predicates. Every component that needs to know whether a row
// obeys a rule (generator, solver, metrics) goes through this header.

#include <array>
#include <cstdint>
#include <optional>

#include "genraven/core.hpp"

namespace genraven {

struct AttributeSummary {
  /// Bit v set iff some object in the panel has value v.
  std::uint16_t values = 0;
  /// Defined iff every object shares one value.
  std::optional<int> uniform;
};

struct PanelSummary {
  std::uint16_t occupied = 0;
  int count = 0;
  std::array<AttributeSummary, 3> attributes{};

  const AttributeSummary& operator[](Attribute a) const {
    return attributes[static_cast<int>(a)];
  }
};

/// nullopt for empty or structurally invalid panels.
std::optional<PanelSummary> panel_summary(const Panel& p);

/// Third value implied by a numeric relation, or nullopt for logic relations.
/// Does not check domains.
std::optional<int> implied_third(Relation r, int first, int second) noexcept;

/// True iff (a, b, c) obeys a numeric relation (CONST/PROG/ARITH).
bool numeric_relation_holds(Relation r, int a, int b, int c) noexcept;

/// XOR / OR / AND of two bit sets.
std::uint16_t logic_combine(Relation r, std::uint16_t lhs, std::uint16_t rhs) noexcept;

bool rule_applies(RuleId r, const Row& row);

/// Rules of the inventory satisfied by a row; empty for invalid rows.
RuleSet applicable_rules(const Row& row);

/// Same evaluation starting from precomputed summaries.
RuleSet applicable_rules(const std::array<PanelSummary, 3>& panels);

struct SharedRules {
  std::array<RuleSet, 3> per_row{};
  bool pair_shared = false;
  RuleSet all_shared;

  bool c2() const noexcept { return pair_shared; }
  bool c3() const noexcept { return !all_shared.empty(); }
};

SharedRules shared_rules(const Sample& s);

}  // namespace genraven
