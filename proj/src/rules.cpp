#include "genraven/rules.hpp"

namespace genraven {

std::optional<PanelSummary> panel_summary(const Panel& p) {
  PanelSummary s;
  for (int i = 0; i < kSlotsPerPanel; ++i) {
    const Slot& slot = p.slots[i];
    switch (slot.status()) {
      case SlotStatus::Malformed:
        return std::nullopt;
      case SlotStatus::ValidEmpty:
        continue;
      case SlotStatus::ValidObject:
        break;
    }
    s.occupied |= static_cast<std::uint16_t>(1U << i);
    ++s.count;
    for (Attribute a : kAttributes) {
      s.attributes[static_cast<int>(a)].values |= static_cast<std::uint16_t>(1U << slot.get(a));
    }
  }
  if (s.count == 0) return std::nullopt;
  for (auto& attr : s.attributes) {
    if (std::has_single_bit(attr.values)) attr.uniform = std::countr_zero(attr.values);
  }
  return s;
}

std::optional<int> implied_third(Relation r, int first, int second) noexcept {
  switch (r) {
    case Relation::Const:
      return first == second ? std::optional<int>(second) : std::nullopt;
    case Relation::ProgP1:
    case Relation::ProgM1:
    case Relation::ProgP2:
    case Relation::ProgM2: {
      const int step = r == Relation::ProgP1   ? 1
                       : r == Relation::ProgM1 ? -1
                       : r == Relation::ProgP2 ? 2
                                               : -2;
      return second - first == step ? std::optional<int>(second + step) : std::nullopt;
    }
    case Relation::ArithP:
      return first + second;
    case Relation::ArithM:
      return first - second;
    default:
      return std::nullopt;
  }
}

bool numeric_relation_holds(Relation r, int a, int b, int c) noexcept {
  const auto third = implied_third(r, a, b);
  return third.has_value() && *third == c;
}

std::uint16_t logic_combine(Relation r, std::uint16_t lhs, std::uint16_t rhs) noexcept {
  switch (r) {
    case Relation::Xor:
      return lhs ^ rhs;
    case Relation::Or:
      return lhs | rhs;
    case Relation::And:
      return lhs & rhs;
    default:
      return 0;
  }
}

namespace {

bool applies(RuleId rule, const std::array<PanelSummary, 3>& s) {
  const Relation rel = rule.relation();
  const Dimension dim = rule.dimension();
  if (dim == Dimension::Position) {
    const std::uint16_t expect = logic_combine(rel, s[0].occupied, s[1].occupied);
    return expect != 0 && expect == s[2].occupied;
  }
  if (dim == Dimension::Number) {
    return numeric_relation_holds(rel, s[0].count, s[1].count, s[2].count);
  }
  const Attribute a = as_attribute(dim);
  if (is_logic(rel)) {
    const std::uint16_t expect = logic_combine(rel, s[0][a].values, s[1][a].values);
    return expect != 0 && expect == s[2][a].values;
  }
  if (!s[0][a].uniform || !s[1][a].uniform || !s[2][a].uniform) return false;
  // Summarized values are in-domain, so only the relation needs checking.
  return numeric_relation_holds(rel, *s[0][a].uniform, *s[1][a].uniform, *s[2][a].uniform);
}

std::optional<std::array<PanelSummary, 3>> summarize(const Row& row) {
  std::array<PanelSummary, 3> out;
  for (int i = 0; i < 3; ++i) {
    auto s = panel_summary(row.panels[i]);
    if (!s) return std::nullopt;
    out[i] = *s;
  }
  return out;
}

}  // namespace

bool rule_applies(RuleId r, const Row& row) {
  const auto s = summarize(row);
  return s && applies(r, *s);
}

RuleSet applicable_rules(const std::array<PanelSummary, 3>& panels) {
  RuleSet out;
  for (RuleId r : rule_inventory()) {
    if (applies(r, panels)) out.insert(r);
  }
  return out;
}

RuleSet applicable_rules(const Row& row) {
  const auto s = summarize(row);
  return s ? applicable_rules(*s) : RuleSet{};
}

SharedRules shared_rules(const Sample& sample) {
  SharedRules out;
  for (int i = 0; i < 3; ++i) out.per_row[i] = applicable_rules(sample.rows[i]);
  const auto& r = out.per_row;
  out.all_shared = r[0] & r[1] & r[2];
  out.pair_shared = !(r[0] & r[1]).empty() || !(r[0] & r[2]).empty() || !(r[1] & r[2]).empty();
  return out;
}

}  // namespace genraven
