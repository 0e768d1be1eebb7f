#include "genraven/solver.hpp"

#include <bit>
#include <limits>
#include <stdexcept>
#include <vector>

#include "genraven/errors.hpp"
#include "genraven/rules.hpp"
#include "panel_builder.hpp"

namespace genraven {

CompletionContext CompletionContext::from_sample(const Sample& s) {
  CompletionContext ctx;
  ctx.rows12 = {s.rows[0], s.rows[1]};
  ctx.prefix3 = {s.rows[2].panels[0], s.rows[2].panels[1]};
  return ctx;
}

bool CompletionContext::structurally_valid() const noexcept {
  return rows12[0].structurally_valid() && rows12[1].structurally_valid() &&
         prefix3[0].structurally_valid() && prefix3[1].structurally_valid();
}

namespace {

/// What the third panel must look like in the target dimension.
struct ThirdPanelSpec {
  Dimension dimension;
  int value = 0;              // uniform attribute value or object count
  std::uint16_t set = 0;      // attribute value set or occupied positions
  bool logic = false;
};

std::optional<ThirdPanelSpec> third_panel_spec(RuleId r, const PanelSummary& a,
                                               const PanelSummary& b) {
  const Relation rel = r.relation();
  const Dimension dim = r.dimension();
  ThirdPanelSpec spec{dim};
  if (dim == Dimension::Position) {
    spec.set = logic_combine(rel, a.occupied, b.occupied);
    spec.logic = true;
    if (spec.set == 0) return std::nullopt;
    return spec;
  }
  if (dim == Dimension::Number) {
    const auto n = implied_third(rel, a.count, b.count);
    if (!n || !kCountDomain.contains(*n)) return std::nullopt;
    spec.value = *n;
    return spec;
  }
  const Attribute attr = as_attribute(dim);
  if (is_logic(rel)) {
    spec.set = logic_combine(rel, a[attr].values, b[attr].values);
    spec.logic = true;
    if (spec.set == 0 || std::popcount(spec.set) > kSlotsPerPanel) return std::nullopt;
    return spec;
  }
  if (!a[attr].uniform || !b[attr].uniform) return std::nullopt;
  const auto v = implied_third(rel, *a[attr].uniform, *b[attr].uniform);
  if (!v || !domain_of(attr).contains(*v)) return std::nullopt;
  spec.value = *v;
  return spec;
}

std::optional<std::array<PanelSummary, 2>> summarize_prefix(const Panel& first,
                                                            const Panel& second) {
  auto a = panel_summary(first);
  auto b = panel_summary(second);
  if (!a || !b) return std::nullopt;
  return std::array<PanelSummary, 2>{*a, *b};
}

Panel build_third_panel(const ThirdPanelSpec& spec, CounterRng& rng) {
  int count = 0;
  std::uint16_t positions = 0;
  if (spec.dimension == Dimension::Position) {
    positions = spec.set;
    count = std::popcount(positions);
  } else {
    if (spec.dimension == Dimension::Number) {
      count = spec.value;
    } else if (spec.logic) {
      count = rng.uniform(std::popcount(spec.set), kSlotsPerPanel);
    } else {
      count = rng.uniform(kCountDomain.lo, kCountDomain.hi);
    }
    positions = rng.subset_of_size(kSlotsPerPanel, count);
  }
  detail::ObjectValues values{};
  for (Attribute a : kAttributes) {
    auto c = detail::AttributeConstraint::free();
    if (spec.dimension == as_dimension(a)) {
      c = spec.logic ? detail::AttributeConstraint::covering(spec.set)
                     : detail::AttributeConstraint::uniform(spec.value);
    }
    detail::draw_values(values[static_cast<int>(a)], count, a, c, rng);
  }
  return detail::place_objects(positions, values);
}

}  // namespace

bool prefix_feasible(RuleId r, const Panel& first, const Panel& second) {
  const auto s = summarize_prefix(first, second);
  return s && third_panel_spec(r, (*s)[0], (*s)[1]).has_value();
}

RuleSet prefix_consistent_rules(const Panel& first, const Panel& second) {
  RuleSet out;
  const auto s = summarize_prefix(first, second);
  if (!s) return out;
  for (RuleId r : rule_inventory()) {
    if (third_panel_spec(r, (*s)[0], (*s)[1])) out.insert(r);
  }
  return out;
}

RuleSet candidate_rules(const CompletionContext& ctx) {
  if (!ctx.structurally_valid()) throw InvalidContext("completion context has malformed slots");
  const RuleSet shared = applicable_rules(ctx.rows12[0]) & applicable_rules(ctx.rows12[1]);
  return shared & prefix_consistent_rules(ctx.prefix3[0], ctx.prefix3[1]);
}

std::optional<Panel> third_panel_for_rule(RuleId r, const std::array<Panel, 2>& prefix,
                                          CounterRng& rng) {
  const auto s = summarize_prefix(prefix[0], prefix[1]);
  if (!s) return std::nullopt;
  const auto spec = third_panel_spec(r, (*s)[0], (*s)[1]);
  if (!spec) return std::nullopt;
  return build_third_panel(*spec, rng);
}

CompletionResult complete_panel(const CompletionContext& ctx, CompletionStrategy strategy,
                                CounterRng& rng) {
  const RuleSet candidates = candidate_rules(ctx);
  if (candidates.empty()) {
    const RuleSet shared = applicable_rules(ctx.rows12[0]) & applicable_rules(ctx.rows12[1]);
    if (shared.empty()) throw NoSharedRule("rows 1 and 2 share no rule");
    throw AllInfeasible("no rule shared by rows 1 and 2 (" + shared.to_string() +
                        ") can be completed from the row-3 prefix");
  }
  std::vector<RuleId> order = candidates.members();
  if (strategy == CompletionStrategy::Random) {
    std::swap(order[0], order[static_cast<std::size_t>(rng.uniform(0, static_cast<int>(order.size()) - 1))]);
  }
  const RuleId chosen = order.front();
  auto panel = third_panel_for_rule(chosen, ctx.prefix3, rng);
  // Candidacy already includes prefix feasibility.
  if (!panel) throw std::logic_error("candidate rule " + chosen.name() + " not constructible");
  return {*panel, chosen, candidates};
}

CounterRng completion_stream(std::uint64_t seed, std::uint64_t index) {
  if (index > std::numeric_limits<std::uint32_t>::max()) {
    throw std::out_of_range("context index exceeds the 32-bit stream counter");
  }
  return CounterRng(StreamKey{seed, StreamLabel::Completion, 0, static_cast<std::uint32_t>(index)});
}

}  // namespace genraven
