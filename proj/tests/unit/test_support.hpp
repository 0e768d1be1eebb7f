#pragma once

#include <initializer_list>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "genraven/core.hpp"
#include "genraven/gen.hpp"
#include "genraven/random.hpp"
#include "genraven/rules.hpp"

namespace genraven::testing {

inline RuleId rule(std::string_view name) {
  const auto r = RuleId::parse(name);
  if (!r) throw std::invalid_argument(std::string(name));
  return *r;
}

inline Object obj(int shape, int size, int color) {
  return Object{static_cast<std::int8_t>(shape), static_cast<std::int8_t>(size),
                static_cast<std::int8_t>(color)};
}

/// Panel holding the given (slot, object) pairs.
inline Panel panel_of(std::initializer_list<std::pair<int, Object>> items) {
  Panel p;
  for (const auto& [slot, o] : items) p.slots[slot] = Slot::of(o);
  return p;
}

/// Identical objects at every slot in `slots`.
inline Panel filled(std::initializer_list<int> slots, Object o) {
  Panel p;
  for (int s : slots) p.slots[s] = Slot::of(o);
  return p;
}

inline Row row_of(const Panel& a, const Panel& b, const Panel& c) { return Row{{a, b, c}}; }

inline std::set<std::string> names(RuleSet s) {
  std::set<std::string> out;
  for (RuleId r : s.members()) out.insert(r.name());
  return out;
}

/// `per_rule` generated rows for every inventory rule, drawn from a test-only stream.
inline std::vector<std::pair<RuleId, Row>> generated_rows(int per_rule, std::uint64_t seed = 99) {
  std::vector<std::pair<RuleId, Row>> out;
  for (RuleId r : rule_inventory()) {
    CounterRng rng(StreamKey{seed, StreamLabel::Baseline, static_cast<std::uint32_t>(r.index()), 0});
    for (int i = 0; i < per_rule; ++i) out.emplace_back(r, generate_row(r, rng));
  }
  return out;
}

/// Random row: each slot occupied with probability 1/2, attributes drawn from
/// narrow ranges so that rules fire by coincidence now and then.
inline Row random_row(CounterRng& rng, int max_value = 2) {
  Row row;
  for (auto& p : row.panels) {
    for (auto& s : p.slots) {
      if (rng.uniform(0, 1) == 0) continue;
      s = Slot::of(obj(rng.uniform(0, max_value), rng.uniform(0, max_value), rng.uniform(0, max_value)));
    }
  }
  return row;
}

/// Flips one attribute of one object to a different in-domain value.
inline Row perturb_one_object(Row row, CounterRng& rng) {
  std::vector<std::pair<int, int>> occupied;
  for (int p = 0; p < 3; ++p) {
    for (int s = 0; s < kSlotsPerPanel; ++s) {
      if (!row.panels[p].slots[s].is_empty()) occupied.emplace_back(p, s);
    }
  }
  const auto [p, s] = occupied[rng.uniform(0, static_cast<int>(occupied.size()) - 1)];
  const Attribute a = kAttributes[rng.uniform(0, 2)];
  Slot& slot = row.panels[p].slots[s];
  const ValueDomain d = domain_of(a);
  const int old = slot.get(a);
  int v = rng.uniform(d.lo, d.hi - 1);
  if (v >= old) ++v;
  slot.set(a, static_cast<std::int8_t>(v));
  return row;
}

/// Writes one raw value somewhere in the row: an out-of-domain attribute, a
/// partially empty slot or an ordinary in-domain change.
inline Row corrupt_raw(Row row, CounterRng& rng) {
  Slot& slot = row.panels[rng.uniform(0, 2)].slots[rng.uniform(0, 8)];
  const Attribute a = kAttributes[rng.uniform(0, 2)];
  slot.set(a, static_cast<std::int8_t>(rng.uniform(-3, 12)));
  return row;
}

/// Mixed corpus: generated rows, one-object perturbations, raw corruptions
/// (often malformed) and random rows, in equal shares.
inline std::vector<Row> mixed_rows(int n, std::uint64_t seed) {
  std::vector<Row> out;
  out.reserve(n);
  CounterRng rng(StreamKey{seed, StreamLabel::Baseline, 63, 0});
  const auto inv = rule_inventory();
  for (int i = 0; i < n; ++i) {
    const RuleId r = inv[static_cast<std::size_t>(i / 4) % inv.size()];
    switch (i % 4) {
      case 0:
        out.push_back(generate_row(r, rng));
        break;
      case 1:
        out.push_back(perturb_one_object(generate_row(r, rng), rng));
        break;
      case 2:
        out.push_back(corrupt_raw(generate_row(r, rng), rng));
        break;
      default:
        out.push_back(random_row(rng, i % 8 == 3 ? 2 : 9));
        break;
    }
  }
  return out;
}

inline Row reversed(const Row& r) { return row_of(r.panels[2], r.panels[1], r.panels[0]); }
inline Row swapped12(const Row& r) { return row_of(r.panels[1], r.panels[0], r.panels[2]); }

}  // namespace genraven::testing
