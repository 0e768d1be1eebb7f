#pragma once

// Shared by the generator and the completion oracle: drawing attribute values
// for the objects of one panel and placing them into slots.

#include <array>
#include <bit>
#include <cstdint>
#include <span>

#include "genraven/core.hpp"
#include "genraven/random.hpp"

namespace genraven::detail {

struct AttributeConstraint {
  enum class Kind { Free, Uniform, Covering };
  Kind kind = Kind::Free;
  int value = 0;           // Uniform
  std::uint16_t set = 0;   // Covering: bit v = value v

  static AttributeConstraint free() { return {}; }
  static AttributeConstraint uniform(int v) { return {Kind::Uniform, v, 0}; }
  static AttributeConstraint covering(std::uint16_t s) { return {Kind::Covering, 0, s}; }
};

/// Values for the first `count` objects. Covering puts every member of the
/// set at least once (count must be >= |set|) and fills the rest uniformly
/// from the set, then shuffles.
inline void draw_values(std::span<std::int8_t> out, int count, Attribute a,
                        const AttributeConstraint& c, CounterRng& rng) {
  const ValueDomain d = domain_of(a);
  switch (c.kind) {
    case AttributeConstraint::Kind::Free:
      for (int k = 0; k < count; ++k) out[k] = static_cast<std::int8_t>(rng.uniform(d.lo, d.hi));
      break;
    case AttributeConstraint::Kind::Uniform:
      for (int k = 0; k < count; ++k) out[k] = static_cast<std::int8_t>(c.value);
      break;
    case AttributeConstraint::Kind::Covering: {
      std::array<std::int8_t, 16> members{};
      int m = 0;
      for (std::uint16_t b = c.set; b != 0; b &= b - 1) {
        members[m++] = static_cast<std::int8_t>(std::countr_zero(b));
      }
      int k = 0;
      for (; k < m && k < count; ++k) out[k] = members[k];
      for (; k < count; ++k) out[k] = members[rng.uniform(0, m - 1)];
      rng.shuffle(out.subspan(0, static_cast<std::size_t>(count)));
      break;
    }
  }
}

/// Per-panel object attributes, object k going to the k-th occupied slot.
using ObjectValues = std::array<std::array<std::int8_t, kSlotsPerPanel>, 3>;

inline Panel place_objects(std::uint16_t positions, const ObjectValues& values) {
  Panel p;
  int k = 0;
  for (int slot = 0; slot < kSlotsPerPanel; ++slot) {
    if ((positions >> slot) & 1U) {
      p.slots[slot] = Slot{values[0][k], values[1][k], values[2][k]};
      ++k;
    }
  }
  return p;
}

}  // namespace genraven::detail
