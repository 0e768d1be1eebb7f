#include "genraven/core.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "genraven/errors.hpp"

namespace genraven {
namespace {

struct RuleEntry {
  Relation relation;
  Dimension dimension;
};

constexpr std::array<RuleEntry, kRuleCount> make_rule_table() {
  std::array<RuleEntry, kRuleCount> table{};
  std::size_t k = 0;
  for (int d = 0; d < 3; ++d) {
    for (int r = 0; r < static_cast<int>(kRelationCount); ++r) {
      table[k++] = {static_cast<Relation>(r), static_cast<Dimension>(d)};
    }
  }
  for (int r = 0; r <= static_cast<int>(Relation::ArithM); ++r) {
    table[k++] = {static_cast<Relation>(r), Dimension::Number};
  }
  for (Relation r : {Relation::Xor, Relation::Or, Relation::And}) {
    table[k++] = {r, Dimension::Position};
  }
  return table;
}

constexpr auto kRuleTable = make_rule_table();

constexpr std::array<std::string_view, kRelationCount> kRelationNames = {
    "CONST", "PROG_P1", "PROG_M1", "PROG_P2", "PROG_M2", "ARITH_P", "ARITH_M", "XOR", "OR", "AND"};

constexpr std::array<std::string_view, kDimensionCount> kDimensionNames = {
    "SHAPE", "SIZE", "COLOR", "NUMBER", "POSITION"};

}  // namespace

std::string_view relation_name(Relation r) { return kRelationNames[static_cast<int>(r)]; }
std::string_view dimension_name(Dimension d) { return kDimensionNames[static_cast<int>(d)]; }
std::string_view attribute_name(Attribute a) { return dimension_name(as_dimension(a)); }

RuleId RuleId::from_index(int index) {
  if (index < 0 || index >= static_cast<int>(kRuleCount)) {
    throw std::out_of_range("rule index " + std::to_string(index) + " outside 0..39");
  }
  return RuleId(static_cast<std::uint8_t>(index));
}

std::optional<RuleId> RuleId::find(Relation relation, Dimension dimension) noexcept {
  for (std::size_t i = 0; i < kRuleCount; ++i) {
    if (kRuleTable[i].relation == relation && kRuleTable[i].dimension == dimension) {
      return RuleId(static_cast<std::uint8_t>(i));
    }
  }
  return std::nullopt;
}

std::optional<RuleId> RuleId::parse(std::string_view name) noexcept {
  for (RuleId r : rule_inventory()) {
    if (r.name() == name) return r;
  }
  return std::nullopt;
}

Relation RuleId::relation() const noexcept { return kRuleTable[index_].relation; }
Dimension RuleId::dimension() const noexcept { return kRuleTable[index_].dimension; }

std::string RuleId::name() const {
  std::string out(relation_name(relation()));
  out += '-';
  out += dimension_name(dimension());
  return out;
}

std::span<const RuleId> rule_inventory() {
  static const auto inventory = [] {
    std::array<RuleId, kRuleCount> ids{
        RuleId(0),  RuleId(1),  RuleId(2),  RuleId(3),  RuleId(4),  RuleId(5),  RuleId(6),
        RuleId(7),  RuleId(8),  RuleId(9),  RuleId(10), RuleId(11), RuleId(12), RuleId(13),
        RuleId(14), RuleId(15), RuleId(16), RuleId(17), RuleId(18), RuleId(19), RuleId(20),
        RuleId(21), RuleId(22), RuleId(23), RuleId(24), RuleId(25), RuleId(26), RuleId(27),
        RuleId(28), RuleId(29), RuleId(30), RuleId(31), RuleId(32), RuleId(33), RuleId(34),
        RuleId(35), RuleId(36), RuleId(37), RuleId(38), RuleId(39)};
    return ids;
  }();
  return inventory;
}

std::optional<RuleId> RuleSet::first() const noexcept {
  if (bits_ == 0) return std::nullopt;
  return RuleId::from_index(std::countr_zero(bits_));
}

std::vector<RuleId> RuleSet::members() const {
  std::vector<RuleId> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (std::uint64_t b = bits_; b != 0; b &= b - 1) {
    out.push_back(RuleId::from_index(std::countr_zero(b)));
  }
  return out;
}

RuleSet RuleSet::on_dimension(Dimension d) const noexcept {
  RuleSet out;
  for (std::uint64_t b = bits_; b != 0; b &= b - 1) {
    RuleId r = RuleId::from_index(std::countr_zero(b));
    if (r.dimension() == d) out.insert(r);
  }
  return out;
}

std::string RuleSet::to_string() const {
  std::string out;
  for (RuleId r : members()) {
    if (!out.empty()) out += ',';
    out += r.name();
  }
  return out;
}

bool Object::well_formed() const noexcept {
  return domain_of(Attribute::Shape).contains(shape) && domain_of(Attribute::Size).contains(size) &&
         domain_of(Attribute::Color).contains(color);
}

SlotStatus Slot::status() const noexcept {
  if (is_empty()) return SlotStatus::ValidEmpty;
  if (Object{shape, size, color}.well_formed()) return SlotStatus::ValidObject;
  return SlotStatus::Malformed;
}

std::optional<Object> Slot::object() const noexcept {
  if (status() != SlotStatus::ValidObject) return std::nullopt;
  return Object{shape, size, color};
}

std::uint16_t Panel::occupied_mask() const noexcept {
  std::uint16_t mask = 0;
  for (int i = 0; i < kSlotsPerPanel; ++i) {
    if (!slots[i].is_empty()) mask |= static_cast<std::uint16_t>(1U << i);
  }
  return mask;
}

bool Panel::structurally_valid() const noexcept {
  return std::none_of(slots.begin(), slots.end(),
                      [](const Slot& s) { return s.status() == SlotStatus::Malformed; });
}

bool Row::structurally_valid() const noexcept {
  return std::all_of(panels.begin(), panels.end(),
                     [](const Panel& p) { return p.structurally_valid(); });
}

bool StructureReport::panel_valid(int panel) const {
  for (int s = 0; s < kSlotsPerPanel; ++s) {
    if (at(panel, s) == SlotStatus::Malformed) return false;
  }
  return true;
}

int StructureReport::malformed_count() const {
  return static_cast<int>(std::count(slots.begin(), slots.end(), SlotStatus::Malformed));
}

Grid encode_sample(const Sample& s) {
  Grid g{};
  for (int p = 0; p < kPanelsPerSample; ++p) {
    const Panel& panel = s.panel(p);
    for (int k = 0; k < kSlotsPerPanel; ++k) {
      for (Attribute a : kAttributes) {
        g[grid_index(static_cast<int>(a), p, k)] = panel.slots[k].get(a);
      }
    }
  }
  return g;
}

Decoded decode_sample(std::span<const std::int64_t> values) {
  if (values.size() != kGridSize) {
    throw DimensionError("expected " + std::to_string(kGridSize) + " values, got " +
                         std::to_string(values.size()));
  }
  Decoded out;
  for (int p = 0; p < kPanelsPerSample; ++p) {
    Panel& panel = out.sample.panel(p);
    for (int k = 0; k < kSlotsPerPanel; ++k) {
      std::array<std::int64_t, 3> raw{};
      for (Attribute a : kAttributes) {
        const auto c = static_cast<int>(a);
        raw[c] = values[grid_index(c, p, k)];
        const auto clamped = std::clamp<std::int64_t>(raw[c], std::numeric_limits<std::int8_t>::min(),
                                                      std::numeric_limits<std::int8_t>::max());
        panel.slots[k].set(a, static_cast<std::int8_t>(clamped));
      }
      const auto in = [](Attribute a, std::int64_t v) {
        const ValueDomain d = domain_of(a);
        return v >= d.lo && v <= d.hi;
      };
      SlotStatus status = SlotStatus::Malformed;
      if (raw[0] == -1 && raw[1] == -1 && raw[2] == -1) {
        status = SlotStatus::ValidEmpty;
      } else if (in(Attribute::Shape, raw[0]) && in(Attribute::Size, raw[1]) &&
                 in(Attribute::Color, raw[2])) {
        status = SlotStatus::ValidObject;
      }
      out.report.slots[p * kSlotsPerPanel + k] = status;
    }
  }
  return out;
}

Decoded decode_sample(const Grid& grid) {
  std::array<std::int64_t, kGridSize> wide{};
  std::copy(grid.begin(), grid.end(), wide.begin());
  return decode_sample(std::span<const std::int64_t>(wide));
}

}  // namespace genraven
