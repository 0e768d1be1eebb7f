#pragma once

// Domain types for GenRAVEN samples: objects, slots, panels, rows, samples,
// the 40-rule inventory and the canonical 3x9x9 integer encoding.

#include <array>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace genraven {

inline constexpr int kSlotsPerPanel = 9;
inline constexpr int kPanelsPerRow = 3;
inline constexpr int kRowsPerSample = 3;
inline constexpr int kPanelsPerSample = kPanelsPerRow * kRowsPerSample;
inline constexpr int kChannels = 3;
inline constexpr std::size_t kGridSize = kChannels * kPanelsPerSample * kSlotsPerPanel;  // 243
inline constexpr std::size_t kRuleCount = 40;

/// Object attribute; doubles as the channel index of the encoding.
enum class Attribute : std::uint8_t { Shape = 0, Size = 1, Color = 2 };

inline constexpr std::array<Attribute, 3> kAttributes = {Attribute::Shape, Attribute::Size,
                                                         Attribute::Color};

enum class Relation : std::uint8_t {
  Const,
  ProgP1,
  ProgM1,
  ProgP2,
  ProgM2,
  ArithP,
  ArithM,
  Xor,
  Or,
  And,
};

inline constexpr std::size_t kRelationCount = 10;

/// Rule dimension. The first three coincide numerically with Attribute.
enum class Dimension : std::uint8_t { Shape = 0, Size = 1, Color = 2, Number = 3, Position = 4 };

inline constexpr std::size_t kDimensionCount = 5;

/// Closed integer range [lo, hi].
struct ValueDomain {
  int lo = 0;
  int hi = 0;

  constexpr bool contains(int v) const noexcept { return v >= lo && v <= hi; }
  constexpr int width() const noexcept { return hi - lo + 1; }
  friend constexpr bool operator==(ValueDomain, ValueDomain) = default;
};

constexpr ValueDomain domain_of(Attribute a) noexcept {
  return a == Attribute::Shape ? ValueDomain{0, 6} : ValueDomain{0, 9};
}

/// Objects per panel admitted by rule semantics.
inline constexpr ValueDomain kCountDomain{1, 9};

constexpr bool is_attribute(Dimension d) noexcept { return static_cast<int>(d) < 3; }
constexpr Attribute as_attribute(Dimension d) noexcept { return static_cast<Attribute>(d); }
constexpr Dimension as_dimension(Attribute a) noexcept { return static_cast<Dimension>(a); }

constexpr bool is_logic(Relation r) noexcept {
  return r == Relation::Xor || r == Relation::Or || r == Relation::And;
}

std::string_view relation_name(Relation r);
std::string_view dimension_name(Dimension d);
std::string_view attribute_name(Attribute a);

/// One of the 40 (relation, dimension) rules; identified by its inventory index.
class RuleId {
 public:
  /// Throws std::out_of_range for indices outside 0..39.
  static RuleId from_index(int index);
  static std::optional<RuleId> find(Relation relation, Dimension dimension) noexcept;
  /// Parses names such as "CONST-SHAPE" or "PROG_P1-NUMBER".
  static std::optional<RuleId> parse(std::string_view name) noexcept;

  constexpr int index() const noexcept { return index_; }
  Relation relation() const noexcept;
  Dimension dimension() const noexcept;
  std::string name() const;

  friend constexpr auto operator<=>(RuleId, RuleId) = default;
  friend std::span<const RuleId> rule_inventory();

 private:
  constexpr explicit RuleId(std::uint8_t index) noexcept : index_(index) {}
  std::uint8_t index_;
};

/// The canonical inventory: attribute-major over SHAPE, SIZE, COLOR, NUMBER,
/// POSITION; relation order CONST..AND; NUMBER carries CONST, PROG and ARITH,
/// POSITION carries XOR, OR, AND.
std::span<const RuleId> rule_inventory();

/// Subset of the inventory, stored as a 40-bit mask.
class RuleSet {
 public:
  static constexpr std::uint64_t kUniverse = (std::uint64_t{1} << kRuleCount) - 1;

  constexpr RuleSet() = default;
  constexpr explicit RuleSet(std::uint64_t bits) noexcept : bits_(bits & kUniverse) {}
  RuleSet(std::initializer_list<RuleId> rules) noexcept {
    for (RuleId r : rules) insert(r);
  }
  static constexpr RuleSet all() noexcept { return RuleSet(kUniverse); }

  constexpr bool contains(RuleId r) const noexcept { return (bits_ >> r.index()) & 1U; }
  constexpr void insert(RuleId r) noexcept { bits_ |= std::uint64_t{1} << r.index(); }
  constexpr void erase(RuleId r) noexcept { bits_ &= ~(std::uint64_t{1} << r.index()); }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  constexpr int size() const noexcept { return std::popcount(bits_); }
  constexpr std::uint64_t bits() const noexcept { return bits_; }

  /// Lowest-index member; nullopt when empty.
  std::optional<RuleId> first() const noexcept;
  std::vector<RuleId> members() const;
  /// Members restricted to one dimension.
  RuleSet on_dimension(Dimension d) const noexcept;
  /// Comma-separated rule names in inventory order.
  std::string to_string() const;

  constexpr RuleSet operator&(RuleSet o) const noexcept { return RuleSet(bits_ & o.bits_); }
  constexpr RuleSet operator|(RuleSet o) const noexcept { return RuleSet(bits_ | o.bits_); }
  constexpr RuleSet operator^(RuleSet o) const noexcept { return RuleSet(bits_ ^ o.bits_); }
  constexpr RuleSet operator~() const noexcept { return RuleSet(~bits_); }
  constexpr RuleSet& operator&=(RuleSet o) noexcept { return *this = *this & o; }
  constexpr RuleSet& operator|=(RuleSet o) noexcept { return *this = *this | o; }
  constexpr bool subset_of(RuleSet o) const noexcept { return (bits_ & ~o.bits_) == 0; }

  friend constexpr bool operator==(RuleSet, RuleSet) = default;

 private:
  std::uint64_t bits_ = 0;
};

struct Object {
  std::int8_t shape = 0;
  std::int8_t size = 0;
  std::int8_t color = 0;

  std::int8_t get(Attribute a) const noexcept {
    return a == Attribute::Shape ? shape : a == Attribute::Size ? size : color;
  }
  bool well_formed() const noexcept;
  friend bool operator==(const Object&, const Object&) = default;
};

enum class SlotStatus : std::uint8_t { ValidObject, ValidEmpty, Malformed };

/// Raw attribute triple at one panel position. (-1,-1,-1) is empty; anything
/// else outside the attribute domains, or partially -1, is malformed.
struct Slot {
  std::int8_t shape = -1;
  std::int8_t size = -1;
  std::int8_t color = -1;

  static constexpr Slot empty() noexcept { return {}; }
  static constexpr Slot of(Object o) noexcept { return {o.shape, o.size, o.color}; }

  std::int8_t get(Attribute a) const noexcept {
    return a == Attribute::Shape ? shape : a == Attribute::Size ? size : color;
  }
  void set(Attribute a, std::int8_t v) noexcept {
    (a == Attribute::Shape ? shape : a == Attribute::Size ? size : color) = v;
  }
  bool is_empty() const noexcept { return shape == -1 && size == -1 && color == -1; }
  SlotStatus status() const noexcept;
  std::optional<Object> object() const noexcept;

  friend bool operator==(const Slot&, const Slot&) = default;
};

/// 3x3 grid of slots, row-major.
struct Panel {
  std::array<Slot, kSlotsPerPanel> slots{};

  /// Bit i set iff slot i holds something other than the empty triple.
  std::uint16_t occupied_mask() const noexcept;
  int count() const noexcept { return std::popcount(occupied_mask()); }
  bool structurally_valid() const noexcept;

  friend bool operator==(const Panel&, const Panel&) = default;
};

struct Row {
  std::array<Panel, kPanelsPerRow> panels{};

  bool structurally_valid() const noexcept;
  friend bool operator==(const Row&, const Row&) = default;
};

struct Sample {
  std::array<Row, kRowsPerSample> rows{};
  std::optional<RuleId> label;

  /// Panel by raster index 0..8.
  Panel& panel(int raster) { return rows[raster / 3].panels[raster % 3]; }
  const Panel& panel(int raster) const { return rows[raster / 3].panels[raster % 3]; }

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Flat encoding, index = channel * 81 + panel * 9 + slot.
using Grid = std::array<std::int8_t, kGridSize>;

constexpr std::size_t grid_index(int channel, int panel, int slot) noexcept {
  return static_cast<std::size_t>(channel * kPanelsPerSample * kSlotsPerPanel +
                                  panel * kSlotsPerPanel + slot);
}

/// Per-slot classification produced by decode_sample, indexed [panel * 9 + slot].
struct StructureReport {
  std::array<SlotStatus, kPanelsPerSample * kSlotsPerPanel> slots{};

  SlotStatus at(int panel, int slot) const { return slots[panel * kSlotsPerPanel + slot]; }
  bool panel_valid(int panel) const;
  int malformed_count() const;
  bool ok() const { return malformed_count() == 0; }
};

Grid encode_sample(const Sample& s);

struct Decoded {
  Sample sample;
  StructureReport report;
};

/// Decodes 243 arbitrary integers. Values beyond the signed 8-bit range are
/// saturated (they are malformed either way). Throws DimensionError on length.
Decoded decode_sample(std::span<const std::int64_t> values);
Decoded decode_sample(const Grid& grid);

}  // namespace genraven
