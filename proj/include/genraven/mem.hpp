#pragma once

// Exact-copy memorization analysis at five granularities: whole samples,
// rows, panels, and single-attribute rows and panels.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "genraven/core.hpp"

namespace genraven {

enum class MemLevel { Sample, Row, Panel, AttrRow, AttrPanel };

inline constexpr std::array<MemLevel, 5> kMemLevels = {MemLevel::Sample, MemLevel::Row,
                                                       MemLevel::Panel, MemLevel::AttrRow,
                                                       MemLevel::AttrPanel};

const char* mem_level_name(MemLevel level) noexcept;

/// Exact membership set of fixed-width byte keys (open addressing, linear
/// probing). No false positives or negatives: every probe ends in a full
/// key comparison.
class KeySet {
 public:
  explicit KeySet(std::size_t key_width = 1);

  void reserve(std::size_t n);
  /// Returns true if the key was not yet present.
  bool insert(std::span<const std::uint8_t> key);
  bool contains(std::span<const std::uint8_t> key) const;
  std::size_t size() const noexcept { return count_; }
  std::size_t key_width() const noexcept { return width_; }

 private:
  struct Entry {
    std::uint32_t index_plus_one = 0;
    std::uint32_t tag = 0;
  };
  void grow();
  std::size_t find_slot(std::span<const std::uint8_t> key, std::uint64_t hash) const;

  std::size_t width_;
  std::size_t count_ = 0;
  std::vector<std::uint8_t> keys_;
  std::vector<Entry> table_;
};

/// Immutable after build; safe for concurrent queries.
class MemorizationIndex {
 public:
  static MemorizationIndex build(std::span<const Sample> reference);

  bool contains_sample(const Sample& s) const;
  bool contains_row(const Row& r) const;
  bool contains_panel(const Panel& p) const;
  bool contains_attr_row(const Row& r, Attribute a) const;
  bool contains_attr_panel(const Panel& p, Attribute a) const;

  /// Units fed to the index at a level (3 rows and 9 panels per sample, times
  /// 3 channels for the attribute levels).
  std::uint64_t indexed(MemLevel level) const noexcept;
  /// Distinct keys stored at a level.
  std::uint64_t distinct(MemLevel level) const noexcept;
  std::uint64_t reference_samples() const noexcept { return n_reference_; }

 private:
  MemorizationIndex();

  std::uint64_t n_reference_ = 0;
  KeySet samples_;
  KeySet rows_;
  KeySet panels_;
  std::array<KeySet, 3> attr_rows_;
  std::array<KeySet, 3> attr_panels_;
};

struct LevelStats {
  std::uint64_t units = 0;
  std::uint64_t hits = 0;
  double fraction = 0.0;
  friend bool operator==(const LevelStats&, const LevelStats&) = default;
};

struct MemComparison {
  std::array<LevelStats, 5> levels{};
  std::array<LevelStats, 3> attr_row_channels{};
  std::array<LevelStats, 3> attr_panel_channels{};

  const LevelStats& operator[](MemLevel l) const { return levels[static_cast<int>(l)]; }
  friend bool operator==(const MemComparison&, const MemComparison&) = default;
};

struct MemReport {
  std::uint64_t n_generated = 0;
  MemComparison train;
  std::optional<MemComparison> control;
};

/// Fractions are per unit over every generated row/panel; the generated set
/// is not deduplicated.
MemReport memorization_report(std::span<const Sample> generated, const MemorizationIndex& train,
                              const MemorizationIndex* control = nullptr, unsigned workers = 0);

std::string to_json(const MemReport& r);
std::string to_csv(const MemReport& r);

}  // namespace genraven
