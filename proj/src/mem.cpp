#include "genraven/mem.hpp"

#include <cstring>

#include "json.hpp"
#include "parallel.hpp"
#include "text_format.hpp"

namespace genraven {

const char* mem_level_name(MemLevel level) noexcept {
  switch (level) {
    case MemLevel::Sample:
      return "sample";
    case MemLevel::Row:
      return "row";
    case MemLevel::Panel:
      return "panel";
    case MemLevel::AttrRow:
      return "attr_row";
    case MemLevel::AttrPanel:
      return "attr_panel";
  }
  return "?";
}

namespace {

inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 32;
  x *= 0xd6e8feb86659fd93ULL;
  x ^= x >> 32;
  x *= 0xd6e8feb86659fd93ULL;
  x ^= x >> 32;
  return x;
}

std::uint64_t hash_bytes(std::span<const std::uint8_t> key) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ key.size();
  std::size_t i = 0;
  for (; i + 8 <= key.size(); i += 8) {
    std::uint64_t w;
    std::memcpy(&w, key.data() + i, 8);
    h = mix64(h ^ w) + 0x632be59bd9b4e019ULL;
  }
  std::uint64_t tail = 0;
  std::memcpy(&tail, key.data() + i, key.size() - i);
  return mix64(h ^ tail ^ (std::uint64_t{key.size() - i} << 56));
}

constexpr std::size_t kMinTable = 16;

}  // namespace

KeySet::KeySet(std::size_t key_width) : width_(key_width), table_(kMinTable) {}

void KeySet::reserve(std::size_t n) {
  keys_.reserve(n * width_);
  std::size_t want = kMinTable;
  while (want < 2 * n) want <<= 1;
  if (want > table_.size()) {
    const std::size_t old_count = count_;
    std::vector<Entry> old = std::move(table_);
    table_.assign(want, Entry{});
    for (const Entry& e : old) {
      if (e.index_plus_one == 0) continue;
      std::span<const std::uint8_t> key(keys_.data() + (e.index_plus_one - 1) * width_, width_);
      table_[find_slot(key, hash_bytes(key))] = e;
    }
    count_ = old_count;
  }
}

void KeySet::grow() { reserve(table_.size()); }

std::size_t KeySet::find_slot(std::span<const std::uint8_t> key, std::uint64_t hash) const {
  const std::size_t mask = table_.size() - 1;
  const auto tag = static_cast<std::uint32_t>(hash >> 32);
  for (std::size_t pos = hash & mask;; pos = (pos + 1) & mask) {
    const Entry& e = table_[pos];
    if (e.index_plus_one == 0) return pos;
    if (e.tag == tag &&
        std::memcmp(keys_.data() + (e.index_plus_one - 1) * width_, key.data(), width_) == 0) {
      return pos;
    }
  }
}

bool KeySet::insert(std::span<const std::uint8_t> key) {
  if (2 * (count_ + 1) > table_.size()) grow();
  const std::uint64_t h = hash_bytes(key);
  const std::size_t pos = find_slot(key, h);
  if (table_[pos].index_plus_one != 0) return false;
  keys_.insert(keys_.end(), key.begin(), key.end());
  ++count_;
  table_[pos] = Entry{static_cast<std::uint32_t>(count_), static_cast<std::uint32_t>(h >> 32)};
  return true;
}

bool KeySet::contains(std::span<const std::uint8_t> key) const {
  return table_[find_slot(key, hash_bytes(key))].index_plus_one != 0;
}

namespace {

constexpr std::size_t kPanelKey = kSlotsPerPanel * 3;
constexpr std::size_t kRowKey = kPanelKey * kPanelsPerRow;
constexpr std::size_t kSampleKey = kRowKey * kRowsPerSample;
constexpr std::size_t kAttrPanelKey = kSlotsPerPanel;
constexpr std::size_t kAttrRowKey = kAttrPanelKey * kPanelsPerRow;

void panel_key(const Panel& p, std::uint8_t* out) {
  for (const Slot& s : p.slots) {
    *out++ = static_cast<std::uint8_t>(s.shape);
    *out++ = static_cast<std::uint8_t>(s.size);
    *out++ = static_cast<std::uint8_t>(s.color);
  }
}

void attr_panel_key(const Panel& p, Attribute a, std::uint8_t* out) {
  for (const Slot& s : p.slots) *out++ = static_cast<std::uint8_t>(s.get(a));
}

std::array<std::uint8_t, kRowKey> row_key(const Row& r) {
  std::array<std::uint8_t, kRowKey> key{};
  for (int i = 0; i < kPanelsPerRow; ++i) panel_key(r.panels[i], key.data() + i * kPanelKey);
  return key;
}

std::array<std::uint8_t, kAttrRowKey> attr_row_key(const Row& r, Attribute a) {
  std::array<std::uint8_t, kAttrRowKey> key{};
  for (int i = 0; i < kPanelsPerRow; ++i) {
    attr_panel_key(r.panels[i], a, key.data() + i * kAttrPanelKey);
  }
  return key;
}

std::array<std::uint8_t, kSampleKey> sample_key(const Sample& s) {
  std::array<std::uint8_t, kSampleKey> key{};
  for (int i = 0; i < kRowsPerSample; ++i) {
    const auto rk = row_key(s.rows[i]);
    std::memcpy(key.data() + i * kRowKey, rk.data(), kRowKey);
  }
  return key;
}

}  // namespace

MemorizationIndex::MemorizationIndex()
    : samples_(kSampleKey),
      rows_(kRowKey),
      panels_(kPanelKey),
      attr_rows_{KeySet(kAttrRowKey), KeySet(kAttrRowKey), KeySet(kAttrRowKey)},
      attr_panels_{KeySet(kAttrPanelKey), KeySet(kAttrPanelKey), KeySet(kAttrPanelKey)} {}

MemorizationIndex MemorizationIndex::build(std::span<const Sample> reference) {
  MemorizationIndex idx;
  idx.n_reference_ = reference.size();
  const std::size_t n = reference.size();
  idx.samples_.reserve(n);
  idx.rows_.reserve(3 * n);
  idx.panels_.reserve(9 * n);
  for (int c = 0; c < 3; ++c) {
    idx.attr_rows_[c].reserve(3 * n);
    // Single-attribute panels repeat heavily; start smaller and let it grow.
    idx.attr_panels_[c].reserve(n);
  }
  std::array<std::uint8_t, kPanelKey> pk{};
  std::array<std::uint8_t, kAttrPanelKey> apk{};
  for (const Sample& s : reference) {
    idx.samples_.insert(sample_key(s));
    for (const Row& r : s.rows) {
      idx.rows_.insert(row_key(r));
      for (Attribute a : kAttributes) idx.attr_rows_[static_cast<int>(a)].insert(attr_row_key(r, a));
      for (const Panel& p : r.panels) {
        panel_key(p, pk.data());
        idx.panels_.insert(pk);
        for (Attribute a : kAttributes) {
          attr_panel_key(p, a, apk.data());
          idx.attr_panels_[static_cast<int>(a)].insert(apk);
        }
      }
    }
  }
  return idx;
}

bool MemorizationIndex::contains_sample(const Sample& s) const {
  return samples_.contains(sample_key(s));
}

bool MemorizationIndex::contains_row(const Row& r) const { return rows_.contains(row_key(r)); }

bool MemorizationIndex::contains_panel(const Panel& p) const {
  std::array<std::uint8_t, kPanelKey> pk{};
  panel_key(p, pk.data());
  return panels_.contains(pk);
}

bool MemorizationIndex::contains_attr_row(const Row& r, Attribute a) const {
  return attr_rows_[static_cast<int>(a)].contains(attr_row_key(r, a));
}

bool MemorizationIndex::contains_attr_panel(const Panel& p, Attribute a) const {
  std::array<std::uint8_t, kAttrPanelKey> apk{};
  attr_panel_key(p, a, apk.data());
  return attr_panels_[static_cast<int>(a)].contains(apk);
}

std::uint64_t MemorizationIndex::indexed(MemLevel level) const noexcept {
  switch (level) {
    case MemLevel::Sample:
      return n_reference_;
    case MemLevel::Row:
      return 3 * n_reference_;
    case MemLevel::Panel:
      return 9 * n_reference_;
    case MemLevel::AttrRow:
      return 9 * n_reference_;
    case MemLevel::AttrPanel:
      return 27 * n_reference_;
  }
  return 0;
}

std::uint64_t MemorizationIndex::distinct(MemLevel level) const noexcept {
  std::uint64_t total = 0;
  switch (level) {
    case MemLevel::Sample:
      return samples_.size();
    case MemLevel::Row:
      return rows_.size();
    case MemLevel::Panel:
      return panels_.size();
    case MemLevel::AttrRow:
      for (const auto& k : attr_rows_) total += k.size();
      return total;
    case MemLevel::AttrPanel:
      for (const auto& k : attr_panels_) total += k.size();
      return total;
  }
  return 0;
}

namespace {

/// Hit counts of one generated sample against one index.
struct SampleHits {
  std::uint8_t sample = 0;
  std::uint8_t rows = 0;
  std::uint8_t panels = 0;
  std::array<std::uint8_t, 3> attr_rows{};
  std::array<std::uint8_t, 3> attr_panels{};
};

SampleHits query(const Sample& s, const MemorizationIndex& idx) {
  SampleHits h;
  h.sample = idx.contains_sample(s) ? 1 : 0;
  for (const Row& r : s.rows) {
    h.rows += idx.contains_row(r) ? 1 : 0;
    for (Attribute a : kAttributes) {
      h.attr_rows[static_cast<int>(a)] += idx.contains_attr_row(r, a) ? 1 : 0;
    }
    for (const Panel& p : r.panels) {
      h.panels += idx.contains_panel(p) ? 1 : 0;
      for (Attribute a : kAttributes) {
        h.attr_panels[static_cast<int>(a)] += idx.contains_attr_panel(p, a) ? 1 : 0;
      }
    }
  }
  return h;
}

LevelStats stats(std::uint64_t hits, std::uint64_t units) {
  return {units, hits, units == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(units)};
}

MemComparison compare(std::span<const Sample> generated, const MemorizationIndex& idx,
                      unsigned workers) {
  std::vector<SampleHits> hits(generated.size());
  detail::parallel_for(generated.size(), workers,
                       [&](std::size_t i) { hits[i] = query(generated[i], idx); });
  std::uint64_t samples = 0, rows = 0, panels = 0;
  std::array<std::uint64_t, 3> attr_rows{}, attr_panels{};
  for (const SampleHits& h : hits) {
    samples += h.sample;
    rows += h.rows;
    panels += h.panels;
    for (int c = 0; c < 3; ++c) {
      attr_rows[c] += h.attr_rows[c];
      attr_panels[c] += h.attr_panels[c];
    }
  }
  const std::uint64_t n = generated.size();
  MemComparison out;
  out.levels[static_cast<int>(MemLevel::Sample)] = stats(samples, n);
  out.levels[static_cast<int>(MemLevel::Row)] = stats(rows, 3 * n);
  out.levels[static_cast<int>(MemLevel::Panel)] = stats(panels, 9 * n);
  out.levels[static_cast<int>(MemLevel::AttrRow)] =
      stats(attr_rows[0] + attr_rows[1] + attr_rows[2], 9 * n);
  out.levels[static_cast<int>(MemLevel::AttrPanel)] =
      stats(attr_panels[0] + attr_panels[1] + attr_panels[2], 27 * n);
  for (int c = 0; c < 3; ++c) {
    out.attr_row_channels[c] = stats(attr_rows[c], 3 * n);
    out.attr_panel_channels[c] = stats(attr_panels[c], 9 * n);
  }
  return out;
}

nlohmann::json to_json(const LevelStats& s) {
  return {{"units", s.units}, {"hits", s.hits}, {"fraction", s.fraction}};
}

nlohmann::json to_json(const MemComparison& c) {
  nlohmann::json j;
  for (MemLevel l : kMemLevels) j["levels"][mem_level_name(l)] = to_json(c[l]);
  for (Attribute a : kAttributes) {
    const std::string name(attribute_name(a));
    j["attr_row_channels"][name] = to_json(c.attr_row_channels[static_cast<int>(a)]);
    j["attr_panel_channels"][name] = to_json(c.attr_panel_channels[static_cast<int>(a)]);
  }
  return j;
}

void append_rows(std::string& out, const char* reference, const MemComparison& c) {
  const auto line = [&](const std::string& level, const LevelStats& s) {
    out += level + ',' + reference + ',' + std::to_string(s.units) + ',' + std::to_string(s.hits) +
           ',' + detail::format_double(s.fraction) + '\n';
  };
  for (MemLevel l : kMemLevels) line(mem_level_name(l), c[l]);
  for (Attribute a : kAttributes) {
    line(std::string("attr_row.") + std::string(attribute_name(a)),
         c.attr_row_channels[static_cast<int>(a)]);
  }
  for (Attribute a : kAttributes) {
    line(std::string("attr_panel.") + std::string(attribute_name(a)),
         c.attr_panel_channels[static_cast<int>(a)]);
  }
}

}  // namespace

MemReport memorization_report(std::span<const Sample> generated, const MemorizationIndex& train,
                              const MemorizationIndex* control, unsigned workers) {
  MemReport r;
  r.n_generated = generated.size();
  r.train = compare(generated, train, workers);
  if (control) r.control = compare(generated, *control, workers);
  return r;
}

std::string to_json(const MemReport& r) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "memorization";
  j["n_generated"] = r.n_generated;
  j["generated_deduplicated"] = false;
  j["train"] = to_json(r.train);
  j["control"] = r.control ? to_json(*r.control) : nlohmann::json(nullptr);
  return j.dump(2) + "\n";
}

std::string to_csv(const MemReport& r) {
  std::string out = "level,reference,units,hits,fraction\n";
  append_rows(out, "train", r.train);
  if (r.control) append_rows(out, "control", *r.control);
  return out;
}

}  // namespace genraven
