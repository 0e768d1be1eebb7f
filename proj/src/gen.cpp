#include "genraven/gen.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <string>

#include "genraven/errors.hpp"
#include "genraven/rules.hpp"
#include "panel_builder.hpp"
#include "parallel.hpp"

namespace genraven {

std::vector<ValueTuple> value_tuple_support(Relation r, ValueDomain domain) {
  std::vector<ValueTuple> out;
  if (is_logic(r)) return out;
  for (int a = domain.lo; a <= domain.hi; ++a) {
    for (int b = domain.lo; b <= domain.hi; ++b) {
      const auto c = implied_third(r, a, b);
      if (c && domain.contains(*c)) out.push_back({{a, b, *c}});
    }
  }
  return out;
}

ValueTuple sample_value_tuple(Relation r, ValueDomain domain, CounterRng& rng) {
  const auto support = value_tuple_support(r, domain);
  if (support.empty()) {
    throw InfeasibleError(std::string(relation_name(r)) + " has no tuple in [" +
                          std::to_string(domain.lo) + "," + std::to_string(domain.hi) + "]");
  }
  return support[static_cast<std::size_t>(rng.uniform(0, static_cast<int>(support.size()) - 1))];
}

namespace {

constexpr int kMaxSetDraws = 1 << 16;

bool fits_panel(std::uint16_t s) { return s != 0 && std::popcount(s) <= kSlotsPerPanel; }

}  // namespace

SetTriple sample_value_sets(Relation op, ValueDomain domain, CounterRng& rng) {
  if (!is_logic(op)) throw InfeasibleError("value sets need a logic relation");
  for (int i = 0; i < kMaxSetDraws; ++i) {
    const std::uint16_t s1 = rng.nonempty_subset(domain.width());
    const std::uint16_t s2 = rng.nonempty_subset(domain.width());
    const std::uint16_t s3 = logic_combine(op, s1, s2);
    if (s1 != s2 && fits_panel(s1) && fits_panel(s2) && fits_panel(s3)) {
      const int shift = domain.lo;
      return {static_cast<std::uint16_t>(s1 << shift), static_cast<std::uint16_t>(s2 << shift),
              static_cast<std::uint16_t>(s3 << shift)};
    }
  }
  throw InfeasibleError("no admissible value sets found");
}

SetTriple sample_position_sets(Relation op, CounterRng& rng) {
  if (!is_logic(op)) throw InfeasibleError("position sets need a logic relation");
  for (int i = 0; i < kMaxSetDraws; ++i) {
    const std::uint16_t p1 = rng.nonempty_subset(kSlotsPerPanel);
    const std::uint16_t p2 = rng.nonempty_subset(kSlotsPerPanel);
    const std::uint16_t p3 = logic_combine(op, p1, p2);
    if (p1 != p2 && p3 != 0) return {p1, p2, p3};
  }
  throw InfeasibleError("no admissible position sets found");
}

namespace {

using detail::AttributeConstraint;

class RowBuilder {
 public:
  RowBuilder(RuleId target, CounterRng& rng) : target_(target), rng_(rng) {}

  void draw_plan() {
    const Relation rel = target_.relation();
    const Dimension dim = target_.dimension();
    if (dim == Dimension::Position) {
      sets_ = sample_position_sets(rel, rng_);
    } else if (dim == Dimension::Number) {
      tuple_ = sample_value_tuple(rel, kCountDomain, rng_).values;
    } else if (is_logic(rel)) {
      sets_ = sample_value_sets(rel, domain_of(as_attribute(dim)), rng_);
    } else {
      tuple_ = sample_value_tuple(rel, domain_of(as_attribute(dim)), rng_).values;
    }
  }

  void draw_counts() {
    const Dimension dim = target_.dimension();
    for (int p = 0; p < 3; ++p) {
      if (dim == Dimension::Position) {
        counts_[p] = std::popcount(sets_[p]);
      } else if (dim == Dimension::Number) {
        counts_[p] = tuple_[p];
      } else if (is_logic(target_.relation())) {
        counts_[p] = rng_.uniform(std::popcount(sets_[p]), kSlotsPerPanel);
      } else {
        counts_[p] = rng_.uniform(kCountDomain.lo, kCountDomain.hi);
      }
    }
  }

  void draw_positions() {
    for (int p = 0; p < 3; ++p) {
      positions_[p] = target_.dimension() == Dimension::Position
                          ? sets_[p]
                          : rng_.subset_of_size(kSlotsPerPanel, counts_[p]);
    }
  }

  void draw_attribute(Attribute a) {
    const auto c = static_cast<int>(a);
    for (int p = 0; p < 3; ++p) {
      detail::draw_values(values_[p][c], counts_[p], a, constraint(a, p), rng_);
    }
  }

  void draw_all() {
    draw_counts();
    draw_positions();
    for (Attribute a : kAttributes) draw_attribute(a);
  }

  bool positions_fixed() const {
    if (target_.dimension() == Dimension::Position) return true;
    return std::all_of(counts_.begin(), counts_.end(), [](int n) { return n == kSlotsPerPanel; });
  }

  Row row() const {
    Row r;
    for (int p = 0; p < 3; ++p) r.panels[p] = detail::place_objects(positions_[p], values_[p]);
    return r;
  }

 private:
  AttributeConstraint constraint(Attribute a, int panel) const {
    if (target_.dimension() != as_dimension(a)) return AttributeConstraint::free();
    if (is_logic(target_.relation())) return AttributeConstraint::covering(sets_[panel]);
    return AttributeConstraint::uniform(tuple_[panel]);
  }

  RuleId target_;
  CounterRng& rng_;
  std::array<int, 3> tuple_{};
  SetTriple sets_{};
  std::array<int, 3> counts_{};
  std::array<std::uint16_t, 3> positions_{};
  std::array<detail::ObjectValues, 3> values_{};
};

}  // namespace

Row generate_row(RuleId target, CounterRng& rng, const GenLimits& limits) {
  RowBuilder builder(target, rng);
  const RuleSet own = RuleSet::all().on_dimension(target.dimension());
  for (int restart = 0; restart <= limits.max_row_restarts; ++restart) {
    builder.draw_plan();
    builder.draw_all();
    for (int attempt = 0; attempt < limits.max_stage_attempts; ++attempt) {
      Row row = builder.row();
      const RuleSet offending = applicable_rules(row) & ~own;
      if (offending.empty()) return row;

      if (!offending.on_dimension(Dimension::Number).empty()) {
        if (target.dimension() == Dimension::Position) break;  // counts are forced
        builder.draw_all();
        continue;
      }
      if (!offending.on_dimension(Dimension::Position).empty()) {
        if (builder.positions_fixed()) break;
        builder.draw_positions();
      }
      for (Attribute a : kAttributes) {
        if (!offending.on_dimension(as_dimension(a)).empty()) builder.draw_attribute(a);
      }
    }
  }
  throw GenerationFailure("rejection budget exhausted for " + target.name());
}

Sample generate_sample(RuleId target, CounterRng& rng, const GenLimits& limits) {
  Sample s;
  for (auto& row : s.rows) row = generate_row(target, rng, limits);
  s.label = target;
  return s;
}

StreamLabel stream_label(Split s) noexcept {
  switch (s) {
    case Split::Train:
      return StreamLabel::Train;
    case Split::Test:
      return StreamLabel::Test;
    case Split::Control:
      return StreamLabel::Control;
  }
  return StreamLabel::Train;
}

const char* split_name(Split s) noexcept {
  switch (s) {
    case Split::Train:
      return "train";
    case Split::Test:
      return "test";
    case Split::Control:
      return "control";
  }
  return "train";
}

std::vector<RuleId> default_held_out() {
  return {*RuleId::find(Relation::Const, Dimension::Color),
          *RuleId::find(Relation::ProgP1, Dimension::Size),
          *RuleId::find(Relation::ArithM, Dimension::Number),
          *RuleId::find(Relation::Xor, Dimension::Shape),
          *RuleId::find(Relation::And, Dimension::Position)};
}

std::vector<RuleId> generated_rules(const GenConfig& cfg) {
  RuleSet requested;
  if (cfg.rules.empty()) {
    requested = RuleSet::all();
  } else {
    for (RuleId r : cfg.rules) requested.insert(r);
  }
  if (cfg.split == Split::Train) {
    for (RuleId r : cfg.held_out) requested.erase(r);
  }
  return requested.members();
}

CounterRng sample_stream(std::uint64_t seed, Split split, RuleId rule, std::uint64_t index) {
  if (index > std::numeric_limits<std::uint32_t>::max()) {
    throw std::out_of_range("sample index exceeds the 32-bit stream counter");
  }
  return CounterRng(StreamKey{seed, stream_label(split), static_cast<std::uint32_t>(rule.index()),
                              static_cast<std::uint32_t>(index)});
}

DatasetManifest make_manifest(const GenConfig& cfg) {
  DatasetManifest m = canonical_manifest();
  m.seed = cfg.seed;
  for (RuleId r : cfg.held_out) m.held_out.push_back(r.name());
  const auto rules = generated_rules(cfg);
  for (RuleId r : rules) m.rules.push_back(r.name());
  m.split = split_name(cfg.split);
  m.samples_per_rule = cfg.samples_per_rule;
  m.sample_count = cfg.samples_per_rule * rules.size();
  return m;
}

std::vector<Sample> generate_range(const GenConfig& cfg, std::uint64_t begin, std::uint64_t end) {
  const auto rules = generated_rules(cfg);
  const std::uint64_t total = cfg.samples_per_rule * rules.size();
  end = std::min(end, total);
  if (begin >= end) return {};
  std::vector<Sample> out(end - begin);
  detail::parallel_for(out.size(), cfg.workers, [&](std::size_t i) {
    const std::uint64_t flat = begin + i;
    const RuleId rule = rules[flat / cfg.samples_per_rule];
    const std::uint64_t index = flat % cfg.samples_per_rule;
    CounterRng rng = sample_stream(cfg.seed, cfg.split, rule, index);
    try {
      out[i] = generate_sample(rule, rng, cfg.limits);
    } catch (const GenerationFailure& e) {
      throw GenerationFailure(std::string(e.what()) + " (rule " + rule.name() + ", index " +
                              std::to_string(index) + ")");
    }
  });
  return out;
}

Dataset generate_dataset(const GenConfig& cfg) {
  Dataset d;
  d.manifest = make_manifest(cfg);
  d.samples = generate_range(cfg, 0, d.manifest.sample_count);
  return d;
}

}  // namespace genraven
