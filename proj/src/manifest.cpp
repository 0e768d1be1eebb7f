#include "genraven/manifest.hpp"

#include <cstdio>
#include <fstream>

#include "genraven/core.hpp"
#include "genraven/errors.hpp"
#include "json.hpp"

namespace genraven {
namespace {

constexpr const char* kRngScheme =
    "philox4x32-10; key = seed (low word, high word); counter = {block, sample index, rule "
    "index, stream label}; labels train=1 test=2 control=3 completion=4 baseline=5";

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::uint64_t inventory_digest(std::span<const std::string> names) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto feed = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (const std::string& name : names) {
    for (char c : name) feed(static_cast<unsigned char>(c));
    feed('\n');
  }
  return h;
}

std::vector<std::string> canonical_inventory_names() {
  std::vector<std::string> out;
  for (RuleId r : rule_inventory()) out.push_back(r.name());
  return out;
}

DatasetManifest canonical_manifest() {
  DatasetManifest m;
  m.rule_inventory = canonical_inventory_names();
  m.inventory_digest = inventory_digest(m.rule_inventory);
  m.rng_scheme = kRngScheme;
  return m;
}

std::string manifest_to_json(const DatasetManifest& m) {
  nlohmann::json j;
  j["format_version"] = m.format_version;
  j["seed"] = m.seed;
  j["rule_inventory"] = m.rule_inventory;
  j["inventory_digest"] = hex64(m.inventory_digest);
  j["held_out"] = m.held_out;
  j["rules"] = m.rules;
  j["split"] = m.split;
  j["samples_per_rule"] = m.samples_per_rule;
  j["sample_count"] = m.sample_count;
  j["purity_policy"] = m.purity_policy;
  j["normalization"] = {{"mean", m.normalization.mean}, {"std", m.normalization.std}};
  j["rng_scheme"] = m.rng_scheme;
  return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("manifest is not valid JSON: ") + e.what(),
                      static_cast<std::int64_t>(e.byte));
  }
  if (!j.is_object() || !j.contains("format_version")) {
    throw FormatError("manifest lacks format_version");
  }
  DatasetManifest m;
  try {
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != kManifestFormatVersion) {
      throw VersionError("unsupported manifest format_version " + std::to_string(m.format_version));
    }
    m.seed = j.at("seed").get<std::uint64_t>();
    m.rule_inventory = j.at("rule_inventory").get<std::vector<std::string>>();
    const auto digest_text = j.at("inventory_digest").get<std::string>();
    std::size_t used = 0;
    m.inventory_digest = std::stoull(digest_text, &used, 16);
    if (used != digest_text.size() || digest_text.size() != 16) {
      throw FormatError("inventory_digest must be 16 hex digits");
    }
    m.held_out = j.at("held_out").get<std::vector<std::string>>();
    m.rules = j.at("rules").get<std::vector<std::string>>();
    m.split = j.at("split").get<std::string>();
    m.samples_per_rule = j.at("samples_per_rule").get<std::uint64_t>();
    m.sample_count = j.at("sample_count").get<std::uint64_t>();
    m.purity_policy = j.at("purity_policy").get<std::string>();
    m.normalization.mean = j.at("normalization").at("mean").get<std::array<double, 3>>();
    m.normalization.std = j.at("normalization").at("std").get<std::array<double, 3>>();
    m.rng_scheme = j.at("rng_scheme").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw FormatError("inventory_digest must be 16 hex digits");
  } catch (const std::out_of_range&) {
    throw FormatError("inventory_digest must be 16 hex digits");
  }
  if (inventory_digest(m.rule_inventory) != m.inventory_digest) {
    throw IntegrityError("inventory_digest " + hex64(m.inventory_digest) +
                         " does not match rule_inventory (expected " +
                         hex64(inventory_digest(m.rule_inventory)) + ")");
  }
  return m;
}

void write_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot create " + path.string());
  out << manifest_to_json(m);
  if (!out) throw FormatError("write failed for " + path.string());
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return manifest_from_json(text);
}

}  // namespace genraven
