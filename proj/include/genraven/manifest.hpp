#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace genraven {

inline constexpr int kManifestFormatVersion = 1;

/// Per-channel statistics for ML consumers. Informational: nothing in this
/// library normalizes.
struct Normalization {
  std::array<double, 3> mean{1.5, 2.5, 2.5};
  std::array<double, 3> std{2.5, 3.5, 3.5};
  friend bool operator==(const Normalization&, const Normalization&) = default;
};

/// Reproducibility record written next to every generated dataset.
struct DatasetManifest {
  int format_version = kManifestFormatVersion;
  std::uint64_t seed = 0;
  std::vector<std::string> rule_inventory;
  std::uint64_t inventory_digest = 0;
  std::vector<std::string> held_out;
  std::vector<std::string> rules;
  std::string split;
  std::uint64_t samples_per_rule = 0;
  std::uint64_t sample_count = 0;
  std::string purity_policy = "all-dimensions";
  Normalization normalization;
  std::string rng_scheme;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

/// FNV-1a 64 over the names, each terminated by '\n'.
std::uint64_t inventory_digest(std::span<const std::string> names);

/// Names of the canonical 40-rule inventory, in order.
std::vector<std::string> canonical_inventory_names();

/// Manifest prefilled with the canonical inventory, its digest and the RNG
/// scheme description.
DatasetManifest canonical_manifest();

/// Canonical JSON (sorted keys, two-space indent, trailing newline).
std::string manifest_to_json(const DatasetManifest& m);

/// Throws VersionError on unknown format_version, IntegrityError when the
/// digest does not match the inventory, FormatError on anything else.
DatasetManifest manifest_from_json(std::string_view text);

void write_manifest(const DatasetManifest& m, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

}  // namespace genraven
