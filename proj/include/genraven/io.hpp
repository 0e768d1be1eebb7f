#pragma once

// Dataset interchange.
//
// GRVN binary layout (little-endian):
//   offset 0   4 bytes   magic "GRVN" (0x47 0x52 0x56 0x4E)
//   offset 4   u16       version, currently 1
//   offset 6   u16       flags; bit 0 = every record carries a rule label
//   offset 8   u64       record count
//   offset 16  records of 244 bytes: u8 rule index (255 = unlabeled) followed
//              by 243 int8 values in encode_sample order.
//
// JSONL: one object per line, {"grid": [[[..9]x9]x3], "rule": "NAME" | null},
// keys sorted, no whitespace.

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "genraven/core.hpp"

namespace genraven {

enum class DatasetFormat { Binary, Jsonl };

inline constexpr std::array<std::uint8_t, 4> kGrvnMagic = {0x47, 0x52, 0x56, 0x4E};
inline constexpr std::uint16_t kGrvnVersion = 1;
inline constexpr std::uint16_t kGrvnFlagLabeled = 0x1;
inline constexpr std::size_t kGrvnHeaderSize = 16;
inline constexpr std::size_t kGrvnRecordSize = 1 + kGridSize;
inline constexpr std::uint8_t kUnlabeledRule = 255;

std::vector<std::uint8_t> encode_grvn(std::span<const Sample> samples);
/// Throws FormatError (with byte offset) on bad magic, version, flags,
/// truncation, trailing bytes or rule index.
std::vector<Sample> decode_grvn(std::span<const std::uint8_t> bytes);

std::string sample_to_jsonl(const Sample& s);
std::string encode_jsonl(std::span<const Sample> samples);
/// Throws FormatError with the byte offset of the offending line.
std::vector<Sample> decode_jsonl(std::string_view text);

void write_dataset(std::span<const Sample> samples, const std::filesystem::path& path,
                   DatasetFormat format);
/// Format is detected from the leading magic bytes.
std::vector<Sample> read_dataset(const std::filesystem::path& path);
DatasetFormat detect_format(const std::filesystem::path& path);

/// Appends records to a GRVN file and patches count and flags on close().
class GrvnWriter {
 public:
  explicit GrvnWriter(const std::filesystem::path& path);
  ~GrvnWriter();
  GrvnWriter(const GrvnWriter&) = delete;
  GrvnWriter& operator=(const GrvnWriter&) = delete;

  void append(std::span<const Sample> samples);
  void close();
  std::uint64_t count() const noexcept { return count_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::uint64_t count_ = 0;
  bool all_labeled_ = true;
  bool closed_ = false;
};

/// Random access over a GRVN file; read() is safe to call concurrently.
class GrvnReader {
 public:
  explicit GrvnReader(const std::filesystem::path& path);
  ~GrvnReader();
  GrvnReader(const GrvnReader&) = delete;
  GrvnReader& operator=(const GrvnReader&) = delete;

  std::uint64_t size() const noexcept { return count_; }
  bool labeled() const noexcept { return (flags_ & kGrvnFlagLabeled) != 0; }
  Sample read(std::uint64_t index) const;
  std::vector<Sample> read_all() const;

 private:
  int fd_ = -1;
  std::uint16_t flags_ = 0;
  std::uint64_t count_ = 0;
};

}  // namespace genraven
