#include "genraven/io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <limits>

#include "genraven/errors.hpp"
#include "json.hpp"

namespace genraven {
namespace {

void put_u16(std::uint8_t* p, std::uint16_t v) {
  p[0] = static_cast<std::uint8_t>(v);
  p[1] = static_cast<std::uint8_t>(v >> 8);
}

void put_u64(std::uint8_t* p, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::array<std::uint8_t, kGrvnHeaderSize> make_header(std::uint16_t flags, std::uint64_t count) {
  std::array<std::uint8_t, kGrvnHeaderSize> h{};
  std::memcpy(h.data(), kGrvnMagic.data(), 4);
  put_u16(h.data() + 4, kGrvnVersion);
  put_u16(h.data() + 6, flags);
  put_u64(h.data() + 8, count);
  return h;
}

struct Header {
  std::uint16_t flags;
  std::uint64_t count;
};

Header parse_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kGrvnMagic.data(), 4) != 0) {
    throw FormatError("bad GRVN magic", 0);
  }
  if (bytes.size() < kGrvnHeaderSize) throw FormatError("truncated GRVN header", static_cast<std::int64_t>(bytes.size()));
  const std::uint16_t version = get_u16(bytes.data() + 4);
  if (version != kGrvnVersion) {
    throw VersionError("unsupported GRVN version " + std::to_string(version), 4);
  }
  const std::uint16_t flags = get_u16(bytes.data() + 6);
  if ((flags & ~kGrvnFlagLabeled) != 0) {
    throw FormatError("unknown GRVN flag bits " + std::to_string(flags), 6);
  }
  return {flags, get_u64(bytes.data() + 8)};
}

void encode_record(const Sample& s, std::uint8_t* out) {
  out[0] = s.label ? static_cast<std::uint8_t>(s.label->index()) : kUnlabeledRule;
  const Grid g = encode_sample(s);
  std::memcpy(out + 1, g.data(), kGridSize);
}

Sample decode_record(const std::uint8_t* rec, std::uint16_t flags, std::int64_t offset) {
  Grid g;
  std::memcpy(g.data(), rec + 1, kGridSize);
  Sample s = decode_sample(g).sample;
  const std::uint8_t rule = rec[0];
  if (rule == kUnlabeledRule) {
    if (flags & kGrvnFlagLabeled) throw FormatError("unlabeled record in a labeled file", offset);
  } else if (rule >= kRuleCount) {
    throw FormatError("rule index " + std::to_string(rule) + " out of range", offset);
  } else {
    s.label = RuleId::from_index(rule);
  }
  return s;
}

std::uint16_t flags_for(std::span<const Sample> samples) {
  if (samples.empty()) return 0;
  for (const Sample& s : samples) {
    if (!s.label) return 0;
  }
  return kGrvnFlagLabeled;
}

void check_record_span(std::uint64_t count, std::uint64_t available, std::int64_t base) {
  const std::uint64_t need = count * kGrvnRecordSize;
  if (available < need) {
    const std::uint64_t complete = available / kGrvnRecordSize;
    throw FormatError("truncated GRVN data: header declares " + std::to_string(count) +
                          " records, " + std::to_string(complete) + " complete",
                      base + static_cast<std::int64_t>(complete * kGrvnRecordSize));
  }
  if (available > need) {
    throw FormatError("trailing bytes after GRVN records", base + static_cast<std::int64_t>(need));
  }
}

}  // namespace

std::vector<std::uint8_t> encode_grvn(std::span<const Sample> samples) {
  std::vector<std::uint8_t> out(kGrvnHeaderSize + samples.size() * kGrvnRecordSize);
  const auto header = make_header(flags_for(samples), samples.size());
  std::memcpy(out.data(), header.data(), header.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    encode_record(samples[i], out.data() + kGrvnHeaderSize + i * kGrvnRecordSize);
  }
  return out;
}

std::vector<Sample> decode_grvn(std::span<const std::uint8_t> bytes) {
  const Header h = parse_header(bytes);
  check_record_span(h.count, bytes.size() - kGrvnHeaderSize, kGrvnHeaderSize);
  std::vector<Sample> out;
  out.reserve(h.count);
  for (std::uint64_t i = 0; i < h.count; ++i) {
    const std::size_t off = kGrvnHeaderSize + i * kGrvnRecordSize;
    out.push_back(decode_record(bytes.data() + off, h.flags, static_cast<std::int64_t>(off)));
  }
  return out;
}

std::string sample_to_jsonl(const Sample& s) {
  const Grid g = encode_sample(s);
  nlohmann::json grid = nlohmann::json::array();
  for (int c = 0; c < kChannels; ++c) {
    nlohmann::json channel = nlohmann::json::array();
    for (int p = 0; p < kPanelsPerSample; ++p) {
      nlohmann::json panel = nlohmann::json::array();
      for (int k = 0; k < kSlotsPerPanel; ++k) panel.push_back(static_cast<int>(g[grid_index(c, p, k)]));
      channel.push_back(std::move(panel));
    }
    grid.push_back(std::move(channel));
  }
  nlohmann::json j;
  j["grid"] = std::move(grid);
  j["rule"] = s.label ? nlohmann::json(s.label->name()) : nlohmann::json(nullptr);
  return j.dump();
}

std::string encode_jsonl(std::span<const Sample> samples) {
  std::string out;
  for (const Sample& s : samples) {
    out += sample_to_jsonl(s);
    out += '\n';
  }
  return out;
}

namespace {

Sample sample_from_json(const nlohmann::json& j, std::int64_t offset) {
  if (!j.is_object() || !j.contains("grid") || !j.contains("rule")) {
    throw FormatError("JSONL record needs \"grid\" and \"rule\"", offset);
  }
  const auto& grid = j["grid"];
  const auto bad_shape = [&] { return FormatError("grid must have shape 3x9x9", offset); };
  if (!grid.is_array() || grid.size() != kChannels) throw bad_shape();
  std::array<std::int64_t, kGridSize> values{};
  for (int c = 0; c < kChannels; ++c) {
    const auto& channel = grid[c];
    if (!channel.is_array() || channel.size() != kPanelsPerSample) throw bad_shape();
    for (int p = 0; p < kPanelsPerSample; ++p) {
      const auto& panel = channel[p];
      if (!panel.is_array() || panel.size() != kSlotsPerPanel) throw bad_shape();
      for (int k = 0; k < kSlotsPerPanel; ++k) {
        const auto& v = panel[k];
        if (!v.is_number_integer()) throw FormatError("grid values must be integers", offset);
        const auto x = v.get<std::int64_t>();
        if (x < std::numeric_limits<std::int8_t>::min() || x > std::numeric_limits<std::int8_t>::max()) {
          throw FormatError("grid value " + std::to_string(x) + " outside signed 8-bit range", offset);
        }
        values[grid_index(c, p, k)] = x;
      }
    }
  }
  Sample s = decode_sample(std::span<const std::int64_t>(values)).sample;
  const auto& rule = j["rule"];
  if (rule.is_string()) {
    const auto id = RuleId::parse(rule.get<std::string>());
    if (!id) throw FormatError("unknown rule name \"" + rule.get<std::string>() + "\"", offset);
    s.label = *id;
  } else if (!rule.is_null()) {
    throw FormatError("\"rule\" must be a string or null", offset);
  }
  return s;
}

}  // namespace

std::vector<Sample> decode_jsonl(std::string_view text) {
  std::vector<Sample> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("invalid JSON: ") + e.what(), static_cast<std::int64_t>(pos));
      }
      out.push_back(sample_from_json(j, static_cast<std::int64_t>(pos)));
    }
    pos = end + 1;
  }
  return out;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot create " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw FormatError("write failed for " + path.string());
}

}  // namespace

void write_dataset(std::span<const Sample> samples, const std::filesystem::path& path,
                   DatasetFormat format) {
  if (format == DatasetFormat::Binary) {
    const auto bytes = encode_grvn(samples);
    write_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  } else {
    write_file(path, encode_jsonl(samples));
  }
}

DatasetFormat detect_format(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  if (in.gcount() == 4 && std::memcmp(magic.data(), kGrvnMagic.data(), 4) == 0) {
    return DatasetFormat::Binary;
  }
  return DatasetFormat::Jsonl;
}

std::vector<Sample> read_dataset(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  if (data.size() >= 4 && std::memcmp(data.data(), kGrvnMagic.data(), 4) == 0) {
    return decode_grvn(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
  }
  return decode_jsonl(data);
}

GrvnWriter::GrvnWriter(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw FormatError("cannot create " + path.string());
  const auto header = make_header(0, 0);
  out_.write(reinterpret_cast<const char*>(header.data()), header.size());
}

GrvnWriter::~GrvnWriter() {
  if (!closed_) {
    try {
      close();
    } catch (...) {
    }
  }
}

void GrvnWriter::append(std::span<const Sample> samples) {
  std::array<std::uint8_t, kGrvnRecordSize> rec{};
  for (const Sample& s : samples) {
    encode_record(s, rec.data());
    out_.write(reinterpret_cast<const char*>(rec.data()), rec.size());
    all_labeled_ = all_labeled_ && s.label.has_value();
    ++count_;
  }
  if (!out_) throw FormatError("write failed for " + path_.string());
}

void GrvnWriter::close() {
  if (closed_) return;
  closed_ = true;
  const std::uint16_t flags = (count_ > 0 && all_labeled_) ? kGrvnFlagLabeled : 0;
  const auto header = make_header(flags, count_);
  out_.seekp(0);
  out_.write(reinterpret_cast<const char*>(header.data()), header.size());
  out_.close();
  if (!out_) throw FormatError("write failed for " + path_.string());
}

GrvnReader::GrvnReader(const std::filesystem::path& path) {
  fd_ = ::open(path.c_str(), O_RDONLY);
  if (fd_ < 0) throw FormatError("cannot open " + path.string() + ": " + std::strerror(errno));
  std::array<std::uint8_t, kGrvnHeaderSize> header{};
  const ssize_t got = ::pread(fd_, header.data(), header.size(), 0);
  try {
    const Header h = parse_header(std::span<const std::uint8_t>(header.data(), got < 0 ? 0 : static_cast<std::size_t>(got)));
    flags_ = h.flags;
    count_ = h.count;
    const auto size = std::filesystem::file_size(path);
    check_record_span(count_, size - kGrvnHeaderSize, kGrvnHeaderSize);
  } catch (...) {
    ::close(fd_);
    throw;
  }
}

GrvnReader::~GrvnReader() {
  if (fd_ >= 0) ::close(fd_);
}

Sample GrvnReader::read(std::uint64_t index) const {
  if (index >= count_) throw std::out_of_range("record " + std::to_string(index) + " out of range");
  std::array<std::uint8_t, kGrvnRecordSize> rec{};
  const auto off = static_cast<off_t>(kGrvnHeaderSize + index * kGrvnRecordSize);
  if (::pread(fd_, rec.data(), rec.size(), off) != static_cast<ssize_t>(rec.size())) {
    throw FormatError("short read", static_cast<std::int64_t>(off));
  }
  return decode_record(rec.data(), flags_, static_cast<std::int64_t>(off));
}

std::vector<Sample> GrvnReader::read_all() const {
  std::vector<Sample> out;
  out.reserve(count_);
  for (std::uint64_t i = 0; i < count_; ++i) out.push_back(read(i));
  return out;
}

}  // namespace genraven
