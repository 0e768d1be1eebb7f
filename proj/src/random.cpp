#include "genraven/random.hpp"

namespace genraven {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = std::uint64_t{a} * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline PhiloxCounter round(PhiloxCounter c, PhiloxKey k) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kMul0, c[0], hi0, lo0);
  mulhilo(kMul1, c[2], hi1, lo1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept {
  counter = round(counter, key);
  for (int r = 1; r < 10; ++r) {
    key[0] += kWeyl0;
    key[1] += kWeyl1;
    counter = round(counter, key);
  }
  return counter;
}

CounterRng::CounterRng(StreamKey key) noexcept
    : key_{static_cast<std::uint32_t>(key.seed), static_cast<std::uint32_t>(key.seed >> 32)},
      counter_{0, key.unit, key.rule, static_cast<std::uint32_t>(key.label)} {}

void CounterRng::refill() noexcept {
  buffer_ = philox4x32_10(counter_, key_);
  ++counter_[0];
  used_ = 0;
}

std::uint32_t CounterRng::next_u32() noexcept {
  if (used_ == 4) refill();
  return buffer_[used_++];
}

std::uint64_t CounterRng::next_u64() noexcept {
  const std::uint64_t hi = next_u32();
  return (hi << 32) | next_u32();
}

int CounterRng::uniform(int lo, int hi) noexcept {
  const auto range = static_cast<std::uint32_t>(hi - lo) + 1U;
  if (range == 0) return static_cast<int>(next_u32());  // full 32-bit span
  std::uint64_t m = std::uint64_t{next_u32()} * range;
  auto low = static_cast<std::uint32_t>(m);
  if (low < range) {
    const std::uint32_t threshold = (0U - range) % range;
    while (low < threshold) {
      m = std::uint64_t{next_u32()} * range;
      low = static_cast<std::uint32_t>(m);
    }
  }
  return lo + static_cast<int>(m >> 32);
}

std::uint16_t CounterRng::subset_of_size(int n, int k) noexcept {
  // Selection sampling (Knuth's algorithm S): each element kept with
  // probability (needed / remaining).
  std::uint16_t mask = 0;
  int needed = k;
  for (int i = 0; i < n && needed > 0; ++i) {
    if (uniform(0, n - i - 1) < needed) {
      mask |= static_cast<std::uint16_t>(1U << i);
      --needed;
    }
  }
  return mask;
}

std::uint16_t CounterRng::nonempty_subset(int n) noexcept {
  const int top = (1 << n) - 1;
  return static_cast<std::uint16_t>(uniform(1, top));
}

}  // namespace genraven
