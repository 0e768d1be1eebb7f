#pragma once

// Counter-based random streams. Every generation unit (a sample, a completion
// context, ...) owns an independent stream keyed by (seed, stream label, rule
// index, unit index), so results never depend on scheduling or on which other
// units were requested.

#include <array>
#include <cstdint>
#include <span>
#include <utility>

namespace genraven {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., Random123).
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

/// Named stream families mixed into the counter so splits never overlap.
enum class StreamLabel : std::uint32_t {
  Train = 1,
  Test = 2,
  Control = 3,
  Completion = 4,
  Baseline = 5,
};

struct StreamKey {
  std::uint64_t seed = 0;
  StreamLabel label = StreamLabel::Train;
  std::uint32_t rule = 0;
  std::uint32_t unit = 0;
};

/// Sequential reader over one Philox stream. The counter layout is
/// {block, unit, rule, label} and the 64-bit seed is the key.
class CounterRng {
 public:
  explicit CounterRng(StreamKey key) noexcept;

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;

  /// Uniform integer in [lo, hi] (inclusive). Platform-independent: uses
  /// Lemire's multiply-and-reject on the raw 32-bit stream.
  int uniform(int lo, int hi) noexcept;

  /// Fisher-Yates shuffle driven by uniform().
  template <typename T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform(0, static_cast<int>(i) - 1));
      std::swap(items[i - 1], items[j]);
    }
  }

  /// Uniform k-element subset of {0..n-1} as a bit mask (n <= 16).
  std::uint16_t subset_of_size(int n, int k) noexcept;

  /// Uniform nonempty subset of {0..n-1} as a bit mask (n <= 16).
  std::uint16_t nonempty_subset(int n) noexcept;

 private:
  void refill() noexcept;

  PhiloxKey key_;
  PhiloxCounter counter_;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

}  // namespace genraven
