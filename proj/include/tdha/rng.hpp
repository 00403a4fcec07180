#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace tdha {

// Counter-based, platform-independent randomness. std::*_distribution output
// differs between standard libraries, so draws go through these helpers
// instead; identical keys give identical streams everywhere.

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// FNV-1a over the bytes of `text`.
std::uint64_t fnv1a64(std::string_view text) noexcept;

/// Folds a list of words into one 64-bit key.
std::uint64_t mix_keys(std::initializer_list<std::uint64_t> words) noexcept;

class KeyedRng {
 public:
  explicit KeyedRng(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t next_u64() noexcept;
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform integer in [0, bound), unbiased. `bound` must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;
  /// Standard normal via Box-Muller.
  double normal() noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace tdha
