#pragma once

#include <array>
#include <cstdint>

namespace spectranet {

/// xoshiro256** seeded through splitmix64, with Box-Muller normals.
///
/// Both the bit generator and the transform are spelled out here rather than
/// taken from <random>, whose distributions are not reproducible across
/// standard libraries. A seed therefore yields the same stream everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Uniform on [low, high).
  double uniform(double low, double high) { return low + (high - low) * uniform(); }

  /// Standard normal. Box-Muller produces pairs; the second value of a pair
  /// is returned by the following call.
  double normal();

 private:
  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// One splitmix64 step; also used to derive independent sub-stream seeds.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace spectranet
