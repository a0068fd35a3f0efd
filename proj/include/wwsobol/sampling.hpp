// Input sampling, reproducible random streams and the CDF warp u = G(x).
#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

#include "wwsobol/core.hpp"

namespace wws {

using Engine = std::mt19937_64;

/// Splittable seed: (master_seed, stream_id) addresses an independent substream.
/// Streams are derived by hashing, never by consuming a parent generator, so
/// replication r can be run on its own without running 0..r-1 first.
class SeedStream {
 public:
  constexpr SeedStream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept
      : master_seed_(master_seed), stream_id_(stream_id) {}

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// 64-bit key identifying this stream.
  std::uint64_t key() const noexcept;
  Engine engine() const;
  /// One uniform in [0,1) computed from the key alone (no engine state).
  double uniform() const noexcept;
  /// Substream `index` of this stream.
  SeedStream child(std::uint64_t index) const noexcept { return {key(), index}; }

  bool operator==(const SeedStream&) const = default;

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
};

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// n x p matrix, column l i.i.d. from specs[l]. Deterministic in `stream`.
Matrix draw_iid(std::span<const InputSpec> specs, std::size_t n, const SeedStream& stream);

/// CDF of the declared uniform law, clamped to [0,1] outside the bounds.
double warp(const InputSpec& spec, double x) noexcept;

/// Fraction of `column` values <= x. Requires a nonempty column.
double empirical_warp(std::span<const double> column, double x);

/// Two independent samples for pick-freeze estimation.
struct DesignPair {
  Matrix sample_a;
  Matrix sample_b;
  std::uint64_t seed = 0;
};

/// Throws std::invalid_argument when n < 2.
DesignPair jansen_design(std::span<const InputSpec> specs, std::size_t n,
                         const SeedStream& stream);

}  // namespace wws
