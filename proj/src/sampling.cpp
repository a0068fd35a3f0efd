#include "wwsobol/sampling.hpp"

#include <algorithm>
#include <stdexcept>

namespace wws {
namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t SeedStream::key() const noexcept {
  return splitmix64(splitmix64(master_seed_) ^ splitmix64(stream_id_ + 0x632BE59BD9B4E019ULL));
}

Engine SeedStream::engine() const {
  const std::uint64_t k = key();
  std::seed_seq seq{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32),
                    static_cast<std::uint32_t>(stream_id_),
                    static_cast<std::uint32_t>(stream_id_ >> 32)};
  return Engine(seq);
}

double SeedStream::uniform() const noexcept {
  return static_cast<double>(splitmix64(key()) >> 11) * 0x1.0p-53;
}

Matrix draw_iid(std::span<const InputSpec> specs, std::size_t n, const SeedStream& stream) {
  if (n < 1) throw std::invalid_argument("draw_iid: n must be at least 1");
  Matrix out(n, specs.size());
  Engine eng = stream.engine();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < specs.size(); ++l) {
      // u < 1 keeps the draw inside [lower, upper) up to rounding; clamp guards the rounding.
      const double x = specs[l].quantile(uniform01(eng));
      out(i, l) = std::clamp(x, specs[l].lower(), specs[l].upper());
    }
  }
  return out;
}

double warp(const InputSpec& spec, double x) noexcept {
  return std::clamp((x - spec.lower()) / spec.width(), 0.0, 1.0);
}

double empirical_warp(std::span<const double> column, double x) {
  if (column.empty()) throw std::invalid_argument("empirical_warp: empty column");
  const auto count = std::count_if(column.begin(), column.end(), [x](double v) { return v <= x; });
  return static_cast<double>(count) / static_cast<double>(column.size());
}

DesignPair jansen_design(std::span<const InputSpec> specs, std::size_t n,
                         const SeedStream& stream) {
  if (n < 2) throw std::invalid_argument("jansen_design: n must be at least 2");
  return {draw_iid(specs, n, stream.child(0)), draw_iid(specs, n, stream.child(1)), stream.key()};
}

}  // namespace wws
