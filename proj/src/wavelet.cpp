#include "wwsobol/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "wwsobol/sampling.hpp"

namespace wws {

WaveletFamily wavelet_family_from_string(std::string_view s) {
  if (s == "daubechies4" || s == "db4" || s == "d4") return WaveletFamily::daubechies4;
  throw std::invalid_argument("unsupported wavelet family '" + std::string(s) + "'");
}

std::array<double, 4> daubechies4_filter() {
  const double s3 = std::sqrt(3.0);
  const double d = 4.0 * std::numbers::sqrt2;
  return {(1 + s3) / d, (3 + s3) / d, (3 - s3) / d, (1 - s3) / d};
}

WaveletBasis::WaveletBasis(WaveletFamily family, int grid_depth)
    : family_(family), depth_(grid_depth), support_(3) {
  if (grid_depth < 8 || grid_depth > 24) {
    throw std::invalid_argument("wavelet grid depth must lie in [8, 24]");
  }
  const auto h = daubechies4_filter();
  const std::array<double, 4> g = {h[3], -h[2], h[1], -h[0]};
  const long scale = 1L << depth_;
  const long last = support_ * scale;
  const double r2 = std::numbers::sqrt2;

  // Integer samples phi(1), phi(2): fixed point of the two-scale relation,
  // normalized by the partition of unity phi(1) + phi(2) = 1.
  father_.assign(static_cast<std::size_t>(last + 1), 0.0);
  const double ratio = (1.0 - r2 * h[1]) / (r2 * h[0]);
  const double phi1 = 1.0 / (1.0 + ratio);
  father_[static_cast<std::size_t>(scale)] = phi1;
  father_[static_cast<std::size_t>(2 * scale)] = phi1 * ratio;

  auto refine = [&](const std::vector<double>& src, const std::array<double, 4>& filt, long idx) {
    double v = 0.0;
    for (long k = 0; k < 4; ++k) {
      const long t = 2 * idx - k * scale;
      if (t >= 0 && t <= last) v += filt[static_cast<std::size_t>(k)] * src[static_cast<std::size_t>(t)];
    }
    return r2 * v;
  };

  // Dyadic refinement: points of level l only depend on points of level l - 1.
  for (int level = 1; level <= depth_; ++level) {
    const long step = 1L << (depth_ - level);
    for (long idx = step; idx < last; idx += 2 * step) {
      father_[static_cast<std::size_t>(idx)] = refine(father_, h, idx);
    }
  }
  mother_.assign(static_cast<std::size_t>(last + 1), 0.0);
  for (long idx = 0; idx <= last; ++idx) {
    mother_[static_cast<std::size_t>(idx)] = refine(father_, g, idx);
  }
}

double WaveletBasis::lookup(const std::vector<double>& table, double x) const noexcept {
  if (!(x > 0.0) || x >= static_cast<double>(support_)) return 0.0;
  const double pos = std::ldexp(x, depth_);
  const auto i = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(i);
  return table[i] + frac * (table[i + 1] - table[i]);
}

double WaveletBasis::eval(int j, long k, double u) const noexcept {
  if (j < 0) return father(u - static_cast<double>(k));
  return std::sqrt(std::ldexp(1.0, j)) * mother(std::ldexp(u, j) - static_cast<double>(k));
}

std::vector<long> WaveletBasis::k_range(int j) const { return wws::k_range(support_, j); }

WaveletBasis build_basis(WaveletFamily family, int grid_depth) {
  if (grid_depth < 8) throw std::invalid_argument("wavelet grid depth must be at least 8");
  return WaveletBasis(family, grid_depth);
}

const WaveletBasis& default_basis() {
  static const WaveletBasis basis(WaveletFamily::daubechies4, 12);
  return basis;
}

std::vector<long> k_range(int support_length, int j) {
  if (j < -1) throw std::invalid_argument("k_range: level must be >= -1");
  const long hi = j < 0 ? 0 : (1L << j) - 1;
  std::vector<long> ks;
  for (long k = -support_length + 1; k <= hi; ++k) ks.push_back(k);
  return ks;
}

int default_max_level(std::size_t n) {
  if (n < 2) throw std::invalid_argument("sample too small");
  const double nd = static_cast<double>(n);
  return static_cast<int>(std::floor(std::log2(std::sqrt(nd) / std::log(nd))));
}

double BlockSpectrum::coefficient(int j, long k) const {
  for (const auto& lvl : levels) {
    if (lvl.j != j) continue;
    const long m = k - lvl.k_first;
    if (m < 0 || m >= static_cast<long>(lvl.coefficients.size())) return 0.0;
    return lvl.coefficients[static_cast<std::size_t>(m)];
  }
  throw std::out_of_range("spectrum has no level " + std::to_string(j));
}

BlockSpectrum coefficients(const SampleSet& sample, std::size_t ell, const InputSpec& spec,
                           const WaveletBasis& basis, std::optional<int> j_cap, double offset) {
  if (ell >= sample.dimension()) throw std::out_of_range("wavelet: input index out of range");
  const std::size_t n = sample.size();
  const int j_max = j_cap ? *j_cap : default_max_level(n);
  if (j_max < -1) throw std::invalid_argument("sample too small");
  if (j_max > 24) throw std::invalid_argument("wavelet: level cap above 24");

  const int support = basis.support_length();
  BlockSpectrum spec_out;
  spec_out.j_max = j_max;
  spec_out.n = n;
  for (int j = -1; j <= j_max; ++j) {
    const auto ks = basis.k_range(j);
    spec_out.levels.push_back({j, ks.front(), std::vector<double>(ks.size(), 0.0), 0.0});
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double u = warp(spec, sample.inputs(i, ell));
    const double y = sample.outputs[i] - offset;
    for (auto& lvl : spec_out.levels) {
      // Only translates with 2^j u - k in (0, L) are nonzero.
      const double s = lvl.j < 0 ? u : std::ldexp(u, lvl.j);
      const long top = static_cast<long>(std::floor(s));
      const long k_last = lvl.k_first + static_cast<long>(lvl.coefficients.size()) - 1;
      for (long k = std::max(top - support + 1, lvl.k_first); k <= std::min(top, k_last); ++k) {
        lvl.coefficients[static_cast<std::size_t>(k - lvl.k_first)] += y * basis.eval(lvl.j, k, u);
      }
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (auto& lvl : spec_out.levels) {
    double e = 0.0;
    for (double& b : lvl.coefficients) {
      b *= inv_n;
      e += b * b;
    }
    lvl.energy = e;
  }
  return spec_out;
}

void PenaltyConfig::validate() const {
  if (!(k_prime > 0.0) || !std::isfinite(k_prime)) {
    throw std::invalid_argument("penalty constant K' must be positive");
  }
}

double level_penalty(int j, double k_prime, std::size_t n) noexcept {
  return k_prime * (std::ldexp(1.0, j) + std::numbers::ln2) / static_cast<double>(n);
}

ThetaResult theta_hat(const BlockSpectrum& spectrum, double k_prime) {
  if (!(k_prime >= 0.0)) throw std::invalid_argument("penalty constant K' must be nonnegative");
  ThetaResult out;
  for (const auto& lvl : spectrum.levels) {
    const double w = level_penalty(lvl.j, k_prime, spectrum.n);
    if (lvl.energy >= w) {
      out.theta += lvl.energy - w;
      out.kept_levels.push_back(lvl.j);
    }
  }
  return out;
}

double wavelet_v_hat(const SampleSet& sample, std::size_t ell, const InputSpec& spec,
                     const WaveletBasis& basis, const PenaltyConfig& pen) {
  pen.validate();
  const double mean = empirical_moments(sample.outputs).mean;
  return mean * mean + theta_hat(coefficients(sample, ell, spec, basis, pen.j_cap, mean), pen.k_prime).theta;
}

SlopeHeuristicResult slope_heuristic(std::span<const BlockSpectrum> spectra,
                                     std::span<const double> k_grid) {
  if (k_grid.empty()) throw std::invalid_argument("slope heuristic: empty K' grid");
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    if (!(k_grid[i] > 0.0) || (i > 0 && !(k_grid[i] > k_grid[i - 1]))) {
      throw std::invalid_argument("slope heuristic: grid must be positive and strictly increasing");
    }
  }
  SlopeHeuristicResult out;
  for (double k : k_grid) {
    std::size_t kept = 0;
    for (const auto& s : spectra) kept += theta_hat(s, k).kept_levels.size();
    out.curve.emplace_back(k, kept);
  }
  std::size_t best = 0, best_drop = 0;
  for (std::size_t i = 1; i < out.curve.size(); ++i) {
    const std::size_t prev = out.curve[i - 1].second, cur = out.curve[i].second;
    const std::size_t drop = prev > cur ? prev - cur : 0;
    if (drop > best_drop) {
      best_drop = drop;
      best = i;
    }
  }
  out.k_selected = k_grid[best];
  out.max_drop = best_drop;
  return out;
}

SlopeHeuristicResult slope_heuristic(const BlockSpectrum& spectrum,
                                     std::span<const double> k_grid) {
  return slope_heuristic(std::span<const BlockSpectrum>(&spectrum, 1), k_grid);
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) {
    throw std::invalid_argument("geometric grid needs 0 < lo < hi and at least 2 points");
  }
  std::vector<double> g(count);
  const double ratio = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) g[i] = lo * std::exp(ratio * static_cast<double>(i));
  g.back() = hi;
  return g;
}

std::vector<double> reconstruct(const BlockSpectrum& spectrum, const WaveletBasis& basis,
                                std::span<const int> kept_levels, std::span<const double> u_grid) {
  std::vector<double> out(u_grid.size(), 0.0);
  for (const auto& lvl : spectrum.levels) {
    if (std::find(kept_levels.begin(), kept_levels.end(), lvl.j) == kept_levels.end()) continue;
    for (std::size_t m = 0; m < lvl.coefficients.size(); ++m) {
      const long k = lvl.k_first + static_cast<long>(m);
      for (std::size_t g = 0; g < u_grid.size(); ++g) {
        out[g] += lvl.coefficients[m] * basis.eval(lvl.j, k, u_grid[g]);
      }
    }
  }
  return out;
}

}  // namespace wws
