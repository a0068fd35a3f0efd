// Warped-wavelet block-thresholding estimator of V_l = E[E(Y|X_l)^2].
//
// Outputs are projected on psi_jk(G_l(X_l)) for levels j = -1..J_n, where
// psi_{-1,k}(u) = phi(u - k) and psi_jk(u) = 2^{j/2} psi(2^j u - k). The level
// energies sum_k beta_jk^2 are each kept iff they reach the penalty
// w(j) = K' (2^j + log 2) / n, and the kept excesses are summed:
//
//   theta = sum_j (E_j - w(j)) 1{E_j >= w(j)}.
//
// Since the penalty is additive over levels, this per-level rule is the
// maximum over all level subsets J of sum_{j in J} (E_j - w(j)).
//
// Translates overhanging the ends of [0,1] are kept as they are; there is no
// periodization or boundary-corrected basis. Such a truncated family does not
// reproduce constants exactly, so the estimator projects Y - mean(Y) and adds
// mean(Y)^2 back; otherwise a large output mean leaks into every level.
#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "wwsobol/core.hpp"

namespace wws {

enum class WaveletFamily { daubechies4 };

/// Throws std::invalid_argument for an unknown family name.
WaveletFamily wavelet_family_from_string(std::string_view s);

/// Scaling filter h_0..h_3 of the Daubechies wavelet with two vanishing moments.
std::array<double, 4> daubechies4_filter();

/// Father and mother wavelets tabulated by the cascade algorithm.
class WaveletBasis {
 public:
  WaveletBasis(WaveletFamily family, int grid_depth);

  WaveletFamily family() const noexcept { return family_; }
  int grid_depth() const noexcept { return depth_; }
  /// Both functions are supported on [0, support_length()].
  int support_length() const noexcept { return support_; }
  const std::vector<double>& father_table() const noexcept { return father_; }
  const std::vector<double>& mother_table() const noexcept { return mother_; }

  /// Linear interpolation in the tables, zero outside the support.
  double father(double x) const noexcept { return lookup(father_, x); }
  double mother(double x) const noexcept { return lookup(mother_, x); }

  /// psi_{jk}(u) for j >= -1.
  double eval(int j, long k, double u) const noexcept;

  /// Translates whose support meets (0, 1) at level j.
  std::vector<long> k_range(int j) const;

 private:
  double lookup(const std::vector<double>& table, double x) const noexcept;

  WaveletFamily family_;
  int depth_;
  int support_;
  std::vector<double> father_;
  std::vector<double> mother_;
};

/// Throws std::invalid_argument when grid_depth < 8.
WaveletBasis build_basis(WaveletFamily family, int grid_depth = 12);

/// Process-wide Daubechies-4 basis at depth 12.
const WaveletBasis& default_basis();

/// k with support [k, k + L) / 2^j meeting (0,1): {-L+1, ..., 2^j - 1} for
/// j >= 0 and {-L+1, ..., 0} for j = -1.
std::vector<long> k_range(int support_length, int j);

/// J_n = floor(log2(sqrt(n) / ln n)).
int default_max_level(std::size_t n);

struct BlockLevel {
  int j = 0;
  long k_first = 0;
  std::vector<double> coefficients;  ///< beta_{j, k_first + m}
  double energy = 0.0;               ///< sum of squared coefficients
};

struct BlockSpectrum {
  std::vector<BlockLevel> levels;  ///< j = -1, 0, ..., j_max in order
  int j_max = 0;
  std::size_t n = 0;

  double coefficient(int j, long k) const;
};

/// Empirical coefficients beta_jk = (1/n) sum_i (Y_i - offset) psi_jk(G_l(X_l^i))
/// for j = -1..J (J = j_cap if given, else J_n).
/// Throws std::invalid_argument("sample too small") when J < -1.
BlockSpectrum coefficients(const SampleSet& sample, std::size_t ell, const InputSpec& spec,
                           const WaveletBasis& basis, std::optional<int> j_cap = std::nullopt,
                           double offset = 0.0);

struct PenaltyConfig {
  double k_prime = 1.0;
  std::optional<int> j_cap;

  /// Throws std::invalid_argument unless k_prime > 0.
  void validate() const;
};

/// w(j) = K' (2^j + ln 2) / n.
double level_penalty(int j, double k_prime, std::size_t n) noexcept;

struct ThetaResult {
  double theta = 0.0;
  std::vector<int> kept_levels;
};

/// Block-thresholded estimate. Kept excesses are summed in increasing j.
/// k_prime may be zero here (everything kept); negative values are rejected.
ThetaResult theta_hat(const BlockSpectrum& spectrum, double k_prime);

/// mean(Y)^2 + theta_hat of the spectrum of Y - mean(Y).
double wavelet_v_hat(const SampleSet& sample, std::size_t ell, const InputSpec& spec,
                     const WaveletBasis& basis, const PenaltyConfig& pen);

struct SlopeHeuristicResult {
  double k_selected = 0.0;
  std::size_t max_drop = 0;  ///< size of the selected drop; 0 when the curve is flat
  std::vector<std::pair<double, std::size_t>> curve;  ///< (K', kept level count)
};

/// Dimension-jump calibration of K'. For every grid value counts the kept
/// levels (summed over the spectra) and selects the grid point right after the
/// largest single-step drop; ties go to the smallest K'. With no drop at all
/// the first grid point is returned.
/// Throws std::invalid_argument for an empty or non-increasing/nonpositive grid.
SlopeHeuristicResult slope_heuristic(std::span<const BlockSpectrum> spectra,
                                     std::span<const double> k_grid);
SlopeHeuristicResult slope_heuristic(const BlockSpectrum& spectrum,
                                     std::span<const double> k_grid);

/// Geometric grid of `count` points from lo to hi inclusive.
std::vector<double> geometric_grid(double lo, double hi, std::size_t count);

/// Regression estimate h(u) = sum over kept levels of beta_jk psi_jk(u).
std::vector<double> reconstruct(const BlockSpectrum& spectrum, const WaveletBasis& basis,
                                std::span<const int> kept_levels, std::span<const double> u_grid);

}  // namespace wws
