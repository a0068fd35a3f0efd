// Nadaraya-Watson kernel regression and the plug-in estimate of E[E(Y|X_l)^2].
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wwsobol/core.hpp"

namespace wws {

enum class Kernel { gaussian, epanechnikov };
enum class BandwidthScale {
  raw,     ///< bandwidth in units of X_l
  warped,  ///< bandwidth in units of G_l(X_l) in [0, 1]
};

struct KernelConfig {
  Kernel kernel = Kernel::gaussian;
  double bandwidth = 0.1;
  BandwidthScale scale = BandwidthScale::raw;

  /// Throws std::invalid_argument unless bandwidth > 0.
  void validate() const;
};

Kernel kernel_from_string(std::string_view s);
std::string_view to_string(Kernel k);

/// Unnormalized kernel profile K(u). The 1/h factor cancels in every ratio.
double kernel_weight(Kernel k, double u) noexcept;

/// Kernel-weighted mean of ys at x0, on whatever scale xs are given in.
/// Falls back to the global mean of ys when no weight reaches x0.
double nw_regress(std::span<const double> xs, std::span<const double> ys, double x0,
                  const KernelConfig& cfg);

/// (1/n) sum_i m(X_l^i)^2 with m the leave-in regression over the full sample.
/// `spec` supplies G_l when cfg.scale is warped.
double nw_v_hat(const SampleSet& sample, std::size_t ell, const InputSpec& spec,
                const KernelConfig& cfg);

/// Regression curve m(x) at each grid point (grid on the raw input scale).
std::vector<double> nw_curve(const SampleSet& sample, std::size_t ell, const InputSpec& spec,
                             const KernelConfig& cfg, std::span<const double> grid);

}  // namespace wws
