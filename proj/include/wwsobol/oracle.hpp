// Brute-force references for testing: exact ANOVA decomposition of a model
// tabulated on a uniform grid, and quadrature of ||h_l||^2.
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "wwsobol/core.hpp"

namespace wws {

/// Model values on the m^p grid of cell centers. Index order is row-major,
/// last input fastest.
struct GridModel {
  std::size_t levels_per_input = 0;
  std::size_t dimension = 0;
  std::vector<double> value_table;
};

/// Tabulates f at cell centers of `specs`.
/// Throws std::invalid_argument when m < 2, p > 4 or m^p > 1e7.
GridModel make_grid_model(const std::function<double(std::span<const double>)>& f,
                          std::span<const InputSpec> specs, std::size_t levels_per_input);

struct AnovaDecomposition {
  double mean = 0.0;
  double total_var = 0.0;
  std::vector<double> first;  ///< V_l
  Matrix second;              ///< V_{l1 l2}, symmetric, zero diagonal
  double residual = 0.0;      ///< interactions of order >= 3
  std::vector<double> total;  ///< total-effect variance per input

  std::vector<double> first_order_indices() const;
};

/// Exact variance decomposition by axis averaging with uniform weights.
AnovaDecomposition anova_decompose(const GridModel& gm);

/// integral over [0,1] of h(u)^2 with h(u) = cond_mean(G^{-1}(u)), composite
/// Simpson with node doubling until successive values differ by < 1e-8.
/// Throws std::runtime_error past 2^20 nodes, std::invalid_argument when nodes < 16.
double quadrature_v(const std::function<double(double)>& cond_mean, const InputSpec& spec,
                    std::size_t nodes = 16);

}  // namespace wws
