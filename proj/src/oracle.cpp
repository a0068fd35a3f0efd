#include "wwsobol/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace wws {
namespace {

std::size_t checked_cells(std::size_t m, std::size_t p) {
  if (m < 2) throw std::invalid_argument("grid model: at least 2 levels per input");
  if (p < 1 || p > 4) throw std::invalid_argument("grid model: 1 to 4 inputs supported");
  std::size_t cells = 1;
  for (std::size_t l = 0; l < p; ++l) {
    cells *= m;
    if (cells > 10'000'000) throw std::invalid_argument("grid too large");
  }
  return cells;
}

// Mean of the table over every axis not in `keep`, as a dense table over the kept axes.
std::vector<double> marginal_mean(const GridModel& gm, const std::vector<std::size_t>& keep) {
  const std::size_t m = gm.levels_per_input;
  const std::size_t p = gm.dimension;
  std::size_t out_cells = 1;
  for (std::size_t q = 0; q < keep.size(); ++q) out_cells *= m;
  std::vector<double> out(out_cells, 0.0);

  std::vector<std::size_t> idx(p, 0);
  for (double v : gm.value_table) {
    std::size_t o = 0;
    for (std::size_t axis : keep) o = o * m + idx[axis];
    out[o] += v;
    for (std::size_t a = p; a-- > 0;) {
      if (++idx[a] < m) break;
      idx[a] = 0;
    }
  }
  const double scale = static_cast<double>(out_cells) / static_cast<double>(gm.value_table.size());
  for (double& v : out) v *= scale;
  return out;
}

double variance_about(const std::vector<double>& values, double mean) {
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(values.size());
}

}  // namespace

GridModel make_grid_model(const std::function<double(std::span<const double>)>& f,
                          std::span<const InputSpec> specs, std::size_t m) {
  const std::size_t p = specs.size();
  const std::size_t cells = checked_cells(m, p);
  GridModel gm{m, p, std::vector<double>(cells)};
  std::vector<std::size_t> idx(p, 0);
  std::vector<double> x(p);
  for (std::size_t c = 0; c < cells; ++c) {
    for (std::size_t l = 0; l < p; ++l) {
      x[l] = specs[l].quantile((static_cast<double>(idx[l]) + 0.5) / static_cast<double>(m));
    }
    gm.value_table[c] = f(x);
    for (std::size_t a = p; a-- > 0;) {
      if (++idx[a] < m) break;
      idx[a] = 0;
    }
  }
  return gm;
}

std::vector<double> AnovaDecomposition::first_order_indices() const {
  std::vector<double> s(first.size());
  for (std::size_t l = 0; l < first.size(); ++l) s[l] = first[l] / total_var;
  return s;
}

AnovaDecomposition anova_decompose(const GridModel& gm) {
  const std::size_t p = gm.dimension;
  const std::size_t cells = checked_cells(gm.levels_per_input, p);
  if (gm.value_table.size() != cells) throw std::invalid_argument("grid model: table incomplete");

  AnovaDecomposition out;
  double sum = 0.0;
  for (double v : gm.value_table) sum += v;
  out.mean = sum / static_cast<double>(cells);
  out.total_var = variance_about(gm.value_table, out.mean);

  out.first.resize(p);
  for (std::size_t l = 0; l < p; ++l) out.first[l] = variance_about(marginal_mean(gm, {l}), out.mean);

  out.second = Matrix(p, p, 0.0);
  double explained = 0.0;
  for (std::size_t l = 0; l < p; ++l) explained += out.first[l];
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a + 1; b < p; ++b) {
      const double joint = variance_about(marginal_mean(gm, {a, b}), out.mean);
      const double v = joint - out.first[a] - out.first[b];
      out.second(a, b) = out.second(b, a) = v;
      explained += v;
    }
  }
  out.residual = out.total_var - explained;

  // Total effect: Var(Y) - Var(E[Y | X_{~l}]).
  out.total.resize(p);
  for (std::size_t l = 0; l < p; ++l) {
    std::vector<std::size_t> others;
    for (std::size_t q = 0; q < p; ++q) if (q != l) others.push_back(q);
    const double v_others = others.empty() ? 0.0 : variance_about(marginal_mean(gm, others), out.mean);
    out.total[l] = out.total_var - v_others;
  }
  return out;
}

double quadrature_v(const std::function<double(double)>& cond_mean, const InputSpec& spec,
                    std::size_t nodes) {
  if (nodes < 16) throw std::invalid_argument("quadrature: at least 16 nodes");
  if (nodes % 2 != 0) ++nodes;

  auto simpson = [&](std::size_t intervals) {
    const double h = 1.0 / static_cast<double>(intervals);
    auto sq = [&](double u) {
      const double v = cond_mean(spec.quantile(u));
      return v * v;
    };
    double acc = sq(0.0) + sq(1.0);
    for (std::size_t i = 1; i < intervals; ++i) {
      acc += (i % 2 == 1 ? 4.0 : 2.0) * sq(static_cast<double>(i) * h);
    }
    return acc * h / 3.0;
  };

  double previous = simpson(nodes);
  for (std::size_t intervals = 2 * nodes; intervals <= (std::size_t{1} << 20); intervals *= 2) {
    const double current = simpson(intervals);
    if (std::abs(current - previous) < 1e-8) return current;
    previous = current;
  }
  throw std::runtime_error("quadrature did not converge");
}

}  // namespace wws
