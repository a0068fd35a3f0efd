#include "wwsobol/jansen.hpp"

#include <stdexcept>

namespace wws {
namespace {

void check_design(const Model& model, const DesignPair& pair) {
  if (pair.sample_a.rows() != pair.sample_b.rows() ||
      pair.sample_a.cols() != pair.sample_b.cols()) {
    throw std::invalid_argument("jansen: design matrices differ in shape");
  }
  if (pair.sample_a.cols() != model.dimension()) {
    throw std::invalid_argument("jansen: design width does not match model inputs");
  }
}

std::vector<double> evaluate_rows(const Model& model, const Matrix& x, const SeedStream& streams) {
  std::vector<double> y(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) y[i] = model.evaluate(x.row(i), streams.child(i));
  return y;
}

std::vector<double> evaluate_hybrid(const Model& model, const DesignPair& pair, std::size_t ell,
                                    const SeedStream& streams) {
  const std::size_t n = pair.sample_a.rows();
  std::vector<double> row(pair.sample_a.cols());
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = pair.sample_a.row(i);
    std::copy(a.begin(), a.end(), row.begin());
    row[ell] = pair.sample_b(i, ell);
    y[i] = model.evaluate(row, streams.child(i));
  }
  return y;
}

}  // namespace

SobolEstimate jansen_from_outputs(std::span<const double> y_b, std::span<const double> y_h,
                                  std::string input_name) {
  if (y_b.size() != y_h.size()) throw std::invalid_argument("jansen: output lengths differ");
  const std::size_t n = y_b.size();
  if (n < 2) throw std::invalid_argument("insufficient sample");

  std::vector<double> pooled(y_b.begin(), y_b.end());
  pooled.insert(pooled.end(), y_h.begin(), y_h.end());
  const Moments m = empirical_moments(pooled);
  if (!(m.variance > 0.0)) throw std::domain_error("zero output variance");

  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) ss += (y_b[i] - y_h[i]) * (y_b[i] - y_h[i]);
  const double half_mean_sq = ss / (2.0 * static_cast<double>(n));

  // Computed directly as 1 - x so that the estimate never exceeds 1 by rounding.
  // v_hat is the implied second moment for the generic (v - mean^2) / var form.
  SobolEstimate est;
  est.index_value = 1.0 - half_mean_sq / m.variance;
  est.input_name = std::move(input_name);
  est.estimator = Estimator::jansen;
  est.v_hat = m.mean * m.mean + m.variance - half_mean_sq;
  est.y_bar = m.mean;
  est.sigma2_hat = m.variance;
  est.out_of_range = est.index_value < kOutOfRangeLow || est.index_value > kOutOfRangeHigh;
  return est;
}

JansenRun jansen_indices(const Model& model, const DesignPair& pair, const SeedStream& nuisance) {
  check_design(model, pair);
  const std::size_t n = pair.sample_b.rows();
  JansenRun run;
  const std::vector<double> y_b = evaluate_rows(model, pair.sample_b, nuisance.child(0));
  run.calls += n;
  for (std::size_t ell = 0; ell < model.dimension(); ++ell) {
    const std::vector<double> y_h = evaluate_hybrid(model, pair, ell, nuisance.child(ell + 1));
    run.calls += n;
    run.estimates.push_back(jansen_from_outputs(y_b, y_h, model.inputs[ell].name()));
  }
  return run;
}

SobolEstimate jansen_first_order(const Model& model, const DesignPair& pair, std::size_t ell,
                                 const SeedStream& nuisance) {
  check_design(model, pair);
  if (ell >= model.dimension()) throw std::out_of_range("jansen: input index out of range");
  const std::vector<double> y_b = evaluate_rows(model, pair.sample_b, nuisance.child(0));
  const std::vector<double> y_h = evaluate_hybrid(model, pair, ell, nuisance.child(ell + 1));
  return jansen_from_outputs(y_b, y_h, model.inputs[ell].name());
}

}  // namespace wws
