#include "wwsobol/core.hpp"

#include <cmath>
#include <stdexcept>

namespace wws {

std::vector<double> Matrix::column(std::size_t j) const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

InputSpec::InputSpec(std::string name, double lower, double upper)
    : name_(std::move(name)), lower_(lower), upper_(upper) {
  if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper)) {
    throw std::invalid_argument("input '" + name_ + "': bounds must satisfy lower < upper");
  }
}

SampleSet::SampleSet(Matrix in, std::vector<double> out, std::uint64_t s, std::string id)
    : inputs(std::move(in)), outputs(std::move(out)), seed(s), model_id(std::move(id)) {
  if (inputs.rows() != outputs.size()) {
    throw std::invalid_argument("sample set: input rows and output length differ");
  }
  if (outputs.size() < 2) throw std::invalid_argument("insufficient sample");
}

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::jansen: return "jansen";
    case Estimator::nadaraya_watson: return "nw";
    case Estimator::warped_wavelet: return "wavelet";
  }
  return "unknown";
}

Estimator estimator_from_string(std::string_view s) {
  if (s == "jansen") return Estimator::jansen;
  if (s == "nw" || s == "nadaraya_watson") return Estimator::nadaraya_watson;
  if (s == "wavelet" || s == "warped_wavelet") return Estimator::warped_wavelet;
  throw std::invalid_argument("unknown estimator '" + std::string(s) + "'");
}

Moments empirical_moments(std::span<const double> outputs) {
  const std::size_t n = outputs.size();
  if (n < 2) throw std::invalid_argument("insufficient sample");
  double sum = 0.0;
  for (double y : outputs) sum += y;
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double y : outputs) ss += (y - mean) * (y - mean);
  return {mean, ss / static_cast<double>(n)};
}

SobolEstimate combine(double v_hat, const Moments& moments, std::string input_name,
                      Estimator estimator) {
  if (!(moments.variance > 0.0)) throw std::domain_error("zero output variance");
  SobolEstimate est;
  est.index_value = (v_hat - moments.mean * moments.mean) / moments.variance;
  est.input_name = std::move(input_name);
  est.estimator = estimator;
  est.v_hat = v_hat;
  est.y_bar = moments.mean;
  est.sigma2_hat = moments.variance;
  est.out_of_range = est.index_value < kOutOfRangeLow || est.index_value > kOutOfRangeHigh;
  return est;
}

}  // namespace wws
