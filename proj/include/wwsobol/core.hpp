// Shared domain types and the plug-in combiner S = (V - mean^2) / variance.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wws {

/// Dense row-major matrix of doubles. Rows are samples, columns are inputs.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  std::vector<double> column(std::size_t j) const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// An uncertain input with a uniform law on [lower, upper].
class InputSpec {
 public:
  /// Throws std::invalid_argument unless lower < upper.
  InputSpec(std::string name, double lower, double upper);

  const std::string& name() const noexcept { return name_; }
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  double width() const noexcept { return upper_ - lower_; }

  /// Inverse CDF: maps u in [0,1] to the input scale.
  double quantile(double u) const noexcept { return lower_ + u * (upper_ - lower_); }

 private:
  std::string name_;
  double lower_;
  double upper_;
};

/// n joint draws (X_1..X_p, Y) of a model.
struct SampleSet {
  Matrix inputs;
  std::vector<double> outputs;
  std::uint64_t seed = 0;
  std::string model_id;

  /// Throws std::invalid_argument if shapes disagree or n < 2.
  SampleSet(Matrix inputs, std::vector<double> outputs, std::uint64_t seed, std::string model_id);

  std::size_t size() const noexcept { return outputs.size(); }
  std::size_t dimension() const noexcept { return inputs.cols(); }
};

enum class Estimator { jansen, nadaraya_watson, warped_wavelet };

std::string_view to_string(Estimator e);
/// Accepts "jansen", "nw" / "nadaraya_watson", "wavelet" / "warped_wavelet".
Estimator estimator_from_string(std::string_view s);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean and variance with 1/n normalization (not 1/(n-1)).
/// Throws std::invalid_argument("insufficient sample") when fewer than 2 values.
Moments empirical_moments(std::span<const double> outputs);

/// Estimates outside this band are flagged but never clamped.
inline constexpr double kOutOfRangeLow = -0.05;
inline constexpr double kOutOfRangeHigh = 1.05;

struct SobolEstimate {
  double index_value = 0.0;
  std::string input_name;
  Estimator estimator = Estimator::jansen;
  double v_hat = 0.0;
  double y_bar = 0.0;
  double sigma2_hat = 0.0;
  bool out_of_range = false;
};

/// index = (v_hat - mean^2) / variance, unclamped.
/// Throws std::domain_error("zero output variance") when variance <= 0.
SobolEstimate combine(double v_hat, const Moments& moments, std::string input_name,
                      Estimator estimator);

}  // namespace wws
