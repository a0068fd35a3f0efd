#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "wwsobol/core.hpp"
#include "wwsobol/models.hpp"
#include "wwsobol/oracle.hpp"
#include "wwsobol/sampling.hpp"

using namespace wws;

namespace {

// Midpoint rule on [-pi, pi] for the mean of g under U(-pi, pi).
template <typename F>
double uniform_mean(F g, int nodes = 200000) {
  const double pi = std::numbers::pi;
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) acc += g(-pi + 2 * pi * (i + 0.5) / nodes);
  return acc / nodes;
}

}  // namespace

TEST_CASE("empirical moments use 1/n normalization") {
  const std::vector<double> flat{1, 1, 1, 1};
  auto m = empirical_moments(flat);
  CHECK(m.mean == 1.0);
  CHECK(m.variance == 0.0);

  const std::vector<double> two{0, 2};
  m = empirical_moments(two);
  CHECK(m.mean == 1.0);
  CHECK(m.variance == 1.0);
}

TEST_CASE("empirical moments reject fewer than two values") {
  const std::vector<double> one{3.0};
  CHECK_THROWS_WITH_AS(empirical_moments(one), "insufficient sample", std::invalid_argument);
  CHECK_THROWS_AS(empirical_moments(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("empirical variance is never negative") {
  // Large offset, tiny spread: catastrophic cancellation territory.
  std::vector<double> v;
  for (int i = 0; i < 1000; ++i) v.push_back(1e8 + ((i * 7919) % 13) * 1e-9);
  CHECK(empirical_moments(v).variance >= 0.0);
  for (int i = 0; i < 1000; ++i) v[i] = 1e8;
  CHECK(empirical_moments(v).variance >= 0.0);
}

TEST_CASE("Ishigami output variance at n = 1e5 matches quadrature") {
  // Var(Y) from separable one-dimensional integrals:
  // Y = sin(x1) (1 + 0.1 x3^4) + 7 sin(x2)^2.
  const double e_sin2 = uniform_mean([](double x) { return std::sin(x) * std::sin(x); });
  const double e_b2 = uniform_mean([](double x) { return std::pow(1 + 0.1 * std::pow(x, 4), 2); });
  const double e_c = uniform_mean([](double x) { return 7 * std::sin(x) * std::sin(x); });
  const double e_c2 = uniform_mean([](double x) { return 49 * std::pow(std::sin(x), 4); });
  const double var_oracle = e_sin2 * e_b2 + e_c2 - e_c * e_c;
  CHECK(var_oracle == doctest::Approx(13.84).epsilon(0.001));

  const Model model = make_model("ishigami");
  const Matrix x = draw_iid(model.inputs, 100000, SeedStream(11, 0));
  std::vector<double> y(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) y[i] = model.evaluate(x.row(i), SeedStream(0, 0));
  CHECK(std::abs(empirical_moments(y).variance - var_oracle) < 0.3);
}

TEST_CASE("combine examples") {
  const Moments m{1.0, 1.0};
  CHECK(combine(1.0, m, "a", Estimator::nadaraya_watson).index_value == 0.0);
  CHECK(combine(2.0, m, "a", Estimator::nadaraya_watson).index_value == 1.0);
}

TEST_CASE("combine rejects zero variance") {
  CHECK_THROWS_WITH_AS(combine(1.0, Moments{1.0, 0.0}, "a", Estimator::jansen),
                       "zero output variance", std::domain_error);
  CHECK_THROWS_AS(combine(1.0, Moments{1.0, -1.0}, "a", Estimator::jansen), std::domain_error);
}

TEST_CASE("combine on quadrature V2 of Ishigami gives S2") {
  // E[Y | X2 = x] = 7 sin^2 x (the X1 terms average to zero).
  const InputSpec spec("X2", -std::numbers::pi, std::numbers::pi);
  const double v2 = quadrature_v([](double x) { return 7 * std::sin(x) * std::sin(x); }, spec);
  const auto ref = ishigami_analytic();
  const auto est = combine(v2, Moments{ref.mean, ref.variance}, "X2", Estimator::warped_wavelet);
  CHECK(est.index_value == doctest::Approx(0.4424).epsilon(1e-4));
}

TEST_CASE("combine is exact algebra and flags out-of-range values") {
  const Moments m{0.7, 2.3};
  for (double v : {0.1, 0.49, 0.8, 3.1, 6.0}) {
    const auto est = combine(v, m, "x", Estimator::warped_wavelet);
    CHECK(est.index_value == (est.v_hat - est.y_bar * est.y_bar) / est.sigma2_hat);
    CHECK(est.input_name == "x");
    CHECK(est.estimator == Estimator::warped_wavelet);
    CHECK(est.out_of_range == (est.index_value < -0.05 || est.index_value > 1.05));
  }
  // No clamping.
  CHECK(combine(0.0, m, "x", Estimator::jansen).index_value < -0.05);
  CHECK(combine(0.0, m, "x", Estimator::jansen).out_of_range);
  CHECK(combine(10.0, m, "x", Estimator::jansen).index_value > 1.05);
}

TEST_CASE("index is invariant under affine output transforms") {
  // fitted has exactly the mean of y, as a regression fit does.
  std::vector<double> y, fitted;
  for (int i = 0; i < 500; ++i) {
    const double u = (i + 0.5) / 500.0;
    fitted.push_back(std::sin(6 * u));
    y.push_back(fitted.back() + 0.3 * std::cos(2 * std::numbers::pi * 37 * i / 500.0));
  }
  const double shift = empirical_moments(y).mean - empirical_moments(fitted).mean;
  for (double& f : fitted) f += shift;

  auto index_of = [&](double a, double b) {
    std::vector<double> ty, tf;
    for (std::size_t i = 0; i < y.size(); ++i) {
      ty.push_back(a * y[i] + b);
      tf.push_back(a * fitted[i] + b);
    }
    double v = 0.0;
    for (double f : tf) v += f * f;
    v /= static_cast<double>(tf.size());
    return combine(v, empirical_moments(ty), "x", Estimator::nadaraya_watson).index_value;
  };
  const double base = index_of(1.0, 0.0);
  CHECK(base > 0.5);
  for (auto [a, b] : {std::pair{2.0, 0.0}, {-3.0, 0.5}, {0.5, 1.0}, {-1.0, -0.25}}) {
    CHECK(std::abs(index_of(a, b) - base) <= 1e-12);
  }
}

TEST_CASE("input spec and sample set invariants") {
  CHECK_THROWS_AS(InputSpec("x", 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(InputSpec("x", 2.0, 1.0), std::invalid_argument);
  const InputSpec s("x", -1.0, 3.0);
  CHECK(s.quantile(0.25) == 0.0);
  CHECK(s.width() == 4.0);

  CHECK_THROWS_AS(SampleSet(Matrix(3, 2), std::vector<double>(2), 0, "m"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(SampleSet(Matrix(1, 2), std::vector<double>(1), 0, "m"),
                       "insufficient sample", std::invalid_argument);
  const SampleSet ok(Matrix(4, 2), std::vector<double>(4), 9, "m");
  CHECK(ok.size() == 4);
  CHECK(ok.dimension() == 2);
}

TEST_CASE("estimator names round-trip") {
  for (Estimator e : {Estimator::jansen, Estimator::nadaraya_watson, Estimator::warped_wavelet}) {
    CHECK(estimator_from_string(to_string(e)) == e);
  }
  CHECK(estimator_from_string("warped_wavelet") == Estimator::warped_wavelet);
  CHECK(estimator_from_string("nadaraya_watson") == Estimator::nadaraya_watson);
  CHECK_THROWS_AS(estimator_from_string("sobol"), std::invalid_argument);
}
