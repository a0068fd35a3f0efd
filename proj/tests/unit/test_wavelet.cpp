#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "wwsobol/sampling.hpp"
#include "wwsobol/wavelet.hpp"

using namespace wws;

namespace {

const WaveletBasis& basis() { return default_basis(); }

// Trapezoidal rule of f on [a, b] with m intervals.
template <typename F>
double trapezoid(F f, double a, double b, int m) {
  const double h = (b - a) / m;
  double acc = 0.5 * (f(a) + f(b));
  for (int i = 1; i < m; ++i) acc += f(a + i * h);
  return acc * h;
}

// Sample with X ~ U(0,1) (so G is the identity) and Y = h(X) + noise.
template <typename H>
SampleSet synthetic(H h, std::size_t n, double noise, std::uint64_t seed) {
  const std::vector<InputSpec> specs{InputSpec("u", 0.0, 1.0)};
  Matrix x = draw_iid(specs, n, SeedStream(seed, 0));
  Engine eng = SeedStream(seed, 1).engine();
  std::normal_distribution<double> gauss(0.0, noise);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = h(x(i, 0)) + (noise > 0 ? gauss(eng) : 0.0);
  return SampleSet(std::move(x), std::move(y), seed, "synthetic");
}

const InputSpec unit("u", 0.0, 1.0);

BlockSpectrum spectrum_with_energies(const std::vector<double>& energies, std::size_t n) {
  BlockSpectrum s;
  s.n = n;
  s.j_max = static_cast<int>(energies.size()) - 2;
  for (std::size_t q = 0; q < energies.size(); ++q) {
    const int j = static_cast<int>(q) - 1;
    s.levels.push_back({j, 0, {std::sqrt(energies[q])}, energies[q]});
  }
  return s;
}

}  // namespace

TEST_CASE("Daubechies-4 scaling filter") {
  const auto h = daubechies4_filter();
  const double s3 = std::sqrt(3.0), d = 4 * std::sqrt(2.0);
  CHECK(h[0] == doctest::Approx((1 + s3) / d).epsilon(1e-15));
  CHECK(h[1] == doctest::Approx((3 + s3) / d).epsilon(1e-15));
  CHECK(h[2] == doctest::Approx((3 - s3) / d).epsilon(1e-15));
  CHECK(h[3] == doctest::Approx((1 - s3) / d).epsilon(1e-15));
  CHECK(h[0] + h[1] + h[2] + h[3] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(h[0] * h[0] + h[1] * h[1] + h[2] * h[2] + h[3] * h[3] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(h[0] * h[2] + h[1] * h[3]) < 1e-15);
  // Two vanishing moments of the mother wavelet.
  CHECK(std::abs(h[3] - h[2] + h[1] - h[0]) < 1e-15);
  CHECK(std::abs(0 * h[3] - 1 * h[2] + 2 * h[1] - 3 * h[0]) < 1e-14);
}

TEST_CASE("basis tables: integrals and norms") {
  const auto& b = basis();
  const int m = 3 << b.grid_depth();
  auto father = [&](double x) { return b.father(x); };
  auto mother = [&](double x) { return b.mother(x); };
  CHECK(trapezoid(father, 0, 3, m) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(trapezoid(mother, 0, 3, m)) < 1e-6);
  CHECK(trapezoid([&](double x) { return father(x) * father(x); }, 0, 3, m) ==
        doctest::Approx(1.0).epsilon(1e-4));
  CHECK(trapezoid([&](double x) { return mother(x) * mother(x); }, 0, 3, m) ==
        doctest::Approx(1.0).epsilon(1e-4));
  CHECK(b.support_length() == 3);
  CHECK(b.father_table().size() == static_cast<std::size_t>(m + 1));
  CHECK(b.mother_table().size() == static_cast<std::size_t>(m + 1));
}

TEST_CASE("basis orthogonality") {
  const auto& b = basis();
  const int m = 1 << 16;
  auto ip = [&](int j1, long k1, int j2, long k2) {
    return trapezoid([&](double u) { return b.eval(j1, k1, u) * b.eval(j2, k2, u); }, -4, 4, m);
  };
  CHECK(std::abs(ip(0, 0, 1, 0)) < 1e-3);
  CHECK(std::abs(ip(0, 0, 0, 1)) < 1e-3);
  CHECK(std::abs(ip(-1, 0, -1, 1)) < 1e-3);
  CHECK(std::abs(ip(-1, 0, 0, 0)) < 1e-3);
  CHECK(std::abs(ip(2, 0, 2, 1)) < 1e-3);
}

TEST_CASE("point evaluation") {
  const auto& b = basis();
  CHECK(b.eval(0, 0, -0.5) == 0.0);
  CHECK(b.eval(0, 0, 3.0) == 0.0);
  CHECK(b.eval(0, 0, 3.5) == 0.0);
  CHECK(b.eval(-1, 0, 0.0) == 0.0);
  CHECK(b.eval(2, 5, 0.5) == 0.0);  // support [5/4, 2)
  for (double u = 0.0; u <= 1.0; u += 1.0 / 97) {
    CHECK(b.eval(1, 0, u) == doctest::Approx(std::sqrt(2.0) * b.eval(0, 0, 2 * u)).epsilon(1e-12));
    CHECK(b.eval(-1, -1, u) == b.father(u + 1));
  }
  // Integer nodes: phi(1) = (1 + sqrt 3)/2, phi(2) = (1 - sqrt 3)/2.
  CHECK(b.father(1.0) == doctest::Approx((1 + std::sqrt(3.0)) / 2).epsilon(1e-12));
  CHECK(b.father(2.0) == doctest::Approx((1 - std::sqrt(3.0)) / 2).epsilon(1e-12));
}

TEST_CASE("dilated translates keep unit norm") {
  const auto& b = basis();
  for (int j = 0; j <= 6; ++j) {
    const double hi = 3.0 / std::ldexp(1.0, j);
    const double norm = trapezoid([&](double u) { return std::pow(b.eval(j, 0, u), 2); }, 0, hi, 3 << 14);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("k ranges") {
  auto to_vec = [](std::initializer_list<long> l) { return std::vector<long>(l); };
  CHECK(k_range(1, 2) == to_vec({0, 1, 2, 3}));
  CHECK(k_range(3, 0) == to_vec({-2, -1, 0}));
  CHECK(k_range(3, -1) == to_vec({-2, -1, 0}));
  CHECK_THROWS_AS(k_range(3, -2), std::invalid_argument);

  // Brute force: support [k, k + 3) / 2^j meets (0, 1).
  for (int j = -1; j <= 6; ++j) {
    const double scale = j < 0 ? 1.0 : std::ldexp(1.0, j);
    std::vector<long> expect;
    for (long k = -100; k <= 100; ++k) {
      const double lo = k / scale, hi = (k + 3) / scale;
      if (hi > 0.0 && lo < 1.0) expect.push_back(k);
    }
    CHECK(basis().k_range(j) == expect);
  }
}

TEST_CASE("default maximum level") {
  CHECK(default_max_level(10000) == 3);
  CHECK(default_max_level(40000) == 4);
  CHECK(default_max_level(2) == 1);
  for (std::size_t n : {100u, 1000u, 4000u, 100000u}) {
    const double v = std::log2(std::sqrt(double(n)) / std::log(double(n)));
    CHECK(default_max_level(n) == static_cast<int>(std::floor(v)));
  }
}

TEST_CASE("spectrum structure") {
  const SampleSet s = synthetic([](double u) { return std::sin(7 * u); }, 3000, 0.5, 1);
  const BlockSpectrum sp = coefficients(s, 0, unit, basis(), 5);
  CHECK(sp.j_max == 5);
  CHECK(sp.n == 3000);
  CHECK(sp.levels.size() == 7);
  for (const auto& lvl : sp.levels) {
    const auto ks = basis().k_range(lvl.j);
    CHECK(lvl.k_first == ks.front());
    CHECK(lvl.coefficients.size() == ks.size());
    double e = 0.0;
    for (double c : lvl.coefficients) e += c * c;
    CHECK(std::abs(lvl.energy - e) <= 1e-12 * std::max(1.0, e));
  }
  CHECK(coefficients(s, 0, unit, basis()).j_max == default_max_level(3000));
  CHECK_THROWS_WITH_AS(coefficients(s, 0, unit, basis(), -2), "sample too small", std::invalid_argument);
  CHECK_THROWS_AS(coefficients(s, 1, unit, basis()), std::out_of_range);
  CHECK_THROWS_AS(sp.coefficient(9, 0), std::out_of_range);
  CHECK(sp.coefficient(5, 1000) == 0.0);
}

TEST_CASE("coefficients equal the direct sum") {
  const SampleSet s = synthetic([](double u) { return u * u; }, 500, 0.1, 2);
  const BlockSpectrum sp = coefficients(s, 0, unit, basis(), 4);
  for (const auto& lvl : sp.levels) {
    for (std::size_t m = 0; m < lvl.coefficients.size(); ++m) {
      const long k = lvl.k_first + static_cast<long>(m);
      double direct = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) direct += s.outputs[i] * basis().eval(lvl.j, k, s.inputs(i, 0));
      CHECK(lvl.coefficients[m] == doctest::Approx(direct / 500).epsilon(1e-12));
    }
  }
}

TEST_CASE("zero response gives a zero spectrum") {
  const SampleSet s = synthetic([](double) { return 0.0; }, 1000, 0.0, 3);
  for (const auto& lvl : coefficients(s, 0, unit, basis()).levels) {
    CHECK(lvl.energy == 0.0);
    for (double c : lvl.coefficients) CHECK(c == 0.0);
  }
}

TEST_CASE("noiseless psi_00 regression matches quadrature coefficients") {
  const auto& b = basis();
  auto h = [&](double u) { return b.eval(0, 0, u); };
  const std::size_t n = 40000;
  const SampleSet s = synthetic(h, n, 0.0, 4);
  const BlockSpectrum sp = coefficients(s, 0, unit, b);
  for (const auto& lvl : sp.levels) {
    for (std::size_t m = 0; m < lvl.coefficients.size(); ++m) {
      const long k = lvl.k_first + static_cast<long>(m);
      const double beta = trapezoid([&](double u) { return h(u) * b.eval(lvl.j, k, u); }, 0, 1, 1 << 16);
      CHECK(std::abs(lvl.coefficients[m] - beta) < 3 / std::sqrt(double(n)));
    }
  }
}

TEST_CASE("interior level-2 wavelet: exact coefficients and Parseval") {
  const auto& b = basis();
  // psi_{2,0} and psi_{2,1} have support inside [0,1]; all other coefficients vanish.
  auto h = [&](double u) { return b.eval(2, 0, u) + 0.5 * b.eval(2, 1, u); };
  const std::size_t n = 40000;
  const SampleSet s = synthetic(h, n, 0.0, 5);
  const BlockSpectrum sp = coefficients(s, 0, unit, b);
  const double tol = 3 / std::sqrt(double(n));
  CHECK(std::abs(sp.coefficient(2, 0) - 1.0) < tol);
  CHECK(std::abs(sp.coefficient(2, 1) - 0.5) < tol);
  double total = 0.0;
  for (const auto& lvl : sp.levels) {
    total += lvl.energy;
    for (std::size_t m = 0; m < lvl.coefficients.size(); ++m) {
      const long k = lvl.k_first + static_cast<long>(m);
      if (lvl.j == 2 && (k == 0 || k == 1)) continue;
      // Noise sd of (1/n) sum h(U) psi(U) from E[h^2 psi^2] by quadrature.
      const double second = trapezoid([&](double u) { return std::pow(h(u) * b.eval(lvl.j, k, u), 2); }, 0, 1, 1 << 14);
      CHECK(std::abs(lvl.coefficients[m]) < 4 * std::sqrt(second / double(n)) + 1e-12);
    }
  }
  CHECK(std::abs(total - 1.25) < 5 / std::sqrt(double(n)));

  const std::vector<double> grid{0.1, 0.3, 0.5, 0.7, 0.9};
  const std::vector<int> kept{2};
  const auto rec = reconstruct(sp, b, kept, grid);
  for (std::size_t g = 0; g < grid.size(); ++g) CHECK(std::abs(rec[g] - h(grid[g])) < 0.1);
}

TEST_CASE("theta_hat threshold arithmetic") {
  const std::size_t n = 1000;
  const BlockSpectrum zeros = spectrum_with_energies({0, 0, 0, 0, 0}, n);
  const ThetaResult t0 = theta_hat(zeros, 1.0);
  CHECK(t0.theta == 0.0);
  CHECK(t0.kept_levels.empty());

  const double w2 = level_penalty(2, 3.0, n);
  CHECK(w2 == doctest::Approx(3.0 * (4 + std::log(2.0)) / 1000));
  const BlockSpectrum single = spectrum_with_energies({0, 0, 0, 2 * w2, 0}, n);
  const ThetaResult t1 = theta_hat(single, 3.0);
  CHECK(t1.theta == doctest::Approx(w2).epsilon(1e-15));
  CHECK(t1.kept_levels == std::vector<int>{2});

  // Zero penalty keeps every level, including empty ones.
  CHECK(theta_hat(zeros, 0.0).kept_levels.size() == 5);
  CHECK_THROWS_AS(theta_hat(zeros, -1.0), std::invalid_argument);
}

TEST_CASE("theta_hat is the supremum over level subsets") {
  std::mt19937_64 eng(17);
  std::uniform_real_distribution<double> unif(0.0, 0.01);
  for (int levels : {5, 6}) {  // J = 3 and J = 4
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> e(levels);
      for (double& v : e) v = unif(eng);
      const BlockSpectrum sp = spectrum_with_energies(e, 1000);
      const double k = 0.5 + 4 * unif(eng) * 100;
      const ThetaResult t = theta_hat(sp, k);
      double best = 0.0;
      for (unsigned mask = 0; mask < (1u << levels); ++mask) {
        double sum = 0.0;
        for (int q = 0; q < levels; ++q) {
          if (mask & (1u << q)) sum += e[q] - level_penalty(q - 1, k, 1000);
        }
        CHECK(sum <= t.theta + 1e-15);
        best = std::max(best, sum);
      }
      CHECK(best == t.theta);
    }
  }
}

TEST_CASE("index does not depend on the output mean") {
  // The truncated basis misses part of a constant's energy, so the mean must
  // not enter the projection.
  const std::size_t n = 10000;
  const SampleSet s = synthetic([](double u) { return std::sin(6 * u); }, n, 0.5, 11);
  std::vector<double> shifted = s.outputs;
  for (double& y : shifted) y += 100.0;
  const SampleSet t(Matrix(s.inputs), shifted, 0, "shifted");
  const PenaltyConfig pen{4.0, 4};
  const double a = combine(wavelet_v_hat(s, 0, unit, basis(), pen), empirical_moments(s.outputs), "u",
                           Estimator::warped_wavelet).index_value;
  const double b = combine(wavelet_v_hat(t, 0, unit, basis(), pen), empirical_moments(t.outputs), "u",
                           Estimator::warped_wavelet).index_value;
  CHECK(a == doctest::Approx(b).epsilon(1e-8));

  // Uncentered, the same shift would remove this much energy.
  const BlockSpectrum raw = coefficients(t, 0, unit, basis(), 4);
  double captured = 0.0;
  for (const auto& lvl : raw.levels) captured += lvl.energy;
  const double mean = empirical_moments(t.outputs).mean;
  MESSAGE("uncentered energy deficit " << mean * mean - captured);
  CHECK(captured < mean * mean);
}

TEST_CASE("theta_hat is nonincreasing in K'") {
  const SampleSet s = synthetic([](double u) { return std::cos(9 * u); }, 5000, 1.0, 6);
  const BlockSpectrum sp = coefficients(s, 0, unit, basis(), 6);
  double prev = theta_hat(sp, 0.0).theta;
  for (double k = 0.01; k < 1e4; k *= 1.3) {
    const double t = theta_hat(sp, k).theta;
    CHECK(t <= prev);
    prev = t;
  }
  CHECK(theta_hat(sp, 1e12).kept_levels.empty());
}

TEST_CASE("pure noise output: index near zero") {
  const std::size_t n = 10000;
  const SampleSet s = synthetic([](double) { return 0.0; }, n, 1.0, 7);
  const double v = wavelet_v_hat(s, 0, unit, basis(), {2.0, std::nullopt});
  const double idx = combine(v, empirical_moments(s.outputs), "u", Estimator::warped_wavelet).index_value;
  CHECK(idx >= -0.05);
  CHECK(idx <= 0.05);
  CHECK_THROWS_AS(wavelet_v_hat(s, 0, unit, basis(), {0.0, std::nullopt}), std::invalid_argument);
  CHECK_THROWS_AS((PenaltyConfig{-1.0, std::nullopt}.validate()), std::invalid_argument);
}

TEST_CASE("slope heuristic on a hand-made curve") {
  // Energies scaled so the kept count drops 5 -> 4 -> 1 -> 0 along the grid.
  const std::size_t n = 1000;
  std::vector<double> e;
  for (int j = -1; j <= 3; ++j) e.push_back(level_penalty(j, j == -1 ? 50.0 : 5.0, n) * 1.01);
  e[1] = level_penalty(0, 1.0, n) * 1.01;
  const BlockSpectrum sp = spectrum_with_energies(e, n);
  const std::vector<double> grid{0.5, 2.0, 8.0, 80.0};
  const auto res = slope_heuristic(sp, grid);
  REQUIRE(res.curve.size() == 4);
  CHECK(res.curve[0].second == 5);
  CHECK(res.curve[1].second == 4);
  CHECK(res.curve[2].second == 1);
  CHECK(res.curve[3].second == 0);
  CHECK(res.k_selected == 8.0);
  CHECK(res.max_drop == 3);
}

TEST_CASE("slope heuristic ties, flat curves and errors") {
  const std::size_t n = 1000;
  // Drops of 1 at both steps: the first (smallest K') wins.
  std::vector<double> e{0, 0, 0, 0, 0};
  e[0] = level_penalty(-1, 1.5, n);
  e[1] = level_penalty(0, 3.0, n);
  const BlockSpectrum sp = spectrum_with_energies(e, n);
  const std::vector<double> grid{1.0, 2.0, 4.0};
  auto res = slope_heuristic(sp, grid);
  CHECK(res.curve[0].second == 2);
  CHECK(res.curve[1].second == 1);
  CHECK(res.curve[2].second == 0);
  CHECK(res.k_selected == 2.0);

  const BlockSpectrum zeros = spectrum_with_energies({0, 0, 0}, n);
  res = slope_heuristic(zeros, grid);
  CHECK(res.max_drop == 0);
  CHECK(res.k_selected == 1.0);

  CHECK_THROWS_AS(slope_heuristic(sp, std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(slope_heuristic(sp, std::vector<double>{1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(slope_heuristic(sp, std::vector<double>{2.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(slope_heuristic(sp, std::vector<double>{0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("slope heuristic curve is monotone on real spectra") {
  const SampleSet s = synthetic([](double u) { return std::sin(12 * u); }, 10000, 1.0, 8);
  const BlockSpectrum sp = coefficients(s, 0, unit, basis(), 6);
  const auto grid = geometric_grid(1e-3, 1e5, 60);
  const auto res = slope_heuristic(sp, grid);
  for (std::size_t i = 1; i < res.curve.size(); ++i) CHECK(res.curve[i].second <= res.curve[i - 1].second);
  CHECK(res.curve.front().second == 8);  // all of j = -1..6
  CHECK(res.curve.back().second == 0);
}

TEST_CASE("geometric grid and basis construction") {
  const auto g = geometric_grid(0.5, 2000, 40);
  CHECK(g.size() == 40);
  CHECK(g.front() == 0.5);
  CHECK(g.back() == 2000);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] / g[i - 1] == doctest::Approx(g[1] / g[0]));
  CHECK_THROWS_AS(geometric_grid(0, 1, 5), std::invalid_argument);
  CHECK_THROWS_AS(geometric_grid(2, 1, 5), std::invalid_argument);

  CHECK_THROWS_AS(build_basis(WaveletFamily::daubechies4, 7), std::invalid_argument);
  CHECK_THROWS_AS(wavelet_family_from_string("haar"), std::invalid_argument);
  CHECK(wavelet_family_from_string("db4") == WaveletFamily::daubechies4);
  // A coarser table agrees with the default one up to interpolation error.
  const WaveletBasis coarse = build_basis(WaveletFamily::daubechies4, 10);
  for (double x = 0.01; x < 3; x += 0.037) CHECK(std::abs(coarse.mother(x) - basis().mother(x)) < 5e-2);
}
