// Simulators: Ishigami (plain, nuisance and high-frequency variants), the
// stochastic SIR final-size model and its ODE metamodel.
#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "wwsobol/core.hpp"
#include "wwsobol/sampling.hpp"

namespace wws {

/// A model Y = f(X, eps). `evaluate` must be a pure function of (x, stream);
/// deterministic models ignore the stream.
struct Model {
  std::string id;
  std::vector<InputSpec> inputs;
  bool stochastic = false;
  std::function<double(std::span<const double>, const SeedStream&)> evaluate;

  std::size_t dimension() const noexcept { return inputs.size(); }
};

// ---------------------------------------------------------------------------
// Ishigami

struct IshigamiConfig {
  double frequency_multiplier = 1.0;
  /// When set, X3 is drawn internally from U(-pi, pi) and only (X1, X2) are inputs.
  bool nuisance_mode = false;
};

/// sin(m x1) + 7 sin(x2)^2 + 0.1 x3^4 sin(m x1).
double ishigami(double x1, double x2, double x3, const IshigamiConfig& cfg) noexcept;

/// Throws std::invalid_argument for a nonpositive frequency multiplier.
Model make_ishigami_model(const IshigamiConfig& cfg);

/// Closed-form first-order indices (S1, S2, S3) and Var(Y) for X_i ~ U(-pi, pi).
/// The multiplier does not change them.
struct IshigamiAnalytic {
  double variance;
  double mean;
  std::vector<double> first_order;
};
IshigamiAnalytic ishigami_analytic();

// ---------------------------------------------------------------------------
// SIR

struct SirConfig {
  std::int64_t population = 1200;
  std::int64_t initial_susceptible = 1190;
  std::int64_t initial_infectious = 10;
  /// Stop time; infinity means "until extinction".
  double horizon = std::numeric_limits<double>::infinity();
  /// Per susceptible-infectious pair infection rate (lambda / N).
  double lambda_over_n = 2.0 / 15000.0;
  /// Per capita removal rate.
  double mu = 2.0 / 15.0;

  std::int64_t initial_removed() const noexcept {
    return population - initial_susceptible - initial_infectious;
  }
  /// Throws std::invalid_argument when counts or rates are inconsistent.
  void validate() const;
};

struct SirState {
  std::int64_t s = 0;
  std::int64_t i = 0;
  std::int64_t r = 0;
  double t = 0.0;
  std::int64_t events = 0;
};

/// Exact event-driven simulation to extinction (or the horizon).
/// Throws std::runtime_error("runaway simulation") past 10 N events.
SirState sir_trajectory_end(const SirConfig& cfg, const SeedStream& stream);

/// Final size (I_T + R_T) / N.
double sir_simulate(const SirConfig& cfg, const SeedStream& stream);

/// Deterministic limit: RK4 integration of the mean-field ODE until
/// i < 1/(10 N). Returns i_T + r_T. Step is halved until the result moves by
/// less than 1e-8. Throws std::runtime_error("no extinction") past t = 100 / mu.
double sir_metamodel(const SirConfig& cfg);

/// RK4 at a fixed step; exposed for convergence tests.
double sir_metamodel_fixed_step(const SirConfig& cfg, double dt);

struct SirDensities {
  double s = 0.0;
  double i = 0.0;
  double r = 0.0;
  double t = 0.0;
};
/// Every RK4 state from t = 0 to the extinction crossing (last entry).
std::vector<SirDensities> sir_metamodel_path(const SirConfig& cfg, double dt);

/// Uniform priors lambda/N ~ U[1/15000, 3/15000], mu ~ U[1/15, 3/15].
std::vector<InputSpec> sir_input_specs();

/// Inputs (lambda_over_n, mu); everything else taken from `base`.
Model make_sir_model(const SirConfig& base = {});
Model make_sir_metamodel(const SirConfig& base = {});

// ---------------------------------------------------------------------------

/// Resolves "ishigami", "ishigami-nuisance", "ishigami-mod", "sir", "sir-ode".
/// Throws std::invalid_argument for unknown ids.
Model make_model(const std::string& model_id);

}  // namespace wws
