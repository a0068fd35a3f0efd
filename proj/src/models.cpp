#include "wwsobol/models.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wws {

double ishigami(double x1, double x2, double x3, const IshigamiConfig& cfg) noexcept {
  const double s1 = std::sin(cfg.frequency_multiplier * x1);
  const double s2 = std::sin(x2);
  const double x3sq = x3 * x3;
  return s1 + 7.0 * s2 * s2 + 0.1 * x3sq * x3sq * s1;
}

Model make_ishigami_model(const IshigamiConfig& cfg) {
  if (!(cfg.frequency_multiplier > 0.0)) {
    throw std::invalid_argument("ishigami: frequency multiplier must be positive");
  }
  constexpr double pi = std::numbers::pi;
  Model m;
  m.inputs = {InputSpec("X1", -pi, pi), InputSpec("X2", -pi, pi)};
  if (cfg.nuisance_mode) {
    m.id = cfg.frequency_multiplier == 1.0 ? "ishigami-nuisance" : "ishigami-mod";
    m.stochastic = true;
    m.evaluate = [cfg](std::span<const double> x, const SeedStream& stream) {
      const double x3 = -pi + 2.0 * pi * stream.uniform();
      return ishigami(x[0], x[1], x3, cfg);
    };
  } else {
    m.id = cfg.frequency_multiplier == 1.0 ? "ishigami" : "ishigami-freq";
    m.inputs.emplace_back("X3", -pi, pi);
    m.evaluate = [cfg](std::span<const double> x, const SeedStream&) {
      return ishigami(x[0], x[1], x[2], cfg);
    };
  }
  return m;
}

IshigamiAnalytic ishigami_analytic() {
  constexpr double pi = std::numbers::pi;
  const double pi4 = std::pow(pi, 4);
  const double pi8 = pi4 * pi4;
  const double v1 = 0.5 * std::pow(1.0 + 0.1 * pi4 / 5.0, 2);
  const double v2 = 49.0 / 8.0;
  const double var = 0.5 + 49.0 / 8.0 + 0.1 * pi4 / 5.0 + 0.01 * pi8 / 18.0;
  return {var, 3.5, {v1 / var, v2 / var, 0.0}};
}

// ---------------------------------------------------------------------------

void SirConfig::validate() const {
  if (population <= 0) throw std::invalid_argument("sir: population must be positive");
  if (initial_susceptible < 0 || initial_infectious < 0 || initial_removed() < 0) {
    throw std::invalid_argument("sir: initial counts must be nonnegative with S0 + I0 <= N");
  }
  if (!(lambda_over_n >= 0.0) || !(mu >= 0.0)) {
    throw std::invalid_argument("sir: rates must be nonnegative");
  }
  if (!(horizon > 0.0)) throw std::invalid_argument("sir: horizon must be positive");
}

SirState sir_trajectory_end(const SirConfig& cfg, const SeedStream& stream) {
  cfg.validate();
  SirState st{cfg.initial_susceptible, cfg.initial_infectious, cfg.initial_removed(), 0.0, 0};
  if (st.i == 0) return st;

  Engine eng = stream.engine();
  const std::int64_t cap = 10 * cfg.population;
  while (st.i > 0) {
    const double infection = cfg.lambda_over_n * static_cast<double>(st.s) *
                             static_cast<double>(st.i);
    const double removal = cfg.mu * static_cast<double>(st.i);
    const double total = infection + removal;
    if (total <= 0.0) break;  // mu = 0 and no susceptibles left: frozen state

    const double dt = -std::log1p(-uniform01(eng)) / total;
    if (st.t + dt >= cfg.horizon) {
      st.t = cfg.horizon;
      break;
    }
    st.t += dt;
    if (uniform01(eng) * total < infection) {
      --st.s;
      ++st.i;
    } else {
      --st.i;
      ++st.r;
    }
    if (++st.events > cap) throw std::runtime_error("runaway simulation");
  }
  return st;
}

double sir_simulate(const SirConfig& cfg, const SeedStream& stream) {
  const SirState end = sir_trajectory_end(cfg, stream);
  return static_cast<double>(end.i + end.r) / static_cast<double>(cfg.population);
}

namespace {

using Densities = SirDensities;

Densities rk4_step(const Densities& y, double beta, double mu, double h) {
  auto rhs = [&](const Densities& v) {
    const double inf = beta * v.s * v.i;
    return Densities{-inf, inf - mu * v.i, mu * v.i, 1.0};
  };
  auto axpy = [](const Densities& a, const Densities& k, double c) {
    return Densities{a.s + c * k.s, a.i + c * k.i, a.r + c * k.r, a.t + c};
  };
  const Densities k1 = rhs(y);
  const Densities k2 = rhs(axpy(y, k1, h / 2));
  const Densities k3 = rhs(axpy(y, k2, h / 2));
  const Densities k4 = rhs(axpy(y, k3, h));
  return {y.s + h / 6 * (k1.s + 2 * k2.s + 2 * k3.s + k4.s),
          y.i + h / 6 * (k1.i + 2 * k2.i + 2 * k3.i + k4.i),
          y.r + h / 6 * (k1.r + 2 * k2.r + 2 * k3.r + k4.r), y.t + h};
}

Densities integrate(const SirConfig& cfg, double dt, std::vector<Densities>* path) {
  cfg.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("sir metamodel: step must be positive");
  const double n = static_cast<double>(cfg.population);
  const double threshold = 1.0 / (10.0 * n);
  Densities y{cfg.initial_susceptible / n, cfg.initial_infectious / n, cfg.initial_removed() / n,
              0.0};
  if (path) path->push_back(y);
  if (y.i < threshold) return y;
  if (!(cfg.mu > 0.0)) throw std::runtime_error("no extinction");

  const double beta = cfg.lambda_over_n * n;
  const double t_max = 100.0 / cfg.mu;
  while (y.t < t_max) {
    const Densities next = rk4_step(y, beta, cfg.mu, dt);
    if (next.i < threshold) {
      // Locate the crossing inside the step so the stop time does not depend on dt.
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (rk4_step(y, beta, cfg.mu, mid * dt).i < threshold) hi = mid;
        else lo = mid;
      }
      const Densities end = rk4_step(y, beta, cfg.mu, hi * dt);
      if (path) path->push_back(end);
      return end;
    }
    y = next;
    if (path) path->push_back(y);
  }
  throw std::runtime_error("no extinction");
}

}  // namespace

double sir_metamodel_fixed_step(const SirConfig& cfg, double dt) {
  const Densities end = integrate(cfg, dt, nullptr);
  return end.i + end.r;
}

std::vector<SirDensities> sir_metamodel_path(const SirConfig& cfg, double dt) {
  std::vector<SirDensities> path;
  integrate(cfg, dt, &path);
  return path;
}

double sir_metamodel(const SirConfig& cfg) {
  double dt = 0.05;
  double previous = sir_metamodel_fixed_step(cfg, dt);
  for (int halving = 0; halving < 14; ++halving) {
    dt /= 2;
    const double current = sir_metamodel_fixed_step(cfg, dt);
    if (std::abs(current - previous) < 1e-8) return current;
    previous = current;
  }
  throw std::runtime_error("sir metamodel: step refinement did not converge");
}

std::vector<InputSpec> sir_input_specs() {
  return {InputSpec("lambda_over_n", 1.0 / 15000.0, 3.0 / 15000.0),
          InputSpec("mu", 1.0 / 15.0, 3.0 / 15.0)};
}

Model make_sir_model(const SirConfig& base) {
  base.validate();
  Model m;
  m.id = "sir";
  m.inputs = sir_input_specs();
  m.stochastic = true;
  m.evaluate = [base](std::span<const double> x, const SeedStream& stream) {
    SirConfig cfg = base;
    cfg.lambda_over_n = x[0];
    cfg.mu = x[1];
    return sir_simulate(cfg, stream);
  };
  return m;
}

Model make_sir_metamodel(const SirConfig& base) {
  base.validate();
  Model m;
  m.id = "sir-ode";
  m.inputs = sir_input_specs();
  m.evaluate = [base](std::span<const double> x, const SeedStream&) {
    SirConfig cfg = base;
    cfg.lambda_over_n = x[0];
    cfg.mu = x[1];
    return sir_metamodel(cfg);
  };
  return m;
}

Model make_model(const std::string& model_id) {
  if (model_id == "ishigami") return make_ishigami_model({1.0, false});
  if (model_id == "ishigami-nuisance") return make_ishigami_model({1.0, true});
  if (model_id == "ishigami-mod") return make_ishigami_model({11.0, true});
  if (model_id == "sir") return make_sir_model();
  if (model_id == "sir-ode") return make_sir_metamodel();
  throw std::invalid_argument("unknown model '" + model_id + "'");
}

}  // namespace wws
