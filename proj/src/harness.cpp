#include "wwsobol/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "wwsobol/jansen.hpp"

namespace wws {
namespace {

// Stream ids at or above these never collide with replication indices.
constexpr std::uint64_t kCalibrationStreams = std::uint64_t{1} << 62;
constexpr std::uint64_t kMetamodelStream = (std::uint64_t{1} << 62) + (std::uint64_t{1} << 61);

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_sir(const std::string& id) { return id == "sir" || id == "sir-ode"; }

std::size_t nonparametric_size(const ExperimentConfig& cfg, const Model& model) {
  return cfg.matched_budget ? cfg.n * (model.dimension() + 1) : cfg.n;
}

SampleSet draw_sample(const Model& model, std::size_t n, const SeedStream& root) {
  Matrix x = draw_iid(model.inputs, n, root.child(2));
  std::vector<double> y(n);
  const SeedStream nuisance = root.child(3);
  for (std::size_t i = 0; i < n; ++i) y[i] = model.evaluate(x.row(i), nuisance.child(i));
  return SampleSet(std::move(x), std::move(y), root.key(), model.id);
}

std::vector<double> midpoints(const InputSpec& spec, std::size_t count) {
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) {
    g[i] = spec.quantile((static_cast<double>(i) + 0.5) / static_cast<double>(count));
  }
  return g;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace

// ---------------------------------------------------------------------------

void ExperimentConfig::validate() const {
  try {
    (void)make_model(model_id);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  validate_settings();
}

void ExperimentConfig::validate_settings() const {
  if (estimators.empty()) throw ConfigError("no estimator selected");
  if (n < 100) throw ConfigError("n must be at least 100");
  if (replications < 1) throw ConfigError("replications must be at least 1");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (wavelet.k_prime && !(*wavelet.k_prime > 0.0)) throw ConfigError("K' must be positive");
  if (wavelet.j_cap && (*wavelet.j_cap < -1 || *wavelet.j_cap > 20)) {
    throw ConfigError("j_cap must lie in [-1, 20]");
  }
  if (wavelet.calibration_runs < 1) throw ConfigError("calibration_runs must be at least 1");
  for (std::size_t i = 0; i < wavelet.k_grid.size(); ++i) {
    if (!(wavelet.k_grid[i] > 0.0) || (i > 0 && !(wavelet.k_grid[i] > wavelet.k_grid[i - 1]))) {
      throw ConfigError("k_grid must be positive and strictly increasing");
    }
  }
  if (kernel && !(kernel->bandwidth > 0.0)) throw ConfigError("bandwidth must be positive");
}

bool ExperimentConfig::uses(Estimator e) const {
  return std::find(estimators.begin(), estimators.end(), e) != estimators.end();
}

KernelConfig ExperimentConfig::resolved_kernel() const {
  return kernel ? *kernel : default_kernel(model_id);
}

KernelConfig default_kernel(const std::string& model_id) {
  if (is_sir(model_id)) return {Kernel::gaussian, 0.02, BandwidthScale::warped};
  return {Kernel::gaussian, 0.1, BandwidthScale::raw};
}

std::optional<std::vector<double>> reference_indices(const std::string& model_id) {
  if (model_id.rfind("ishigami", 0) == 0) {
    auto s = ishigami_analytic().first_order;
    if (model_id != "ishigami") s.resize(2);  // X3 is a nuisance draw
    return s;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

CalibrationResult calibrate(const ExperimentConfig& cfg, const Model& model) {
  const std::size_t n = nonparametric_size(cfg, model);
  std::vector<BlockSpectrum> spectra;
  double scale_sum = 0.0;
  for (std::size_t c = 0; c < cfg.wavelet.calibration_runs; ++c) {
    const SampleSet sample = draw_sample(model, n, SeedStream(cfg.master_seed, kCalibrationStreams + c));
    const Moments mo = empirical_moments(sample.outputs);
    const double offset = cfg.wavelet.center_output ? mo.mean : 0.0;
    scale_sum += cfg.wavelet.center_output ? mo.variance : mo.variance + mo.mean * mo.mean;
    for (std::size_t l = 0; l < model.dimension(); ++l) {
      spectra.push_back(
          coefficients(sample, l, model.inputs[l], default_basis(), cfg.wavelet.j_cap, offset));
    }
  }
  CalibrationResult out;
  out.output_scale = scale_sum / static_cast<double>(cfg.wavelet.calibration_runs);
  out.k_grid = cfg.wavelet.k_grid;
  if (out.k_grid.empty()) {
    if (!(out.output_scale > 0.0)) throw std::domain_error("zero output variance");
    out.k_grid = geometric_grid(1e-2, 1e2, 41);
    for (double& k : out.k_grid) k *= out.output_scale;
  }
  const SlopeHeuristicResult sh = slope_heuristic(spectra, out.k_grid);
  out.curve = sh.curve;
  out.used_fallback = sh.max_drop == 0;
  out.k_selected = out.used_fallback ? cfg.wavelet.fallback_k_prime : sh.k_selected;
  return out;
}

double wavelet_k_prime(const ExperimentConfig& cfg, const Model& model) {
  return cfg.wavelet.k_prime ? *cfg.wavelet.k_prime : calibrate(cfg, model).k_selected;
}

ReplicationOutcome run_replication(const ExperimentConfig& cfg, const Model& model, double k_prime,
                                   std::size_t r) {
  const SeedStream root(cfg.master_seed, r);
  const std::size_t p = model.dimension();
  ReplicationOutcome out;

  std::optional<SampleSet> sample;
  Moments moments;
  if (cfg.uses(Estimator::nadaraya_watson) || cfg.uses(Estimator::warped_wavelet)) {
    sample.emplace(draw_sample(model, nonparametric_size(cfg, model), root));
    out.nonparametric_calls = sample->size();
    moments = empirical_moments(sample->outputs);
  }

  for (Estimator e : cfg.estimators) {
    switch (e) {
      case Estimator::jansen: {
        const DesignPair pair = jansen_design(model.inputs, cfg.n, root.child(0));
        JansenRun run = jansen_indices(model, pair, root.child(1));
        out.jansen_calls = run.calls;
        for (auto& est : run.estimates) out.estimates.push_back(std::move(est));
        break;
      }
      case Estimator::nadaraya_watson: {
        const KernelConfig kc = cfg.resolved_kernel();
        for (std::size_t l = 0; l < p; ++l) {
          const double v = nw_v_hat(*sample, l, model.inputs[l], kc);
          out.estimates.push_back(combine(v, moments, model.inputs[l].name(), e));
          if (cfg.curve_points > 0) {
            const auto grid = midpoints(model.inputs[l], cfg.curve_points);
            out.curves.push_back({e, l, grid, nw_curve(*sample, l, model.inputs[l], kc, grid)});
          }
        }
        break;
      }
      case Estimator::warped_wavelet: {
        const double offset = cfg.wavelet.center_output ? moments.mean : 0.0;
        for (std::size_t l = 0; l < p; ++l) {
          const BlockSpectrum spectrum =
              coefficients(*sample, l, model.inputs[l], default_basis(), cfg.wavelet.j_cap, offset);
          const ThetaResult th = theta_hat(spectrum, k_prime);
          const double v = offset * offset + th.theta;
          out.estimates.push_back(combine(v, moments, model.inputs[l].name(), e));
          if (cfg.curve_points > 0) {
            const auto grid = midpoints(model.inputs[l], cfg.curve_points);
            std::vector<double> u(grid.size());
            for (std::size_t g = 0; g < grid.size(); ++g) u[g] = warp(model.inputs[l], grid[g]);
            auto fit = reconstruct(spectrum, default_basis(), th.kept_levels, u);
            for (double& f : fit) f += offset;
            out.curves.push_back({e, l, grid, std::move(fit)});
          }
        }
        break;
      }
    }
  }
  return out;
}

ReplicationReport run_replications(const ExperimentConfig& cfg, const Model& model,
                                   const std::optional<std::vector<double>>& reference) {
  cfg.validate_settings();
  const std::size_t p = model.dimension();
  if (reference && reference->size() != p) {
    throw ConfigError("reference indices do not match the model inputs");
  }

  ReplicationReport report;
  report.model_id = model.id;
  report.n = cfg.n;
  report.replications = cfg.replications;
  report.seed = cfg.master_seed;
  if (cfg.uses(Estimator::warped_wavelet)) {
    report.k_prime = wavelet_k_prime(cfg, model);
  }

  report.outcomes.resize(cfg.replications);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t r = next++; r < cfg.replications; r = next++) {
      try {
        report.outcomes[r] = run_replication(cfg, model, report.k_prime, r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = cfg.replications;
      }
    }
  };
  const std::size_t workers = std::min(cfg.threads, cfg.replications);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  const double rcount = static_cast<double>(cfg.replications);
  for (std::size_t ei = 0; ei < cfg.estimators.size(); ++ei) {
    const Estimator e = cfg.estimators[ei];
    for (std::size_t l = 0; l < p; ++l) {
      ReportRow row;
      row.estimator = e;
      row.input = model.inputs[l].name();
      row.sample_size = e == Estimator::jansen ? cfg.n : nonparametric_size(cfg, model);
      row.reference = reference ? (*reference)[l] : kNaN;
      double sum = 0.0, dev = 0.0, dev2 = 0.0;
      for (const auto& o : report.outcomes) {
        const double s = o.estimates[ei * p + l].index_value;
        sum += s;
        dev += s - row.reference;
        dev2 += (s - row.reference) * (s - row.reference);
      }
      row.mean = sum / rcount;
      row.bias = dev / rcount;
      row.mse = dev2 / rcount;
      double spread = 0.0;
      for (const auto& o : report.outcomes) {
        const double d = o.estimates[ei * p + l].index_value - row.mean;
        spread += d * d;
      }
      row.sd = std::sqrt(spread / rcount);
      report.rows.push_back(row);
    }
  }
  return report;
}

ReplicationReport run_replications(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_replications(cfg, make_model(cfg.model_id), reference_indices(cfg.model_id));
}

// ---------------------------------------------------------------------------

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string report_csv(const ReplicationReport& report) {
  std::ostringstream os;
  os << "model,estimator,input,n,replications,reference,bias,mse,sd,seed\n";
  for (const auto& row : report.rows) {
    os << report.model_id << ',' << to_string(row.estimator) << ',' << row.input << ','
       << row.sample_size << ',' << report.replications << ',' << format_double(row.reference)
       << ',' << format_double(row.bias) << ',' << format_double(row.mse) << ','
       << format_double(row.sd) << ',' << report.seed << '\n';
  }
  return os.str();
}

void emit_report(const ReplicationReport& report, const std::string& path) {
  std::ofstream out = open_output(path);
  out << report_csv(report);
  finish_output(out, path);
}

// ---------------------------------------------------------------------------

double TornadoBar::width() const noexcept { return std::abs(y_high - y_low); }

std::vector<TornadoBar> tornado(const Model& model, std::span<const double> nominal,
                                std::size_t evaluations, const SeedStream& stream) {
  const std::size_t p = model.dimension();
  if (nominal.size() != p) throw std::invalid_argument("tornado: nominal vector has wrong length");
  for (std::size_t l = 0; l < p; ++l) {
    if (nominal[l] < model.inputs[l].lower() || nominal[l] > model.inputs[l].upper()) {
      throw std::invalid_argument("tornado: nominal value outside the bounds of '" +
                                  model.inputs[l].name() + "'");
    }
  }
  if (evaluations < 1) throw std::invalid_argument("tornado: at least one evaluation");

  auto averaged = [&](std::vector<double> x, const SeedStream& s) {
    double acc = 0.0;
    for (std::size_t e = 0; e < evaluations; ++e) acc += model.evaluate(x, s.child(e));
    return acc / static_cast<double>(evaluations);
  };
  std::vector<TornadoBar> bars;
  for (std::size_t l = 0; l < p; ++l) {
    std::vector<double> x(nominal.begin(), nominal.end());
    TornadoBar bar;
    bar.input_name = model.inputs[l].name();
    x[l] = model.inputs[l].lower();
    bar.y_low = averaged(x, stream.child(l).child(0));
    x[l] = model.inputs[l].upper();
    bar.y_high = averaged(x, stream.child(l).child(1));
    bars.push_back(bar);
  }
  std::stable_sort(bars.begin(), bars.end(),
                   [](const TornadoBar& a, const TornadoBar& b) { return a.width() > b.width(); });
  return bars;
}

// ---------------------------------------------------------------------------

SirComparison sir_compare(const ExperimentConfig& base) {
  ExperimentConfig cfg = base;
  cfg.model_id = "sir";
  cfg.validate();
  SirComparison cmp;
  cmp.stochastic = run_replications(cfg, make_sir_model(), std::nullopt);

  const Model ode = make_sir_metamodel();
  const DesignPair pair = jansen_design(ode.inputs, cfg.n, SeedStream(cfg.master_seed, kMetamodelStream));
  cmp.metamodel_jansen = jansen_indices(ode, pair, SeedStream(cfg.master_seed, kMetamodelStream).child(9)).estimates;

  if (cfg.curve_points > 0) {
    constexpr std::size_t kOtherNodes = 40;
    for (std::size_t l = 0; l < 2; ++l) {
      const std::size_t other = 1 - l;
      const auto grid = midpoints(ode.inputs[l], cfg.curve_points);
      const auto nodes = midpoints(ode.inputs[other], kOtherNodes);
      RegressionCurve curve{Estimator::jansen, l, grid, {}};
      for (double x : grid) {
        double acc = 0.0;
        for (double z : nodes) {
          double point[2];
          point[l] = x;
          point[other] = z;
          acc += ode.evaluate(point, SeedStream(0, 0));
        }
        curve.value.push_back(acc / static_cast<double>(kOtherNodes));
      }
      cmp.metamodel_curves.push_back(std::move(curve));
    }
  }
  return cmp;
}

void emit_sir_comparison(const SirComparison& cmp, const std::string& path) {
  const auto& rep = cmp.stochastic;
  {
    std::ofstream out = open_output(path);
    out << "source,estimator,input,n,replications,mean,sd,seed\n";
    for (const auto& row : rep.rows) {
      out << "stochastic," << to_string(row.estimator) << ',' << row.input << ','
          << row.sample_size << ',' << rep.replications << ',' << format_double(row.mean) << ','
          << format_double(row.sd) << ',' << rep.seed << '\n';
    }
    for (const auto& est : cmp.metamodel_jansen) {
      out << "metamodel,jansen," << est.input_name << ',' << rep.n << ",1,"
          << format_double(est.index_value) << ",nan," << rep.seed << '\n';
    }
    finish_output(out, path);
  }

  const std::filesystem::path base(path);
  const std::string stem = (base.parent_path() / base.stem()).string();
  {
    const std::string p = stem + "_replications.csv";
    std::ofstream out = open_output(p);
    out << "replication,estimator,input,estimate\n";
    for (std::size_t r = 0; r < rep.outcomes.size(); ++r) {
      for (const auto& est : rep.outcomes[r].estimates) {
        out << r << ',' << to_string(est.estimator) << ',' << est.input_name << ','
            << format_double(est.index_value) << '\n';
      }
    }
    finish_output(out, p);
  }
  {
    const std::string p = stem + "_curves.csv";
    std::ofstream out = open_output(p);
    out << "source,replication,estimator,input,x,value\n";
    const std::vector<std::string> names = {"lambda_over_n", "mu"};
    for (std::size_t r = 0; r < rep.outcomes.size(); ++r) {
      for (const auto& c : rep.outcomes[r].curves) {
        for (std::size_t g = 0; g < c.x.size(); ++g) {
          out << "stochastic," << r << ',' << to_string(c.estimator) << ',' << names[c.input] << ','
              << format_double(c.x[g]) << ',' << format_double(c.value[g]) << '\n';
        }
      }
    }
    for (const auto& c : cmp.metamodel_curves) {
      for (std::size_t g = 0; g < c.x.size(); ++g) {
        out << "metamodel,,exact," << names[c.input] << ',' << format_double(c.x[g]) << ','
            << format_double(c.value[g]) << '\n';
      }
    }
    finish_output(out, p);
  }
}

}  // namespace wws
