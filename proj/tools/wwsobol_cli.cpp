// wwsobol: first-order Sobol index estimation from the command line.
//
//   wwsobol estimate    --model ishigami --estimator all --n 10000
//   wwsobol replicate   --model ishigami-mod --reps 100 --matched --jcap 7 --out table.csv
//   wwsobol tornado     --model sir --evals 2000
//   wwsobol calibrate   --model ishigami --jcap 6 --out curve.csv
//   wwsobol sir-compare --reps 50 --out sir.csv
//
// Exit codes: 0 success, 2 configuration error, 3 runtime or model error.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wwsobol/config.hpp"
#include "wwsobol/harness.hpp"

namespace {

using namespace wws;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Flags {
  std::string config_path;
  std::string model;
  std::string estimator;
  std::size_t n = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  double bandwidth = 0.0;
  std::string kernel;
  std::string scale;
  double kprime = 0.0;
  int jcap = 0;
  std::size_t threads = 0;
  std::size_t curve_points = 0;
  bool matched = false;
  bool no_center = false;
  std::string out;
  bool print_config = false;

  // Subcommand-specific.
  std::size_t evals = 0;
  std::vector<double> nominal;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_path, "JSON experiment file; flags override its values");
  cmd->add_option("--model", f.model, "ishigami | ishigami-nuisance | ishigami-mod | sir | sir-ode");
  cmd->add_option("--estimator", f.estimator, "jansen | nw | wavelet | all");
  cmd->add_option("--n", f.n, "base sample size");
  cmd->add_option("--reps", f.reps, "replications");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--bandwidth", f.bandwidth, "kernel bandwidth");
  cmd->add_option("--kernel", f.kernel, "gaussian | epanechnikov");
  cmd->add_option("--bandwidth-scale", f.scale, "raw | warped");
  cmd->add_option("--kprime", f.kprime, "fixed wavelet penalty constant K' (skips calibration)");
  cmd->add_option("--jcap", f.jcap, "highest wavelet level");
  cmd->add_option("--threads", f.threads, "worker threads");
  cmd->add_option("--curve-points", f.curve_points, "regression-curve grid size");
  cmd->add_flag("--matched", f.matched, "give nonparametric estimators n(p+1) draws");
  cmd->add_flag("--no-center", f.no_center, "wavelet: project Y itself instead of Y - mean(Y)");
  cmd->add_option("--out", f.out, "output CSV path (stdout when absent)");
  cmd->add_flag("--print-config", f.print_config, "echo the effective configuration to stderr");
}

bool given(const CLI::App* cmd, const std::string& name) { return cmd->count(name) > 0; }

ExperimentConfig resolve(const CLI::App* cmd, const Flags& f) {
  ExperimentConfig cfg;
  if (given(cmd, "--config")) cfg = load_config(f.config_path);
  if (given(cmd, "--model")) cfg.model_id = f.model;
  if (given(cmd, "--estimator")) {
    if (f.estimator == "all") {
      cfg.estimators = {Estimator::jansen, Estimator::nadaraya_watson, Estimator::warped_wavelet};
    } else {
      try {
        cfg.estimators = {estimator_from_string(f.estimator)};
      } catch (const std::invalid_argument&) {
        throw ConfigError("unknown estimator '" + f.estimator + "'");
      }
    }
  }
  if (given(cmd, "--n")) cfg.n = f.n;
  if (given(cmd, "--reps")) cfg.replications = f.reps;
  if (given(cmd, "--seed")) cfg.master_seed = f.seed;
  if (given(cmd, "--threads")) cfg.threads = f.threads;
  if (given(cmd, "--curve-points")) cfg.curve_points = f.curve_points;
  if (given(cmd, "--matched")) cfg.matched_budget = true;
  if (given(cmd, "--out")) cfg.output_path = f.out;
  if (given(cmd, "--bandwidth") || given(cmd, "--kernel") || given(cmd, "--bandwidth-scale")) {
    KernelConfig kc = cfg.resolved_kernel();
    if (given(cmd, "--bandwidth")) kc.bandwidth = f.bandwidth;
    if (given(cmd, "--kernel")) {
      try {
        kc.kernel = kernel_from_string(f.kernel);
      } catch (const std::invalid_argument&) {
        throw ConfigError("unknown kernel '" + f.kernel + "'");
      }
    }
    if (given(cmd, "--bandwidth-scale")) {
      if (f.scale == "raw") kc.scale = BandwidthScale::raw;
      else if (f.scale == "warped") kc.scale = BandwidthScale::warped;
      else throw ConfigError("unknown bandwidth scale '" + f.scale + "'");
    }
    cfg.kernel = kc;
  }
  if (given(cmd, "--kprime")) cfg.wavelet.k_prime = f.kprime;
  if (given(cmd, "--jcap")) cfg.wavelet.j_cap = f.jcap;
  if (given(cmd, "--no-center")) cfg.wavelet.center_output = false;
  cfg.validate();
  if (f.print_config) std::cerr << dump_config(cfg);
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

int cmd_estimate(const ExperimentConfig& cfg) {
  const Model model = make_model(cfg.model_id);
  double k_prime = 0.0;
  if (cfg.uses(Estimator::warped_wavelet)) k_prime = wavelet_k_prime(cfg, model);
  const ReplicationOutcome o = run_replication(cfg, model, k_prime, 0);
  std::ostringstream os;
  os << "model,estimator,input,estimate,v_hat,y_bar,sigma2,out_of_range,calls,seed\n";
  for (const auto& e : o.estimates) {
    const std::size_t calls = e.estimator == Estimator::jansen ? o.jansen_calls : o.nonparametric_calls;
    os << model.id << ',' << to_string(e.estimator) << ',' << e.input_name << ','
       << format_double(e.index_value) << ',' << format_double(e.v_hat) << ','
       << format_double(e.y_bar) << ',' << format_double(e.sigma2_hat) << ','
       << (e.out_of_range ? 1 : 0) << ',' << calls << ',' << cfg.master_seed << '\n';
  }
  write_text(cfg.output_path, os.str());
  if (cfg.uses(Estimator::warped_wavelet)) std::cerr << "K' = " << format_double(k_prime) << '\n';
  return 0;
}

int cmd_replicate(const ExperimentConfig& cfg) {
  const ReplicationReport report = run_replications(cfg);
  if (cfg.output_path.empty()) {
    std::cout << report_csv(report);
  } else {
    emit_report(report, cfg.output_path);
  }
  return 0;
}

int cmd_tornado(const ExperimentConfig& cfg, const Flags& f, const CLI::App* cmd) {
  const Model model = make_model(cfg.model_id);
  std::vector<double> nominal = f.nominal;
  if (nominal.empty()) {
    for (const auto& s : model.inputs) nominal.push_back(s.quantile(0.5));
  }
  std::size_t evals = model.stochastic ? 2000 : 1;
  if (given(cmd, "--evals")) evals = f.evals;
  const auto bars = tornado(model, nominal, evals, SeedStream(cfg.master_seed, 0));
  std::ostringstream os;
  os << "input,y_low,y_high,width\n";
  for (const auto& b : bars) {
    os << b.input_name << ',' << format_double(b.y_low) << ',' << format_double(b.y_high) << ','
       << format_double(b.width()) << '\n';
  }
  write_text(cfg.output_path, os.str());
  return 0;
}

int cmd_calibrate(const ExperimentConfig& cfg) {
  const Model model = make_model(cfg.model_id);
  const CalibrationResult cal = calibrate(cfg, model);
  std::ostringstream os;
  os << "k_prime,kept_levels,selected\n";
  for (const auto& [k, count] : cal.curve) {
    os << format_double(k) << ',' << count << ',' << (k == cal.k_selected ? 1 : 0) << '\n';
  }
  write_text(cfg.output_path, os.str());
  std::cerr << "K' = " << format_double(cal.k_selected)
            << (cal.used_fallback ? " (fallback: no drop in the curve)" : "") << '\n';
  return 0;
}

int cmd_sir_compare(ExperimentConfig cfg, const CLI::App* cmd) {
  if (!given(cmd, "--model") && cfg.model_id != "sir") cfg.model_id = "sir";
  if (cfg.model_id != "sir") throw ConfigError("sir-compare runs on the sir model only");
  if (cfg.output_path.empty()) throw ConfigError("sir-compare needs --out");
  if (cfg.curve_points == 0) cfg.curve_points = 50;
  const SirComparison cmp = sir_compare(cfg);
  emit_sir_comparison(cmp, cfg.output_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"First-order Sobol indices: pick-freeze, kernel regression and warped wavelets"};
  app.require_subcommand(1);
  Flags f;

  auto* estimate = app.add_subcommand("estimate", "one run of the selected estimators");
  auto* replicate = app.add_subcommand("replicate", "bias/MSE study over replications");
  auto* tornado_cmd = app.add_subcommand("tornado", "one-at-a-time sensitivity bars");
  auto* calibrate_cmd = app.add_subcommand("calibrate", "slope-heuristic curve for K'");
  auto* sir = app.add_subcommand("sir-compare", "stochastic SIR vs ODE metamodel");
  for (auto* c : {estimate, replicate, tornado_cmd, calibrate_cmd, sir}) add_common(c, f);
  tornado_cmd->add_option("--evals", f.evals, "evaluations averaged per endpoint");
  tornado_cmd->add_option("--nominal", f.nominal, "nominal input values (default: midpoints)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (estimate->parsed()) return cmd_estimate(resolve(estimate, f));
    if (replicate->parsed()) return cmd_replicate(resolve(replicate, f));
    if (tornado_cmd->parsed()) return cmd_tornado(resolve(tornado_cmd, f), f, tornado_cmd);
    if (calibrate_cmd->parsed()) return cmd_calibrate(resolve(calibrate_cmd, f));
    if (sir->parsed()) return cmd_sir_compare(resolve(sir, f), sir);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
