// Experiment runner: replication studies, slope-heuristic calibration,
// tornado diagrams, the SIR comparison and CSV emission.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wwsobol/core.hpp"
#include "wwsobol/models.hpp"
#include "wwsobol/nadaraya_watson.hpp"
#include "wwsobol/sampling.hpp"
#include "wwsobol/wavelet.hpp"

namespace wws {

/// Invalid experiment configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct WaveletSettings {
  /// Fixed K'. When absent, K' comes from the slope heuristic on dedicated
  /// calibration samples.
  std::optional<double> k_prime;
  /// Explicit K' grid for calibration. When empty the grid is
  /// Var(Y) * geometric(1e-2, 1e2, 41) from the calibration samples
  /// (mean(Y^2) instead of Var(Y) when the output is not centered).
  std::vector<double> k_grid;
  /// Highest level; J_n when absent.
  std::optional<int> j_cap;
  std::size_t calibration_runs = 5;
  /// Used when the calibration curve shows no drop at all.
  double fallback_k_prime = 26.0;
  /// Project Y - mean(Y) rather than Y (see wavelet.hpp). Off reproduces the
  /// plain estimator, whose index shifts with the output mean.
  bool center_output = true;
};

struct ExperimentConfig {
  std::string model_id = "ishigami";
  std::vector<Estimator> estimators = {Estimator::jansen, Estimator::nadaraya_watson,
                                       Estimator::warped_wavelet};
  std::size_t n = 10000;
  std::size_t replications = 100;
  std::uint64_t master_seed = 20240601;
  /// When set, kernel and wavelet estimators get n (p + 1) draws, the budget
  /// of one Jansen run; otherwise n.
  bool matched_budget = false;
  /// Defaults per model when absent (see default_kernel()).
  std::optional<KernelConfig> kernel;
  WaveletSettings wavelet;
  std::size_t threads = 1;
  /// Points of the regression-curve grid kept per replication (0 = none).
  std::size_t curve_points = 0;
  std::string output_path;

  /// Throws ConfigError. Includes the model id lookup.
  void validate() const;
  /// Everything but the model id, for runs on a caller-supplied Model.
  void validate_settings() const;
  bool uses(Estimator e) const;
  KernelConfig resolved_kernel() const;
};

/// Gaussian kernel; raw bandwidth 0.1 for Ishigami variants, warped bandwidth 0.02 for SIR.
KernelConfig default_kernel(const std::string& model_id);

/// Analytic first-order indices when the model has them.
std::optional<std::vector<double>> reference_indices(const std::string& model_id);

struct ReportRow {
  Estimator estimator = Estimator::jansen;
  std::string input;
  std::size_t sample_size = 0;
  double reference = 0.0;  ///< NaN when unknown
  double mean = 0.0;
  double bias = 0.0;       ///< E[S_hat - S]
  double mse = 0.0;        ///< E[(S_hat - S)^2]
  double sd = 0.0;         ///< 1/R normalization, so sd^2 = mse - bias^2
};

/// Regression curve of one estimator for one input, on the raw input scale.
struct RegressionCurve {
  Estimator estimator = Estimator::nadaraya_watson;
  std::size_t input = 0;
  std::vector<double> x;
  std::vector<double> value;
};

struct ReplicationOutcome {
  std::vector<SobolEstimate> estimates;  ///< estimator-major, then input
  std::vector<RegressionCurve> curves;
  std::size_t jansen_calls = 0;
  std::size_t nonparametric_calls = 0;
};

struct ReplicationReport {
  std::string model_id;
  std::size_t n = 0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  double k_prime = 0.0;  ///< K' used by the wavelet estimator (0 if unused)
  std::vector<ReportRow> rows;
  std::vector<ReplicationOutcome> outcomes;  ///< index = replication
};

/// Slope-heuristic calibration over `calibration_runs` fresh samples drawn on
/// streams disjoint from every replication stream.
struct CalibrationResult {
  double k_selected = 0.0;
  bool used_fallback = false;
  double output_scale = 0.0;  ///< Var(Y), or mean(Y^2) uncentered; pooled over samples
  std::vector<double> k_grid;
  std::vector<std::pair<double, std::size_t>> curve;
};
CalibrationResult calibrate(const ExperimentConfig& cfg, const Model& model);

/// The fixed K' if one is set, else the calibrated one.
double wavelet_k_prime(const ExperimentConfig& cfg, const Model& model);

/// One replication; deterministic in (cfg.master_seed, r).
ReplicationOutcome run_replication(const ExperimentConfig& cfg, const Model& model, double k_prime,
                                   std::size_t r);

/// Bias/MSE study. Replications run on cfg.threads worker threads; aggregation
/// is ordered by replication index so the report does not depend on threading.
ReplicationReport run_replications(const ExperimentConfig& cfg, const Model& model,
                                   const std::optional<std::vector<double>>& reference);
ReplicationReport run_replications(const ExperimentConfig& cfg);

/// CSV: model,estimator,input,n,replications,reference,bias,mse,sd,seed.
std::string report_csv(const ReplicationReport& report);
/// Writes report_csv(); throws std::runtime_error naming the path on I/O failure.
void emit_report(const ReplicationReport& report, const std::string& path);

/// Shortest round-trip decimal.
std::string format_double(double v);

struct TornadoBar {
  std::string input_name;
  double y_low = 0.0;
  double y_high = 0.0;
  double width() const noexcept;
};

/// One-at-a-time sweep: input l at its lower and upper bound, others at
/// `nominal`; outputs averaged over `evaluations` nuisance draws. Sorted by
/// decreasing |y_high - y_low| (stable).
/// Throws std::invalid_argument when nominal lies outside the bounds.
std::vector<TornadoBar> tornado(const Model& model, std::span<const double> nominal,
                                std::size_t evaluations, const SeedStream& stream);

/// SIR stochastic model vs ODE metamodel comparison.
struct SirComparison {
  ReplicationReport stochastic;
  /// Jansen estimates on the metamodel with the same n.
  std::vector<SobolEstimate> metamodel_jansen;
  /// E[Y_ode | X_l] on the curve grid (averaged over the other input).
  std::vector<RegressionCurve> metamodel_curves;
};
SirComparison sir_compare(const ExperimentConfig& cfg);

/// Writes summary to `path`, per-replication estimates to <stem>_replications.csv
/// and regression curves to <stem>_curves.csv.
void emit_sir_comparison(const SirComparison& cmp, const std::string& path);

}  // namespace wws
