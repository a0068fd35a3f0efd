// JSON experiment files. Keys mirror ExperimentConfig:
//
//   {
//     "model": "ishigami",
//     "estimators": ["jansen", "nw", "wavelet"],
//     "n": 10000, "replications": 100, "seed": 20240601,
//     "matched_budget": false, "threads": 1, "curve_points": 0,
//     "kernel": {"kernel": "epanechnikov", "bandwidth": 0.1, "scale": "raw"},
//     "wavelet": {"k_prime": 26, "k_grid": [...], "j_cap": 6,
//                 "calibration_runs": 5, "fallback_k_prime": 26},
//     "output": "report.csv"
//   }
//
// Every key is optional; absent keys keep the defaults. Unknown keys are
// rejected so typos do not pass silently.
#pragma once

#include <string>

#include "wwsobol/harness.hpp"

namespace wws {

/// Parses JSON text over `base`. Throws ConfigError on bad syntax, unknown
/// keys or wrong value types.
ExperimentConfig parse_config(const std::string& json_text, ExperimentConfig base = {});

/// Reads and parses a file. Throws ConfigError naming the path when it cannot be read.
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

/// Inverse of parse_config, for echoing the effective configuration.
std::string dump_config(const ExperimentConfig& cfg);

}  // namespace wws
