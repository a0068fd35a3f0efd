#include "wwsobol/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include <json.hpp>

namespace wws {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read_into(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
    // json would wrap a negative integer silently
    if (!v.is_number_unsigned()) throw ConfigError(std::string("'") + key + "' must be a nonnegative integer");
  }
  out = v.get<T>();
}

BandwidthScale scale_from_string(const std::string& s) {
  if (s == "raw") return BandwidthScale::raw;
  if (s == "warped") return BandwidthScale::warped;
  throw ConfigError("unknown bandwidth scale '" + s + "'");
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, ExperimentConfig cfg) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  try {
    reject_unknown(doc,
                   {"model", "estimators", "n", "replications", "seed", "matched_budget", "threads",
                    "curve_points", "kernel", "wavelet", "output"},
                   "config");
    read_into(doc, "model", cfg.model_id);
    if (doc.contains("estimators")) {
      cfg.estimators.clear();
      for (const auto& e : doc.at("estimators")) {
        const auto name = e.get<std::string>();
        try {
          cfg.estimators.push_back(estimator_from_string(name));
        } catch (const std::invalid_argument&) {
          throw ConfigError("unknown estimator '" + name + "'");
        }
      }
    }
    read_into(doc, "n", cfg.n);
    read_into(doc, "replications", cfg.replications);
    read_into(doc, "seed", cfg.master_seed);
    read_into(doc, "matched_budget", cfg.matched_budget);
    read_into(doc, "threads", cfg.threads);
    read_into(doc, "curve_points", cfg.curve_points);
    read_into(doc, "output", cfg.output_path);

    if (doc.contains("kernel")) {
      const json& k = doc.at("kernel");
      reject_unknown(k, {"kernel", "bandwidth", "scale"}, "kernel");
      KernelConfig kc = cfg.resolved_kernel();
      if (k.contains("kernel")) {
        const auto name = k.at("kernel").get<std::string>();
        try {
          kc.kernel = kernel_from_string(name);
        } catch (const std::invalid_argument&) {
          throw ConfigError("unknown kernel '" + name + "'");
        }
      }
      read_into(k, "bandwidth", kc.bandwidth);
      if (k.contains("scale")) kc.scale = scale_from_string(k.at("scale").get<std::string>());
      cfg.kernel = kc;
    }

    if (doc.contains("wavelet")) {
      const json& w = doc.at("wavelet");
      reject_unknown(w, {"k_prime", "k_grid", "j_cap", "calibration_runs", "fallback_k_prime",
                         "center_output"},
                     "wavelet");
      if (w.contains("k_prime")) cfg.wavelet.k_prime = w.at("k_prime").get<double>();
      read_into(w, "k_grid", cfg.wavelet.k_grid);
      if (w.contains("j_cap")) cfg.wavelet.j_cap = w.at("j_cap").get<int>();
      read_into(w, "calibration_runs", cfg.wavelet.calibration_runs);
      read_into(w, "fallback_k_prime", cfg.wavelet.fallback_k_prime);
      read_into(w, "center_output", cfg.wavelet.center_output);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str(), std::move(base));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string dump_config(const ExperimentConfig& cfg) {
  json doc;
  doc["model"] = cfg.model_id;
  doc["estimators"] = json::array();
  for (Estimator e : cfg.estimators) doc["estimators"].push_back(std::string(to_string(e)));
  doc["n"] = cfg.n;
  doc["replications"] = cfg.replications;
  doc["seed"] = cfg.master_seed;
  doc["matched_budget"] = cfg.matched_budget;
  doc["threads"] = cfg.threads;
  doc["curve_points"] = cfg.curve_points;
  const KernelConfig kc = cfg.resolved_kernel();
  doc["kernel"] = {{"kernel", std::string(to_string(kc.kernel))},
                   {"bandwidth", kc.bandwidth},
                   {"scale", kc.scale == BandwidthScale::raw ? "raw" : "warped"}};
  json w;
  if (cfg.wavelet.k_prime) w["k_prime"] = *cfg.wavelet.k_prime;
  if (!cfg.wavelet.k_grid.empty()) w["k_grid"] = cfg.wavelet.k_grid;
  if (cfg.wavelet.j_cap) w["j_cap"] = *cfg.wavelet.j_cap;
  w["calibration_runs"] = cfg.wavelet.calibration_runs;
  w["fallback_k_prime"] = cfg.wavelet.fallback_k_prime;
  w["center_output"] = cfg.wavelet.center_output;
  doc["wavelet"] = w;
  if (!cfg.output_path.empty()) doc["output"] = cfg.output_path;
  return doc.dump(2) + "\n";
}

}  // namespace wws
