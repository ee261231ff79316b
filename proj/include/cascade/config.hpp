#ifndef CASCADE_CONFIG_HPP
#define CASCADE_CONFIG_HPP

// JSON experiment configuration.
//
//   {
//     "instance": {"kind": "theorem3", "L": 64, "K": 4, "chi": 4},
//     "policies": [{"rule": "klucb"}, {"rule": "ucb1", "ucb1_scale": 1.5}],
//     "horizon": 100000, "trials": 40, "seed": 7,
//     "metric": "cascade"
//   }
//
// Unknown keys are rejected. Parse errors are ConfigError and name the key.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cascade/experiment.hpp"
#include "cascade/instances.hpp"
#include "cascade/policies.hpp"

namespace cascade {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PolicySpec {
  std::string label;
  IndexRule rule;
  friend bool operator==(const PolicySpec&, const PolicySpec&) = default;
};

struct RunConfig {
  InstanceSpec instance;
  std::vector<PolicySpec> policies;
  std::int64_t horizon = 1;
  std::int64_t trials = 1;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> checkpoints;
  RegretMetric metric = RegretMetric::kCascade;
  bool realized = false;

  ExperimentConfig experiment(std::size_t policy) const {
    ExperimentConfig cfg;
    cfg.instance = instance;
    cfg.rule = policies.at(policy).rule;
    cfg.horizon = horizon;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.checkpoints = checkpoints;
    cfg.metric = metric;
    cfg.realized = realized;
    return cfg;
  }
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

using nlohmann::json;

inline void reject_unknown_keys(const json& obj, const std::string& where,
                                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError(where + it.key() + ": unknown key");
  }
}

inline const json& require_key(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) throw ConfigError(where + key + ": required key missing");
  return obj.at(key);
}

inline std::int64_t as_int(const json& v, const std::string& name) {
  if (!v.is_number_integer()) throw ConfigError(name + ": expected an integer");
  return v.get<std::int64_t>();
}

inline std::uint64_t as_uint(const json& v, const std::string& name) {
  if (!v.is_number_unsigned()) throw ConfigError(name + ": expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

inline double as_double(const json& v, const std::string& name) {
  if (!v.is_number()) throw ConfigError(name + ": expected a number");
  return v.get<double>();
}

inline std::string as_string(const json& v, const std::string& name) {
  if (!v.is_string()) throw ConfigError(name + ": expected a string");
  return v.get<std::string>();
}

inline bool as_bool(const json& v, const std::string& name) {
  if (!v.is_boolean()) throw ConfigError(name + ": expected true or false");
  return v.get<bool>();
}

inline int as_count(const json& v, const std::string& name) {
  const std::int64_t x = as_int(v, name);
  if (x < 1 || x > 1'000'000) throw ConfigError(name + ": must be in [1, 1000000]");
  return static_cast<int>(x);
}

inline InstanceSpec parse_instance(const json& j) {
  const std::string w = "instance.";
  if (!j.is_object()) throw ConfigError("instance: expected an object");
  const std::string kind = as_string(require_key(j, w, "kind"), w + "kind");
  InstanceSpec spec;
  auto opt_n = [&] {
    if (j.contains("n")) {
      const std::int64_t n = as_int(j.at("n"), w + "n");
      if (n < 1) throw ConfigError(w + "n: must be >= 1");
      spec.n = n;
    }
  };
  if (kind == "two_level") {
    reject_unknown_keys(j, w, {"kind", "L", "K", "p", "delta"});
    spec.kind = InstanceKind::kTwoLevel;
    spec.L = as_count(require_key(j, w, "L"), w + "L");
    spec.K = as_count(require_key(j, w, "K"), w + "K");
    spec.p = as_double(require_key(j, w, "p"), w + "p");
    spec.delta = as_double(require_key(j, w, "delta"), w + "delta");
  } else if (kind == "theorem3") {
    reject_unknown_keys(j, w, {"kind", "L", "K", "n", "chi"});
    spec.kind = InstanceKind::kTheorem3;
    spec.L = as_count(require_key(j, w, "L"), w + "L");
    spec.K = as_count(require_key(j, w, "K"), w + "K");
    if (j.contains("chi")) spec.chi = as_double(j.at("chi"), w + "chi");
    if (!(spec.chi > 0.0)) throw ConfigError(w + "chi: must be > 0");
    opt_n();
  } else if (kind == "lower_bound_family") {
    reject_unknown_keys(j, w, {"kind", "L", "K", "n", "m"});
    spec.kind = InstanceKind::kLowerBoundFamily;
    spec.L = as_count(require_key(j, w, "L"), w + "L");
    spec.K = as_count(require_key(j, w, "K"), w + "K");
    opt_n();
    if (j.contains("m")) {
      const json& m = j.at("m");
      if (!m.is_array()) throw ConfigError(w + "m: expected an array of integers");
      for (std::size_t i = 0; i < m.size(); ++i) {
        spec.m.push_back(static_cast<int>(as_int(m[i], w + "m[" + std::to_string(i) + "]")));
      }
    }
  } else if (kind == "explicit") {
    reject_unknown_keys(j, w, {"kind", "L", "K", "weights"});
    spec.kind = InstanceKind::kExplicit;
    spec.K = as_count(require_key(j, w, "K"), w + "K");
    const json& ws = require_key(j, w, "weights");
    if (!ws.is_array() || ws.empty()) throw ConfigError(w + "weights: expected a nonempty array of numbers");
    for (std::size_t i = 0; i < ws.size(); ++i) {
      spec.weights.push_back(as_double(ws[i], w + "weights[" + std::to_string(i) + "]"));
    }
    spec.L = static_cast<int>(spec.weights.size());
    if (j.contains("L") && as_int(j.at("L"), w + "L") != spec.L) {
      throw ConfigError(w + "L: must equal the number of weights");
    }
  } else {
    throw ConfigError(w + "kind: unknown instance kind '" + kind +
                      "' (expected two_level, theorem3, lower_bound_family or explicit)");
  }
  return spec;
}

inline json instance_to_json(const InstanceSpec& spec) {
  json j;
  j["kind"] = std::string(to_string(spec.kind));
  j["L"] = spec.L;
  j["K"] = spec.K;
  switch (spec.kind) {
    case InstanceKind::kTwoLevel:
      j["p"] = spec.p;
      j["delta"] = spec.delta;
      break;
    case InstanceKind::kTheorem3:
      j["chi"] = spec.chi;
      if (spec.n) j["n"] = *spec.n;
      break;
    case InstanceKind::kLowerBoundFamily:
      if (spec.n) j["n"] = *spec.n;
      if (!spec.m.empty()) j["m"] = spec.m;
      break;
    case InstanceKind::kExplicit:
      j["weights"] = spec.weights;
      break;
  }
  return j;
}

inline std::string default_label(const IndexRule& rule) {
  std::string label(to_string(rule.kind));
  if (rule.kind == IndexKind::kUcb1 && rule.ucb1_scale != 1.5) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", rule.ucb1_scale);
    label += "_a";
    label += buf;
  }
  if (rule.kind == IndexKind::kKlUcb && rule.threshold_form == ThresholdForm::kLiteralDoubleLog) {
    label += "_loglog";
  }
  return label;
}

inline PolicySpec parse_policy(const json& j, const std::string& w) {
  if (!j.is_object()) throw ConfigError(w.substr(0, w.size() - 1) + ": expected an object");
  reject_unknown_keys(j, w, {"rule", "ucb1_scale", "threshold", "random_tiebreak", "label"});
  PolicySpec p;
  const std::string rule = as_string(require_key(j, w, "rule"), w + "rule");
  if (rule == "klucb") {
    p.rule.kind = IndexKind::kKlUcb;
  } else if (rule == "ucb1") {
    p.rule.kind = IndexKind::kUcb1;
  } else if (rule == "oracle") {
    p.rule.kind = IndexKind::kOracle;
  } else if (rule == "uniform") {
    p.rule.kind = IndexKind::kUniform;
  } else {
    throw ConfigError(w + "rule: unknown rule '" + rule + "' (expected klucb, ucb1, oracle or uniform)");
  }
  if (j.contains("ucb1_scale")) {
    p.rule.ucb1_scale = as_double(j.at("ucb1_scale"), w + "ucb1_scale");
    if (!(p.rule.ucb1_scale > 1.0)) throw ConfigError(w + "ucb1_scale: must be > 1");
  }
  if (j.contains("threshold")) {
    const std::string form = as_string(j.at("threshold"), w + "threshold");
    if (form == "t_log3") {
      p.rule.threshold_form = ThresholdForm::kTLogCubed;
    } else if (form == "literal_double_log") {
      p.rule.threshold_form = ThresholdForm::kLiteralDoubleLog;
    } else {
      throw ConfigError(w + "threshold: expected t_log3 or literal_double_log");
    }
  }
  if (j.contains("random_tiebreak")) p.rule.random_tiebreak = as_bool(j.at("random_tiebreak"), w + "random_tiebreak");
  p.label = j.contains("label") ? as_string(j.at("label"), w + "label") : default_label(p.rule);
  if (p.label.empty() || p.label.find_first_of(",\"\n\r") != std::string::npos) {
    throw ConfigError(w + "label: must be nonempty and free of commas, quotes and newlines");
  }
  return p;
}

inline json policy_to_json(const PolicySpec& p) {
  json j;
  j["rule"] = std::string(to_string(p.rule.kind));
  j["ucb1_scale"] = p.rule.ucb1_scale;
  j["threshold"] = p.rule.threshold_form == ThresholdForm::kTLogCubed ? "t_log3" : "literal_double_log";
  j["random_tiebreak"] = p.rule.random_tiebreak;
  j["label"] = p.label;
  return j;
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
  using namespace detail;
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  reject_unknown_keys(j, "", {"instance", "policies", "horizon", "trials", "seed", "checkpoints", "metric", "realized"});
  RunConfig cfg;
  cfg.instance = parse_instance(require_key(j, "", "instance"));

  const json& pols = require_key(j, "", "policies");
  if (!pols.is_array() || pols.empty()) throw ConfigError("policies: expected a nonempty array");
  for (std::size_t i = 0; i < pols.size(); ++i) {
    cfg.policies.push_back(parse_policy(pols[i], "policies[" + std::to_string(i) + "]."));
  }
  for (std::size_t i = 0; i < cfg.policies.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if (cfg.policies[i].label == cfg.policies[k].label) {
        throw ConfigError("policies[" + std::to_string(i) + "].label: duplicate label '" + cfg.policies[i].label + "'");
      }
    }
  }

  cfg.horizon = as_int(require_key(j, "", "horizon"), "horizon");
  if (cfg.horizon < 1) throw ConfigError("horizon: must be >= 1");
  if (j.contains("trials")) cfg.trials = as_int(j.at("trials"), "trials");
  if (cfg.trials < 1) throw ConfigError("trials: must be >= 1");
  if (j.contains("seed")) cfg.seed = as_uint(j.at("seed"), "seed");

  if (j.contains("checkpoints")) {
    const json& cps = j.at("checkpoints");
    if (!cps.is_array()) throw ConfigError("checkpoints: expected an array of integers");
    for (std::size_t i = 0; i < cps.size(); ++i) {
      cfg.checkpoints.push_back(as_int(cps[i], "checkpoints[" + std::to_string(i) + "]"));
    }
    for (std::size_t i = 0; i < cfg.checkpoints.size(); ++i) {
      const auto c = cfg.checkpoints[i];
      if (c < 1 || c > cfg.horizon || (i > 0 && c <= cfg.checkpoints[i - 1])) {
        throw ConfigError("checkpoints: must be strictly increasing within [1, horizon]");
      }
    }
    if (!cfg.checkpoints.empty() && cfg.checkpoints.back() != cfg.horizon) {
      throw ConfigError("checkpoints: last checkpoint must equal horizon");
    }
  }
  if (j.contains("metric")) {
    const std::string m = as_string(j.at("metric"), "metric");
    if (m == "cascade") {
      cfg.metric = RegretMetric::kCascade;
    } else if (m == "document") {
      cfg.metric = RegretMetric::kDocument;
    } else {
      throw ConfigError("metric: expected cascade or document");
    }
  }
  if (j.contains("realized")) cfg.realized = as_bool(j.at("realized"), "realized");
  if (cfg.realized && cfg.metric != RegretMetric::kCascade) {
    throw ConfigError("realized: only supported with metric cascade");
  }
  return cfg;
}

inline RunConfig parse_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

inline nlohmann::json to_json(const RunConfig& cfg) {
  using namespace detail;
  json j;
  j["instance"] = instance_to_json(cfg.instance);
  j["policies"] = json::array();
  for (const auto& p : cfg.policies) j["policies"].push_back(policy_to_json(p));
  j["horizon"] = cfg.horizon;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  if (!cfg.checkpoints.empty()) j["checkpoints"] = cfg.checkpoints;
  j["metric"] = std::string(to_string(cfg.metric));
  j["realized"] = cfg.realized;
  return j;
}

/// Sorted keys, fixed indentation, trailing newline.
inline std::string canonical_config(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

/// FNV-1a 64 of the canonical text, as 16 hex digits.
inline std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_config(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace cascade

#endif  // CASCADE_CONFIG_HPP
