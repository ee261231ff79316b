#ifndef CASCADE_CLI_HPP
#define CASCADE_CLI_HPP

// Command implementations behind the `cascade` tool. Each command returns the
// process exit code and writes diagnostics to `err`; nothing is written to
// the output directory unless the whole computation succeeded.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cascade/config.hpp"
#include "cascade/experiment.hpp"
#include "cascade/report.hpp"
#include "cascade/theory_checks.hpp"

namespace cascade::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kConfigError = 2,
  kInstanceError = 3,
  kIoError = 4,
};

struct RunOptions {
  unsigned workers = 0;
  std::optional<std::uint64_t> seed;
};

namespace detail {

inline std::filesystem::path prepare_out_dir(const std::string& out_dir) {
  std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (!std::filesystem::is_directory(dir)) throw IoError("cannot create output directory '" + out_dir + "'");
  return dir;
}

inline RunConfig load_with_overrides(const std::string& config_path, const RunOptions& opt) {
  RunConfig cfg = load_config(config_path);
  if (opt.seed) cfg.seed = *opt.seed;
  return cfg;
}

inline void warn_hypotheses(const ExperimentConfig& cfg, std::ostream& err) {
  if (cfg.instance.kind != InstanceKind::kTheorem3) return;
  const std::int64_t n = cfg.instance.n.value_or(cfg.horizon);
  for (const auto& v : theorem3_hypothesis_violations(cfg.instance.L, cfg.instance.K, n)) {
    err << "warning: theorem3 instance (L=" << cfg.instance.L << ", K=" << cfg.instance.K << ", n=" << n
        << "): " << v << "\n";
  }
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InstanceError& e) {
    err << "instance error: " << e.what() << "\n";
    return kInstanceError;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace detail

/// Parses "4096,8192" style lists; "2^12" is accepted as a power.
inline std::vector<std::int64_t> parse_values(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) throw ConfigError("--values: empty entry");
    std::size_t used = 0;
    try {
      const auto caret = tok.find('^');
      if (caret != std::string::npos) {
        const long long base = std::stoll(tok.substr(0, caret), &used);
        if (used != caret) throw std::invalid_argument(tok);
        const std::string ex = tok.substr(caret + 1);
        const long long e = std::stoll(ex, &used);
        if (used != ex.size() || e < 0 || e > 62) throw std::invalid_argument(tok);
        long long v = 1;
        for (long long i = 0; i < e; ++i) v *= base;
        out.push_back(v);
      } else {
        const long long v = std::stoll(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        out.push_back(v);
      }
    } catch (const std::logic_error&) {
      throw ConfigError("--values: cannot parse '" + tok + "'");
    }
    if (out.back() < 1) throw ConfigError("--values: entries must be positive");
  }
  if (out.empty()) throw ConfigError("--values: no values given");
  return out;
}

inline std::optional<SweepAxis> parse_axis(const std::string& axis) {
  if (axis == "K") return SweepAxis::kK;
  if (axis == "n") return SweepAxis::kN;
  if (axis == "L") return SweepAxis::kL;
  return std::nullopt;
}

/// Runs every policy of the config; writes results.csv, config.json and
/// manifest.json into `out_dir`.
inline int cmd_run(const std::string& config_path, const std::string& out_dir, const RunOptions& opt,
                   std::ostream& err) {
  return detail::guarded(err, [&] {
    RunManifest manifest;
    manifest.command = "run";
    manifest.started_at = utc_timestamp();
    const RunConfig cfg = detail::load_with_overrides(config_path, opt);
    const std::string run_id = config_hash(cfg);

    std::string csv(kResultsHeader);
    csv += '\n';
    for (std::size_t i = 0; i < cfg.policies.size(); ++i) {
      const ExperimentConfig ec = cfg.experiment(i);
      try {
        ec.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      build_instance(ec.instance, ec.horizon);
      if (i == 0) detail::warn_hypotheses(ec, err);
      const ExperimentResult res = run_experiment(ec, opt.workers);
      append_result_rows(csv, run_id, cfg.policies[i].label, ec, res);
    }

    const auto dir = detail::prepare_out_dir(out_dir);
    write_file_atomic(dir / "results.csv", csv);
    write_file_atomic(dir / "config.json", canonical_config(cfg));
    manifest.config_hash = run_id;
    manifest.outputs = {"results.csv", "config.json", "manifest.json"};
    manifest.finished_at = utc_timestamp();
    write_file_atomic(dir / "manifest.json", manifest.to_text());
    return static_cast<int>(kOk);
  });
}

/// Sweeps one axis for every policy. Writes sweep_<axis><value>.csv per point
/// (all policies), summary.csv with the log-log fit per policy, config.json and
/// manifest.json.
inline int cmd_sweep(const std::string& config_path, const std::string& axis_name, const std::string& values_text,
                     const std::string& out_dir, const RunOptions& opt, std::ostream& err) {
  return detail::guarded(err, [&] {
    RunManifest manifest;
    manifest.command = "sweep";
    manifest.started_at = utc_timestamp();
    const auto axis = parse_axis(axis_name);
    if (!axis) throw ConfigError("--axis: expected K, n or L");
    const auto values = parse_values(values_text);
    const RunConfig cfg = detail::load_with_overrides(config_path, opt);
    const std::string run_id = config_hash(cfg);

    // Validate every point before running any of them.
    for (std::size_t i = 0; i < cfg.policies.size(); ++i) {
      for (std::int64_t v : values) {
        ExperimentConfig ec;
        try {
          ec = config_at(cfg.experiment(i), *axis, v);
          ec.validate();
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
        build_instance(ec.instance, ec.horizon);
        if (i == 0) detail::warn_hypotheses(ec, err);
      }
    }

    std::vector<std::string> point_csv(values.size(), std::string(kResultsHeader) + "\n");
    std::string summary(kSummaryHeader);
    summary += '\n';
    for (std::size_t i = 0; i < cfg.policies.size(); ++i) {
      const auto points = sweep(cfg.experiment(i), *axis, values, opt.workers);
      for (std::size_t v = 0; v < points.size(); ++v) {
        const std::string point_id = run_id + "-" + std::string(to_string(*axis)) + std::to_string(values[v]);
        append_result_rows(point_csv[v], point_id, cfg.policies[i].label, points[v].config, points[v].result);
      }
      const auto fit = fit_sweep(points);
      if (!fit) err << "note: fit for " << cfg.policies[i].label << " absent (fewer than 2 positive points)\n";
      append_summary_rows(summary, run_id, cfg.policies[i].label, *axis, points, fit);
    }

    const auto dir = detail::prepare_out_dir(out_dir);
    manifest.outputs.clear();
    for (std::size_t v = 0; v < values.size(); ++v) {
      const std::string name = "sweep_" + std::string(to_string(*axis)) + std::to_string(values[v]) + ".csv";
      write_file_atomic(dir / name, point_csv[v]);
      manifest.outputs.push_back(name);
    }
    write_file_atomic(dir / "summary.csv", summary);
    write_file_atomic(dir / "config.json", canonical_config(cfg));
    manifest.outputs.insert(manifest.outputs.end(), {"summary.csv", "config.json", "manifest.json"});
    manifest.config_hash = run_id;
    manifest.finished_at = utc_timestamp();
    write_file_atomic(dir / "manifest.json", manifest.to_text());
    return static_cast<int>(kOk);
  });
}

/// Runs the theory-check suite; writes check_report.txt. Exit 0 iff every
/// claim holds.
inline int cmd_check(const std::string& out_dir, const TheoryCheckOptions& opt, std::ostream& out,
                     std::ostream& err) {
  return detail::guarded(err, [&] {
    const auto claims = run_theory_checks(opt);
    std::string report;
    bool all = true;
    for (const auto& c : claims) {
      all = all && c.passed;
      report += c.passed ? "PASS " : "FAIL ";
      report += c.name;
      report += " worst_slack=" + format_double(c.worst_slack);
      report += " evaluations=" + std::to_string(c.evaluations);
      report += " : " + c.statement + "\n";
    }
    report += all ? "ALL PASS\n" : "FAILED\n";
    out << report;
    if (!out_dir.empty()) {
      const auto dir = detail::prepare_out_dir(out_dir);
      write_file_atomic(dir / "check_report.txt", report);
    }
    return static_cast<int>(all ? kOk : kCheckFailed);
  });
}

}  // namespace cascade::cli

#endif  // CASCADE_CLI_HPP
