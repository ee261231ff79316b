#ifndef CASCADE_REPORT_HPP
#define CASCADE_REPORT_HPP

// Result files: regret CSVs, sweep summaries and the run manifest.
// All text is UTF-8 with LF line endings; doubles carry 17 significant digits.

#include <charconv>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "cascade/config.hpp"
#include "cascade/experiment.hpp"

namespace cascade {

inline constexpr std::string_view kToolVersion = "1.0.0";

inline constexpr std::string_view kResultsHeader =
    "run_id,policy,metric,instance_kind,L,K,n,chi,trial,checkpoint_round,cum_regret,seed";

inline constexpr std::string_view kSummaryHeader =
    "run_id,policy,metric,instance_kind,L,K,n,chi,axis,axis_value,mean_terminal_regret,stderr,fit_exponent,fit_r2";

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

/// Writes `content` next to `path` and renames it into place, so readers
/// never observe a partial file.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move results into '" + path.string() + "'");
  }
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace detail {

/// run_id..chi prefix shared by result and summary rows.
inline std::string row_prefix(const std::string& run_id, const std::string& policy, const ExperimentConfig& cfg) {
  std::string s;
  s += run_id;
  s += ',';
  s += policy;
  s += ',';
  s += to_string(cfg.metric);
  s += ',';
  s += to_string(cfg.instance.kind);
  s += ',';
  s += std::to_string(cfg.instance.L);
  s += ',';
  s += std::to_string(cfg.instance.K);
  s += ',';
  s += std::to_string(cfg.horizon);
  s += ',';
  if (cfg.instance.kind == InstanceKind::kTheorem3) s += format_double(cfg.instance.chi);
  return s;
}

}  // namespace detail

/// Appends one row per (trial, checkpoint).
inline void append_result_rows(std::string& csv, const std::string& run_id, const std::string& policy,
                               const ExperimentConfig& cfg, const ExperimentResult& res) {
  const std::string prefix = detail::row_prefix(run_id, policy, cfg);
  for (const auto& trace : res.traces) {
    for (std::size_t c = 0; c < res.checkpoints.size(); ++c) {
      csv += prefix;
      csv += ',';
      csv += std::to_string(trace.trial_index);
      csv += ',';
      csv += std::to_string(res.checkpoints[c]);
      csv += ',';
      csv += format_double(trace.cum_regret[c]);
      csv += ',';
      csv += std::to_string(trace.seed_used);
      csv += '\n';
    }
  }
}

inline void append_summary_rows(std::string& csv, const std::string& run_id, const std::string& policy,
                                SweepAxis axis, const std::vector<SweepPoint>& points,
                                const std::optional<ScalingFit>& fit) {
  for (const auto& pt : points) {
    csv += detail::row_prefix(run_id + "-" + std::string(to_string(axis)) + std::to_string(pt.axis_value), policy,
                              pt.config);
    csv += ',';
    csv += to_string(axis);
    csv += ',';
    csv += std::to_string(pt.axis_value);
    csv += ',';
    csv += format_double(pt.mean_terminal);
    csv += ',';
    csv += format_double(pt.terminal_std_error);
    csv += ',';
    if (fit) csv += format_double(fit->exponent);
    csv += ',';
    if (fit) csv += format_double(fit->r_squared);
    csv += '\n';
  }
}

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::string tool_version{kToolVersion};
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> outputs;

  std::string to_text() const {
    nlohmann::json j;
    j["command"] = command;
    j["config_hash"] = config_hash;
    j["tool_version"] = tool_version;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    j["outputs"] = outputs;
    return j.dump(2) + "\n";
  }
};

}  // namespace cascade

#endif  // CASCADE_REPORT_HPP
