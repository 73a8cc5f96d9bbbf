#pragma once
// Result bundle persistence. A run writes
//   <out_dir>/<run_id>/{config.json, summary.json, metrics.json,
//                       timing.json, est_<filter>.csv, plots/*.svg}
// where run_id is a hash of the effective configuration, so re-running the
// same setup lands in the same directory with byte-identical deterministic
// artifacts. timing.json is the one deliberately volatile file: it holds
// wall-clock measurements and is excluded from the determinism guarantee,
// which is why timings live there and not in summary.json.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "nanol/io/config.hpp"
#include "nanol/io/csv.hpp"
#include "nanol/io/plot.hpp"

namespace nanol {

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string run_id_from_text(const std::string& text) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "run-%016llx",
                static_cast<unsigned long long>(fnv1a64(text)));
  return buf;
}

inline std::string run_id_for(const Json& effective_config) {
  return run_id_from_text(effective_config.dump());
}

namespace detail {

inline Json vecx_to_json(const VecX& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Json reports_field(const std::vector<MetricReport>& rs,
                          double MetricReport::*field) {
  Json a = Json::array();
  for (const auto& r : rs) a.push_back(r.*field);
  return a;
}

inline Json mean_std(const std::vector<MetricReport>& rs,
                     double MetricReport::*field) {
  double mean = 0.0;
  for (const auto& r : rs) mean += r.*field;
  const auto n = static_cast<double>(rs.size());
  if (!rs.empty()) mean /= n;
  double var = 0.0;
  for (const auto& r : rs) var += (r.*field - mean) * (r.*field - mean);
  const double std_dev = rs.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
  return Json{{"mean", mean}, {"std", std_dev}};
}

inline double quantile_sorted(const std::vector<double>& v, double q) {
  if (v.empty()) return 0.0;
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace detail

inline Json summary_to_json(const McSummary& sum, const RunConfig& cfg,
                            const std::string& run_id) {
  Json j;
  j["schema_version"] = 1;
  j["run_id"] = run_id;
  j["mode"] = cfg.mode;
  j["trials"] = sum.requested_trials;
  j["representative_trial"] = sum.representative_trial;
  j["failed_trials"] = sum.failed_trials;
  j["failure_messages"] = sum.failure_messages;
  j["ik_failures"] = sum.ik_failures;
  j["window_used"] = sum.window_used;
  j["filters"] = sum.filter_names;
  Json t = Json::array();
  for (double v : sum.t) t.push_back(v);
  j["t"] = t;
  Json rmse = Json::object();
  for (const auto& name : sum.filter_names) {
    if (!sum.rmse_pos.count(name)) continue;
    rmse[name] = {
        {"position", detail::vecx_to_json(sum.rmse_pos.at(name))},
        {"velocity", detail::vecx_to_json(sum.rmse_vel.at(name))},
        {"orientation", detail::vecx_to_json(sum.rmse_ori.at(name))}};
  }
  j["rmse"] = rmse;
  Json per_trial = Json::object();
  for (const auto& name : sum.filter_names) {
    if (!sum.per_trial_metrics.count(name)) continue;
    const auto& rs = sum.per_trial_metrics.at(name);
    Json entry = {
        {"ate_pos", detail::reports_field(rs, &MetricReport::ate_pos)},
        {"ate_vel", detail::reports_field(rs, &MetricReport::ate_vel)},
        {"ate_ori", detail::reports_field(rs, &MetricReport::ate_ori)},
        {"re_pos", detail::reports_field(rs, &MetricReport::re_pos)},
        {"re_vel", detail::reports_field(rs, &MetricReport::re_vel)},
        {"re_ori", detail::reports_field(rs, &MetricReport::re_ori)}};
    if (sum.per_trial_mean_cost.count(name)) {
      Json costs = Json::array();
      for (double c : sum.per_trial_mean_cost.at(name)) costs.push_back(c);
      entry["mean_cost"] = costs;
    }
    per_trial[name] = entry;
  }
  j["per_trial"] = per_trial;
  return j;
}

inline Json metrics_to_json(const McSummary& sum, const std::string& run_id) {
  Json j;
  j["schema_version"] = 1;
  j["run_id"] = run_id;
  j["window_used"] = sum.window_used;
  Json filters = Json::object();
  for (const auto& name : sum.filter_names) {
    if (!sum.per_trial_metrics.count(name)) continue;
    const auto& rs = sum.per_trial_metrics.at(name);
    filters[name] = {
        {"ate_pos", detail::mean_std(rs, &MetricReport::ate_pos)},
        {"ate_vel", detail::mean_std(rs, &MetricReport::ate_vel)},
        {"ate_ori", detail::mean_std(rs, &MetricReport::ate_ori)},
        {"re_pos", detail::mean_std(rs, &MetricReport::re_pos)},
        {"re_vel", detail::mean_std(rs, &MetricReport::re_vel)},
        {"re_ori", detail::mean_std(rs, &MetricReport::re_ori)}};
  }
  j["filters"] = filters;
  return j;
}

inline Json timing_to_json(const McSummary& sum, const std::string& run_id) {
  Json j;
  j["schema_version"] = 1;
  j["run_id"] = run_id;
  j["note"] =
      "wall-clock measurements; this file is intentionally not deterministic";
  Json filters = Json::object();
  for (const auto& name : sum.filter_names) {
    if (!sum.update_times.count(name)) continue;
    std::vector<double> v = sum.update_times.at(name);
    std::sort(v.begin(), v.end());
    double mean = 0.0;
    for (double x : v) mean += x;
    if (!v.empty()) mean /= static_cast<double>(v.size());
    filters[name] = {{"count", v.size()},
                     {"mean_s", mean},
                     {"p50_s", detail::quantile_sorted(v, 0.5)},
                     {"p90_s", detail::quantile_sorted(v, 0.9)},
                     {"p99_s", detail::quantile_sorted(v, 0.99)},
                     {"max_s", v.empty() ? 0.0 : v.back()}};
  }
  j["filters"] = filters;
  return j;
}

inline void write_plots(const std::string& plot_dir, const Json& summary) {
  atomic_write(plot_dir + "/rmse_position.svg",
               render_rmse_curves(summary, "position", "position RMSE",
                                  "RMSE [m]"));
  atomic_write(plot_dir + "/rmse_orientation.svg",
               render_rmse_curves(summary, "orientation", "orientation RMSE",
                                  "RMSE [rad]"));
  atomic_write(plot_dir + "/ate_position_box.svg",
               render_ate_boxplot(summary, "ate_pos",
                                  "per-trial position ATE", "ATE [m]"));
  atomic_write(plot_dir + "/ate_orientation_box.svg",
               render_ate_boxplot(summary, "ate_ori",
                                  "per-trial orientation ATE", "ATE [rad]"));
}

// Writes the full bundle and returns the run directory. The optional salt
// feeds the run id only; pass the input paths when the same config can be
// replayed against different logs so the bundles land in distinct dirs.
inline std::string write_result_bundle(const McSummary& sum,
                                       const RunConfig& cfg,
                                       const std::string& id_salt = "") {
  const Json config = effective_config_json(cfg);
  const std::string run_id = run_id_from_text(config.dump() + id_salt);
  const std::string dir = cfg.out_dir + "/" + run_id;
  const Json summary = summary_to_json(sum, cfg, run_id);
  atomic_write(dir + "/config.json", config.dump(2) + "\n");
  atomic_write(dir + "/summary.json", summary.dump(2) + "\n");
  atomic_write(dir + "/metrics.json",
               metrics_to_json(sum, run_id).dump(2) + "\n");
  atomic_write(dir + "/timing.json",
               timing_to_json(sum, run_id).dump(2) + "\n");
  for (const auto& [name, est] : sum.representative_estimates) {
    write_trajectory(dir + "/est_" + name + ".csv", est);
  }
  write_plots(dir + "/plots", summary);
  return dir;
}

}  // namespace nanol
