#pragma once
// Re-running filters over a recorded sensor log against a reference
// trajectory. The reference may be sampled on a different grid than the log,
// so estimates are scored against an interpolated copy.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "nanol/error.hpp"
#include "nanol/sim/montecarlo.hpp"
#include "nanol/trajectory.hpp"

namespace nanol {

// Evaluates the reference series at time t. A sample hit passes through
// exactly; between samples the rotation is slerped and velocity and position
// are interpolated linearly. `origin` names the file the series came from so
// coverage errors point at the right input.
inline NavSample interpolate_nav(const NavSeries& s, double t,
                                 const std::string& origin) {
  if (s.empty()) {
    throw ParseError(origin, 0, "reference trajectory is empty");
  }
  const double slack = 1e-9 * std::max(1.0, std::abs(t));
  if (t < s.front().t - slack || t > s.back().t + slack) {
    throw ParseError(origin, 0,
                     "reference trajectory does not cover t=" +
                         std::to_string(t));
  }
  const auto it = std::lower_bound(
      s.begin(), s.end(), t,
      [](const NavSample& a, double tt) { return a.t < tt; });
  const auto idx = static_cast<std::size_t>(
      std::min<std::ptrdiff_t>(it - s.begin(),
                               static_cast<std::ptrdiff_t>(s.size()) - 1));
  if (std::abs(s[idx].t - t) <= slack) return s[idx];
  if (idx > 0 && std::abs(s[idx - 1].t - t) <= slack) return s[idx - 1];
  // Strictly between idx-1 and idx now; the range check above guarantees
  // idx > 0 here.
  const NavSample& a = s[idx - 1];
  const NavSample& b = s[idx];
  const double alpha = (t - a.t) / (b.t - a.t);
  NavSample out;
  out.t = t;
  const Eigen::Quaterniond qa(a.rotation);
  const Eigen::Quaterniond qb(b.rotation);
  out.rotation = qa.slerp(alpha, qb).toRotationMatrix();
  out.velocity = (1.0 - alpha) * a.velocity + alpha * b.velocity;
  out.position = (1.0 - alpha) * a.position + alpha * b.position;
  return out;
}

inline NavSeries resample_nav(const NavSeries& s,
                              const std::vector<double>& times,
                              const std::string& origin) {
  NavSeries out;
  out.reserve(times.size());
  for (double t : times) out.push_back(interpolate_nav(s, t, origin));
  return out;
}

// Runs the configured filters over a parsed log, scoring against the
// reference trajectory, and packs the outcome as a single-trial summary so
// the usual bundle writer applies.
inline McSummary run_replay(const SensorLog& log, const NavSeries& reference,
                            const std::vector<FilterSpec>& filters,
                            const TrialSetup& setup, double window_s,
                            const std::string& reference_origin) {
  if (log.imu.empty()) {
    throw ParseError(reference_origin, 0, "sensor log has no samples");
  }
  const NavSample init =
      interpolate_nav(reference, log.imu.front().t, reference_origin);
  const TrialResult result = run_trial(log, init, filters, setup);

  McSummary sum;
  sum.requested_trials = 1;
  sum.representative_trial = 0;
  sum.ik_failures = log.ik_failures;
  for (const auto& f : filters) sum.filter_names.push_back(f.name);
  sum.representative_estimates = result.estimates;

  const NavSeries& first = result.estimates.at(filters.front().name);
  std::vector<double> times;
  times.reserve(first.size());
  for (const auto& s : first) times.push_back(s.t);
  sum.t = times;
  const NavSeries ref = resample_nav(reference, times, reference_origin);
  const double duration = times.back() - times.front();
  sum.window_used = std::min(window_s, 0.5 * duration);

  for (const auto& f : filters) {
    const NavSeries& est = result.estimates.at(f.name);
    const ErrorSeries e = error_series(est, ref);
    sum.pos_err[f.name].push_back(e.position);
    sum.vel_err[f.name].push_back(e.velocity);
    sum.ori_err[f.name].push_back(e.orientation);
    sum.rmse_pos[f.name] = e.position.cwiseAbs();
    sum.rmse_vel[f.name] = e.velocity.cwiseAbs();
    sum.rmse_ori[f.name] = e.orientation.cwiseAbs();
    const MetricReport report = compute_metrics(est, ref, sum.window_used);
    sum.per_trial_metrics[f.name].push_back(report);
    sum.mean_metrics[f.name] = report;
    sum.update_times[f.name] = result.update_times.at(f.name);
    if (setup.record_cost) {
      const auto it = result.mean_cost.find(f.name);
      if (it != result.mean_cost.end()) {
        sum.per_trial_mean_cost[f.name].push_back(it->second);
      }
    }
  }
  return sum;
}

}  // namespace nanol
