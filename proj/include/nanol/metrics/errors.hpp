#pragma once
// Trajectory error metrics: per-step error series, RMSE aggregation across
// Monte-Carlo trials, absolute trajectory error and windowed relative error.
// No alignment step anywhere: filters in this toolkit are initialized from
// the true state, so aligning would only hide early divergence.

#include <cmath>
#include <cstddef>
#include <vector>

#include "nanol/error.hpp"
#include "nanol/lie/sem3.hpp"
#include "nanol/trajectory.hpp"

namespace nanol {

struct ErrorSeries {
  VecX position;     // m
  VecX velocity;     // m/s
  VecX orientation;  // rad
};

struct MetricReport {
  double ate_pos = 0.0;
  double ate_vel = 0.0;
  double ate_ori = 0.0;
  double re_pos = 0.0;
  double re_vel = 0.0;
  double re_ori = 0.0;
};

inline void check_same_length(std::size_t a, std::size_t b,
                              const char* what) {
  if (a != b) {
    throw LengthMismatchError(std::string(what) + ": " + std::to_string(a) +
                              " vs " + std::to_string(b));
  }
}

inline ErrorSeries error_series(const NavSeries& est, const NavSeries& gt) {
  check_same_length(est.size(), gt.size(), "error_series");
  const auto n = static_cast<Eigen::Index>(est.size());
  ErrorSeries out{VecX(n), VecX(n), VecX(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& e = est[static_cast<std::size_t>(k)];
    const auto& g = gt[static_cast<std::size_t>(k)];
    out.position[k] = (e.position - g.position).norm();
    out.velocity[k] = (e.velocity - g.velocity).norm();
    out.orientation[k] = so3_log(g.rotation.transpose() * e.rotation).norm();
  }
  return out;
}

inline double rms(const VecX& v) {
  if (v.size() == 0) return 0.0;
  return std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
}

// Per-step root mean square across trials. A single trial degenerates to the
// pointwise absolute error.
inline VecX rmse_over_trials(const std::vector<VecX>& trials) {
  if (trials.empty()) return VecX();
  const Eigen::Index n = trials.front().size();
  VecX acc = VecX::Zero(n);
  for (const auto& t : trials) {
    check_same_length(static_cast<std::size_t>(t.size()),
                      static_cast<std::size_t>(n), "rmse_over_trials");
    acc += t.cwiseAbs2();
  }
  return (acc / static_cast<double>(trials.size())).cwiseSqrt();
}

// Absolute trajectory error: RMS of each channel over the whole horizon.
inline MetricReport ate(const NavSeries& est, const NavSeries& gt) {
  const ErrorSeries e = error_series(est, gt);
  MetricReport r;
  r.ate_pos = rms(e.position);
  r.ate_vel = rms(e.velocity);
  r.ate_ori = rms(e.orientation);
  return r;
}

// Relative error over sliding windows with stride one sample. For each start
// k the drift is the mismatch between the relative motion of the estimate and
// of the ground truth across the window, expressed in SE_2(3) so position,
// velocity and orientation drift all fall out of one composition. A constant
// rigid offset cancels exactly; a linear drift of r m/s scores r*window.
inline MetricReport relative_error(const NavSeries& est, const NavSeries& gt,
                                   double window_s) {
  check_same_length(est.size(), gt.size(), "relative_error");
  if (est.size() < 2) {
    throw WindowTooLongError("relative_error needs at least two samples");
  }
  const double dt = gt[1].t - gt[0].t;
  const auto steps = static_cast<std::size_t>(std::lround(window_s / dt));
  if (steps == 0 || steps >= est.size()) {
    throw WindowTooLongError(
        "window of " + std::to_string(window_s) + " s is " +
        std::to_string(steps) + " steps; series has " +
        std::to_string(est.size()) + " samples");
  }
  const std::size_t starts = est.size() - steps;
  VecX pos(starts), vel(starts), ori(starts);
  for (std::size_t k = 0; k < starts; ++k) {
    const SEm3 rel_est = nav_group_element(est[k]).inverse() *
                         nav_group_element(est[k + steps]);
    const SEm3 rel_gt = nav_group_element(gt[k]).inverse() *
                        nav_group_element(gt[k + steps]);
    const SEm3 drift = rel_gt.inverse() * rel_est;
    const auto i = static_cast<Eigen::Index>(k);
    vel[i] = drift.translation(0).norm();
    pos[i] = drift.translation(1).norm();
    ori[i] = so3_log(drift.rotation()).norm();
  }
  MetricReport r;
  r.re_pos = rms(pos);
  r.re_vel = rms(vel);
  r.re_ori = rms(ori);
  return r;
}

inline MetricReport compute_metrics(const NavSeries& est, const NavSeries& gt,
                                    double window_s) {
  MetricReport r = ate(est, gt);
  const MetricReport re = relative_error(est, gt, window_s);
  r.re_pos = re.re_pos;
  r.re_vel = re.re_vel;
  r.re_ori = re.re_ori;
  return r;
}

}  // namespace nanol
