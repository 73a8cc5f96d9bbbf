#pragma once
// Trial runner and Monte-Carlo campaign driver. A trial feeds one sensor log
// through every configured filter; a campaign repeats that over freshly
// sampled noise with per-trial seeds and aggregates error curves and metrics.
// Trials may run on several threads, but every per-trial artifact is stored
// by trial index and reduced in index order, so the output is identical for
// any schedule.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "nanol/filter/inekf.hpp"
#include "nanol/filter/nano.hpp"
#include "nanol/metrics/errors.hpp"
#include "nanol/sim/legged.hpp"
#include "nanol/sim/sensors.hpp"

namespace nanol {

struct FilterSpec {
  std::string name = "nano";
  bool use_nano = true;
  NanoConfig nano;
};

struct TrialSetup {
  StateLayout layout = StateLayout::landmark();
  NoiseConfig noise;
  double sigma_cam = 0.1;  // m, landmark observation noise
  LegGeometry base_geom;
  double p0_nav = 1e-6;      // initial variance, navigation blocks
  double p0_contact = 1.0;   // initial variance, contact blocks
  bool record_cost = false;  // accumulate the variational objective per update
};

struct TrialResult {
  std::map<std::string, NavSeries> estimates;
  std::map<std::string, std::vector<double>> update_times;  // s, per update
  std::map<std::string, double> mean_cost;
};

inline FilterState make_initial_state(const NavSample& truth,
                                      const TrialSetup& setup) {
  const StateLayout& layout = setup.layout;
  Eigen::Matrix3Xd cols(3, layout.cols());
  cols.col(layout.velocity_col()) = truth.velocity;
  cols.col(layout.position_col()) = truth.position;
  // Contact columns start at the body position; they are replaced at the
  // first touchdown and carry a wide prior until then.
  for (int i = 0; i < layout.contacts; ++i) {
    cols.col(layout.contact_col(i)) = truth.position;
  }
  FilterState fs{SEm3(truth.rotation, cols), MatX::Zero(layout.dim(), layout.dim()),
                 layout};
  fs.cov.topLeftCorner(9, 9) = setup.p0_nav * MatX::Identity(9, 9);
  for (int i = 0; i < layout.contacts; ++i) {
    fs.cov.block<3, 3>(layout.contact_block(i), layout.contact_block(i)) =
        setup.p0_contact * Mat3::Identity();
  }
  return fs;
}

// Touchdown bookkeeping: the contact column is re-seated at the foot position
// implied by the first stance joint reading, and its covariance is rebuilt
// from the position block plus the encoder noise pushed through the leg
// Jacobian (the increment of the new column is the position increment plus
// fk noise).
inline void reinit_contact(FilterState* fs, int leg, const Vec3& theta,
                           const LegGeometry& geom, double sigma_encoder) {
  const StateLayout& layout = fs->layout;
  const Vec3 p = fs->mean.translation(layout.position_col());
  fs->mean.set_translation(layout.contact_col(leg),
                           p + fs->mean.rotation() *
                                   forward_kinematics(theta, geom));
  const int d = layout.dim();
  const int cb = layout.contact_block(leg);
  MatX m = MatX::Identity(d, d);
  m.block<3, 3>(cb, cb).setZero();
  m.block<3, 3>(cb, layout.pos_block()) = Mat3::Identity();
  MatX cov = m * fs->cov * m.transpose();
  const Mat3 j = fk_jacobian(theta, geom);
  cov.block<3, 3>(cb, cb) += sigma_encoder * sigma_encoder * j * j.transpose();
  fs->cov = symmetrize(cov);
}

inline TrialResult run_trial(const SensorLog& log, const NavSample& init,
                             const std::vector<FilterSpec>& specs,
                             const TrialSetup& setup) {
  using clock = std::chrono::steady_clock;
  const StateLayout& layout = setup.layout;
  const auto rig = make_leg_rig(setup.base_geom);
  TrialResult out;

  for (const auto& spec : specs) {
    FilterState fs = make_initial_state(init, setup);
    NavSeries est;
    est.push_back(nav_sample_from(init.t, fs.mean));
    std::vector<double>& times = out.update_times[spec.name];
    double cost_sum = 0.0;
    std::size_t cost_count = 0;
    // A leg whose touchdown reading was dropped by the synthesizer stays
    // pending until its first usable stance sample arrives.
    std::vector<bool> pending(static_cast<std::size_t>(layout.contacts),
                              layout.contacts > 0);

    for (std::size_t k = 0; k < log.steps(); ++k) {
      std::vector<bool> mask(static_cast<std::size_t>(layout.contacts));
      for (int i = 0; i < layout.contacts; ++i) mask[i] = log.contacts[k][i];
      const MatX q = assemble_process_noise(setup.noise, layout, mask);
      // Substep the mean exactly like the ground-truth generator so a
      // noiseless log replays without integration mismatch.
      fs = predict(fs, log.imu[k], log.dt, q, kGroundTruthSubsteps);

      for (int i = 0; i < layout.contacts; ++i) {
        const bool rising =
            log.contacts[k][i] && (k == 0 || !log.contacts[k - 1][i]);
        if (rising) pending[i] = true;
      }

      auto run_update = [&](const InvariantMeasurement& meas) {
        const auto t0 = clock::now();
        if (spec.use_nano) {
          const IncrementBelief prior{VecX::Zero(layout.dim()), fs.cov};
          const auto res =
              nano_increment_update(prior, fs.mean, meas, layout, spec.nano);
          const FilterState pre = fs;
          fs = lift_increment(fs, res.posterior);
          times.push_back(
              std::chrono::duration<double>(clock::now() - t0).count());
          if (setup.record_cost) {
            cost_sum += cost_J(res.posterior, prior, pre.mean, meas,
                               spec.nano.cubature_scale);
            ++cost_count;
          }
        } else {
          fs = inekf_update(fs, meas);
          times.push_back(
              std::chrono::duration<double>(clock::now() - t0).count());
        }
      };

      for (const auto& obs : log.landmark_obs[k]) {
        run_update(make_landmark_measurement(
            obs.y, log.landmarks[static_cast<std::size_t>(obs.landmark)],
            setup.sigma_cam, layout));
      }
      for (const auto& obs : log.leg_obs[k]) {
        if (obs.leg >= layout.contacts || !log.contacts[k][obs.leg]) continue;
        if (pending[static_cast<std::size_t>(obs.leg)]) {
          reinit_contact(&fs, obs.leg, obs.theta,
                         rig[static_cast<std::size_t>(obs.leg)],
                         setup.noise.sigma_encoder);
          pending[static_cast<std::size_t>(obs.leg)] = false;
          continue;  // the reading seeded the column; do not reuse it
        }
        run_update(make_leg_measurement(obs.theta, setup.noise,
                                        rig[static_cast<std::size_t>(obs.leg)],
                                        layout, obs.leg));
      }
      est.push_back(nav_sample_from(init.t + (k + 1) * log.dt, fs.mean));
    }
    out.estimates[spec.name] = std::move(est);
    if (setup.record_cost && cost_count > 0) {
      out.mean_cost[spec.name] = cost_sum / static_cast<double>(cost_count);
    }
  }
  return out;
}

struct CampaignConfig {
  int n_trials = 100;
  TrajectoryProfile profile;
  std::vector<Vec3> landmarks = {Vec3(0.0, 2.0, 2.0), Vec3(-2.0, -2.0, -2.0),
                                 Vec3(2.0, -2.0, -2.0)};
  TrialSetup setup;
  double gait_period = 0.4;  // s, used when the layout has contact columns
  std::vector<FilterSpec> filters = {FilterSpec{"nano", true, NanoConfig{}},
                                     FilterSpec{"inekf", false, NanoConfig{}}};
  std::uint64_t base_seed = 42;
  int threads = 1;
  double window_s = 3.0;
};

struct McSummary {
  std::vector<double> t;
  std::vector<std::string> filter_names;
  std::map<std::string, std::vector<VecX>> pos_err, vel_err, ori_err;
  std::map<std::string, VecX> rmse_pos, rmse_vel, rmse_ori;
  std::map<std::string, std::vector<MetricReport>> per_trial_metrics;
  std::map<std::string, MetricReport> mean_metrics;
  std::map<std::string, std::vector<double>> update_times;
  std::map<std::string, std::vector<double>> per_trial_mean_cost;
  // Estimates of the first successful trial, kept so result bundles can ship
  // one concrete trajectory per filter alongside the aggregates.
  std::map<std::string, NavSeries> representative_estimates;
  int representative_trial = -1;
  double window_used = 0.0;
  int requested_trials = 0;
  std::vector<int> failed_trials;
  std::vector<std::string> failure_messages;
  int ik_failures = 0;
};

inline MetricReport mean_report(const std::vector<MetricReport>& rs) {
  MetricReport m;
  if (rs.empty()) return m;
  for (const auto& r : rs) {
    m.ate_pos += r.ate_pos;
    m.ate_vel += r.ate_vel;
    m.ate_ori += r.ate_ori;
    m.re_pos += r.re_pos;
    m.re_vel += r.re_vel;
    m.re_ori += r.re_ori;
  }
  const double n = static_cast<double>(rs.size());
  m.ate_pos /= n;
  m.ate_vel /= n;
  m.ate_ori /= n;
  m.re_pos /= n;
  m.re_vel /= n;
  m.re_ori /= n;
  return m;
}

inline McSummary run_monte_carlo(const CampaignConfig& cfg) {
  if (cfg.n_trials < 1) {
    throw ConfigError("n_trials", "need at least one trial");
  }
  const GroundTruth gt = generate_ground_truth(cfg.profile);
  const bool legged = cfg.setup.layout.contacts > 0;

  struct Outcome {
    bool failed = false;
    std::string error;
    TrialResult result;
    int ik_failures = 0;
  };
  const auto n = static_cast<std::size_t>(cfg.n_trials);
  std::vector<std::optional<Outcome>> slots(n);

  auto do_trial = [&](std::size_t i) {
    Outcome o;
    try {
      const std::uint64_t seed = cfg.base_seed + i;
      const SensorLog log =
          legged ? synthesize_legged(gt, cfg.setup.base_geom, cfg.gait_period,
                                     cfg.setup.noise, seed)
                 : synthesize_sensors(gt, cfg.landmarks, cfg.setup.noise,
                                      cfg.setup.sigma_cam, seed);
      o.ik_failures = log.ik_failures;
      o.result = run_trial(log, gt.states.front(), cfg.filters, cfg.setup);
    } catch (const Error& e) {
      o.failed = true;
      o.error = "trial " + std::to_string(i) + ": " + e.what();
    }
    slots[i] = std::move(o);
  };

  const int workers =
      std::max(1, std::min(cfg.threads, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) do_trial(i);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < n; i = next++) do_trial(i);
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers - 1; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
  }

  McSummary sum;
  sum.requested_trials = cfg.n_trials;
  for (const auto& s : gt.states) sum.t.push_back(s.t);
  for (const auto& f : cfg.filters) sum.filter_names.push_back(f.name);
  // The requested window may not fit a short run; shrink it rather than fail
  // a smoke campaign, and report what was used.
  const double duration = gt.states.back().t - gt.states.front().t;
  sum.window_used = std::min(cfg.window_s, 0.5 * duration);

  for (std::size_t i = 0; i < n; ++i) {
    const Outcome& o = *slots[i];
    if (o.failed) {
      sum.failed_trials.push_back(static_cast<int>(i));
      sum.failure_messages.push_back(o.error);
      continue;
    }
    sum.ik_failures += o.ik_failures;
    if (sum.representative_trial < 0) {
      sum.representative_trial = static_cast<int>(i);
      sum.representative_estimates = o.result.estimates;
    }
    for (const auto& f : cfg.filters) {
      const NavSeries& est = o.result.estimates.at(f.name);
      const ErrorSeries e = error_series(est, gt.states);
      sum.pos_err[f.name].push_back(e.position);
      sum.vel_err[f.name].push_back(e.velocity);
      sum.ori_err[f.name].push_back(e.orientation);
      sum.per_trial_metrics[f.name].push_back(
          compute_metrics(est, gt.states, sum.window_used));
      const auto& times = o.result.update_times.at(f.name);
      auto& pool = sum.update_times[f.name];
      pool.insert(pool.end(), times.begin(), times.end());
      if (cfg.setup.record_cost) {
        const auto it = o.result.mean_cost.find(f.name);
        if (it != o.result.mean_cost.end()) {
          sum.per_trial_mean_cost[f.name].push_back(it->second);
        }
      }
    }
  }
  for (const auto& f : cfg.filters) {
    if (sum.pos_err[f.name].empty()) continue;
    sum.rmse_pos[f.name] = rmse_over_trials(sum.pos_err[f.name]);
    sum.rmse_vel[f.name] = rmse_over_trials(sum.vel_err[f.name]);
    sum.rmse_ori[f.name] = rmse_over_trials(sum.ori_err[f.name]);
    sum.mean_metrics[f.name] = mean_report(sum.per_trial_metrics[f.name]);
  }
  return sum;
}

}  // namespace nanol
