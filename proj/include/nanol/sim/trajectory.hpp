#pragma once
// Ground-truth trajectory generation. Body rates and world-frame acceleration
// are sums of per-axis sinusoids with seeded random phases; the state
// integrates the noise-free IMU dynamics with substepping. Inputs are held
// constant across each sample interval (zero-order hold, evaluated at the
// interval start), so re-integrating the emitted inputs reproduces the stored
// states exactly rather than to within a truncation error.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "nanol/error.hpp"
#include "nanol/models/imu.hpp"
#include "nanol/trajectory.hpp"

namespace nanol {

inline constexpr int kGroundTruthSubsteps = 10;

struct TrajectoryProfile {
  double duration = 30.0;  // s
  double rate = 100.0;     // Hz
  Vec3 omega_amp = Vec3(0.5, 0.5, 0.5);     // rad/s
  Vec3 omega_freq = Vec3(0.2, 0.3, 0.1);    // Hz
  Vec3 accel_amp = Vec3(0.5, 0.5, 0.5);     // m/s^2 (world frame)
  Vec3 accel_freq = Vec3(0.15, 0.25, 0.2);  // Hz
  std::uint64_t seed = 1;

  void validate() const {
    if (duration <= 0.0 || rate <= 0.0) {
      throw ConfigError("trajectory", "duration and rate must be positive");
    }
  }
};

struct GroundTruth {
  double dt = 0.01;
  NavSeries states;               // N+1 samples, states[k] at t = k*dt
  std::vector<ImuSample> inputs;  // N noise-free inputs, inputs[k] spans
                                  // [k*dt, (k+1)*dt)
};

// Advances one sample interval with the same substepping the generator uses.
// Shared so that replay and the self-consistency check cannot drift from the
// generator by using a different integrator.
inline SEm3 integrate_interval(const SEm3& x, const ImuSample& u, double dt,
                               const StateLayout& layout) {
  SEm3 out = x;
  const double h = dt / kGroundTruthSubsteps;
  for (int j = 0; j < kGroundTruthSubsteps; ++j) {
    out = imu_mean_propagate(out, u, h, layout);
  }
  return out;
}

inline GroundTruth generate_ground_truth(const TrajectoryProfile& profile) {
  profile.validate();
  const auto n = static_cast<int>(std::lround(profile.duration * profile.rate));
  GroundTruth gt;
  gt.dt = 1.0 / profile.rate;
  gt.states.reserve(static_cast<std::size_t>(n) + 1);
  gt.inputs.reserve(static_cast<std::size_t>(n));

  std::mt19937_64 rng(profile.seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  Vec3 omega_phase, accel_phase;
  for (int i = 0; i < 3; ++i) omega_phase[i] = phase(rng);
  for (int i = 0; i < 3; ++i) accel_phase[i] = phase(rng);

  const StateLayout nav = StateLayout::landmark();
  SEm3 x = SEm3::Identity(nav.cols());
  // Start at the velocity that makes each axis's velocity zero-mean, so the
  // position oscillates near the origin instead of wandering off desk scale.
  Vec3 v0 = Vec3::Zero();
  for (int i = 0; i < 3; ++i) {
    if (profile.accel_freq[i] > 0.0) {
      v0[i] = -profile.accel_amp[i] /
              (2.0 * M_PI * profile.accel_freq[i]) * std::cos(accel_phase[i]);
    }
  }
  x.set_translation(nav.velocity_col(), v0);
  gt.states.push_back(nav_sample_from(0.0, x));
  for (int k = 0; k < n; ++k) {
    const double t = k * gt.dt;
    ImuSample u;
    u.t = t;
    Vec3 accel_world;
    for (int i = 0; i < 3; ++i) {
      u.omega[i] = profile.omega_amp[i] *
                   std::sin(2.0 * M_PI * profile.omega_freq[i] * t +
                            omega_phase[i]);
      accel_world[i] = profile.accel_amp[i] *
                       std::sin(2.0 * M_PI * profile.accel_freq[i] * t +
                                accel_phase[i]);
    }
    // What the IMU would read: specific force in the body frame.
    u.accel = x.rotation().transpose() * (accel_world - nav.gravity);
    gt.inputs.push_back(u);
    x = integrate_interval(x, u, gt.dt, nav);
    gt.states.push_back(nav_sample_from((k + 1) * gt.dt, x));
  }
  return gt;
}

}  // namespace nanol
