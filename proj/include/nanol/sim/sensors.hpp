#pragma once
// Synthetic sensor sampling for the landmark system: noisy IMU plus one
// body-frame observation of every landmark at each step. Noise streams are
// seeded per sensor family with fixed offsets so adding or removing one
// sensor never reshuffles another's draws.

#include <cstdint>
#include <random>
#include <vector>

#include "nanol/sim/sensor_log.hpp"
#include "nanol/sim/trajectory.hpp"

namespace nanol {

inline constexpr std::uint64_t kImuSeedOffset = 0x10001;
inline constexpr std::uint64_t kCamSeedOffset = 0x20003;
inline constexpr std::uint64_t kJointSeedOffset = 0x30005;

namespace detail {

// sigma == 0 must mean "exact", not "draw and add zero", so the noiseless
// oracles see bit-identical truth.
inline Vec3 add_noise(const Vec3& v, double sigma, std::mt19937_64& rng) {
  if (sigma == 0.0) return v;
  std::normal_distribution<double> n(0.0, sigma);
  Vec3 out;
  for (int i = 0; i < 3; ++i) out[i] = v[i] + n(rng);
  return out;
}

inline void fill_imu(const GroundTruth& gt, const NoiseConfig& noise,
                     std::uint64_t seed, SensorLog* log) {
  std::mt19937_64 rng(seed + kImuSeedOffset);
  log->dt = gt.dt;
  log->imu.reserve(gt.inputs.size());
  for (const auto& u : gt.inputs) {
    ImuSample s = u;
    s.omega = add_noise(u.omega, noise.sigma_gyro, rng);
    s.accel = add_noise(u.accel, noise.sigma_accel, rng);
    log->imu.push_back(s);
  }
  log->landmark_obs.resize(gt.inputs.size());
  log->leg_obs.resize(gt.inputs.size());
  log->contacts.resize(gt.inputs.size(), {false, false, false, false});
}

}  // namespace detail

inline SensorLog synthesize_sensors(const GroundTruth& gt,
                                    const std::vector<Vec3>& landmarks,
                                    const NoiseConfig& noise, double sigma_cam,
                                    std::uint64_t seed) {
  SensorLog log;
  detail::fill_imu(gt, noise, seed, &log);
  log.landmarks = landmarks;
  std::mt19937_64 cam_rng(seed + kCamSeedOffset);
  for (std::size_t k = 0; k < log.steps(); ++k) {
    const NavSample& truth = gt.states[k + 1];
    for (std::size_t i = 0; i < landmarks.size(); ++i) {
      const Vec3 exact =
          truth.rotation.transpose() * (landmarks[i] - truth.position);
      log.landmark_obs[k].push_back(
          {static_cast<int>(i), detail::add_noise(exact, sigma_cam, cam_rng)});
    }
  }
  return log;
}

}  // namespace nanol
