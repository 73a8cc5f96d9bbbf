#pragma once
// Synthetic legged data: a trot contact schedule, world-fixed footholds while
// a leg bears load, and joint angles produced by numerically inverting the
// forward kinematics on the body-frame foot position. This is a desk-scale
// stand-in for recorded robot data, not a locomotion simulation: the body
// follows the same trajectory profile as the landmark system and the feet
// are bookkept around it.

#include <cmath>
#include <cstdint>
#include <random>

#include "nanol/models/kinematics.hpp"
#include "nanol/sim/sensors.hpp"

namespace nanol {

// Bent stance configuration used at every touchdown. Keeping the knee well
// off the straight-leg singularity leaves roughly 0.13 m of radial reach for
// the body to move over the foot during a stance phase.
inline const Vec3 kNominalStance(0.0, 0.8, -1.6);

// Newton inversion of forward_kinematics. Throws when the target is out of
// reach or the Jacobian degenerates; callers in the synthesizer catch and
// count instead of aborting.
inline Vec3 leg_ik(const Vec3& target, const LegGeometry& geom,
                   const Vec3& seed) {
  Vec3 theta = seed;
  for (int iter = 0; iter < 50; ++iter) {
    const Vec3 residual = forward_kinematics(theta, geom) - target;
    if (residual.norm() < 1e-12) return theta;
    const Mat3 j = fk_jacobian(theta, geom);
    if (std::abs(j.determinant()) < 1e-12) {
      throw IkFailureError("singular leg Jacobian");
    }
    theta -= j.partialPivLu().solve(residual);
  }
  throw IkFailureError("leg inverse kinematics did not converge");
}

// Trot pairing: FL (0) and RR (3) share a phase, FR (1) and RL (2) take the
// other half of the period. 50% duty square wave.
inline bool trot_in_contact(int leg, double t, double gait_period) {
  const bool pair_a = (leg == 0 || leg == 3);
  const double phase = t - gait_period * std::floor(t / gait_period);
  const bool first_half = phase < 0.5 * gait_period;
  return pair_a == first_half;
}

inline SensorLog synthesize_legged(const GroundTruth& gt,
                                   const LegGeometry& base_geom,
                                   double gait_period,
                                   const NoiseConfig& noise,
                                   std::uint64_t seed) {
  if (gait_period <= 0.0) {
    throw ConfigError("gait_period", "must be positive");
  }
  SensorLog log;
  detail::fill_imu(gt, noise, seed, &log);
  std::mt19937_64 joint_rng(seed + kJointSeedOffset);
  const auto rig = make_leg_rig(base_geom);

  std::array<Vec3, 4> foothold;
  std::array<Vec3, 4> theta_prev;
  std::array<bool, 4> was_contact{false, false, false, false};
  for (std::size_t k = 0; k < log.steps(); ++k) {
    // Flags describe the interval [k, k+1); observations are taken at its
    // end, where the filter sits after the matching propagation.
    const double t_interval = static_cast<double>(k) * gt.dt;
    const NavSample& truth = gt.states[k + 1];
    for (int leg = 0; leg < 4; ++leg) {
      const bool contact = trot_in_contact(leg, t_interval, gait_period);
      log.contacts[k][leg] = contact;
      if (!contact) {
        was_contact[leg] = false;
        continue;
      }
      if (!was_contact[leg]) {
        // Touchdown: plant the foot where the nominal stance pose puts it.
        foothold[leg] = truth.position +
                        truth.rotation * forward_kinematics(kNominalStance,
                                                            rig[leg]);
        theta_prev[leg] = kNominalStance;
        was_contact[leg] = true;
      }
      const Vec3 target =
          truth.rotation.transpose() * (foothold[leg] - truth.position);
      Vec3 theta;
      try {
        theta = leg_ik(target, rig[leg], theta_prev[leg]);
      } catch (const IkFailureError&) {
        ++log.ik_failures;
        continue;
      }
      theta_prev[leg] = theta;
      log.leg_obs[k].push_back(
          {leg, detail::add_noise(theta, noise.sigma_encoder, joint_rng)});
    }
  }
  return log;
}

}  // namespace nanol
