#pragma once

#include <functional>
#include <vector>

#include "nanol/models/state.hpp"

namespace nanol {

struct ImuSample {
  double t = 0.0;
  Vec3 omega = Vec3::Zero();  // body angular rate, rad/s
  Vec3 accel = Vec3::Zero();  // body specific force, m/s^2
};

// Noise densities shared by synthesis and the filters.
struct NoiseConfig {
  double sigma_accel = 0.2568;    // m/s^2
  double sigma_gyro = 0.00139;    // rad/s
  double sigma_encoder = 0.3;     // rad
  double sigma_slip = 0.001;      // m/s

  void validate() const {
    if (sigma_accel <= 0.0 || sigma_gyro <= 0.0 || sigma_encoder <= 0.0 ||
        sigma_slip <= 0.0) {
      throw ConfigError("noise", "all noise densities must be positive");
    }
  }
};

// One forward-Euler step of the noise-free IMU dynamics:
//   R <- R Exp(omega dt),  v <- v + (R a + g) dt,  p <- p + v dt
// with p advanced using the pre-update velocity; contact columns are frozen.
inline SEm3 imu_mean_propagate(const SEm3& x, const ImuSample& u, double dt,
                               const StateLayout& layout) {
  SEm3 out = x;
  const Vec3 v = x.translation(layout.velocity_col());
  out.set_translation(layout.position_col(),
                      x.translation(layout.position_col()) + v * dt);
  out.set_translation(layout.velocity_col(),
                      v + (x.rotation() * u.accel + layout.gravity) * dt);
  out.rotation() = x.rotation() * so3_exp(u.omega * dt);
  return out;
}

// The vector field of the deterministic dynamics as a matrix in the
// homogeneous embedding: dX/dt = f_u(X).
inline MatX imu_dynamics_matrix(const SEm3& x, const ImuSample& u,
                                const StateLayout& layout) {
  const int n = 3 + layout.cols();
  MatX f = MatX::Zero(n, n);
  f.topLeftCorner<3, 3>() = x.rotation() * so3_hat(u.omega);
  f.block<3, 1>(0, 3 + layout.velocity_col()) =
      x.rotation() * u.accel + layout.gravity;
  f.block<3, 1>(0, 3 + layout.position_col()) =
      x.translation(layout.velocity_col());
  return f;
}

// Continuous-time process noise over the tangent blocks: gyro on rotation,
// accel on velocity, nothing on position, slip on contact columns that are
// currently load-bearing.
inline MatX assemble_process_noise(const NoiseConfig& cfg,
                                   const StateLayout& layout,
                                   const std::vector<bool>& contact_mask) {
  const int d = layout.dim();
  MatX q = MatX::Zero(d, d);
  q.block<3, 3>(layout.rot_block(), layout.rot_block()) =
      cfg.sigma_gyro * cfg.sigma_gyro * Mat3::Identity();
  q.block<3, 3>(layout.vel_block(), layout.vel_block()) =
      cfg.sigma_accel * cfg.sigma_accel * Mat3::Identity();
  for (int i = 0; i < layout.contacts; ++i) {
    if (i < static_cast<int>(contact_mask.size()) && contact_mask[i]) {
      q.block<3, 3>(layout.contact_block(i), layout.contact_block(i)) =
          cfg.sigma_slip * cfg.sigma_slip * Mat3::Identity();
    }
  }
  return q;
}

// Frobenius norm of the group-affine defect
//   f(X1 X2) - f(X1) X2 - X1 f(X2) + X1 f(I) X2
// for an arbitrary matrix-valued vector field; zero iff f is group-affine.
inline double group_affine_defect(
    const std::function<MatX(const SEm3&)>& f, const SEm3& x1,
    const SEm3& x2) {
  const MatX m1 = x1.matrix();
  const MatX m2 = x2.matrix();
  const MatX defect = f(x1 * x2) - f(x1) * m2 - m1 * f(x2) +
                      m1 * f(SEm3::Identity(x1.cols())) * m2;
  return defect.norm();
}

inline double group_affine_residual(const SEm3& x1, const SEm3& x2,
                                    const ImuSample& u,
                                    const StateLayout& layout) {
  return group_affine_defect(
      [&](const SEm3& x) { return imu_dynamics_matrix(x, u, layout); }, x1,
      x2);
}

}  // namespace nanol
