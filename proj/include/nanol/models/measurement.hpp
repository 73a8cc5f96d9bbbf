#pragma once

#include "nanol/models/kinematics.hpp"
#include "nanol/models/imu.hpp"
#include "nanol/models/state.hpp"

namespace nanol {

// Invariant observation y = X^{-1} b + noise. The trailing entries of b pick
// out which group columns participate; only the first three rows of the
// product carry information, so the filters work with that reduced 3-vector
// and a 3x3 noise block.
struct InvariantMeasurement {
  Vec3 y_reduced = Vec3::Zero();
  VecX b;                          // length 3 + m
  Mat3 gamma_reduced = Mat3::Identity();
  int contact_index = -1;          // legged only, for bookkeeping
};

inline void check_gamma(const Mat3& gamma) {
  Eigen::SelfAdjointEigenSolver<Mat3> eig(gamma);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (lo <= 0.0 || hi / lo > 1e12) {
    throw SingularGammaError(
        "measurement covariance is singular or near-singular");
  }
}

// h(X) = [X^{-1} b]_{1..3}.
inline Vec3 reduced_observation(const SEm3& x, const VecX& b) {
  return x.inverse().apply(b).head<3>();
}

// [Exp(-xi) X^{-1} b]_{1..3}, the observation seen through a right
// increment of the state.
inline Vec3 perturbed_observation(const SEm3& x, const VecX& b,
                                  const VecX& xi) {
  return sem3_exp(-xi).apply(x.inverse().apply(b)).head<3>();
}

// The measurement matrix of the invariant model, shaped d x 3 so that
//   d/dxi [Exp(-xi) X^{-1} b]_red  at xi = 0  ==  -star^T.
// With r = [X^{-1} b]_red and beta the trailing entries of b, the transpose
// is [-r^; beta_1 I; ...; beta_m I] column-stacked; star is constant in xi,
// which is what makes the covariance update closed-form.
inline MatX star_operator(const SEm3& x, const VecX& b,
                          const StateLayout& layout) {
  const int d = layout.dim();
  const int m = layout.cols();
  const Vec3 r = reduced_observation(x, b);
  MatX star = MatX::Zero(d, 3);
  star.topRows<3>() = (-so3_hat(r)).transpose();
  for (int i = 0; i < m; ++i) {
    star.block<3, 3>(3 + 3 * i, 0) = b[3 + i] * Mat3::Identity();
  }
  return star;
}

// Leg odometry: the noisy joint angles measure the foot relative to the
// body, which in invariant form is b with +1 on the position column and -1
// on the leg's contact column.
inline InvariantMeasurement make_leg_measurement(const Vec3& theta,
                                                 const NoiseConfig& cfg,
                                                 const LegGeometry& geom,
                                                 const StateLayout& layout,
                                                 int contact_index) {
  InvariantMeasurement meas;
  meas.y_reduced = forward_kinematics(theta, geom);
  meas.b = VecX::Zero(3 + layout.cols());
  meas.b[3 + layout.position_col()] = 1.0;
  meas.b[3 + layout.contact_col(contact_index)] = -1.0;
  const Mat3 j = fk_jacobian(theta, geom);
  meas.gamma_reduced =
      cfg.sigma_encoder * cfg.sigma_encoder * j * j.transpose();
  meas.contact_index = contact_index;
  check_gamma(meas.gamma_reduced);
  return meas;
}

// Known landmark observed in the body frame.
inline InvariantMeasurement make_landmark_measurement(
    const Vec3& observation, const Vec3& landmark, double sigma_cam,
    const StateLayout& layout) {
  InvariantMeasurement meas;
  meas.y_reduced = observation;
  meas.b = VecX::Zero(3 + layout.cols());
  meas.b.head<3>() = landmark;
  meas.b[3 + layout.position_col()] = 1.0;
  meas.gamma_reduced = sigma_cam * sigma_cam * Mat3::Identity();
  check_gamma(meas.gamma_reduced);
  return meas;
}

}  // namespace nanol
