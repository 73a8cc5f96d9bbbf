#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "nanol/error.hpp"

namespace nanol {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Below this angle the trigonometric coefficient functions switch to their
// second-order Taylor expansions.
inline constexpr double kSmallAngle = 1e-7;

// so3_log refuses angles this close to the pi branch cut.
inline constexpr double kPiMargin = 1e-6;

inline Mat3 so3_hat(const Vec3& phi) {
  Mat3 m;
  m << 0.0, -phi.z(), phi.y(),
       phi.z(), 0.0, -phi.x(),
      -phi.y(), phi.x(), 0.0;
  return m;
}

inline Vec3 so3_vee(const Mat3& m) {
  return Vec3(m(2, 1), m(0, 2), m(1, 0));
}

// Rodrigues formula R = I + (sin t / t) phi^ + ((1 - cos t) / t^2) phi^ phi^.
// The cosine coefficient uses the half-angle form 2 sin^2(t/2) / t^2, which
// does not cancel for small t.
inline Mat3 so3_exp(const Vec3& phi) {
  const double t = phi.norm();
  double a, b;  // sin t / t and (1 - cos t) / t^2
  if (t < kSmallAngle) {
    const double t2 = t * t;
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
  } else {
    const double sh = std::sin(0.5 * t);
    a = std::sin(t) / t;
    b = 2.0 * sh * sh / (t * t);
  }
  const Mat3 hat = so3_hat(phi);
  return Mat3::Identity() + a * hat + b * hat * hat;
}

// Inverse of so3_exp with the angle normalized to [0, pi). The axis is not
// recoverable at exactly pi, so a margin around the cut is rejected. The
// angle comes from atan2 of the off-diagonal sine against the trace cosine,
// which stays well conditioned right up to the margin; reusing that sine for
// the axis avoids the precision cliff of the acos form.
inline Vec3 so3_log(const Mat3& r) {
  const Vec3 w = so3_vee(r - r.transpose());  // 2 sin(t) * axis
  const double s = 0.5 * w.norm();
  const double c = std::clamp((r.trace() - 1.0) * 0.5, -1.0, 1.0);
  const double t = std::atan2(s, c);
  if (t > M_PI - kPiMargin) {
    throw AngleNearPiError("so3_log: rotation angle within 1e-6 of pi");
  }
  if (t < kSmallAngle) {
    return 0.5 * (1.0 + t * t / 6.0) * w;
  }
  return t / (2.0 * s) * w;
}

// J_l = I + ((1 - cos t) / t^2) phi^ + ((t - sin t) / t^3) phi^ phi^.
inline Mat3 so3_left_jacobian(const Vec3& phi) {
  const double t = phi.norm();
  double b, c;
  if (t < kSmallAngle) {
    const double t2 = t * t;
    b = 0.5 - t2 / 24.0;
    c = 1.0 / 6.0 - t2 / 120.0;
  } else {
    const double sh = std::sin(0.5 * t);
    b = 2.0 * sh * sh / (t * t);
    c = (t - std::sin(t)) / (t * t * t);
  }
  const Mat3 hat = so3_hat(phi);
  return Mat3::Identity() + b * hat + c * hat * hat;
}

inline Mat3 so3_left_jacobian_inv(const Vec3& phi) {
  const double t = phi.norm();
  double d;  // 1/t^2 - (1 + cos t) / (2 t sin t)
  if (t < kSmallAngle) {
    d = 1.0 / 12.0 + t * t / 720.0;
  } else {
    d = 1.0 / (t * t) - (1.0 + std::cos(t)) / (2.0 * t * std::sin(t));
  }
  const Mat3 hat = so3_hat(phi);
  return Mat3::Identity() - 0.5 * hat + d * hat * hat;
}

inline Mat3 so3_right_jacobian(const Vec3& phi) {
  return so3_left_jacobian(-phi);
}

inline Mat3 so3_right_jacobian_inv(const Vec3& phi) {
  return so3_left_jacobian_inv(-phi);
}

}  // namespace nanol
