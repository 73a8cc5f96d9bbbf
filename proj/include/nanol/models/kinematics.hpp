#pragma once

#include <array>
#include <cmath>

#include "nanol/lie/so3.hpp"

namespace nanol {

// 3-DoF leg: hip roll, thigh pitch, calf pitch. The hip joint sits at
// [o_x, o_y, 0] in the body frame; `side` is +1 for left legs and -1 for
// right legs and flips the hip link direction.
struct LegGeometry {
  double l_hip = 0.0955;    // m
  double l_thigh = 0.213;
  double l_calf = 0.213;
  double o_x = 0.1934;
  double o_y = 0.0465;
  double side = 1.0;
};

// Body-frame foot position for joint angles phi = [hip, thigh, calf].
inline Vec3 forward_kinematics(const Vec3& phi, const LegGeometry& g) {
  const double lh = g.side * g.l_hip;
  const double s1 = std::sin(phi[0]), c1 = std::cos(phi[0]);
  const double s2 = std::sin(phi[1]), c2 = std::cos(phi[1]);
  const double s23 = std::sin(phi[1] + phi[2]);
  const double c23 = std::cos(phi[1] + phi[2]);
  return Vec3(g.o_x - g.l_thigh * s2 - g.l_calf * s23,
              g.o_y + lh * c1 + g.l_thigh * c2 * s1 + g.l_calf * s1 * c23,
              lh * s1 - g.l_thigh * c1 * c2 - g.l_calf * c1 * c23);
}

// d fk / d phi. Entry (0,0) is structurally zero: hip roll cannot move the
// foot along the body x axis.
inline Mat3 fk_jacobian(const Vec3& phi, const LegGeometry& g) {
  const double lh = g.side * g.l_hip;
  const double s1 = std::sin(phi[0]), c1 = std::cos(phi[0]);
  const double s2 = std::sin(phi[1]), c2 = std::cos(phi[1]);
  const double s23 = std::sin(phi[1] + phi[2]);
  const double c23 = std::cos(phi[1] + phi[2]);
  Mat3 j;
  j(0, 0) = 0.0;
  j(0, 1) = -g.l_calf * c23 - g.l_thigh * c2;
  j(0, 2) = -g.l_calf * c23;
  j(1, 0) = g.l_thigh * c1 * c2 - lh * s1 + g.l_calf * c1 * c23;
  j(1, 1) = -s1 * (g.l_calf * s23 + g.l_thigh * s2);
  j(1, 2) = -g.l_calf * s23 * s1;
  j(2, 0) = g.l_thigh * c2 * s1 + lh * c1 + g.l_calf * s1 * c23;
  j(2, 1) = c1 * (g.l_calf * s23 + g.l_thigh * s2);
  j(2, 2) = g.l_calf * s23 * c1;
  return j;
}

// Four-leg rig mirrored from one base geometry, ordered FL, FR, RL, RR to
// match the sensor log columns.
inline std::array<LegGeometry, 4> make_leg_rig(const LegGeometry& base) {
  std::array<LegGeometry, 4> rig;
  const double sx[4] = {1.0, 1.0, -1.0, -1.0};   // front/rear
  const double sy[4] = {1.0, -1.0, 1.0, -1.0};   // left/right
  for (int i = 0; i < 4; ++i) {
    rig[i] = base;
    rig[i].o_x = sx[i] * base.o_x;
    rig[i].o_y = sy[i] * base.o_y;
    rig[i].side = sy[i];
  }
  return rig;
}

}  // namespace nanol
