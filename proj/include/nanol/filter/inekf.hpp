#pragma once

#include "nanol/filter/nano.hpp"

namespace nanol {

// Invariant-EKF baseline. Shares predict() with the natural-gradient filter;
// the update is the plain Kalman step on the reduced invariant residual.
// H here is the measurement Jacobian in the h(xi) ~ h(0) + H^T xi
// convention, which for this model is the negated star operator.
inline FilterState inekf_update(const FilterState& fs,
                                const InvariantMeasurement& meas) {
  check_gamma(meas.gamma_reduced);
  const MatX h = -star_operator(fs.mean, meas.b, fs.layout);
  const Mat3 s = h.transpose() * fs.cov * h + meas.gamma_reduced;
  const MatX k = fs.cov * h * s.inverse();
  const Vec3 innovation =
      meas.y_reduced - reduced_observation(fs.mean, meas.b);
  const VecX xi = k * innovation;

  FilterState out = fs;
  out.mean = fs.mean * sem3_exp(xi);
  const int d = fs.layout.dim();
  out.cov = symmetrize((MatX::Identity(d, d) - k * h.transpose()) * fs.cov);
  return out;
}

}  // namespace nanol
