#pragma once

#include "nanol/lie/gaussian.hpp"

namespace nanol {

// Gaussian over the right-increment xi of the state, X = X_hat Exp(xi).
struct IncrementBelief {
  VecX xi_hat;
  MatX cov;
};

inline MatX symmetrize(const MatX& m) {
  return 0.5 * (m + m.transpose());
}

// Inverse of an SPD matrix through its (jittered) Cholesky factor.
inline MatX spd_inverse(const MatX& m) {
  const MatX l = cholesky_with_jitter(m);
  const MatX eye = MatX::Identity(m.rows(), m.cols());
  const MatX linv = l.triangularView<Eigen::Lower>().solve(eye);
  return linv.transpose() * linv;
}

inline double spd_log_det(const MatX& m) {
  const MatX l = cholesky_with_jitter(m);
  return 2.0 * l.diagonal().array().log().sum();
}

// KL(a || b) between Gaussians of equal dimension.
inline double kl_gaussian(const IncrementBelief& a, const IncrementBelief& b) {
  const int d = static_cast<int>(a.xi_hat.size());
  const MatX b_inv = spd_inverse(b.cov);
  const VecX dm = b.xi_hat - a.xi_hat;
  const double trace_term = (b_inv * a.cov).trace();
  const double quad_term = dm.dot(b_inv * dm);
  const double log_term = spd_log_det(b.cov) - spd_log_det(a.cov);
  return 0.5 * (trace_term + quad_term - d + log_term);
}

}  // namespace nanol
