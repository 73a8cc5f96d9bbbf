#pragma once

#include <functional>

#include "nanol/filter/belief.hpp"
#include "nanol/models/imu.hpp"
#include "nanol/models/measurement.hpp"

namespace nanol {

struct NanoConfig {
  double gamma = 1e-4;        // KL stopping threshold for the mean recursion
  int max_iters = 1;          // hitting the cap is normal, not an error
  double cubature_scale = 1.0;
};

struct FilterState {
  SEm3 mean;
  MatX cov;
  StateLayout layout;
};

// Constant part of the increment dynamics d xi/dt = F xi + Ad_X n: gravity
// couples rotation into velocity, velocity integrates into position. F is
// nilpotent (F^3 = 0).
inline MatX build_F(const StateLayout& layout) {
  const int d = layout.dim();
  MatX f = MatX::Zero(d, d);
  f.block<3, 3>(layout.vel_block(), layout.rot_block()) =
      so3_hat(layout.gravity);
  f.block<3, 3>(layout.pos_block(), layout.vel_block()) = Mat3::Identity();
  return f;
}

// Propagation: Euler mean step, then the exact linear covariance recursion
// with A = I + F dt and the noise mapped through the adjoint of the
// propagated mean. Q is the continuous density; Q dt is its one-step
// discretization.
// mean_substeps > 1 refines the mean integration under the same held input;
// useful when the data source integrates finer than the sample rate. The
// covariance step always spans the full dt.
inline FilterState predict(const FilterState& fs, const ImuSample& u,
                           double dt, const MatX& q, int mean_substeps = 1) {
  FilterState out = fs;
  out.mean = fs.mean;
  const double h = dt / mean_substeps;
  for (int j = 0; j < mean_substeps; ++j) {
    out.mean = imu_mean_propagate(out.mean, u, h, fs.layout);
  }
  const int d = fs.layout.dim();
  const MatX a = MatX::Identity(d, d) + build_F(fs.layout) * dt;
  const MatX b = a * sem3_adjoint(out.mean);
  out.cov = symmetrize(a * fs.cov * a.transpose() +
                       b * (q * dt) * b.transpose());
  return out;
}

// Degree-3 spherical cubature: 2d points xi_hat +/- scale * sqrt(d) * L_j
// with equal weights, L the lower Cholesky factor of the covariance.
inline std::vector<VecX> cubature_points(const IncrementBelief& belief,
                                         double scale = 1.0) {
  const int d = static_cast<int>(belief.xi_hat.size());
  const MatX l = cholesky_with_jitter(belief.cov);
  std::vector<VecX> pts;
  pts.reserve(2 * d);
  const double step = scale * std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j) {
    pts.push_back(belief.xi_hat + step * l.col(j));
    pts.push_back(belief.xi_hat - step * l.col(j));
  }
  return pts;
}

// E[ [Exp(-xi) X^{-1} b]_red ] under the belief, by cubature.
inline Vec3 expectation_of_h(const IncrementBelief& belief, const SEm3& x,
                             const InvariantMeasurement& meas,
                             double cubature_scale = 1.0) {
  const auto pts = cubature_points(belief, cubature_scale);
  Vec3 sum = Vec3::Zero();
  for (const VecX& xi : pts) {
    sum += perturbed_observation(x, meas.b, xi);
  }
  return sum / static_cast<double>(pts.size());
}

struct NanoUpdateResult {
  IncrementBelief posterior;  // increment belief before the manifold lift
  int iterations = 0;
};

// Natural-gradient update of the increment belief for one invariant
// measurement. The covariance is closed-form and computed once:
//   P^{-1} = P_prior^{-1} + star Gamma^{-1} star^T.
// The mean recursion then iterates with expectations taken under the
// already-updated covariance, stopping when the KL step drops below gamma
// or at max_iters.
inline NanoUpdateResult nano_increment_update(const IncrementBelief& prior,
                                              const SEm3& x,
                                              const InvariantMeasurement& meas,
                                              const StateLayout& layout,
                                              const NanoConfig& cfg) {
  check_gamma(meas.gamma_reduced);
  const MatX star = star_operator(x, meas.b, layout);
  const Mat3 gamma_inv = meas.gamma_reduced.inverse();
  const MatX prior_info = spd_inverse(prior.cov);
  const MatX post_cov =
      symmetrize(spd_inverse(prior_info + star * gamma_inv * star.transpose()));

  NanoUpdateResult res;
  res.posterior.cov = post_cov;
  VecX xi = prior.xi_hat;
  for (int i = 0; i < cfg.max_iters; ++i) {
    const Vec3 eh = expectation_of_h(IncrementBelief{xi, post_cov}, x, meas,
                                     cfg.cubature_scale);
    const VecX next = xi - post_cov * prior_info * (xi - prior.xi_hat) -
                      post_cov * star * gamma_inv * (meas.y_reduced - eh);
    const MatX& cov_i = (i == 0) ? prior.cov : post_cov;
    const double kl = kl_gaussian(IncrementBelief{xi, cov_i},
                                  IncrementBelief{next, post_cov});
    xi = next;
    ++res.iterations;
    if (kl < cfg.gamma) {
      break;
    }
  }
  res.posterior.xi_hat = xi;
  return res;
}

// Full state update: run the increment update from a zero-mean prior, then
// lift onto the group and re-center, transporting the covariance with the
// right Jacobian of the lift.
// Folds a tangent-space belief back onto the group: the mean absorbs the
// increment and the covariance is transported with the right Jacobian of the
// absorbed step.
inline FilterState lift_increment(const FilterState& fs,
                                  const IncrementBelief& inc) {
  FilterState out = fs;
  out.mean = fs.mean * sem3_exp(inc.xi_hat);
  const MatX jr = sem3_right_jacobian(inc.xi_hat);
  out.cov = symmetrize(jr * inc.cov * jr.transpose());
  return out;
}

inline FilterState nano_update_invariant(const FilterState& fs,
                                         const InvariantMeasurement& meas,
                                         const NanoConfig& cfg) {
  const IncrementBelief prior{VecX::Zero(fs.layout.dim()), fs.cov};
  const auto res = nano_increment_update(prior, fs.mean, meas, fs.layout, cfg);
  return lift_increment(fs, res.posterior);
}

// Variational objective the update descends: expected negative
// log-likelihood (up to its constant) plus the KL of the belief from the
// prior, both over the increment.
inline double cost_J(const IncrementBelief& belief,
                     const IncrementBelief& prior, const SEm3& x,
                     const InvariantMeasurement& meas,
                     double cubature_scale = 1.0) {
  const Mat3 gamma_inv = meas.gamma_reduced.inverse();
  const auto pts = cubature_points(belief, cubature_scale);
  double nll = 0.0;
  for (const VecX& xi : pts) {
    const Vec3 r = meas.y_reduced - perturbed_observation(x, meas.b, xi);
    nll += 0.5 * r.dot(gamma_inv * r);
  }
  nll /= static_cast<double>(pts.size());

  const int d = static_cast<int>(belief.xi_hat.size());
  const MatX prior_info = spd_inverse(prior.cov);
  const VecX dm = prior.xi_hat - belief.xi_hat;
  return nll + 0.5 * dm.dot(prior_info * dm) +
         0.5 * (prior_info * belief.cov).trace() -
         0.5 * (spd_log_det(belief.cov) - spd_log_det(prior.cov)) -
         0.5 * static_cast<double>(d);
}

using GradEvaluator = std::function<VecX(const VecX&)>;
using HessEvaluator = std::function<MatX(const VecX&)>;

// One generic natural-gradient iteration for an arbitrary per-increment
// negative log-likelihood, with the gradient and Hessian expectations taken
// by cubature under the current belief. The invariant update above is the
// specialization of this step with the constant analytic Hessian.
inline IncrementBelief ngd_update_generic(const IncrementBelief& belief,
                                          const IncrementBelief& prior,
                                          const GradEvaluator& grad,
                                          const HessEvaluator& hess,
                                          const NanoConfig& cfg) {
  const int d = static_cast<int>(belief.xi_hat.size());
  const auto pts = cubature_points(belief, cfg.cubature_scale);
  VecX egrad = VecX::Zero(d);
  MatX ehess = MatX::Zero(d, d);
  for (const VecX& xi : pts) {
    egrad += grad(xi);
    ehess += hess(xi);
  }
  egrad /= static_cast<double>(pts.size());
  ehess /= static_cast<double>(pts.size());

  const MatX prior_info = spd_inverse(prior.cov);
  IncrementBelief next;
  next.cov = symmetrize(spd_inverse(prior_info + ehess));
  next.xi_hat = belief.xi_hat - next.cov * egrad -
                next.cov * prior_info * (belief.xi_hat - prior.xi_hat);
  return next;
}

}  // namespace nanol
