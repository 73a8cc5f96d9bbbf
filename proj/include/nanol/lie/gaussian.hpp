#pragma once

#include <random>

#include "nanol/lie/sem3.hpp"

namespace nanol {

// Concentrated Gaussian on SE_m(3): X = mean * Exp(xi), xi ~ N(0, cov).
struct ConcentratedGaussian {
  SEm3 mean;
  MatX cov;  // (3 + 3m) x (3 + 3m), over [phi; rho_1; ...; rho_m]
};

// Lower Cholesky factor with one jitter retry: on failure the matrix gets
// 1e-12 * trace/d added to its diagonal before the second attempt.
inline MatX cholesky_with_jitter(const MatX& m) {
  Eigen::LLT<MatX> llt(m);
  if (llt.info() == Eigen::Success) {
    return llt.matrixL();
  }
  const double d = static_cast<double>(m.rows());
  const double jitter = 1e-12 * m.trace() / d;
  MatX bumped = m;
  bumped.diagonal().array() += jitter;
  Eigen::LLT<MatX> retry(bumped);
  if (retry.info() == Eigen::Success) {
    return retry.matrixL();
  }
  throw NotPsdError("cholesky_with_jitter: matrix not positive definite");
}

inline SEm3 sample_concentrated(const ConcentratedGaussian& g,
                                std::mt19937_64& rng) {
  const MatX l = cholesky_with_jitter(g.cov);
  std::normal_distribution<double> normal(0.0, 1.0);
  VecX eps(g.cov.rows());
  for (Eigen::Index i = 0; i < eps.size(); ++i) {
    eps[i] = normal(rng);
  }
  return g.mean * sem3_exp(l * eps);
}

}  // namespace nanol
