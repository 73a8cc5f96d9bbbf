#pragma once

// Independent reference implementations used to pin the library's results.
// Everything here is deliberately written the slow, obvious way (plain
// series, brute-force differences) so tests never share code with the
// implementations they check.

#include <Eigen/Dense>
#include <functional>
#include <random>

namespace oracle {

// Truncated matrix exponential sum_{k=0}^{terms} M^k / k!.
inline Eigen::MatrixXd matrix_exp_series(const Eigen::MatrixXd& m,
                                         int terms = 30) {
  Eigen::MatrixXd out =
      Eigen::MatrixXd::Identity(m.rows(), m.cols());
  Eigen::MatrixXd power = out;
  for (int k = 1; k <= terms; ++k) {
    power = power * m / static_cast<double>(k);
    out += power;
  }
  return out;
}

// Homogeneous se_m(3) embedding of a tangent vector: phi^ in the rotation
// block, each rho_i as a column, zero bottom rows.
inline Eigen::MatrixXd sem3_wedge(const Eigen::VectorXd& xi) {
  const int m = static_cast<int>(xi.size() / 3) - 1;
  const int n = 3 + m;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  const double x = xi[0], y = xi[1], z = xi[2];
  w.topLeftCorner(3, 3) << 0, -z, y, z, 0, -x, -y, x, 0;
  for (int i = 0; i < m; ++i) {
    w.block(0, 3 + i, 3, 1) = xi.segment(3 + 3 * i, 3);
  }
  return w;
}

// Central-difference Jacobian of f: R^n -> R^p.
inline Eigen::MatrixXd central_difference(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double h) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd jac(f0.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Eigen::VectorXd xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    jac.col(j) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return jac;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, int n,
                                     double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = u(rng);
  }
  return v;
}

// Random symmetric positive definite matrix with eigenvalues in
// [floor, floor + spread].
inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, int n, double floor,
                                  double spread) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      a(i, j) = g(rng);
    }
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::MatrixXd q = qr.householderQ();
  std::uniform_real_distribution<double> u(floor, floor + spread);
  Eigen::VectorXd eig(n);
  for (int i = 0; i < n; ++i) {
    eig[i] = u(rng);
  }
  return q * eig.asDiagonal() * q.transpose();
}

}  // namespace oracle
