#pragma once

#include <Eigen/Dense>
#include <cassert>
#include <cmath>

#include "nanol/lie/so3.hpp"

namespace nanol {

using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

// Element of SE_m(3): one rotation plus m translation-like columns (velocity,
// position, contact points, ...). Stored as R and the 3 x m column block of
// the homogeneous matrix
//
//   [ R  p_1 ... p_m ]
//   [ 0   I_m        ]
//
// Group products track a composition count and re-project the rotation by
// polar decomposition every 1000 compositions to shed accumulated drift.
class SEm3 {
 public:
  explicit SEm3(int m)
      : r_(Mat3::Identity()), p_(Eigen::Matrix3Xd::Zero(3, m)) {}

  SEm3(const Mat3& r, const Eigen::Matrix3Xd& p) : r_(r), p_(p) {}

  static SEm3 Identity(int m) { return SEm3(m); }

  int cols() const { return static_cast<int>(p_.cols()); }
  int dim() const { return 3 + 3 * cols(); }

  const Mat3& rotation() const { return r_; }
  Mat3& rotation() { return r_; }
  Eigen::Ref<const Vec3> translation(int i) const { return p_.col(i); }
  void set_translation(int i, const Vec3& v) { p_.col(i) = v; }
  const Eigen::Matrix3Xd& translations() const { return p_; }

  SEm3 inverse() const {
    return SEm3(r_.transpose(), -(r_.transpose() * p_));
  }

  SEm3 operator*(const SEm3& o) const {
    assert(cols() == o.cols());
    SEm3 out(r_ * o.r_, r_ * o.p_ + p_);
    out.compositions_ = std::max(compositions_, o.compositions_) + 1;
    if (out.compositions_ >= kRenormEvery) {
      out.r_ = project_to_so3(out.r_);
      out.compositions_ = 0;
    }
    return out;
  }

  // Action on a homogeneous vector [w; beta] with w in R^3, beta in R^m.
  VecX apply(const VecX& v) const {
    assert(v.size() == 3 + cols());
    VecX out = v;
    out.head<3>() = r_ * v.head<3>() + p_ * v.tail(cols());
    return out;
  }

  // Full (3 + m) x (3 + m) homogeneous matrix, mostly for tests.
  MatX matrix() const {
    const int n = 3 + cols();
    MatX x = MatX::Identity(n, n);
    x.topLeftCorner<3, 3>() = r_;
    x.topRightCorner(3, cols()) = p_;
    return x;
  }

  // Nearest rotation in Frobenius norm via SVD.
  static Mat3 project_to_so3(const Mat3& r) {
    Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 u = svd.matrixU();
    const Mat3 v = svd.matrixV();
    if ((u * v.transpose()).determinant() < 0.0) {
      u.col(2) *= -1.0;
    }
    return u * v.transpose();
  }

 private:
  static constexpr unsigned kRenormEvery = 1000;

  Mat3 r_;
  Eigen::Matrix3Xd p_;
  unsigned compositions_ = 0;
};

inline int sem3_cols_of(const VecX& xi) {
  assert(xi.size() >= 3 && xi.size() % 3 == 0);
  return static_cast<int>(xi.size() / 3) - 1;
}

// exp of [phi; rho_1; ...; rho_m]: R = exp(phi^), p_i = J_l(phi) rho_i.
inline SEm3 sem3_exp(const VecX& xi) {
  const int m = sem3_cols_of(xi);
  const Vec3 phi = xi.head<3>();
  const Mat3 jl = so3_left_jacobian(phi);
  Eigen::Matrix3Xd p(3, m);
  for (int i = 0; i < m; ++i) {
    p.col(i) = jl * xi.segment<3>(3 + 3 * i);
  }
  return SEm3(so3_exp(phi), p);
}

inline VecX sem3_log(const SEm3& x) {
  const int m = x.cols();
  const Vec3 phi = so3_log(x.rotation());
  const Mat3 jl_inv = so3_left_jacobian_inv(phi);
  VecX xi(3 + 3 * m);
  xi.head<3>() = phi;
  for (int i = 0; i < m; ++i) {
    xi.segment<3>(3 + 3 * i) = jl_inv * x.translation(i);
  }
  return xi;
}

// Ad_X, block layout matching the tangent ordering: rotation block first,
// then one 3-row band per column with p_i^ R in the leading block column.
inline MatX sem3_adjoint(const SEm3& x) {
  const int m = x.cols();
  const int d = 3 + 3 * m;
  MatX ad = MatX::Zero(d, d);
  ad.topLeftCorner<3, 3>() = x.rotation();
  for (int i = 0; i < m; ++i) {
    ad.block<3, 3>(3 + 3 * i, 3 + 3 * i) = x.rotation();
    ad.block<3, 3>(3 + 3 * i, 0) = so3_hat(x.translation(i)) * x.rotation();
  }
  return ad;
}

// ad_xi, the algebra adjoint: phi^ on the diagonal, rho_i^ down the first
// block column.
inline MatX sem3_little_adjoint(const VecX& xi) {
  const int m = sem3_cols_of(xi);
  const int d = 3 + 3 * m;
  const Mat3 phi_hat = so3_hat(xi.head<3>());
  MatX ad = MatX::Zero(d, d);
  ad.topLeftCorner<3, 3>() = phi_hat;
  for (int i = 0; i < m; ++i) {
    ad.block<3, 3>(3 + 3 * i, 3 + 3 * i) = phi_hat;
    ad.block<3, 3>(3 + 3 * i, 0) = so3_hat(xi.segment<3>(3 + 3 * i));
  }
  return ad;
}

// J_r(xi) = sum_k (-ad_xi)^k / (k+1)!, truncated at the first term whose
// Frobenius norm drops below 1e-14 (30 terms at most; the series converges
// fast for the angles seen here).
inline MatX sem3_right_jacobian(const VecX& xi) {
  const int d = static_cast<int>(xi.size());
  const MatX ad = sem3_little_adjoint(xi);
  MatX jr = MatX::Identity(d, d);
  MatX term = MatX::Identity(d, d);
  for (int k = 1; k <= 30; ++k) {
    term = term * (-ad) / static_cast<double>(k + 1);
    if (term.norm() < 1e-14) {
      break;
    }
    jr += term;
  }
  return jr;
}

inline MatX sem3_left_jacobian(const VecX& xi) {
  return sem3_right_jacobian(-xi);
}

enum class BchSmallArg { First, Second };

// First-order BCH for log(Exp(x1) Exp(x2)): linearize in whichever argument
// the caller declares small.
inline VecX bch_first_order(const VecX& x1, const VecX& x2, BchSmallArg small) {
  assert(x1.size() == x2.size());
  if (small == BchSmallArg::First) {
    const MatX jl = sem3_left_jacobian(x2);
    return jl.partialPivLu().solve(x1) + x2;
  }
  const MatX jr = sem3_right_jacobian(x1);
  return x1 + jr.partialPivLu().solve(x2);
}

}  // namespace nanol
