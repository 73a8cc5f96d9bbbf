#include "nanol/models/imu.hpp"
#include "nanol/models/measurement.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "support/oracles.hpp"

using namespace nanol;

namespace {

SEm3 random_state(std::mt19937_64& rng, const StateLayout& layout) {
  VecX xi(layout.dim());
  xi.head<3>() = oracle::random_vector(rng, 3, 1.2);
  xi.tail(layout.dim() - 3) =
      oracle::random_vector(rng, layout.dim() - 3, 2.0);
  return sem3_exp(xi);
}

ImuSample random_imu(std::mt19937_64& rng) {
  ImuSample u;
  u.omega = oracle::random_vector(rng, 3, 2.0);
  u.accel = oracle::random_vector(rng, 3, 5.0);
  return u;
}

}  // namespace

TEST_CASE("stationary propagation is exact") {
  const StateLayout layout = StateLayout::landmark();
  SEm3 x = SEm3::Identity(layout.cols());
  ImuSample u;
  u.accel = Vec3(0, 0, 9.81);  // cancels gravity at identity attitude
  for (int i = 0; i < 100; ++i) {
    x = imu_mean_propagate(x, u, 0.01, layout);
  }
  REQUIRE((x.matrix() - SEm3::Identity(layout.cols()).matrix()).norm() <
          1e-12);
}

TEST_CASE("position uses the pre-update velocity") {
  const StateLayout layout = StateLayout::landmark();
  SEm3 x = SEm3::Identity(layout.cols());
  x.set_translation(layout.velocity_col(), Vec3(1, 0, 0));
  const SEm3 next = imu_mean_propagate(x, ImuSample{}, 0.01, layout);
  REQUIRE((next.translation(layout.position_col()) - Vec3(0.01, 0, 0))
              .norm() < 1e-15);
  REQUIRE((next.translation(layout.velocity_col()) -
           (Vec3(1, 0, 0) + layout.gravity * 0.01))
              .norm() < 1e-15);
}

TEST_CASE("single steps converge to the fine-grid integral at first order") {
  const StateLayout layout = StateLayout::landmark();
  std::mt19937_64 rng(61);
  const SEm3 x0 = random_state(rng, layout);
  const ImuSample u = random_imu(rng);

  auto integrate = [&](double dt, int n) {
    SEm3 x = x0;
    for (int i = 0; i < n; ++i) {
      x = imu_mean_propagate(x, u, dt, layout);
    }
    return x;
  };
  const SEm3 ref = integrate(1e-4, 10000);  // 1 s at a 100x finer grid
  const double e1 =
      (integrate(0.01, 100).matrix() - ref.matrix()).norm();
  const double e2 =
      (integrate(0.005, 200).matrix() - ref.matrix()).norm();
  REQUIRE(e1 > 0.0);
  REQUIRE(e2 < 0.7 * e1);  // halving dt roughly halves the defect
}

TEST_CASE("IMU vector field is group-affine") {
  std::mt19937_64 rng(62);
  for (const StateLayout& layout :
       {StateLayout::landmark(), StateLayout::legged(1)}) {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const SEm3 x1 = random_state(rng, layout);
      const SEm3 x2 = random_state(rng, layout);
      worst = std::max(
          worst, group_affine_residual(x1, x2, random_imu(rng), layout));
    }
    REQUIRE(worst < 1e-10);
  }
}

TEST_CASE("squared-velocity field fails the group-affine test") {
  const StateLayout layout = StateLayout::landmark();
  std::mt19937_64 rng(63);
  const ImuSample u = random_imu(rng);
  auto bad_field = [&](const SEm3& x) {
    MatX f = imu_dynamics_matrix(x, u, layout);
    const Vec3 v = x.translation(layout.velocity_col());
    f.block<3, 1>(0, 3 + layout.position_col()) = v.cwiseProduct(v);
    return f;
  };
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    worst = std::max(worst,
                     group_affine_defect(bad_field, random_state(rng, layout),
                                         random_state(rng, layout)));
  }
  REQUIRE(worst > 1e-6);
}

TEST_CASE("process noise blocks follow the tangent ordering") {
  NoiseConfig cfg;
  const StateLayout layout = StateLayout::legged(2);
  const MatX q = assemble_process_noise(cfg, layout, {true, false});
  const int d = layout.dim();
  REQUIRE(q.rows() == d);
  REQUIRE(q(0, 0) == Catch::Approx(0.00139 * 0.00139));
  REQUIRE(q(3, 3) == Catch::Approx(0.2568 * 0.2568));
  REQUIRE(q(6, 6) == 0.0);  // position row
  REQUIRE(q(9, 9) == Catch::Approx(0.001 * 0.001));
  REQUIRE(q(12, 12) == 0.0);  // swing leg carries no slip noise
  REQUIRE((q - q.diagonal().asDiagonal().toDenseMatrix()).norm() == 0.0);
}

TEST_CASE("landmark b vector and reduced observation") {
  const StateLayout layout = StateLayout::landmark();
  const Vec3 m1(0, 2, 2);
  const auto meas = make_landmark_measurement(Vec3::Zero(), m1, 0.1, layout);
  VecX expected(5);
  expected << 0, 2, 2, 0, 1;
  REQUIRE((meas.b - expected).norm() == 0.0);

  std::mt19937_64 rng(64);
  for (int i = 0; i < 50; ++i) {
    const SEm3 x = random_state(rng, layout);
    const Vec3 p = x.translation(layout.position_col());
    const Vec3 direct = x.rotation().transpose() * (m1 - p);
    REQUIRE((reduced_observation(x, meas.b) - direct).norm() < 1e-12);
  }
}

TEST_CASE("leg b vector and reduced observation") {
  const StateLayout layout = StateLayout::legged(1);
  NoiseConfig cfg;
  const LegGeometry geom;
  const auto meas =
      make_leg_measurement(Vec3(0.1, 0.5, -1.0), cfg, geom, layout, 0);
  VecX expected(6);
  expected << 0, 0, 0, 0, 1, -1;
  REQUIRE((meas.b - expected).norm() == 0.0);
  REQUIRE((meas.y_reduced - forward_kinematics(Vec3(0.1, 0.5, -1.0), geom))
              .norm() == 0.0);

  std::mt19937_64 rng(65);
  for (int i = 0; i < 50; ++i) {
    const SEm3 x = random_state(rng, layout);
    const Vec3 p = x.translation(layout.position_col());
    const Vec3 s = x.translation(layout.contact_col(0));
    const Vec3 direct = x.rotation().transpose() * (s - p);
    REQUIRE((reduced_observation(x, meas.b) - direct).norm() < 1e-12);
  }
}

TEST_CASE("leg measurement covariance is the pushed-forward encoder noise") {
  NoiseConfig cfg;
  const LegGeometry geom;
  const Vec3 theta(0.2, 0.7, -1.4);
  const auto meas =
      make_leg_measurement(theta, cfg, geom, StateLayout::legged(1), 0);
  const Mat3 j = fk_jacobian(theta, geom);
  REQUIRE((meas.gamma_reduced - 0.09 * j * j.transpose()).norm() < 1e-15);
}

TEST_CASE("degenerate measurement covariance is rejected") {
  const StateLayout layout = StateLayout::landmark();
  REQUIRE_THROWS_AS(
      make_landmark_measurement(Vec3::Zero(), Vec3(1, 1, 1), 0.0, layout),
      SingularGammaError);
}

// The contract that pins the star operator's sign and transpose: the
// Jacobian of xi -> [Exp(-xi) X^{-1} b]_red at xi = 0 equals -star^T.
TEST_CASE("star operator matches central differences") {
  std::mt19937_64 rng(66);
  NoiseConfig cfg;
  const LegGeometry geom;
  for (int trial = 0; trial < 100; ++trial) {
    const bool legged = trial % 2 == 0;
    const StateLayout layout =
        legged ? StateLayout::legged(1) : StateLayout::landmark();
    const SEm3 x = random_state(rng, layout);
    const InvariantMeasurement meas =
        legged ? make_leg_measurement(oracle::random_vector(rng, 3, 1.0), cfg,
                                      geom, layout, 0)
               : make_landmark_measurement(
                     Vec3::Zero(), oracle::random_vector(rng, 3, 3.0), 0.1,
                     layout);
    const MatX star = star_operator(x, meas.b, layout);
    REQUIRE(star.rows() == layout.dim());
    REQUIRE(star.cols() == 3);

    const MatX fd = oracle::central_difference(
        [&](const VecX& xi) -> VecX {
          return perturbed_observation(x, meas.b, xi);
        },
        VecX::Zero(layout.dim()), 1e-6);
    const MatX analytic = -star.transpose();
    REQUIRE((fd - analytic).norm() / std::max(1.0, analytic.norm()) < 1e-6);
  }
}

// Spelled-out blocks for the legged model: rotation rows (R^T(p - s))^,
// +I on the position block, -I on the contact block.
TEST_CASE("star operator blocks for the legged model") {
  std::mt19937_64 rng(67);
  const StateLayout layout = StateLayout::legged(1);
  NoiseConfig cfg;
  const LegGeometry geom;
  const SEm3 x = random_state(rng, layout);
  const auto meas =
      make_leg_measurement(Vec3(0.1, 0.4, -0.9), cfg, geom, layout, 0);
  const MatX star = star_operator(x, meas.b, layout);

  const Vec3 p = x.translation(layout.position_col());
  const Vec3 s = x.translation(layout.contact_col(0));
  const Mat3 rot_rows = so3_hat(x.rotation().transpose() * (p - s));
  REQUIRE((star.topRows<3>() - rot_rows.transpose()).norm() < 1e-12);
  REQUIRE((star.middleRows<3>(3)).norm() == 0.0);  // velocity rows
  REQUIRE((star.middleRows<3>(6) - Mat3::Identity()).norm() == 0.0);
  REQUIRE((star.middleRows<3>(9) + Mat3::Identity()).norm() == 0.0);
}
