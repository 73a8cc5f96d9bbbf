#include "nanol/filter/inekf.hpp"
#include "nanol/filter/nano.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "support/oracles.hpp"

using namespace nanol;

namespace {

SEm3 random_state(std::mt19937_64& rng, const StateLayout& layout) {
  VecX xi(layout.dim());
  xi.head<3>() = oracle::random_vector(rng, 3, 1.0);
  xi.tail(layout.dim() - 3) =
      oracle::random_vector(rng, layout.dim() - 3, 2.0);
  return sem3_exp(xi);
}

InvariantMeasurement random_landmark_meas(std::mt19937_64& rng, const SEm3& x,
                                          const StateLayout& layout,
                                          double sigma, double obs_noise) {
  const Vec3 m = oracle::random_vector(rng, 3, 3.0);
  const Vec3 truth =
      x.rotation().transpose() * (m - x.translation(layout.position_col()));
  return make_landmark_measurement(
      truth + oracle::random_vector(rng, 3, obs_noise), m, sigma, layout);
}

}  // namespace

TEST_CASE("build_F structure and nilpotency") {
  const StateLayout layout = StateLayout::legged(1);
  const MatX f = build_F(layout);
  REQUIRE(f.rows() == 12);
  REQUIRE((f.block<3, 3>(3, 0) - so3_hat(layout.gravity)).norm() == 0.0);
  REQUIRE((f.block<3, 3>(6, 3) - Mat3::Identity()).norm() == 0.0);
  MatX stripped = f;
  stripped.block<3, 3>(3, 0).setZero();
  stripped.block<3, 3>(6, 3).setZero();
  REQUIRE(stripped.norm() == 0.0);
  REQUIRE((f * f * f).norm() == 0.0);
  // A = I + F dt truncates the exact series at O(dt^2): the defect is the
  // F^2 term only.
  const double dt = 0.01;
  const MatX exact = oracle::matrix_exp_series(f * dt, 10);
  const MatX a = MatX::Identity(12, 12) + f * dt;
  REQUIRE((exact - a - 0.5 * f * f * dt * dt).norm() < 1e-15);
}

TEST_CASE("predict from zero covariance injects mapped process noise") {
  const StateLayout layout = StateLayout::landmark();
  std::mt19937_64 rng(71);
  FilterState fs{random_state(rng, layout), MatX::Zero(9, 9), layout};
  ImuSample u;
  u.omega = Vec3(0.1, -0.2, 0.3);
  u.accel = Vec3(0.5, 9.6, 1.0);
  const double dt = 0.01;
  const FilterState out = predict(fs, u, dt, MatX::Identity(9, 9));

  const SEm3 mean_post = imu_mean_propagate(fs.mean, u, dt, layout);
  const MatX a = MatX::Identity(9, 9) + build_F(layout) * dt;
  const MatX b = a * sem3_adjoint(mean_post);
  REQUIRE((out.cov - b * b.transpose() * dt).norm() < 1e-12);
  REQUIRE((out.mean.matrix() - mean_post.matrix()).norm() == 0.0);
}

TEST_CASE("predict matches an independent dense recursion over many steps") {
  const StateLayout layout = StateLayout::landmark();
  std::mt19937_64 rng(72);
  FilterState fs{SEm3::Identity(2), oracle::random_spd(rng, 9, 0.01, 0.1),
                 layout};
  MatX ref = fs.cov;
  ImuSample u;
  u.accel = Vec3(0.3, 0.1, 9.81);
  u.omega = Vec3(0.02, 0.05, -0.04);
  const MatX q = oracle::random_spd(rng, 9, 1e-5, 1e-4);
  const double dt = 0.01;
  SEm3 mean = fs.mean;
  for (int k = 0; k < 100; ++k) {
    fs = predict(fs, u, dt, q);
    // Reference: textbook discrete propagation written out longhand.
    mean = imu_mean_propagate(mean, u, dt, layout);
    MatX a = MatX::Identity(9, 9);
    a.block<3, 3>(3, 0) = so3_hat(layout.gravity) * dt;
    a.block<3, 3>(6, 3) = Mat3::Identity() * dt;
    const MatX ad = sem3_adjoint(mean);
    ref = a * ref * a.transpose() + (a * ad) * (q * dt) * (ad.transpose() * a.transpose());
    ref = 0.5 * (ref + ref.transpose());
  }
  REQUIRE((fs.cov - ref).norm() / ref.norm() < 1e-12);
}

TEST_CASE("cubature points reproduce mean and covariance") {
  std::mt19937_64 rng(73);
  const IncrementBelief belief{oracle::random_vector(rng, 9, 1.0),
                               oracle::random_spd(rng, 9, 0.01, 0.1)};
  const auto pts = cubature_points(belief);
  REQUIRE(pts.size() == 18);
  VecX mean = VecX::Zero(9);
  for (const auto& p : pts) mean += p;
  mean /= 18.0;
  REQUIRE((mean - belief.xi_hat).norm() < 1e-12);
  MatX cov = MatX::Zero(9, 9);
  for (const auto& p : pts) {
    cov += (p - belief.xi_hat) * (p - belief.xi_hat).transpose();
  }
  cov /= 18.0;
  REQUIRE((cov - belief.cov).norm() / belief.cov.norm() < 1e-12);
}

TEST_CASE("expectation_of_h collapses to the deterministic map at zero cov") {
  const StateLayout layout = StateLayout::landmark();
  std::mt19937_64 rng(74);
  const SEm3 x = random_state(rng, layout);
  const auto meas = random_landmark_meas(rng, x, layout, 0.1, 0.0);
  const IncrementBelief tight{VecX::Zero(9), 1e-30 * MatX::Identity(9, 9)};
  REQUIRE((expectation_of_h(tight, x, meas) -
           reduced_observation(x, meas.b))
              .norm() < 1e-9);
}

TEST_CASE("expectation_of_h tracks a Monte-Carlo estimate") {
  const StateLayout layout = StateLayout::landmark();
  std::mt19937_64 rng(75);
  const SEm3 x = random_state(rng, layout);
  const auto meas = random_landmark_meas(rng, x, layout, 0.1, 0.0);
  IncrementBelief belief{VecX::Zero(9), oracle::random_spd(rng, 9, 0.01, 0.05)};

  const Vec3 cub = expectation_of_h(belief, x, meas);

  std::mt19937_64 mc_rng(7575);
  std::normal_distribution<double> normal(0.0, 1.0);
  const MatX l = cholesky_with_jitter(belief.cov);
  Vec3 mc = Vec3::Zero();
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    VecX eps(9);
    for (int j = 0; j < 9; ++j) eps[j] = normal(mc_rng);
    mc += perturbed_observation(x, meas.b, belief.xi_hat + l * eps);
  }
  mc /= n;
  REQUIRE((cub - mc).norm() < 5e-3);
}

TEST_CASE("posterior covariance is closed-form and iteration-free") {
  std::mt19937_64 rng(76);
  const StateLayout layout = StateLayout::landmark();
  NanoConfig cfg;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const SEm3 x = random_state(rng, layout);
    const auto meas = random_landmark_meas(rng, x, layout, 0.2, 0.1);
    const IncrementBelief prior{VecX::Zero(9),
                                oracle::random_spd(rng, 9, 0.005, 0.05)};
    cfg.max_iters = 1 + static_cast<int>(rng() % 5);
    const auto res = nano_increment_update(prior, x, meas, layout, cfg);

    // Independent route: plain dense inverses.
    const MatX star = star_operator(x, meas.b, layout);
    const MatX expected =
        (prior.cov.inverse() +
         star * meas.gamma_reduced.inverse() * star.transpose())
            .inverse();
    worst = std::max(worst, (res.posterior.cov - expected).norm() /
                                expected.norm());
  }
  REQUIRE(worst < 1e-12);

  // Iteration count must not touch the covariance at all.
  const SEm3 x = random_state(rng, layout);
  const auto meas = random_landmark_meas(rng, x, layout, 0.2, 0.1);
  const IncrementBelief prior{VecX::Zero(9),
                              oracle::random_spd(rng, 9, 0.005, 0.05)};
  cfg.max_iters = 1;
  const MatX cov1 =
      nano_increment_update(prior, x, meas, layout, cfg).posterior.cov;
  cfg.max_iters = 10;
  const MatX cov10 =
      nano_increment_update(prior, x, meas, layout, cfg).posterior.cov;
  REQUIRE((cov1 - cov10).norm() == 0.0);
}

TEST_CASE("uninformative measurement leaves the belief at the prior") {
  std::mt19937_64 rng(77);
  const StateLayout layout = StateLayout::landmark();
  const SEm3 x = random_state(rng, layout);
  auto meas = random_landmark_meas(rng, x, layout, 1.0, 0.5);
  meas.gamma_reduced = 1e15 * Mat3::Identity();  // Gamma^{-1} -> 0
  const MatX prior_cov = oracle::random_spd(rng, 9, 0.01, 0.1);
  const FilterState fs{x, prior_cov, layout};
  const FilterState out = nano_update_invariant(fs, meas, NanoConfig{});
  REQUIRE((out.mean.matrix() - x.matrix()).norm() < 1e-12);
  REQUIRE((out.cov - prior_cov).norm() / prior_cov.norm() < 1e-12);
}

TEST_CASE("posterior mean matches the InEKF when the expectation degenerates") {
  std::mt19937_64 rng(78);
  const StateLayout layout = StateLayout::landmark();
  NanoConfig cfg;
  cfg.max_iters = 1;
  cfg.cubature_scale = 0.0;  // collapses E[h] to the plain reduced map
  double worst_mean = 0.0, worst_cov = 0.0;
  for (int i = 0; i < 200; ++i) {
    const SEm3 x = random_state(rng, layout);
    const auto meas = random_landmark_meas(rng, x, layout, 0.3, 0.1);
    const FilterState fs{x, oracle::random_spd(rng, 9, 0.005, 0.05), layout};
    const FilterState nano = nano_update_invariant(fs, meas, cfg);
    const FilterState ekf = inekf_update(fs, meas);
    const VecX gap = sem3_log(ekf.mean.inverse() * nano.mean);
    worst_mean = std::max(worst_mean, gap.norm());
    // Pre-lift covariances coincide in exact arithmetic.
    const auto inc = nano_increment_update(
        IncrementBelief{VecX::Zero(9), fs.cov}, x, meas, layout, cfg);
    worst_cov = std::max(worst_cov,
                         (inc.posterior.cov - ekf.cov).norm() / ekf.cov.norm());
  }
  REQUIRE(worst_mean < 1e-9);
  REQUIRE(worst_cov < 1e-9);
}

TEST_CASE("update lift transports covariance with the right Jacobian") {
  std::mt19937_64 rng(79);
  const StateLayout layout = StateLayout::landmark();
  const SEm3 x = random_state(rng, layout);
  const auto meas = random_landmark_meas(rng, x, layout, 0.2, 0.3);
  const FilterState fs{x, oracle::random_spd(rng, 9, 0.01, 0.1), layout};
  NanoConfig cfg;
  const auto inc = nano_increment_update(
      IncrementBelief{VecX::Zero(9), fs.cov}, x, meas, layout, cfg);
  const FilterState out = nano_update_invariant(fs, meas, cfg);
  REQUIRE((out.mean.matrix() -
           (x * sem3_exp(inc.posterior.xi_hat)).matrix())
              .norm() < 1e-14);
  const MatX jr = sem3_right_jacobian(inc.posterior.xi_hat);
  REQUIRE((out.cov - jr * inc.posterior.cov * jr.transpose()).norm() < 1e-13);
}

TEST_CASE("KL divergence closed forms") {
  IncrementBelief a{VecX::Zero(1), MatX::Identity(1, 1)};
  IncrementBelief b{VecX::Ones(1), 2.0 * MatX::Identity(1, 1)};
  REQUIRE(kl_gaussian(a, a) == Catch::Approx(0.0).margin(1e-14));
  // Hand value: 0.5 * (1/2 + 1/2 - 1 + ln 2).
  REQUIRE(kl_gaussian(a, b) ==
          Catch::Approx(0.5 * std::log(2.0)).epsilon(1e-12));

  std::mt19937_64 rng(80);
  IncrementBelief ga{oracle::random_vector(rng, 6, 1.0),
                     oracle::random_spd(rng, 6, 0.1, 1.0)};
  IncrementBelief gb{oracle::random_vector(rng, 6, 1.0),
                     oracle::random_spd(rng, 6, 0.1, 1.0)};
  REQUIRE(kl_gaussian(ga, gb) > 0.0);
  // Invariance under a joint invertible linear map.
  const MatX t = oracle::random_spd(rng, 6, 0.5, 1.0);
  IncrementBelief ta{t * ga.xi_hat, t * ga.cov * t.transpose()};
  IncrementBelief tb{t * gb.xi_hat, t * gb.cov * t.transpose()};
  REQUIRE(kl_gaussian(ta, tb) ==
          Catch::Approx(kl_gaussian(ga, gb)).epsilon(1e-9));
}

TEST_CASE("KL stop ends the mean recursion early") {
  std::mt19937_64 rng(81);
  const StateLayout layout = StateLayout::landmark();
  const SEm3 x = random_state(rng, layout);
  const auto meas = random_landmark_meas(rng, x, layout, 0.3, 0.05);
  const IncrementBelief prior{VecX::Zero(9),
                              1e-4 * MatX::Identity(9, 9)};
  NanoConfig cfg;
  cfg.max_iters = 50;
  cfg.gamma = 1e-4;
  const auto res = nano_increment_update(prior, x, meas, layout, cfg);
  REQUIRE(res.iterations < 50);
}

TEST_CASE("cost_J vanishes at the prior with an uninformative likelihood") {
  std::mt19937_64 rng(82);
  const StateLayout layout = StateLayout::landmark();
  const SEm3 x = random_state(rng, layout);
  auto meas = random_landmark_meas(rng, x, layout, 1.0, 0.1);
  meas.gamma_reduced = 1e18 * Mat3::Identity();
  const IncrementBelief prior{VecX::Zero(9),
                              oracle::random_spd(rng, 9, 0.01, 0.1)};
  REQUIRE(std::abs(cost_J(prior, prior, x, meas)) < 1e-9);
}

TEST_CASE("one update step does not increase the objective") {
  std::mt19937_64 rng(83);
  const StateLayout layout = StateLayout::landmark();
  NanoConfig cfg;
  for (int i = 0; i < 100; ++i) {
    const SEm3 x = random_state(rng, layout);
    const auto meas = random_landmark_meas(rng, x, layout, 0.3, 0.2);
    const IncrementBelief prior{VecX::Zero(9),
                                oracle::random_spd(rng, 9, 0.01, 0.05)};
    cfg.max_iters = 1 + static_cast<int>(rng() % 3);
    const auto res = nano_increment_update(prior, x, meas, layout, cfg);
    const double j0 = cost_J(prior, prior, x, meas);
    const double j1 = cost_J(res.posterior, prior, x, meas);
    REQUIRE(j1 <= j0 + 1e-9);
  }
}

TEST_CASE("generic NGD step solves the quadratic case exactly") {
  std::mt19937_64 rng(84);
  for (int i = 0; i < 50; ++i) {
    const int d = 6;
    const IncrementBelief prior{oracle::random_vector(rng, d, 1.0),
                                oracle::random_spd(rng, d, 0.1, 1.0)};
    const MatX w = oracle::random_spd(rng, d, 0.1, 1.0);
    const VecX c = oracle::random_vector(rng, d, 2.0);
    const auto grad = [&](const VecX& xi) -> VecX { return w * (xi - c); };
    const auto hess = [&](const VecX&) -> MatX { return w; };
    const IncrementBelief out =
        ngd_update_generic(prior, prior, grad, hess, NanoConfig{});

    // Exact Gaussian posterior for the conjugate quadratic likelihood.
    const MatX p_post = (prior.cov.inverse() + w).inverse();
    const VecX mean = p_post * (prior.cov.inverse() * prior.xi_hat + w * c);
    REQUIRE((out.cov - p_post).norm() / p_post.norm() < 1e-10);
    REQUIRE((out.xi_hat - mean).norm() < 1e-10);
  }
}

TEST_CASE("generic NGD with invariant evaluators matches the closed form") {
  std::mt19937_64 rng(85);
  const StateLayout layout = StateLayout::landmark();
  const SEm3 x = random_state(rng, layout);
  const auto meas = random_landmark_meas(rng, x, layout, 0.3, 0.1);
  const IncrementBelief prior{VecX::Zero(9),
                              oracle::random_spd(rng, 9, 0.005, 0.05)};
  const MatX star = star_operator(x, meas.b, layout);
  const Mat3 gamma_inv = meas.gamma_reduced.inverse();
  const auto grad = [&](const VecX& xi) -> VecX {
    return star * gamma_inv *
           (meas.y_reduced - perturbed_observation(x, meas.b, xi));
  };
  const auto hess = [&](const VecX&) -> MatX {
    return star * gamma_inv * star.transpose();
  };

  // The cubature average of the constant Hessian is that Hessian, so the
  // covariance must match the closed-form information sum tightly.
  NanoConfig cfg;
  const IncrementBelief generic =
      ngd_update_generic(prior, prior, grad, hess, cfg);
  const MatX expected_cov =
      (prior.cov.inverse() + star * gamma_inv * star.transpose()).inverse();
  REQUIRE((generic.cov - expected_cov).norm() / expected_cov.norm() < 1e-8);

  // With degenerate expectations both routes evaluate the same formulas.
  cfg.cubature_scale = 0.0;
  const IncrementBelief generic0 =
      ngd_update_generic(prior, prior, grad, hess, cfg);
  cfg.max_iters = 1;
  const auto nano0 = nano_increment_update(prior, x, meas, layout, cfg);
  REQUIRE((generic0.xi_hat - nano0.posterior.xi_hat).norm() < 1e-12);
}
