#pragma once
// The sensor log shared by the synthesizers, the trial runner and the csv
// layer. Observations at index k are taken at time (k+1)*dt, the instant the
// filter reaches after consuming imu[k]; contacts[k] describes which feet are
// load-bearing during that interval. The log always carries four leg slots so
// the on-disk schema stays fixed; filters with fewer contact columns simply
// ignore the higher-numbered legs.

#include <array>
#include <vector>

#include "nanol/models/imu.hpp"

namespace nanol {

struct LandmarkObs {
  int landmark = 0;  // index into SensorLog::landmarks
  Vec3 y = Vec3::Zero();
};

struct LegObs {
  int leg = 0;  // 0 FL, 1 FR, 2 RL, 3 RR
  Vec3 theta = Vec3::Zero();
};

struct SensorLog {
  double dt = 0.01;
  std::vector<ImuSample> imu;
  std::vector<std::vector<LandmarkObs>> landmark_obs;  // one slot per step
  std::vector<std::vector<LegObs>> leg_obs;            // one slot per step
  std::vector<std::array<bool, 4>> contacts;           // one slot per step
  std::vector<Vec3> landmarks;  // static map referenced by landmark_obs
  int ik_failures = 0;

  std::size_t steps() const { return imu.size(); }
};

}  // namespace nanol
