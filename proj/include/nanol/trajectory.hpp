#pragma once
// Shared trajectory sample type used by the simulator, the metrics and the
// csv layer. Only the navigation core travels here; contact columns are a
// filter-internal detail and estimates from different models should compare
// on the same footing.

#include <vector>

#include "nanol/lie/sem3.hpp"

namespace nanol {

struct NavSample {
  double t = 0.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 velocity = Vec3::Zero();
  Vec3 position = Vec3::Zero();
};

using NavSeries = std::vector<NavSample>;

// Packs a sample into SE_2(3) with columns (velocity, position), the layout
// every model in this library shares for its leading columns.
inline SEm3 nav_group_element(const NavSample& s) {
  Eigen::Matrix3Xd cols(3, 2);
  cols.col(0) = s.velocity;
  cols.col(1) = s.position;
  return SEm3(s.rotation, cols);
}

inline NavSample nav_sample_from(double t, const SEm3& x) {
  NavSample s;
  s.t = t;
  s.rotation = x.rotation();
  s.velocity = x.translation(0);
  s.position = x.translation(1);
  return s;
}

}  // namespace nanol
