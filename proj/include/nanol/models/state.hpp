#pragma once

#include "nanol/lie/sem3.hpp"

namespace nanol {

// Column roles of the SE_m(3) state. The group columns are ordered
// [velocity, position, contact_0, ..., contact_{C-1}]; tangent blocks follow
// as [phi; rho_v; rho_p; rho_s0; ...].
struct StateLayout {
  int contacts = 0;
  Vec3 gravity{0.0, 0.0, -9.81};

  static StateLayout landmark() { return StateLayout{0}; }
  static StateLayout legged(int num_contacts) {
    return StateLayout{num_contacts};
  }

  int cols() const { return 2 + contacts; }       // m
  int dim() const { return 3 + 3 * cols(); }      // tangent dimension

  // Column indices inside the group element.
  int velocity_col() const { return 0; }
  int position_col() const { return 1; }
  int contact_col(int i) const { return 2 + i; }

  // Tangent block offsets.
  int rot_block() const { return 0; }
  int vel_block() const { return 3; }
  int pos_block() const { return 6; }
  int contact_block(int i) const { return 9 + 3 * i; }
};

}  // namespace nanol
