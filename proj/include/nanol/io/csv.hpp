#pragma once
// CSV interchange for sensor logs and trajectories. Numbers are written with
// 17 significant digits so a write/parse cycle reproduces every double
// exactly; that is what lets replay-from-file match an in-process run.
// Orientation crosses the file boundary as a unit quaternion (w x y z, w >= 0)
// and becomes a rotation matrix again on ingest.
//
// Sensor log columns:
//   t, wx, wy, wz, ax, ay, az, q0..q11, c_fl, c_fr, c_rl, c_rr
// with q grouped FL/FR/RL/RR x hip/thigh/calf. Joint columns are meaningful
// only where the matching contact flag is 1; a stance sample the synthesizer
// had to drop is encoded as nan and skipped on ingest.
//
// Trajectory columns: t, qw, qx, qy, qz, vx, vy, vz, px, py, pz.

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "nanol/error.hpp"
#include "nanol/sim/sensor_log.hpp"
#include "nanol/trajectory.hpp"

namespace nanol {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// All writers funnel through this: the temp-then-rename dance makes a crash
// or full disk leave either the old file or nothing, never a torn file.
inline void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path());
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out.flush()) throw Error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

inline const char* kSensorHeader =
    "t,wx,wy,wz,ax,ay,az,"
    "q0,q1,q2,q3,q4,q5,q6,q7,q8,q9,q10,q11,"
    "c_fl,c_fr,c_rl,c_rr";
inline constexpr int kSensorColumns = 23;

inline const char* kTrajectoryHeader = "t,qw,qx,qy,qz,vx,vy,vz,px,py,pz";
inline constexpr int kTrajectoryColumns = 11;

namespace detail {

inline std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

inline double parse_cell(const std::string& cell, const std::string& file,
                         long line, const char* column) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw ParseError(file, line,
                     std::string("column ") + column + ": not a number: '" +
                         cell + "'");
  }
  return v;
}

inline const char* sensor_column_name(int i) {
  static const char* names[kSensorColumns] = {
      "t",  "wx", "wy", "wz", "ax", "ay", "az", "q0",   "q1",   "q2",
      "q3", "q4", "q5", "q6", "q7", "q8", "q9", "q10",  "q11",  "c_fl",
      "c_fr", "c_rl", "c_rr"};
  return names[i];
}

inline const char* trajectory_column_name(int i) {
  static const char* names[kTrajectoryColumns] = {
      "t", "qw", "qx", "qy", "qz", "vx", "vy", "vz", "px", "py", "pz"};
  return names[i];
}

}  // namespace detail

inline std::string serialize_sensor_log(const SensorLog& log) {
  std::string out(kSensorHeader);
  out += "\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < log.steps(); ++k) {
    std::array<double, 12> joints;
    joints.fill(nan);
    for (const auto& obs : log.leg_obs[k]) {
      for (int i = 0; i < 3; ++i) joints[3 * obs.leg + i] = obs.theta[i];
    }
    std::string row = format_double(log.imu[k].t);
    for (int i = 0; i < 3; ++i) {
      row += "," + format_double(log.imu[k].omega[i]);
    }
    for (int i = 0; i < 3; ++i) {
      row += "," + format_double(log.imu[k].accel[i]);
    }
    for (double q : joints) row += "," + format_double(q);
    for (int leg = 0; leg < 4; ++leg) {
      row += log.contacts[k][leg] ? ",1" : ",0";
    }
    out += row + "\n";
  }
  return out;
}

inline void write_sensor_log(const std::string& path, const SensorLog& log) {
  atomic_write(path, serialize_sensor_log(log));
}

inline SensorLog parse_sensor_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  SensorLog log;
  std::string line;
  long lineno = 0;
  if (!std::getline(in, line)) {
    throw ParseError(path, 1, "missing header row");
  }
  ++lineno;
  if (line != kSensorHeader) {
    throw ParseError(path, 1, "unexpected header: '" + line + "'");
  }
  double prev_t = -std::numeric_limits<double>::infinity();
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = detail::split_row(line);
    if (static_cast<int>(cells.size()) != kSensorColumns) {
      const int missing = kSensorColumns - static_cast<int>(cells.size());
      std::string what = "expected " + std::to_string(kSensorColumns) +
                         " columns, got " + std::to_string(cells.size());
      if (missing > 0) {
        what += "; first missing column: " +
                std::string(detail::sensor_column_name(
                    static_cast<int>(cells.size())));
      }
      throw ParseError(path, lineno, what);
    }
    ImuSample s;
    s.t = detail::parse_cell(cells[0], path, lineno, "t");
    if (!(s.t > prev_t)) {
      throw NonMonotonicTimeError(
          path, lineno,
          "time " + cells[0] + " does not increase past " +
              format_double(prev_t));
    }
    prev_t = s.t;
    for (int i = 0; i < 3; ++i) {
      s.omega[i] = detail::parse_cell(cells[1 + static_cast<std::size_t>(i)],
                                      path, lineno,
                                      detail::sensor_column_name(1 + i));
      s.accel[i] = detail::parse_cell(cells[4 + static_cast<std::size_t>(i)],
                                      path, lineno,
                                      detail::sensor_column_name(4 + i));
    }
    std::array<bool, 4> contact{};
    for (int leg = 0; leg < 4; ++leg) {
      const std::string& c = cells[19 + static_cast<std::size_t>(leg)];
      if (c == "1") {
        contact[leg] = true;
      } else if (c == "0") {
        contact[leg] = false;
      } else {
        throw ParseError(path, lineno,
                         std::string("column ") +
                             detail::sensor_column_name(19 + leg) +
                             ": contact flag must be 0 or 1, got '" + c + "'");
      }
    }
    std::vector<LegObs> obs;
    for (int leg = 0; leg < 4; ++leg) {
      Vec3 theta;
      bool valid = true;
      for (int i = 0; i < 3; ++i) {
        const int col = 7 + 3 * leg + i;
        theta[i] = detail::parse_cell(cells[static_cast<std::size_t>(col)],
                                      path, lineno,
                                      detail::sensor_column_name(col));
        if (std::isnan(theta[i])) valid = false;
      }
      if (contact[leg] && valid) obs.push_back({leg, theta});
    }
    log.imu.push_back(s);
    log.contacts.push_back(contact);
    log.leg_obs.push_back(std::move(obs));
    log.landmark_obs.emplace_back();
  }
  if (log.imu.size() > 1) {
    log.dt = log.imu[1].t - log.imu[0].t;
  }
  return log;
}

inline std::string serialize_trajectory(const NavSeries& series) {
  std::string out(kTrajectoryHeader);
  out += "\n";
  for (const auto& s : series) {
    Eigen::Quaterniond q(s.rotation);
    q.normalize();
    if (q.w() < 0.0) q.coeffs() = -q.coeffs();  // one canonical sign
    std::string row = format_double(s.t);
    row += "," + format_double(q.w()) + "," + format_double(q.x()) + "," +
           format_double(q.y()) + "," + format_double(q.z());
    for (int i = 0; i < 3; ++i) row += "," + format_double(s.velocity[i]);
    for (int i = 0; i < 3; ++i) row += "," + format_double(s.position[i]);
    out += row + "\n";
  }
  return out;
}

inline void write_trajectory(const std::string& path,
                             const NavSeries& series) {
  atomic_write(path, serialize_trajectory(series));
}

inline NavSeries parse_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  NavSeries out;
  std::string line;
  long lineno = 0;
  if (!std::getline(in, line)) {
    throw ParseError(path, 1, "missing header row");
  }
  ++lineno;
  if (line != kTrajectoryHeader) {
    throw ParseError(path, 1, "unexpected header: '" + line + "'");
  }
  double prev_t = -std::numeric_limits<double>::infinity();
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = detail::split_row(line);
    if (static_cast<int>(cells.size()) != kTrajectoryColumns) {
      throw ParseError(path, lineno,
                       "expected " + std::to_string(kTrajectoryColumns) +
                           " columns, got " + std::to_string(cells.size()));
    }
    double v[kTrajectoryColumns];
    for (int i = 0; i < kTrajectoryColumns; ++i) {
      v[i] = detail::parse_cell(cells[static_cast<std::size_t>(i)], path,
                                lineno, detail::trajectory_column_name(i));
    }
    if (!(v[0] > prev_t)) {
      throw NonMonotonicTimeError(path, lineno,
                                  "time does not increase past " +
                                      format_double(prev_t));
    }
    prev_t = v[0];
    NavSample s;
    s.t = v[0];
    Eigen::Quaterniond q(v[1], v[2], v[3], v[4]);
    if (std::abs(q.norm() - 1.0) > 1e-6) {
      throw ParseError(path, lineno, "quaternion is not unit length");
    }
    s.rotation = q.normalized().toRotationMatrix();
    s.velocity = Vec3(v[5], v[6], v[7]);
    s.position = Vec3(v[8], v[9], v[10]);
    out.push_back(s);
  }
  return out;
}

}  // namespace nanol
