#pragma once
// JSON run configuration. Every field is optional and defaults to the noise
// table and campaign defaults baked into the structs; unknown or duplicate
// keys are hard errors so a typo cannot silently run with defaults.

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nanol/sim/montecarlo.hpp"

namespace nanol {

using Json = nlohmann::json;

struct RunConfig {
  CampaignConfig campaign;
  std::string mode = "landmark";  // or "legged"
  int legs = 4;                   // contact columns in legged mode
  std::string out_dir = "out";
};

namespace detail {

inline void check_keys(const Json& obj, const std::string& prefix,
                       const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError(prefix.empty() ? item.key() : prefix + "." + item.key(),
                        "unknown field");
    }
  }
}

inline std::string join_path(const std::string& prefix, const char* key) {
  return prefix.empty() ? key : prefix + "." + key;
}

inline double get_number(const Json& obj, const std::string& prefix,
                         const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_number()) {
    throw ConfigError(join_path(prefix, key), "expected a number");
  }
  return v.get<double>();
}

inline double get_positive(const Json& obj, const std::string& prefix,
                           const char* key, double fallback) {
  const double v = get_number(obj, prefix, key, fallback);
  if (!(v > 0.0)) {
    throw ConfigError(join_path(prefix, key), "must be positive");
  }
  return v;
}

inline long get_integer(const Json& obj, const std::string& prefix,
                        const char* key, long fallback, long min_value) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_number_integer()) {
    throw ConfigError(join_path(prefix, key), "expected an integer");
  }
  const long out = v.get<long>();
  if (out < min_value) {
    throw ConfigError(join_path(prefix, key),
                      "must be at least " + std::to_string(min_value));
  }
  return out;
}

inline Vec3 get_vec3(const Json& obj, const std::string& prefix,
                     const char* key, const Vec3& fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() ||
      !v[1].is_number() || !v[2].is_number()) {
    throw ConfigError(join_path(prefix, key),
                      "expected an array of three numbers");
  }
  return Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
}

}  // namespace detail

inline std::vector<FilterSpec> make_filter_specs(
    const std::vector<std::string>& names, const NanoConfig& nano) {
  if (names.empty()) {
    throw ConfigError("filters", "expected a non-empty list of names");
  }
  std::vector<FilterSpec> specs;
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) {
      throw ConfigError("filters", "duplicate filter name '" + n + "'");
    }
    if (n == "nano") {
      specs.push_back(FilterSpec{"nano", true, nano});
    } else if (n == "inekf") {
      specs.push_back(FilterSpec{"inekf", false, nano});
    } else {
      throw ConfigError("filters",
                        "unknown filter '" + n + "' (nano or inekf)");
    }
  }
  return specs;
}

inline RunConfig config_from_json(const Json& root) {
  if (!root.is_object()) {
    throw ConfigError("", "configuration must be a JSON object");
  }
  detail::check_keys(root, "",
                     {"mode", "legs", "trials", "seed", "threads", "window",
                      "sigma_cam", "gait_period", "out_dir", "record_cost",
                      "p0_nav", "p0_contact", "noise", "nano", "trajectory",
                      "landmarks", "leg_geometry", "filters"});
  RunConfig cfg;
  CampaignConfig& c = cfg.campaign;

  if (root.contains("mode")) {
    const Json& m = root.at("mode");
    if (!m.is_string() ||
        (m.get<std::string>() != "landmark" &&
         m.get<std::string>() != "legged")) {
      throw ConfigError("mode", "must be \"landmark\" or \"legged\"");
    }
    cfg.mode = m.get<std::string>();
  }
  cfg.legs = static_cast<int>(detail::get_integer(root, "", "legs", 4, 1));
  if (cfg.legs > 4) throw ConfigError("legs", "at most 4 legs");
  c.n_trials =
      static_cast<int>(detail::get_integer(root, "", "trials", c.n_trials, 1));
  c.base_seed = static_cast<std::uint64_t>(
      detail::get_integer(root, "", "seed",
                          static_cast<long>(c.base_seed), 0));
  c.threads =
      static_cast<int>(detail::get_integer(root, "", "threads", c.threads, 1));
  c.window_s = detail::get_positive(root, "", "window", c.window_s);
  c.setup.sigma_cam =
      detail::get_positive(root, "", "sigma_cam", c.setup.sigma_cam);
  c.gait_period =
      detail::get_positive(root, "", "gait_period", c.gait_period);
  c.setup.p0_nav = detail::get_positive(root, "", "p0_nav", c.setup.p0_nav);
  c.setup.p0_contact =
      detail::get_positive(root, "", "p0_contact", c.setup.p0_contact);
  if (root.contains("record_cost")) {
    if (!root.at("record_cost").is_boolean()) {
      throw ConfigError("record_cost", "expected a boolean");
    }
    c.setup.record_cost = root.at("record_cost").get<bool>();
  }
  if (root.contains("out_dir")) {
    if (!root.at("out_dir").is_string()) {
      throw ConfigError("out_dir", "expected a string");
    }
    cfg.out_dir = root.at("out_dir").get<std::string>();
  }

  if (root.contains("noise")) {
    const Json& n = root.at("noise");
    detail::check_keys(
        n, "noise",
        {"sigma_accel", "sigma_gyro", "sigma_encoder", "sigma_slip"});
    NoiseConfig& nc = c.setup.noise;
    nc.sigma_accel =
        detail::get_positive(n, "noise", "sigma_accel", nc.sigma_accel);
    nc.sigma_gyro =
        detail::get_positive(n, "noise", "sigma_gyro", nc.sigma_gyro);
    nc.sigma_encoder =
        detail::get_positive(n, "noise", "sigma_encoder", nc.sigma_encoder);
    nc.sigma_slip =
        detail::get_positive(n, "noise", "sigma_slip", nc.sigma_slip);
  }
  c.setup.noise.validate();

  NanoConfig nano;
  if (root.contains("nano")) {
    const Json& n = root.at("nano");
    detail::check_keys(n, "nano", {"gamma", "max_iters", "cubature_scale"});
    nano.gamma = detail::get_positive(n, "nano", "gamma", nano.gamma);
    nano.max_iters = static_cast<int>(
        detail::get_integer(n, "nano", "max_iters", nano.max_iters, 1));
    nano.cubature_scale = detail::get_positive(n, "nano", "cubature_scale",
                                               nano.cubature_scale);
  }

  if (root.contains("trajectory")) {
    const Json& t = root.at("trajectory");
    detail::check_keys(t, "trajectory",
                       {"duration", "rate", "omega_amp", "omega_freq",
                        "accel_amp", "accel_freq", "seed"});
    TrajectoryProfile& p = c.profile;
    p.duration = detail::get_positive(t, "trajectory", "duration", p.duration);
    p.rate = detail::get_positive(t, "trajectory", "rate", p.rate);
    p.omega_amp = detail::get_vec3(t, "trajectory", "omega_amp", p.omega_amp);
    p.omega_freq =
        detail::get_vec3(t, "trajectory", "omega_freq", p.omega_freq);
    p.accel_amp = detail::get_vec3(t, "trajectory", "accel_amp", p.accel_amp);
    p.accel_freq =
        detail::get_vec3(t, "trajectory", "accel_freq", p.accel_freq);
    p.seed = static_cast<std::uint64_t>(detail::get_integer(
        t, "trajectory", "seed", static_cast<long>(p.seed), 0));
  }

  if (root.contains("landmarks")) {
    const Json& l = root.at("landmarks");
    if (!l.is_array() || l.empty()) {
      throw ConfigError("landmarks", "expected a non-empty array");
    }
    c.landmarks.clear();
    for (std::size_t i = 0; i < l.size(); ++i) {
      const Json& m = l[i];
      if (!m.is_array() || m.size() != 3) {
        throw ConfigError("landmarks[" + std::to_string(i) + "]",
                          "expected an array of three numbers");
      }
      c.landmarks.emplace_back(m[0].get<double>(), m[1].get<double>(),
                               m[2].get<double>());
    }
  }

  if (root.contains("leg_geometry")) {
    const Json& g = root.at("leg_geometry");
    detail::check_keys(g, "leg_geometry",
                       {"l_hip", "l_thigh", "l_calf", "o_x", "o_y"});
    LegGeometry& geom = c.setup.base_geom;
    geom.l_hip = detail::get_positive(g, "leg_geometry", "l_hip", geom.l_hip);
    geom.l_thigh =
        detail::get_positive(g, "leg_geometry", "l_thigh", geom.l_thigh);
    geom.l_calf =
        detail::get_positive(g, "leg_geometry", "l_calf", geom.l_calf);
    geom.o_x = detail::get_number(g, "leg_geometry", "o_x", geom.o_x);
    geom.o_y = detail::get_number(g, "leg_geometry", "o_y", geom.o_y);
  }

  std::vector<std::string> names = {"nano", "inekf"};
  if (root.contains("filters")) {
    const Json& f = root.at("filters");
    if (!f.is_array() || f.empty()) {
      throw ConfigError("filters", "expected a non-empty array of names");
    }
    names.clear();
    for (const auto& n : f) {
      if (!n.is_string()) {
        throw ConfigError("filters", "expected filter names as strings");
      }
      names.push_back(n.get<std::string>());
    }
  }
  c.filters = make_filter_specs(names, nano);

  c.setup.layout = cfg.mode == "legged" ? StateLayout::legged(cfg.legs)
                                        : StateLayout::landmark();
  return cfg;
}

// Parses with a callback that rejects duplicate keys; the library itself
// silently keeps the last one, which is exactly the silent misconfiguration
// this loader exists to prevent.
inline Json parse_config_text(const std::string& text) {
  std::vector<std::set<std::string>> stack;
  Json::parser_callback_t cb = [&stack](int, Json::parse_event_t event,
                                        Json& parsed) {
    if (event == Json::parse_event_t::object_start) {
      stack.emplace_back();
    } else if (event == Json::parse_event_t::object_end) {
      stack.pop_back();
    } else if (event == Json::parse_event_t::key) {
      const auto key = parsed.get<std::string>();
      if (!stack.back().insert(key).second) {
        throw ConfigError(key, "duplicate key");
      }
    }
    return true;
  };
  try {
    return Json::parse(text, cb);
  } catch (const Json::exception& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return config_from_json(parse_config_text(text));
}

// The fully resolved configuration, defaults included. This is what lands in
// the result bundle and what the run id is derived from.
inline Json effective_config_json(const RunConfig& cfg) {
  const CampaignConfig& c = cfg.campaign;
  Json j;
  j["mode"] = cfg.mode;
  j["legs"] = cfg.legs;
  j["trials"] = c.n_trials;
  j["seed"] = c.base_seed;
  j["window"] = c.window_s;
  j["sigma_cam"] = c.setup.sigma_cam;
  j["gait_period"] = c.gait_period;
  j["record_cost"] = c.setup.record_cost;
  j["p0_nav"] = c.setup.p0_nav;
  j["p0_contact"] = c.setup.p0_contact;
  j["out_dir"] = cfg.out_dir;
  j["noise"] = {{"sigma_accel", c.setup.noise.sigma_accel},
                {"sigma_gyro", c.setup.noise.sigma_gyro},
                {"sigma_encoder", c.setup.noise.sigma_encoder},
                {"sigma_slip", c.setup.noise.sigma_slip}};
  const NanoConfig& nano =
      c.filters.empty() ? NanoConfig{} : c.filters.front().nano;
  j["nano"] = {{"gamma", nano.gamma},
               {"max_iters", nano.max_iters},
               {"cubature_scale", nano.cubature_scale}};
  j["trajectory"] = {
      {"duration", c.profile.duration},
      {"rate", c.profile.rate},
      {"omega_amp", {c.profile.omega_amp[0], c.profile.omega_amp[1],
                     c.profile.omega_amp[2]}},
      {"omega_freq", {c.profile.omega_freq[0], c.profile.omega_freq[1],
                      c.profile.omega_freq[2]}},
      {"accel_amp", {c.profile.accel_amp[0], c.profile.accel_amp[1],
                     c.profile.accel_amp[2]}},
      {"accel_freq", {c.profile.accel_freq[0], c.profile.accel_freq[1],
                      c.profile.accel_freq[2]}},
      {"seed", c.profile.seed}};
  Json marks = Json::array();
  for (const auto& m : c.landmarks) {
    marks.push_back({m[0], m[1], m[2]});
  }
  j["landmarks"] = marks;
  j["leg_geometry"] = {{"l_hip", c.setup.base_geom.l_hip},
                       {"l_thigh", c.setup.base_geom.l_thigh},
                       {"l_calf", c.setup.base_geom.l_calf},
                       {"o_x", c.setup.base_geom.o_x},
                       {"o_y", c.setup.base_geom.o_y}};
  Json filters = Json::array();
  for (const auto& f : c.filters) filters.push_back(f.name);
  j["filters"] = filters;
  return j;
}

}  // namespace nanol
