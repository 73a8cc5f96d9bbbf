// Command line front end for the estimator toolkit. Subcommands:
//
//   simulate    one trial at the base seed, writes the result bundle plus the
//               ground-truth trajectory (and the sensor log in legged mode)
//   montecarlo  full campaign, writes the result bundle
//   replay      re-runs the filters over a recorded sensor log scored
//               against a reference trajectory
//   compare     metric table for estimate CSVs against a reference
//   plot        re-renders the SVG plots of an existing run from its summary
//
// Exit codes: 0 success, 2 configuration error, 3 input parse error,
// 4 numerical failure, 1 anything else.

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nanol/error.hpp"
#include "nanol/io/config.hpp"
#include "nanol/io/csv.hpp"
#include "nanol/io/replay.hpp"
#include "nanol/io/results.hpp"
#include "nanol/sim/montecarlo.hpp"

namespace {

namespace fs = std::filesystem;
using nanol::Json;

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

int threads_from_env() {
  const char* s = std::getenv("NANO_L_THREADS");
  if (s == nullptr || *s == '\0') return 0;
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (end == s || *end != '\0' || v < 1) {
    throw nanol::ConfigError("NANO_L_THREADS",
                             "expected a positive integer, got '" +
                                 std::string(s) + "'");
  }
  return static_cast<int>(v);
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw nanol::ParseError(path, 0, "cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw nanol::ParseError(path, 0, std::string("invalid JSON: ") + e.what());
  }
}

// Options shared by the subcommands that run filters. Each override applies
// only when the flag was actually given, so the config file stays the source
// of defaults.
struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  int trials = 0;
  std::uint64_t seed = 0;
  std::string filters;
  int max_iters = 0;
  int threads = 0;
  double window = 0.0;

  CLI::Option* trials_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* filters_opt = nullptr;
  CLI::Option* max_iters_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* window_opt = nullptr;

  void attach(CLI::App* cmd, bool with_trials, bool with_threads,
              bool with_window) {
    cmd->add_option("--config", config_path, "JSON configuration file");
    out_opt = cmd->add_option("--out", out_dir, "output directory");
    if (with_trials) {
      trials_opt = cmd->add_option("--trials", trials, "number of trials");
    }
    seed_opt = cmd->add_option("--seed", seed, "base seed");
    filters_opt = cmd->add_option(
        "--filters", filters, "comma-separated filter names (nano,inekf)");
    max_iters_opt =
        cmd->add_option("--max-iters", max_iters, "update iterations");
    if (with_threads) {
      threads_opt = cmd->add_option("--threads", threads,
                                    "worker threads (or NANO_L_THREADS)");
    }
    if (with_window) {
      window_opt = cmd->add_option("--window", window,
                                   "relative-error window in seconds");
    }
  }

  nanol::RunConfig load() const {
    nanol::RunConfig cfg;
    if (!config_path.empty()) cfg = nanol::load_config(config_path);
    if (out_opt != nullptr && out_opt->count() > 0) cfg.out_dir = out_dir;
    if (trials_opt != nullptr && trials_opt->count() > 0) {
      if (trials < 1) throw nanol::ConfigError("trials", "need at least 1");
      cfg.campaign.n_trials = trials;
    }
    if (seed_opt->count() > 0) cfg.campaign.base_seed = seed;
    if (filters_opt->count() > 0) {
      const nanol::NanoConfig nano = cfg.campaign.filters.empty()
                                         ? nanol::NanoConfig{}
                                         : cfg.campaign.filters.front().nano;
      cfg.campaign.filters =
          nanol::make_filter_specs(split_names(filters), nano);
    }
    if (max_iters_opt->count() > 0) {
      if (max_iters < 1) throw nanol::ConfigError("max_iters", "need >= 1");
      for (auto& f : cfg.campaign.filters) f.nano.max_iters = max_iters;
    }
    if (threads_opt != nullptr) {
      if (threads_opt->count() > 0) {
        if (threads < 1) throw nanol::ConfigError("threads", "need >= 1");
        cfg.campaign.threads = threads;
      } else if (const int env = threads_from_env(); env > 0) {
        cfg.campaign.threads = env;
      }
    }
    if (window_opt != nullptr && window_opt->count() > 0) {
      if (window <= 0.0) throw nanol::ConfigError("window", "need > 0");
      cfg.campaign.window_s = window;
    }
    return cfg;
  }
};

void print_metric_lines(const nanol::McSummary& sum) {
  for (const auto& name : sum.filter_names) {
    const auto it = sum.mean_metrics.find(name);
    if (it == sum.mean_metrics.end()) continue;
    const nanol::MetricReport& m = it->second;
    std::printf("  %-8s ate_pos %.6g m  ate_ori %.6g rad  re_pos %.6g m\n",
                name.c_str(), m.ate_pos, m.ate_ori, m.re_pos);
  }
  if (!sum.failed_trials.empty()) {
    std::printf("  %zu trial(s) failed\n", sum.failed_trials.size());
    for (const auto& msg : sum.failure_messages) {
      std::fprintf(stderr, "warning: %s\n", msg.c_str());
    }
  }
}

int cmd_montecarlo(const CommonFlags& flags) {
  const nanol::RunConfig cfg = flags.load();
  const nanol::McSummary sum = nanol::run_monte_carlo(cfg.campaign);
  const std::string dir = nanol::write_result_bundle(sum, cfg);
  std::printf("wrote %s\n", dir.c_str());
  print_metric_lines(sum);
  return 0;
}

int cmd_simulate(const CommonFlags& flags) {
  nanol::RunConfig cfg = flags.load();
  cfg.campaign.n_trials = 1;
  const nanol::McSummary sum = nanol::run_monte_carlo(cfg.campaign);
  const std::string dir = nanol::write_result_bundle(sum, cfg);

  // Ship the raw inputs of the trial alongside the bundle so the run can be
  // replayed from files alone.
  const nanol::GroundTruth gt = nanol::generate_ground_truth(cfg.campaign.profile);
  nanol::write_trajectory(dir + "/gt.csv", gt.states);
  if (cfg.campaign.setup.layout.contacts > 0) {
    const nanol::SensorLog log = nanol::synthesize_legged(
        gt, cfg.campaign.setup.base_geom, cfg.campaign.gait_period,
        cfg.campaign.setup.noise, cfg.campaign.base_seed);
    nanol::write_sensor_log(dir + "/sensors.csv", log);
  }
  std::printf("wrote %s\n", dir.c_str());
  print_metric_lines(sum);
  return 0;
}

int cmd_replay(const CommonFlags& flags, const std::string& log_path,
               const std::string& gt_path) {
  const nanol::RunConfig cfg = flags.load();
  const nanol::SensorLog log = nanol::parse_sensor_log(log_path);
  const nanol::NavSeries reference = nanol::parse_trajectory(gt_path);

  // The log format always carries four leg blocks; make sure the configured
  // layout models every leg the log actually uses.
  int max_leg = -1;
  for (const auto& per_step : log.leg_obs) {
    for (const auto& o : per_step) max_leg = std::max(max_leg, o.leg);
  }
  for (const auto& c : log.contacts) {
    for (int i = 0; i < 4; ++i) {
      if (c[static_cast<std::size_t>(i)]) max_leg = std::max(max_leg, i);
    }
  }
  if (max_leg >= cfg.campaign.setup.layout.contacts) {
    throw nanol::ConfigError(
        "mode", "log uses leg " + std::to_string(max_leg) +
                    " but the configured layout models " +
                    std::to_string(cfg.campaign.setup.layout.contacts) +
                    " contact(s); use mode=legged with enough legs");
  }

  const nanol::McSummary sum =
      nanol::run_replay(log, reference, cfg.campaign.filters,
                        cfg.campaign.setup, cfg.campaign.window_s, gt_path);
  const std::string dir =
      nanol::write_result_bundle(sum, cfg, log_path + "|" + gt_path);
  std::printf("wrote %s\n", dir.c_str());
  print_metric_lines(sum);
  return 0;
}

int cmd_compare(const std::string& gt_path,
                const std::vector<std::string>& est_paths, double window,
                const std::string& timing_path) {
  const nanol::NavSeries reference = nanol::parse_trajectory(gt_path);

  std::map<std::string, double> mean_update_s;
  if (!timing_path.empty()) {
    const Json timing = read_json_file(timing_path);
    if (timing.contains("filters")) {
      for (const auto& [name, entry] : timing.at("filters").items()) {
        if (entry.contains("mean_s")) {
          mean_update_s[name] = entry.at("mean_s").get<double>();
        }
      }
    }
  }

  struct Row {
    std::string label;
    nanol::MetricReport m;
    double update_ms = -1.0;
  };
  std::vector<Row> rows;
  for (const auto& path : est_paths) {
    const nanol::NavSeries est = nanol::parse_trajectory(path);
    std::vector<double> times;
    times.reserve(est.size());
    for (const auto& s : est) times.push_back(s.t);
    const nanol::NavSeries ref = nanol::resample_nav(reference, times, gt_path);
    const double duration = times.back() - times.front();
    const double used = std::min(window, 0.5 * duration);

    Row row;
    row.label = fs::path(path).stem().string();
    if (row.label.rfind("est_", 0) == 0) row.label = row.label.substr(4);
    row.m = nanol::compute_metrics(est, ref, used);
    const auto it = mean_update_s.find(row.label);
    if (it != mean_update_s.end()) row.update_ms = it->second * 1e3;
    rows.push_back(std::move(row));
  }

  const bool with_timing = !mean_update_s.empty();
  std::printf("%-12s %12s %12s %12s %12s %12s %12s", "series", "ate_pos",
              "ate_vel", "ate_ori", "re_pos", "re_vel", "re_ori");
  if (with_timing) std::printf(" %12s", "update_ms");
  std::printf("\n");
  auto print_row = [&](const char* label, double a, double b, double c,
                       double d, double e, double f, double ms) {
    std::printf("%-12s %12.6g %12.6g %12.6g %12.6g %12.6g %12.6g", label, a, b,
                c, d, e, f);
    if (with_timing) {
      if (ms >= 0.0) {
        std::printf(" %12.6g", ms);
      } else {
        std::printf(" %12s", "-");
      }
    }
    std::printf("\n");
  };
  for (const auto& r : rows) {
    print_row(r.label.c_str(), r.m.ate_pos, r.m.ate_vel, r.m.ate_ori,
              r.m.re_pos, r.m.re_vel, r.m.re_ori, r.update_ms);
  }
  if (rows.size() > 1) {
    // Spread across the inputs per column; identical series give all zeros.
    auto spread = [&](auto field) {
      double lo = rows.front().m.*field, hi = lo;
      for (const auto& r : rows) {
        lo = std::min(lo, r.m.*field);
        hi = std::max(hi, r.m.*field);
      }
      return hi - lo;
    };
    print_row("spread", spread(&nanol::MetricReport::ate_pos),
              spread(&nanol::MetricReport::ate_vel),
              spread(&nanol::MetricReport::ate_ori),
              spread(&nanol::MetricReport::re_pos),
              spread(&nanol::MetricReport::re_vel),
              spread(&nanol::MetricReport::re_ori), -1.0);
  }
  return 0;
}

int cmd_plot(const std::string& run_dir) {
  const Json summary = read_json_file(run_dir + "/summary.json");
  nanol::write_plots(run_dir + "/plots", summary);
  std::printf("wrote %s/plots\n", run_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"state estimation on matrix Lie groups: filters, simulation, "
               "metrics"};
  app.require_subcommand(1);

  CommonFlags sim_flags, mc_flags, replay_flags;
  std::string log_path, gt_path, cmp_gt, timing_path, run_dir;
  std::vector<std::string> est_paths;
  double cmp_window = 3.0;

  CLI::App* simulate =
      app.add_subcommand("simulate", "run one trial and write its bundle");
  sim_flags.attach(simulate, false, false, false);

  CLI::App* montecarlo =
      app.add_subcommand("montecarlo", "run a campaign and write its bundle");
  mc_flags.attach(montecarlo, true, true, true);

  CLI::App* replay = app.add_subcommand(
      "replay", "re-run filters over a recorded sensor log");
  replay_flags.attach(replay, false, false, true);
  replay->add_option("--log", log_path, "sensor log CSV")->required();
  replay->add_option("--gt", gt_path, "reference trajectory CSV")->required();

  CLI::App* compare = app.add_subcommand(
      "compare", "metric table for estimate CSVs against a reference");
  compare->add_option("--gt", cmp_gt, "reference trajectory CSV")->required();
  compare->add_option("estimates", est_paths, "estimate CSV files")
      ->required()
      ->expected(-1);
  compare->add_option("--window", cmp_window,
                      "relative-error window in seconds");
  compare->add_option("--timing", timing_path,
                      "timing.json to report mean update times");

  CLI::App* plot =
      app.add_subcommand("plot", "re-render the plots of an existing run");
  plot->add_option("--run", run_dir, "run directory with summary.json")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(sim_flags);
    if (montecarlo->parsed()) return cmd_montecarlo(mc_flags);
    if (replay->parsed()) return cmd_replay(replay_flags, log_path, gt_path);
    if (compare->parsed()) {
      return cmd_compare(cmp_gt, est_paths, cmp_window, timing_path);
    }
    if (plot->parsed()) return cmd_plot(run_dir);
  } catch (const nanol::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const nanol::ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return 3;
  } catch (const nanol::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 4;
  } catch (const nanol::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
