#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "motkit/csv.hpp"
#include "motkit/detector.hpp"
#include "motkit/errors.hpp"
#include "motkit/sim.hpp"
#include "motkit/tracker.hpp"

namespace motkit {

// ============================================================================
// Run configuration
// ============================================================================
//
// One flat struct covers every workflow; unused sections are simply ignored
// by workflows that don't read them. Values resolve in three layers:
// defaults, then an optional ini-style config file, then command-line flags.
// emit_config() writes the fully resolved form back out; parsing that output
// reproduces the configuration exactly, and the echo deliberately omits the
// output directory so reruns into different directories stay byte-identical.

struct RunConfig {
  // invocation
  std::string workflow;        // detect | track | simulate | compare
  std::string input_dir;
  std::string out_dir;         // never echoed
  std::string init_locations;  // optional track-seed override file
  std::uint64_t seed = 42;
  bool dump_motion_field = false;

  DetectorConfig detector;
  UTConfig ut;

  // tracker
  double dt = 1.0;
  double process_q = 0.05;
  double meas_sigma = 2.0;
  double gate_radius = -1.0;
  double ambiguity_margin = -1.0;
  double init_pos_sigma = -1.0;
  double init_vel_sigma = 2.0;
  double init_acc_sigma = 1.0;

  // sim
  Scenario scenario;

  TrackerConfig tracker_config() const {
    TrackerConfig t;
    t.detector = detector;
    t.ut = ut;
    t.dt = dt;
    t.process_q = process_q;
    t.meas_sigma = meas_sigma;
    t.gate_radius = gate_radius;
    t.ambiguity_margin = ambiguity_margin;
    t.init_pos_sigma = init_pos_sigma;
    t.init_vel_sigma = init_vel_sigma;
    t.init_acc_sigma = init_acc_sigma;
    return t;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for " + key + ": '" + value + "'");
  }
}

inline long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad integer value for " + key + ": '" + value + "'");
  }
}

inline int parse_int(const std::string& key, const std::string& value) {
  return static_cast<int>(parse_long(key, value));
}

inline std::uint64_t parse_u64(const std::string& key,
                               const std::string& value) {
  // stoull would wrap "-3" around instead of rejecting it
  if (value.empty() || value.front() == '-') {
    throw ConfigError("bad seed value for " + key + ": '" + value + "'");
  }
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("bad seed value for " + key + ": '" + value + "'");
  }
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("bad boolean value for " + key + ": '" + value + "'");
}

inline std::vector<double> parse_double_list(const std::string& key,
                                             const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) {
      throw ConfigError("empty element in list for " + key);
    }
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw ConfigError("empty list for " + key);
  return out;
}

inline std::string format_double_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += format_fixed(values[i]);
  }
  return out;
}

}  // namespace detail

/// Applies one key = value pair from section `section`. Unknown sections or
/// keys are configuration errors, not warnings, so typos never pass silently.
inline void apply_config_entry(RunConfig& cfg, const std::string& section,
                               const std::string& key,
                               const std::string& value) {
  using namespace detail;
  const std::string full = section + "." + key;
  if (section == "run") {
    if (key == "seed") cfg.seed = parse_u64(full, value);
    else if (key == "input") cfg.input_dir = value;
    else if (key == "init_locations") cfg.init_locations = value;
    else if (key == "dump_motion_field")
      cfg.dump_motion_field = parse_bool(full, value);
    else throw ConfigError("unknown config key " + full);
  } else if (section == "detector") {
    if (key == "block_size") cfg.detector.block_size = parse_int(full, value);
    else if (key == "initial_step")
      cfg.detector.initial_step = parse_int(full, value);
    else if (key == "stop_threshold")
      cfg.detector.stop_threshold = parse_long(full, value);
    else if (key == "min_region_blocks")
      cfg.detector.min_region_blocks = parse_int(full, value);
    else if (key == "temporal_window")
      cfg.detector.temporal_window = parse_int(full, value);
    else throw ConfigError("unknown config key " + full);
  } else if (section == "filter") {
    if (key == "alpha") cfg.ut.alpha = parse_double(full, value);
    else throw ConfigError("unknown config key " + full);
  } else if (section == "tracker") {
    if (key == "dt") cfg.dt = parse_double(full, value);
    else if (key == "process_q") cfg.process_q = parse_double(full, value);
    else if (key == "meas_sigma") cfg.meas_sigma = parse_double(full, value);
    else if (key == "gate_radius")
      cfg.gate_radius = parse_double(full, value);
    else if (key == "ambiguity_margin")
      cfg.ambiguity_margin = parse_double(full, value);
    else if (key == "init_pos_sigma")
      cfg.init_pos_sigma = parse_double(full, value);
    else if (key == "init_vel_sigma")
      cfg.init_vel_sigma = parse_double(full, value);
    else if (key == "init_acc_sigma")
      cfg.init_acc_sigma = parse_double(full, value);
    else throw ConfigError("unknown config key " + full);
  } else if (section == "sim") {
    if (key == "speed") cfg.scenario.speed = parse_double(full, value);
    else if (key == "straight1_frames")
      cfg.scenario.straight1_frames = parse_int(full, value);
    else if (key == "turn_frames")
      cfg.scenario.turn_frames = parse_int(full, value);
    else if (key == "turn_angle_deg")
      cfg.scenario.turn_angle_deg = parse_double(full, value);
    else if (key == "straight2_frames")
      cfg.scenario.straight2_frames = parse_int(full, value);
    else if (key == "sigma_levels")
      cfg.scenario.sigma_levels = parse_double_list(full, value);
    else if (key == "trials") cfg.scenario.trials = parse_int(full, value);
    else if (key == "designated_trial")
      cfg.scenario.designated_trial = parse_int(full, value);
    else if (key == "ukf_q") cfg.scenario.ukf_q = parse_double(full, value);
    else if (key == "kf_q") cfg.scenario.kf_q = parse_double(full, value);
    else throw ConfigError("unknown config key " + full);
  } else {
    throw ConfigError("unknown config section [" + section + "]");
  }
}

/// Parses an ini-style file: [section] headers, key = value lines, blank
/// lines, and '#'/';' comments.
inline void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(path + ":" + std::to_string(line_no) +
                          ": unterminated section header");
      }
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected key = value");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": empty key");
    }
    apply_config_entry(cfg, section, key, value);
  }
}

/// Range/consistency validation shared by all workflows; violations map to
/// the configuration-error exit code.
inline void validate_config(const RunConfig& cfg) {
  if (cfg.detector.block_size < 2) {
    throw ConfigError("detector.block_size must be at least 2");
  }
  if (cfg.detector.initial_step < 1 ||
      (cfg.detector.initial_step & (cfg.detector.initial_step - 1)) != 0) {
    throw ConfigError("detector.initial_step must be a power of two");
  }
  if (cfg.detector.min_region_blocks < 1) {
    throw ConfigError("detector.min_region_blocks must be at least 1");
  }
  if (cfg.detector.temporal_window < 1) {
    throw ConfigError("detector.temporal_window must be at least 1");
  }
  if (!cfg.ut.valid()) {
    throw ConfigError("filter.alpha must lie in [1e-4, 1]");
  }
  if (cfg.dt <= 0.0) throw ConfigError("tracker.dt must be positive");
  if (cfg.process_q < 0.0) {
    throw ConfigError("tracker.process_q must be nonnegative");
  }
  if (cfg.meas_sigma <= 0.0) {
    throw ConfigError("tracker.meas_sigma must be positive");
  }
  if (cfg.init_vel_sigma < 0.0 || cfg.init_acc_sigma < 0.0) {
    throw ConfigError("tracker initial sigmas must be nonnegative");
  }
  if (cfg.scenario.trials < 1) {
    throw ConfigError("sim.trials must be at least 1");
  }
  if (cfg.scenario.sigma_levels.empty()) {
    throw ConfigError("sim.sigma_levels must not be empty");
  }
  for (double sigma : cfg.scenario.sigma_levels) {
    if (sigma <= 0.0) {
      throw ConfigError("sim.sigma_levels entries must be positive");
    }
  }
  if (cfg.scenario.designated_trial < 0 ||
      cfg.scenario.designated_trial >= cfg.scenario.trials) {
    throw ConfigError("sim.designated_trial must lie in [0, trials)");
  }
  if (cfg.scenario.total_frames() < 2) {
    throw ConfigError("sim path needs at least two frames");
  }
  if (cfg.scenario.straight1_frames < 0 || cfg.scenario.turn_frames < 0 ||
      cfg.scenario.straight2_frames < 0) {
    throw ConfigError("sim segment frame counts must be nonnegative");
  }
}

/// Canonical resolved form; fixed key order, every value explicit. Parsing
/// the output reproduces the struct. out_dir is intentionally absent.
inline std::string emit_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "[run]\n";
  out << "seed = " << cfg.seed << "\n";
  out << "input = " << cfg.input_dir << "\n";
  out << "init_locations = " << cfg.init_locations << "\n";
  out << "dump_motion_field = " << (cfg.dump_motion_field ? "true" : "false")
      << "\n";
  out << "\n[detector]\n";
  out << "block_size = " << cfg.detector.block_size << "\n";
  out << "initial_step = " << cfg.detector.initial_step << "\n";
  out << "stop_threshold = " << cfg.detector.stop_threshold << "\n";
  out << "min_region_blocks = " << cfg.detector.min_region_blocks << "\n";
  out << "temporal_window = " << cfg.detector.temporal_window << "\n";
  out << "\n[filter]\n";
  out << "alpha = " << format_fixed(cfg.ut.alpha) << "\n";
  out << "\n[tracker]\n";
  out << "dt = " << format_fixed(cfg.dt) << "\n";
  out << "process_q = " << format_fixed(cfg.process_q) << "\n";
  out << "meas_sigma = " << format_fixed(cfg.meas_sigma) << "\n";
  out << "gate_radius = " << format_fixed(cfg.gate_radius) << "\n";
  out << "ambiguity_margin = " << format_fixed(cfg.ambiguity_margin) << "\n";
  out << "init_pos_sigma = " << format_fixed(cfg.init_pos_sigma) << "\n";
  out << "init_vel_sigma = " << format_fixed(cfg.init_vel_sigma) << "\n";
  out << "init_acc_sigma = " << format_fixed(cfg.init_acc_sigma) << "\n";
  out << "\n[sim]\n";
  out << "speed = " << format_fixed(cfg.scenario.speed) << "\n";
  out << "straight1_frames = " << cfg.scenario.straight1_frames << "\n";
  out << "turn_frames = " << cfg.scenario.turn_frames << "\n";
  out << "turn_angle_deg = " << format_fixed(cfg.scenario.turn_angle_deg)
      << "\n";
  out << "straight2_frames = " << cfg.scenario.straight2_frames << "\n";
  out << "sigma_levels = "
      << detail::format_double_list(cfg.scenario.sigma_levels) << "\n";
  out << "trials = " << cfg.scenario.trials << "\n";
  out << "designated_trial = " << cfg.scenario.designated_trial << "\n";
  out << "ukf_q = " << format_fixed(cfg.scenario.ukf_q) << "\n";
  out << "kf_q = " << format_fixed(cfg.scenario.kf_q) << "\n";
  return out.str();
}

}  // namespace motkit
