#pragma once

#include <deque>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "motkit/config.hpp"
#include "motkit/csv.hpp"
#include "motkit/detector.hpp"
#include "motkit/errors.hpp"
#include "motkit/frame.hpp"
#include "motkit/sim.hpp"
#include "motkit/tracker.hpp"

namespace motkit {

// ============================================================================
// Workflows
// ============================================================================
//
// The four entry points behind the CLI subcommands. Each writes its outputs
// plus a resolved-config echo into cfg.out_dir and throws on failure; the
// CLI maps exception types to exit codes. They are plain functions so tests
// can drive them in-process.

namespace detail {

inline void ensure_out_dir(const RunConfig& cfg) {
  if (cfg.out_dir.empty()) throw ConfigError("output directory not set");
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + cfg.out_dir);
}

inline std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << text;
}

inline void write_config_echo(const RunConfig& cfg) {
  write_text(out_path(cfg, "config_resolved.cfg"), emit_config(cfg));
}

inline std::vector<Frame> load_frames(const RunConfig& cfg) {
  const std::vector<std::string> paths = list_pgm_files(cfg.input_dir);
  if (paths.size() < 2) {
    throw IoError("need at least two .pgm frames in " + cfg.input_dir);
  }
  std::vector<Frame> frames;
  frames.reserve(paths.size());
  for (const auto& p : paths) frames.push_back(load_pgm(p));
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].width != frames[0].width ||
        frames[i].height != frames[0].height) {
      throw IoError("frame size mismatch at " + paths[i]);
    }
  }
  return frames;
}

/// Compact label for a noise level used in output filenames: integral
/// levels print bare ("5"), fractional ones keep their digits ("2.5").
inline std::string sigma_label(double sigma) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", sigma);
  return std::string(buf);
}

inline Scenario scenario_from(const RunConfig& cfg) {
  Scenario s = cfg.scenario;
  s.seed = cfg.seed;
  s.ukf_alpha = cfg.ut.alpha;
  return s;
}

inline void write_designated_paths(const RunConfig& cfg,
                                   const std::vector<DesignatedPath>& paths,
                                   const std::string& prefix) {
  for (const auto& path : paths) {
    CsvWriter csv(out_path(cfg, prefix + sigma_label(path.sigma) + ".csv"),
                  {"frame", "true_x", "true_y", "meas_x", "meas_y", "ukf_x",
                   "ukf_y", "kf_x", "kf_y"});
    for (std::size_t f = 0; f < path.samples.size(); ++f) {
      const PathSample& p = path.samples[f];
      csv.write_row({std::to_string(f), format_fixed(p.true_x),
                     format_fixed(p.true_y), format_fixed(p.meas_x),
                     format_fixed(p.meas_y), format_fixed(p.ukf_x),
                     format_fixed(p.ukf_y), format_fixed(p.kf_x),
                     format_fixed(p.kf_y)});
    }
  }
}

}  // namespace detail

/// Detection over a frame directory: per-pair motion fields, region
/// extraction, temporal pruning. Writes detections.csv (surviving
/// detections), optionally motion_fields.csv (nonzero vectors), and the
/// config echo.
inline void run_detect(const RunConfig& cfg) {
  detail::ensure_out_dir(cfg);
  const std::vector<Frame> frames = detail::load_frames(cfg);

  CsvWriter det_csv(detail::out_path(cfg, "detections.csv"),
                    {"frame", "id", "centroid_x", "centroid_y", "mean_p",
                     "mean_q", "blocks", "min_x", "min_y", "max_x", "max_y"});
  std::unique_ptr<CsvWriter> field_csv;
  if (cfg.dump_motion_field) {
    field_csv = std::make_unique<CsvWriter>(
        detail::out_path(cfg, "motion_fields.csv"),
        std::vector<std::string>{"frame", "block_x", "block_y", "p", "q"});
  }

  std::deque<std::vector<Detection>> history;
  for (std::size_t f = 1; f < frames.size(); ++f) {
    MotionField field;
    std::vector<Detection> raw =
        detect_regions(frames[f], frames[f - 1], cfg.detector, &field);
    history.push_back(std::move(raw));
    while (static_cast<int>(history.size()) > cfg.detector.temporal_window) {
      history.pop_front();
    }
    const std::vector<Detection> kept = temporal_consistency_filter(
        history, cfg.detector.block_size, cfg.detector.temporal_window);

    for (std::size_t i = 0; i < kept.size(); ++i) {
      const Detection& d = kept[i];
      det_csv.write_row({std::to_string(f), std::to_string(i),
                         format_fixed(d.centroid_x), format_fixed(d.centroid_y),
                         format_fixed(d.mean_p), format_fixed(d.mean_q),
                         std::to_string(d.block_count), std::to_string(d.min_x),
                         std::to_string(d.min_y), std::to_string(d.max_x),
                         std::to_string(d.max_y)});
    }
    if (field_csv) {
      for (int by = 0; by < field.blocks_y; ++by) {
        for (int bx = 0; bx < field.blocks_x; ++bx) {
          const MotionVec& v = field.at(bx, by);
          if (v.is_zero()) continue;
          field_csv->write_row({std::to_string(f), std::to_string(bx),
                                std::to_string(by), std::to_string(v.p),
                                std::to_string(v.q)});
        }
      }
    }
  }
  detail::write_config_echo(cfg);
}

namespace detail {
/// Optional override file for track seeding: one "x y" (or "x,y") pair per
/// line, '#' comments allowed. Produces synthetic zero-motion detections.
inline std::vector<Detection> load_init_locations(const std::string& path,
                                                  const DetectorConfig& dc) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open init locations file: " + path);
  std::vector<Detection> detections;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    for (char& c : line) {
      if (c == ',') c = ' ';
    }
    std::istringstream ss(line);
    double x = 0.0, y = 0.0;
    if (!(ss >> x)) continue;  // blank line
    if (!(ss >> y)) {
      throw IoError(path + ":" + std::to_string(line_no) +
                    ": expected two coordinates");
    }
    Detection d;
    d.centroid_x = x;
    d.centroid_y = y;
    d.block_count = dc.min_region_blocks;
    d.min_x = static_cast<int>(x) - dc.block_size / 2;
    d.min_y = static_cast<int>(y) - dc.block_size / 2;
    d.max_x = d.min_x + dc.block_size;
    d.max_y = d.min_y + dc.block_size;
    detections.push_back(d);
  }
  return detections;
}
}  // namespace detail

/// Tracking over a frame directory: seeds from the first frame pair (or the
/// override file), then runs the occlusion-aware loop over the remaining
/// pairs. Writes tracks.csv, summary.txt, and the config echo.
inline void run_track(const RunConfig& cfg) {
  detail::ensure_out_dir(cfg);
  const std::vector<Frame> frames = detail::load_frames(cfg);

  std::vector<Detection> init;
  if (!cfg.init_locations.empty()) {
    init = detail::load_init_locations(cfg.init_locations, cfg.detector);
  } else {
    init = detect_regions(frames[1], frames[0], cfg.detector);
  }
  if (init.empty()) {
    throw EmptyDetectionsError(
        "no objects found in the first frame pair to initialize from");
  }

  Tracker tracker(init, cfg.tracker_config());
  for (std::size_t f = 2; f < frames.size(); ++f) {
    tracker.step(frames[f], frames[f - 1]);
  }

  CsvWriter csv(detail::out_path(cfg, "tracks.csv"),
                {"frame", "id", "status", "x", "y", "vx", "vy", "ax", "ay",
                 "detected", "det_x", "det_y"});
  for (const TrackRow& row : tracker.export_tracks()) {
    csv.write_row({std::to_string(row.frame), std::to_string(row.id),
                   to_string(row.status), format_fixed(row.state.x),
                   format_fixed(row.state.y), format_fixed(row.state.vx),
                   format_fixed(row.state.vy), format_fixed(row.state.ax),
                   format_fixed(row.state.ay),
                   row.has_detection ? "1" : "0",
                   format_fixed(row.detection_x),
                   format_fixed(row.detection_y)});
  }

  std::ostringstream summary;
  summary << "tracks: " << tracker.object_count() << "\n";
  summary << "frames processed: " << tracker.frame_index() << "\n";
  for (const Track& track : tracker.tracks()) {
    int tracked = 0, occluded = 0;
    for (const TrackRecord& rec : track.history) {
      (rec.status == TrackStatus::kTracked ? tracked : occluded) += 1;
    }
    const ObjectKinematics last =
        track.history.empty() ? ObjectKinematics{} : track.history.back().state;
    summary << "track " << track.id << ": tracked " << tracked << ", occluded "
            << occluded << ", final position (" << format_fixed(last.x) << ", "
            << format_fixed(last.y) << "), final velocity ("
            << format_fixed(last.vx) << ", " << format_fixed(last.vy) << ")\n";
  }
  detail::write_text(detail::out_path(cfg, "summary.txt"), summary.str());
  detail::write_config_echo(cfg);
}

/// Single designated-trial pass per noise level; emits the plotting CSVs
/// (truth, measurements, both filter estimates) and the config echo.
inline void run_simulate(const RunConfig& cfg) {
  detail::ensure_out_dir(cfg);
  Scenario s = detail::scenario_from(cfg);
  const std::vector<Eigen::Vector2d> truth = gen_turning_path(s);

  std::vector<DesignatedPath> paths;
  for (std::size_t level = 0; level < s.sigma_levels.size(); ++level) {
    const double sigma = s.sigma_levels[level];
    const std::uint64_t trial_seed =
        derive_seed(s.seed, static_cast<std::uint64_t>(level),
                    static_cast<std::uint64_t>(s.designated_trial));
    Rng rng(trial_seed);
    const std::vector<Eigen::Vector2d> meas = add_noise(truth, sigma, rng);
    const std::vector<Eigen::Vector2d> ukf_est = run_ukf_trial(meas, sigma, s);
    const std::vector<Eigen::Vector2d> kf_est = run_kf_trial(meas, sigma, s);

    DesignatedPath path;
    path.sigma = sigma;
    path.samples.resize(truth.size());
    for (std::size_t f = 0; f < truth.size(); ++f) {
      path.samples[f] =
          PathSample{truth[f].x(),   truth[f].y(),   meas[f].x(),
                     meas[f].y(),    ukf_est[f].x(), ukf_est[f].y(),
                     kf_est[f].x(),  kf_est[f].y()};
    }
    paths.push_back(std::move(path));
  }
  detail::write_designated_paths(cfg, paths, "sim_path_sigma");
  detail::write_config_echo(cfg);
}

/// Full Monte-Carlo comparison; emits the per-trial table, the aggregate
/// report, the designated-trial path CSVs, and the config echo.
inline void run_compare(const RunConfig& cfg) {
  detail::ensure_out_dir(cfg);
  const Scenario s = detail::scenario_from(cfg);
  const ScenarioResult result = run_comparison(s);

  CsvWriter csv(detail::out_path(cfg, "compare_results.csv"),
                {"filter", "sigma", "trial", "mse", "rmse"});
  for (const TrialResult& t : result.trials) {
    csv.write_row({t.filter, format_fixed(t.sigma), std::to_string(t.trial),
                   format_fixed(t.error.mse), format_fixed(t.error.rmse)});
  }

  std::ostringstream report;
  report << "filter comparison over " << s.trials
         << " trials per noise level\n";
  report << "base seed: " << s.seed
         << " (trial streams derived from seed, level index, trial index)\n";
  report << "path: " << s.straight1_frames << " straight + " << s.turn_frames
         << " turning (" << format_fixed(s.turn_angle_deg) << " deg) + "
         << s.straight2_frames << " straight frames at speed "
         << format_fixed(s.speed) << "\n\n";
  report << "filter  sigma      mean_rmse  std_err    mean_mse\n";
  for (const AggregateResult& a : result.aggregates) {
    char line[128];
    std::snprintf(line, sizeof(line), "%-7s %-10s %-10s %-10s %s\n",
                  a.filter.c_str(), format_fixed(a.sigma).c_str(),
                  format_fixed(a.mean_rmse).c_str(),
                  format_fixed(a.rmse_std_error).c_str(),
                  format_fixed(a.mean_mse).c_str());
    report << line;
  }
  report << "\n";
  for (std::size_t level = 0; level < s.sigma_levels.size(); ++level) {
    const AggregateResult& ukf = result.aggregates[level];
    const AggregateResult& kf =
        result.aggregates[level + s.sigma_levels.size()];
    report << "rmse ratio kf/ukf at sigma " << detail::sigma_label(kf.sigma)
           << ": " << format_fixed(kf.mean_rmse / ukf.mean_rmse) << "\n";
  }
  detail::write_text(detail::out_path(cfg, "compare_report.txt"),
                     report.str());
  detail::write_designated_paths(cfg, result.designated_paths,
                                 "compare_path_sigma");
  detail::write_config_echo(cfg);
}

}  // namespace motkit
