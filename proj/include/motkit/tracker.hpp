#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <deque>
#include <limits>
#include <string>
#include <vector>

#include "motkit/detector.hpp"
#include "motkit/errors.hpp"
#include "motkit/filters.hpp"
#include "motkit/motion_models.hpp"
#include "motkit/ut.hpp"

namespace motkit {

// ============================================================================
// Multi-object tracker
// ============================================================================
//
// A fixed set of M objects (decided at initialization, no birth/death) share
// one stacked 6M-state unscented filter. Every frame pair the tracker
// predicts all objects forward, looks for detections inside per-object
// windows around the predictions, associates greedily, and updates. Objects
// with no usable detection this frame are occluded: their slice of the
// Kalman gain is zeroed so their posterior is exactly the prediction, which
// carries them through overlaps until their measurement reappears.

enum class TrackStatus { kTracked, kOccluded };

inline const char* to_string(TrackStatus s) {
  return s == TrackStatus::kTracked ? "tracked" : "occluded";
}

struct TrackerConfig {
  DetectorConfig detector;
  UTConfig ut;
  double dt = 1.0;
  double process_q = 0.05;
  double meas_sigma = 2.0;
  double gate_radius = -1.0;       // < 0: 2 * block_size
  double ambiguity_margin = -1.0;  // < 0: block_size / 2
  double init_pos_sigma = -1.0;    // < 0: block_size
  double init_vel_sigma = 2.0;
  double init_acc_sigma = 1.0;

  double resolved_gate() const {
    return gate_radius >= 0.0 ? gate_radius : 2.0 * detector.block_size;
  }
  double resolved_margin() const {
    return ambiguity_margin >= 0.0 ? ambiguity_margin
                                   : detector.block_size / 2.0;
  }
  double resolved_pos_sigma() const {
    return init_pos_sigma >= 0.0 ? init_pos_sigma
                                 : static_cast<double>(detector.block_size);
  }
};

/// One per-frame entry of a track's history.
struct TrackRecord {
  int frame = 0;
  ObjectKinematics state;
  TrackStatus status = TrackStatus::kTracked;
  bool has_detection = false;
  double detection_x = 0.0;
  double detection_y = 0.0;
};

struct Track {
  int id = 0;
  TrackStatus status = TrackStatus::kTracked;
  std::vector<TrackRecord> history;
};

/// Flattened export row (frame-major, then track id).
struct TrackRow {
  int frame = 0;
  int id = 0;
  TrackStatus status = TrackStatus::kTracked;
  ObjectKinematics state;
  bool has_detection = false;
  double detection_x = 0.0;
  double detection_y = 0.0;
};

/// Greedy nearest-neighbor association. Repeatedly commits the globally
/// closest (track, detection) pair whose distance fits inside that track's
/// gate, until nothing admissible remains. Returns one detection index per
/// track, -1 for unassigned. Ties prefer the lower track index, then the
/// lower detection index.
inline std::vector<int> associate(
    const std::vector<Eigen::Vector2d>& predictions,
    const std::vector<Detection>& detections,
    const std::vector<double>& gates) {
  if (gates.size() != predictions.size()) {
    throw DimensionMismatchError("associate: one gate per prediction required");
  }
  std::vector<int> assignment(predictions.size(), -1);
  std::vector<char> detection_taken(detections.size(), 0);

  for (;;) {
    int best_track = -1;
    int best_det = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < predictions.size(); ++t) {
      if (assignment[t] != -1) continue;
      for (std::size_t d = 0; d < detections.size(); ++d) {
        if (detection_taken[d]) continue;
        const double dist =
            std::hypot(predictions[t].x() - detections[d].centroid_x,
                       predictions[t].y() - detections[d].centroid_y);
        if (dist > gates[t]) continue;
        if (dist < best_dist) {
          best_dist = dist;
          best_track = static_cast<int>(t);
          best_det = static_cast<int>(d);
        }
      }
    }
    if (best_track < 0) break;
    assignment[best_track] = best_det;
    detection_taken[best_det] = 1;
  }
  return assignment;
}

inline std::vector<int> associate(
    const std::vector<Eigen::Vector2d>& predictions,
    const std::vector<Detection>& detections, double gate_radius) {
  return associate(predictions, detections,
                   std::vector<double>(predictions.size(), gate_radius));
}

class Tracker {
 public:
  /// Seeds one track per detection, in detection order: position from the
  /// centroid, velocity from mean block motion / dt, acceleration zero.
  /// The stacked covariance is block-diagonal with the configured initial
  /// sigmas. Throws EmptyDetectionsError when there is nothing to seed from.
  Tracker(const std::vector<Detection>& detections,
          const TrackerConfig& config)
      : config_(config) {
    if (detections.empty()) {
      throw EmptyDetectionsError("tracker init needs at least one detection");
    }
    layout_.object_count = static_cast<int>(detections.size());
    layout_.dt = config_.dt;
    model_ = make_system_model(layout_);
    noise_.process_cov = build_process_noise(layout_, config_.process_q);
    noise_.measurement_cov =
        build_measurement_noise(layout_, config_.meas_sigma);
    weights_ = compute_weights(layout_.state_dim(), config_.ut);

    state_.mean.resize(layout_.state_dim());
    Eigen::VectorXd cov_diag(layout_.state_dim());
    const double sp = config_.resolved_pos_sigma();
    const double sv = config_.init_vel_sigma;
    const double sa = config_.init_acc_sigma;
    tracks_.reserve(detections.size());
    for (int i = 0; i < layout_.object_count; ++i) {
      const Detection& d = detections[static_cast<std::size_t>(i)];
      state_.mean.segment<6>(6 * i) << d.centroid_x, d.mean_p / config_.dt,
          0.0, d.centroid_y, d.mean_q / config_.dt, 0.0;
      for (int axis = 0; axis < 2; ++axis) {
        const int base = 6 * i + 3 * axis;
        cov_diag(base) = sp * sp;
        cov_diag(base + 1) = sv * sv;
        cov_diag(base + 2) = sa * sa;
      }
      tracks_.push_back(Track{i, TrackStatus::kTracked, {}});
    }
    state_.cov = cov_diag.asDiagonal();
  }

  int object_count() const { return layout_.object_count; }
  int frame_index() const { return frame_index_; }
  const GaussianState& state() const { return state_; }
  const std::vector<Track>& tracks() const { return tracks_; }

  /// Per-object gate: base radius widened by the predicted speed, so fast
  /// objects keep their detections inside the search window.
  std::vector<double> gate_radii(
      const std::vector<ObjectKinematics>& predicted) const {
    std::vector<double> gates(predicted.size());
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      const double speed =
          std::hypot(predicted[i].vx, predicted[i].vy) * config_.dt;
      gates[i] = config_.resolved_gate() + speed;
    }
    return gates;
  }

  /// Unscented time update of the stacked state; does not advance the
  /// tracker. step() performs the identical computation, so the positions
  /// returned here are the exact coast values of any object that goes
  /// unmatched on the next step.
  std::vector<ObjectKinematics> predict_all() const {
    return unpack_state(
        ukf_predict(state_, model_, noise_, weights_).mean);
  }

  /// One tracking cycle against a new frame pair. Returns the posterior
  /// per-object kinematics.
  std::vector<ObjectKinematics> step(const Frame& current,
                                     const Frame& reference) {
    ++frame_index_;
    const GaussianState predicted =
        ukf_predict(state_, model_, noise_, weights_);
    const std::vector<ObjectKinematics> pred_kin =
        unpack_state(predicted.mean);
    const std::vector<double> gates = gate_radii(pred_kin);

    // Motion search restricted to windows around the predictions: blocks
    // outside every object's window are treated as static.
    MotionField field = compute_motion_field(
        current, reference, config_.detector.block_size,
        config_.detector.tss_params());
    mask_outside_windows(field, pred_kin, gates);
    std::vector<Detection> detections =
        extract_objects(field, config_.detector.min_region_blocks);

    // A detection that several predictions claim at nearly the same distance
    // is likely a merged blob of overlapping objects; feeding it to any one
    // filter would corrupt that estimate, so it is withheld and the involved
    // objects coast this frame.
    std::vector<Detection> usable;
    usable.reserve(detections.size());
    for (const Detection& d : detections) {
      if (!is_ambiguous(d, pred_kin, gates)) usable.push_back(d);
    }

    std::vector<Eigen::Vector2d> pred_pos(pred_kin.size());
    for (std::size_t i = 0; i < pred_kin.size(); ++i) {
      pred_pos[i] = Eigen::Vector2d(pred_kin[i].x, pred_kin[i].y);
    }
    const std::vector<int> assignment = associate(pred_pos, usable, gates);

    state_ = masked_update(predicted, usable, assignment);

    const std::vector<ObjectKinematics> posterior = unpack_state(state_.mean);
    for (int i = 0; i < layout_.object_count; ++i) {
      Track& track = tracks_[static_cast<std::size_t>(i)];
      TrackRecord rec;
      rec.frame = frame_index_;
      rec.state = posterior[static_cast<std::size_t>(i)];
      rec.has_detection = assignment[static_cast<std::size_t>(i)] >= 0;
      rec.status = rec.has_detection ? TrackStatus::kTracked
                                     : TrackStatus::kOccluded;
      if (rec.has_detection) {
        const Detection& d =
            usable[static_cast<std::size_t>(assignment[i])];
        rec.detection_x = d.centroid_x;
        rec.detection_y = d.centroid_y;
      }
      track.status = rec.status;
      track.history.push_back(rec);
    }
    return posterior;
  }

  /// Flattened history, frame-major then id; one row per (step, track).
  std::vector<TrackRow> export_tracks() const {
    std::vector<TrackRow> rows;
    if (tracks_.empty()) return rows;
    const std::size_t steps = tracks_.front().history.size();
    rows.reserve(steps * tracks_.size());
    for (std::size_t s = 0; s < steps; ++s) {
      for (const Track& track : tracks_) {
        const TrackRecord& rec = track.history[s];
        rows.push_back(TrackRow{rec.frame, track.id, rec.status, rec.state,
                                rec.has_detection, rec.detection_x,
                                rec.detection_y});
      }
    }
    return rows;
  }

 private:
  void mask_outside_windows(MotionField& field,
                            const std::vector<ObjectKinematics>& predicted,
                            const std::vector<double>& gates) const {
    const int bs = field.block_size;
    for (int by = 0; by < field.blocks_y; ++by) {
      for (int bx = 0; bx < field.blocks_x; ++bx) {
        const double cx = bx * bs + bs / 2.0;
        const double cy = by * bs + bs / 2.0;
        bool inside = false;
        for (std::size_t i = 0; i < predicted.size() && !inside; ++i) {
          inside = std::abs(cx - predicted[i].x) <= gates[i] &&
                   std::abs(cy - predicted[i].y) <= gates[i];
        }
        if (!inside) field.at(bx, by) = MotionVec{0, 0};
      }
    }
  }

  bool is_ambiguous(const Detection& d,
                    const std::vector<ObjectKinematics>& predicted,
                    const std::vector<double>& gates) const {
    double first = std::numeric_limits<double>::infinity();
    double second = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      const double dist = std::hypot(predicted[i].x - d.centroid_x,
                                     predicted[i].y - d.centroid_y);
      if (dist > gates[i]) continue;
      if (dist < first) {
        second = first;
        first = dist;
      } else if (dist < second) {
        second = dist;
      }
    }
    return std::isfinite(second) && (second - first) < config_.resolved_margin();
  }

  /// Measurement update with the gain slices of unassigned objects zeroed:
  /// their posterior mean and covariance equal the prediction bit for bit,
  /// and their placeholder measurement rows cannot leak into anyone else.
  GaussianState masked_update(const GaussianState& predicted,
                              const std::vector<Detection>& detections,
                              const std::vector<int>& assignment) {
    const UkfInnovationTerms terms =
        ukf_innovation(predicted, model_, noise_, weights_);
    require_invertible_innovation(terms.innovation_cov);
    Eigen::MatrixXd gain = terms.innovation_cov.ldlt()
                               .solve(terms.cross_cov.transpose())
                               .transpose();

    Eigen::VectorXd measurement = terms.predicted_measurement;
    for (int i = 0; i < layout_.object_count; ++i) {
      if (assignment[static_cast<std::size_t>(i)] >= 0) {
        const Detection& d =
            detections[static_cast<std::size_t>(assignment[i])];
        measurement(2 * i) = d.centroid_x;
        measurement(2 * i + 1) = d.centroid_y;
      } else {
        gain.middleRows(6 * i, 6).setZero();
        gain.middleCols(2 * i, 2).setZero();
      }
    }
    return apply_gain(predicted, terms, gain, measurement);
  }

  TrackerConfig config_;
  MultiObjectLayout layout_;
  SystemModel model_;
  NoiseModel noise_;
  UTWeights weights_;
  GaussianState state_;
  std::vector<Track> tracks_;
  int frame_index_ = 1;  // initialized from the first frame pair
};

}  // namespace motkit
