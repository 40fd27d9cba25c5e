#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <vector>

#include "motkit/block_matching.hpp"
#include "motkit/errors.hpp"

namespace motkit {

// ============================================================================
// Moving-object detection
// ============================================================================
//
// Blocks with nonzero motion vectors are grouped into 8-connected regions;
// each region big enough to matter becomes one Detection. A temporal pass
// then keeps only detections that belong to a chain of mutually close
// detections whose accumulated motion over a short window is substantial,
// which removes flicker and oscillating background (foliage-style) regions
// while keeping genuinely translating objects.

struct DetectorConfig {
  int block_size = 16;
  int initial_step = 4;
  long stop_threshold = -1;  // < 0: use 2 * block_size^2
  int min_region_blocks = 3;
  int temporal_window = 3;

  long resolved_threshold() const {
    return stop_threshold >= 0
               ? stop_threshold
               : 2L * static_cast<long>(block_size) * block_size;
  }

  TssParams tss_params() const {
    TssParams p;
    p.initial_step = initial_step;
    p.stop_threshold = resolved_threshold();
    return p;
  }
};

/// One connected moving region of a frame pair.
struct Detection {
  double centroid_x = 0.0;   // pixel coordinates, mean of member block centers
  double centroid_y = 0.0;
  double mean_p = 0.0;       // mean member motion vector, px/frame-pair
  double mean_q = 0.0;
  int block_count = 0;
  int min_x = 0, min_y = 0;  // pixel bounding box, half-open on max side
  int max_x = 0, max_y = 0;
};

/// 8-connected components of moving blocks, in row-major discovery order
/// (top-left block of a region first). Regions with fewer than
/// min_region_blocks members are discarded.
inline std::vector<Detection> extract_objects(const MotionField& field,
                                              int min_region_blocks) {
  std::vector<Detection> detections;
  std::vector<std::uint8_t> visited(field.vectors.size(), 0);
  std::vector<int> stack;

  for (int by = 0; by < field.blocks_y; ++by) {
    for (int bx = 0; bx < field.blocks_x; ++bx) {
      const int start = by * field.blocks_x + bx;
      if (visited[start] || field.vectors[start].is_zero()) continue;

      stack.assign(1, start);
      visited[start] = 1;
      double sum_cx = 0.0, sum_cy = 0.0, sum_p = 0.0, sum_q = 0.0;
      int count = 0;
      int min_bx = bx, max_bx = bx, min_by = by, max_by = by;
      while (!stack.empty()) {
        const int idx = stack.back();
        stack.pop_back();
        const int cx = idx % field.blocks_x;
        const int cy = idx / field.blocks_x;
        const MotionVec& v = field.vectors[idx];
        sum_cx += cx * field.block_size + field.block_size / 2.0;
        sum_cy += cy * field.block_size + field.block_size / 2.0;
        sum_p += v.p;
        sum_q += v.q;
        ++count;
        min_bx = std::min(min_bx, cx);
        max_bx = std::max(max_bx, cx);
        min_by = std::min(min_by, cy);
        max_by = std::max(max_by, cy);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const int nx = cx + dx;
            const int ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= field.blocks_x ||
                ny >= field.blocks_y) {
              continue;
            }
            const int nidx = ny * field.blocks_x + nx;
            if (!visited[nidx] && !field.vectors[nidx].is_zero()) {
              visited[nidx] = 1;
              stack.push_back(nidx);
            }
          }
        }
      }
      if (count < min_region_blocks) continue;

      Detection d;
      d.block_count = count;
      d.centroid_x = sum_cx / count;
      d.centroid_y = sum_cy / count;
      d.mean_p = sum_p / count;
      d.mean_q = sum_q / count;
      d.min_x = min_bx * field.block_size;
      d.min_y = min_by * field.block_size;
      d.max_x = (max_bx + 1) * field.block_size;
      d.max_y = (max_by + 1) * field.block_size;
      detections.push_back(d);
    }
  }
  return detections;
}

namespace detail {
inline double centroid_distance(const Detection& a, const Detection& b) {
  return std::hypot(a.centroid_x - b.centroid_x, a.centroid_y - b.centroid_y);
}
}  // namespace detail

/// Temporal consistency filter over per-frame-pair detection lists.
///
/// `history` holds the most recent lists, oldest first, with the list under
/// test last. A detection in the latest list survives if it heads a chain of
/// detections, one per list, each within block_size of its successor's
/// centroid, covering the full window, and the chain's summed mean motion
/// has magnitude of at least block_size / 2. The motion sum uses the block
/// matcher's sub-block vectors, so a slow steady mover integrates past the
/// bar while an oscillating region cancels itself out.
///
/// With fewer than `window` lists there is nothing to test against; the
/// latest list passes through unchanged.
inline std::vector<Detection> temporal_consistency_filter(
    const std::deque<std::vector<Detection>>& history, int block_size,
    int window) {
  if (history.empty()) return {};
  const std::vector<Detection>& latest = history.back();
  if (static_cast<int>(history.size()) < window || window <= 1) {
    return latest;
  }

  std::vector<Detection> kept;
  for (const Detection& d : latest) {
    double sum_p = d.mean_p;
    double sum_q = d.mean_q;
    const Detection* link = &d;
    bool chain_ok = true;
    // walk back window-1 older lists, nearest-centroid linking
    for (int back = 1; back < window; ++back) {
      const auto& older = history[history.size() - 1 - back];
      const Detection* best = nullptr;
      double best_dist = 0.0;
      for (const Detection& cand : older) {
        const double dist = detail::centroid_distance(*link, cand);
        if (!best || dist < best_dist) {
          best = &cand;
          best_dist = dist;
        }
      }
      if (!best || best_dist > block_size) {
        chain_ok = false;
        break;
      }
      link = best;
      sum_p += best->mean_p;
      sum_q += best->mean_q;
    }
    if (!chain_ok) continue;
    if (std::hypot(sum_p, sum_q) >= block_size / 2.0) {
      kept.push_back(d);
    }
  }
  return kept;
}

/// Convenience: motion field + region extraction for one frame pair.
inline std::vector<Detection> detect_regions(const Frame& current,
                                             const Frame& reference,
                                             const DetectorConfig& config,
                                             MotionField* field_out = nullptr) {
  MotionField field = compute_motion_field(current, reference,
                                           config.block_size,
                                           config.tss_params());
  std::vector<Detection> detections =
      extract_objects(field, config.min_region_blocks);
  if (field_out) *field_out = std::move(field);
  return detections;
}

}  // namespace motkit
