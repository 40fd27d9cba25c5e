#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "motkit/errors.hpp"
#include "motkit/frame.hpp"

namespace motkit {

// ============================================================================
// Block matching (three-step search)
// ============================================================================

/// Integer pixel displacement of a block between two frames, in forward scene
/// order: a block whose content moved right by 4 px carries vec (p=4, q=0).
struct MotionVec {
  int p = 0;
  int q = 0;

  bool is_zero() const { return p == 0 && q == 0; }
  bool operator==(const MotionVec&) const = default;
};

struct TssParams {
  int initial_step = 4;       // power of two
  long stop_threshold = 512;  // early-exit SAD bound, default 2 * 16^2
  int max_displacement = 7;   // candidate bound per axis
};

struct TssResult {
  MotionVec vec;
  long sad = 0;
  int evaluations = 0;
};

/// Sum of absolute differences between the block of `current` at
/// (block_x, block_y) and the block of `reference` displaced by (p, q):
///   sum |cur(x+i, y+j) - ref(x+p+i, y+q+j)|.
/// Exact integer arithmetic; both windows must lie inside their frames.
inline long sad(const Frame& current, const Frame& reference, int block_x,
                int block_y, int block_size, int p, int q) {
  if (block_x < 0 || block_y < 0 || block_x + block_size > current.width ||
      block_y + block_size > current.height) {
    throw OutOfBoundsError("sad: current-frame block escapes the frame");
  }
  const int rx = block_x + p;
  const int ry = block_y + q;
  if (rx < 0 || ry < 0 || rx + block_size > reference.width ||
      ry + block_size > reference.height) {
    throw OutOfBoundsError("sad: displaced reference block escapes the frame");
  }
  long total = 0;
  for (int j = 0; j < block_size; ++j) {
    const std::uint8_t* cur = &current.pixels[static_cast<std::size_t>(
        block_y + j) * current.width + block_x];
    const std::uint8_t* ref = &reference.pixels[static_cast<std::size_t>(
        ry + j) * reference.width + rx];
    for (int i = 0; i < block_size; ++i) {
      total += std::abs(static_cast<int>(cur[i]) - static_cast<int>(ref[i]));
    }
  }
  return total;
}

namespace detail {
/// Candidate ordering: lower SAD wins; ties prefer the smaller displacement
/// magnitude, then lexicographic (p, q). Shared by the three-step search and
/// any exhaustive checker so both resolve ties identically.
inline bool better_candidate(long sad_a, const MotionVec& a, long sad_b,
                             const MotionVec& b) {
  if (sad_a != sad_b) return sad_a < sad_b;
  const long mag_a = static_cast<long>(a.p) * a.p + static_cast<long>(a.q) * a.q;
  const long mag_b = static_cast<long>(b.p) * b.p + static_cast<long>(b.q) * b.q;
  if (mag_a != mag_b) return mag_a < mag_b;
  if (a.p != b.p) return a.p < b.p;
  return a.q < b.q;
}
}  // namespace detail

/// Three-step search for the forward motion of one block.
///
/// A candidate vector v means the block content at (block_x, block_y) in
/// `current` sat at (block_x - v.p, block_y - v.q) in `reference`, so v is
/// scored as sad(current, reference, block, -v.p, -v.q). Candidates whose
/// reference window leaves the frame, or whose components exceed
/// max_displacement, are skipped as infinitely bad.
///
/// Step 1 scores the zero vector; at or below stop_threshold the block is
/// declared unmoved immediately. Otherwise the eight neighbors at the current
/// step size join, the best becomes the new center, the step halves, and the
/// eight-neighbor round repeats down to step 1. At most 25 SAD evaluations
/// for the default initial step of 4.
inline TssResult tss_search(const Frame& current, const Frame& reference,
                            int block_x, int block_y, int block_size,
                            const TssParams& params = {}) {
  if (params.initial_step < 1 ||
      (params.initial_step & (params.initial_step - 1)) != 0) {
    throw ConfigError("tss: initial step must be a power of two, got " +
                      std::to_string(params.initial_step));
  }
  if (block_x < 0 || block_y < 0 || block_x + block_size > current.width ||
      block_y + block_size > current.height) {
    throw OutOfBoundsError("tss: block escapes the frame");
  }

  TssResult result;
  const auto try_candidate = [&](const MotionVec& v, bool& any) {
    if (std::abs(v.p) > params.max_displacement ||
        std::abs(v.q) > params.max_displacement) {
      return;
    }
    const int rx = block_x - v.p;
    const int ry = block_y - v.q;
    if (rx < 0 || ry < 0 || rx + block_size > reference.width ||
        ry + block_size > reference.height) {
      return;
    }
    const long score =
        sad(current, reference, block_x, block_y, block_size, -v.p, -v.q);
    ++result.evaluations;
    if (!any || detail::better_candidate(score, v, result.sad, result.vec)) {
      result.sad = score;
      result.vec = v;
      any = true;
    }
  };

  bool any = false;
  try_candidate(MotionVec{0, 0}, any);
  if (any && result.sad <= params.stop_threshold) {
    return result;  // stationary block, done after one evaluation
  }

  for (int step = params.initial_step; step >= 1; step /= 2) {
    const MotionVec center = result.vec;
    for (int dq = -1; dq <= 1; ++dq) {
      for (int dp = -1; dp <= 1; ++dp) {
        if (dp == 0 && dq == 0) continue;
        try_candidate(MotionVec{center.p + dp * step, center.q + dq * step},
                      any);
      }
    }
  }
  return result;
}

/// Per-block motion vectors for a frame pair, blocks tiled from the top-left
/// corner; the partial strips at the right/bottom edges are not searched.
struct MotionField {
  int blocks_x = 0;
  int blocks_y = 0;
  int block_size = 0;
  std::vector<MotionVec> vectors;  // row-major, blocks_y rows

  const MotionVec& at(int bx, int by) const {
    return vectors[static_cast<std::size_t>(by) * blocks_x + bx];
  }
  MotionVec& at(int bx, int by) {
    return vectors[static_cast<std::size_t>(by) * blocks_x + bx];
  }
};

inline MotionField compute_motion_field(const Frame& current,
                                        const Frame& reference, int block_size,
                                        const TssParams& params = {}) {
  if (current.width != reference.width ||
      current.height != reference.height) {
    throw DimensionMismatchError("motion field: frame sizes differ");
  }
  if (block_size < 1 || current.width < block_size ||
      current.height < block_size) {
    throw DimensionMismatchError("motion field: frame smaller than one block");
  }
  MotionField field;
  field.block_size = block_size;
  field.blocks_x = current.width / block_size;
  field.blocks_y = current.height / block_size;
  field.vectors.resize(static_cast<std::size_t>(field.blocks_x) *
                       field.blocks_y);
  for (int by = 0; by < field.blocks_y; ++by) {
    for (int bx = 0; bx < field.blocks_x; ++bx) {
      field.at(bx, by) = tss_search(current, reference, bx * block_size,
                                    by * block_size, block_size, params)
                             .vec;
    }
  }
  return field;
}

}  // namespace motkit
