#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "motkit/block_matching.hpp"
#include "motkit/frame.hpp"
#include "motkit/rng.hpp"

// Shared helpers for the test suites: seeded random linear-algebra inputs,
// synthetic frame scenes with known ground truth, an exhaustive block-match
// checker kept independent of the three-step search, and small process /
// filesystem utilities.

namespace mtest {

using motkit::Frame;
using motkit::MotionVec;
using motkit::Rng;

// ---------------------------------------------------------------------------
// filesystem / process
// ---------------------------------------------------------------------------

/// Fresh directory under the system temp root; unique per call.
std::filesystem::path make_temp_dir(const std::string& tag);

std::string slurp(const std::string& path);

/// Writes frames as frame_000.pgm, frame_001.pgm, ... into dir.
void write_frames(const std::vector<Frame>& frames,
                  const std::filesystem::path& dir);

/// All regular files directly inside dir, sorted by filename.
std::vector<std::string> list_files(const std::filesystem::path& dir);

/// Runs the CLI binary with the given arguments; returns the exit code and
/// captures combined stdout/stderr if output is non-null.
int run_cli(const std::vector<std::string>& args, std::string* output = nullptr);

// ---------------------------------------------------------------------------
// random linear algebra
// ---------------------------------------------------------------------------

Eigen::VectorXd random_vec(Rng& rng, int n, double scale = 1.0);

Eigen::MatrixXd random_mat(Rng& rng, int rows, int cols, double scale = 1.0);

/// Symmetric positive definite: A A^T + ridge I with random A.
Eigen::MatrixXd random_psd(Rng& rng, int n, double scale = 1.0,
                           double ridge = 1e-3);

// ---------------------------------------------------------------------------
// frames and scenes
// ---------------------------------------------------------------------------

/// Smooth random texture: bilinear interpolation of a coarse seeded value
/// grid. Smoothness gives block matching a single broad basin, the regime
/// coarse-to-fine search is designed for.
Frame smooth_frame(std::uint64_t seed, int width, int height, int cell = 24);

/// A (reference, current) pair whose entire content moves by exactly (p, q)
/// pixels from reference to current; both views are cut from one larger
/// textured canvas so no new content enters at the borders. The canvas is a
/// jittered grid of bright smooth bumps over faint fine grain, built so the
/// block match error has one basin per true offset and a unique minimum.
std::pair<Frame, Frame> shifted_pair(std::uint64_t seed, int width, int height,
                                     int p, int q);

struct SearchResult {
  MotionVec vec;
  long sad = 0;
};

/// Exhaustive displacement search over |p|,|q| <= max_disp with the same
/// tie-break convention as the production search (lower SAD, then smaller
/// magnitude, then lexicographic), written independently of it.
SearchResult full_search(const Frame& current, const Frame& reference,
                         int block_x, int block_y, int block_size,
                         int max_disp = 7);

/// One 32x32 textured square sliding right at 4 px/frame over a uniform
/// background, optionally joined by a 48x32 textured patch that oscillates
/// +-4 px horizontally with zero net displacement.
struct MovingSquareScene {
  static constexpr int kWidth = 192;
  static constexpr int kHeight = 96;
  static constexpr int kSquare = 32;
  static constexpr int kStartX = 16;
  static constexpr int kStartY = 32;
  static constexpr int kSpeed = 4;

  std::vector<Frame> frames;

  /// True center of the square in frame f.
  static Eigen::Vector2d center(int f) {
    return {kStartX + static_cast<double>(kSpeed) * f + kSquare / 2.0,
            kStartY + kSquare / 2.0};
  }
};

MovingSquareScene make_moving_square_scene(std::uint64_t seed, int frame_count,
                                           bool with_sway);

/// Two 32x32 textured squares passing through each other horizontally:
/// A starts left and moves (+6, 0), B starts right and moves (-6, 0), with
/// vertical centers 8 px apart so their silhouettes fuse into one moving
/// region around f = 14..23 and split again. Meant for 41-frame runs: by
/// f = 40 A reaches the right edge and B the left edge. B is drawn over A
/// where they intersect.
struct CrossingScene {
  static constexpr int kWidth = 288;
  static constexpr int kHeight = 128;
  static constexpr int kSquare = 32;
  static constexpr int kSpeed = 6;

  std::vector<Frame> frames;

  static Eigen::Vector2d center_a(int f) {
    return {16.0 + static_cast<double>(kSpeed) * f + kSquare / 2.0,
            48.0 + kSquare / 2.0};
  }
  static Eigen::Vector2d center_b(int f) {
    return {240.0 - static_cast<double>(kSpeed) * f + kSquare / 2.0,
            56.0 + kSquare / 2.0};
  }
};

CrossingScene make_crossing_scene(std::uint64_t seed, int frame_count);

}  // namespace mtest
