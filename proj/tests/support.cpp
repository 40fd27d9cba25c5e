#include "support.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mtest {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// filesystem / process
// ---------------------------------------------------------------------------

fs::path make_temp_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const fs::path base = fs::temp_directory_path() / "motkit_tests";
  const fs::path dir =
      base / (tag + "_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter.fetch_add(1)));
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_frames(const std::vector<Frame>& frames, const fs::path& dir) {
  fs::create_directories(dir);
  char name[32];
  for (std::size_t i = 0; i < frames.size(); ++i) {
    std::snprintf(name, sizeof(name), "frame_%03zu.pgm", i);
    motkit::save_pgm(frames[i], (dir / name).string());
  }
}

std::vector<std::string> list_files(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      names.push_back(entry.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

int run_cli(const std::vector<std::string>& args, std::string* output) {
  const fs::path capture = make_temp_dir("cli_capture") / "out.txt";
  std::string cmd;
#ifdef MOTKIT_CLI_PATH
  cmd = MOTKIT_CLI_PATH;
#else
  throw std::runtime_error("MOTKIT_CLI_PATH not defined for this test binary");
#endif
  for (const auto& a : args) {
    cmd += " '" + a + "'";
  }
  cmd += " > '" + capture.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  if (output) *output = slurp(capture.string());
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
}

// ---------------------------------------------------------------------------
// random linear algebra
// ---------------------------------------------------------------------------

Eigen::VectorXd random_vec(Rng& rng, int n, double scale) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = scale * rng.next_gaussian();
  return v;
}

Eigen::MatrixXd random_mat(Rng& rng, int rows, int cols, double scale) {
  Eigen::MatrixXd m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = scale * rng.next_gaussian();
  }
  return m;
}

Eigen::MatrixXd random_psd(Rng& rng, int n, double scale, double ridge) {
  const Eigen::MatrixXd a = random_mat(rng, n, n, scale);
  return a * a.transpose() + ridge * Eigen::MatrixXd::Identity(n, n);
}

// ---------------------------------------------------------------------------
// frames and scenes
// ---------------------------------------------------------------------------

Frame smooth_frame(std::uint64_t seed, int width, int height, int cell) {
  Rng rng(seed);
  const int gw = width / cell + 2;
  const int gh = height / cell + 2;
  std::vector<double> grid(static_cast<std::size_t>(gw) * gh);
  for (auto& v : grid) v = 255.0 * rng.next_uniform();

  Frame frame(width, height);
  for (int y = 0; y < height; ++y) {
    const int gy = y / cell;
    const double fy = static_cast<double>(y % cell) / cell;
    for (int x = 0; x < width; ++x) {
      const int gx = x / cell;
      const double fx = static_cast<double>(x % cell) / cell;
      const double v00 = grid[static_cast<std::size_t>(gy) * gw + gx];
      const double v10 = grid[static_cast<std::size_t>(gy) * gw + gx + 1];
      const double v01 = grid[static_cast<std::size_t>(gy + 1) * gw + gx];
      const double v11 = grid[static_cast<std::size_t>(gy + 1) * gw + gx + 1];
      const double top = v00 + (v10 - v00) * fx;
      const double bottom = v01 + (v11 - v01) * fx;
      const double v = top + (bottom - top) * fy;
      frame.at(x, y) = static_cast<std::uint8_t>(v + 0.5);
    }
  }
  return frame;
}

namespace {

// Canvas for displacement-recovery fixtures. Bright smooth bumps on a jittered
// grid over a near-uniform background give the match error a single basin
// around the true offset at every lag the search can encounter, so a
// coarse-to-fine descent and an exhaustive scan land on the same vector. The
// faint fine grain keeps the global minimum unique without adding enough
// energy to carve competing local minima.
Frame bump_canvas(std::uint64_t seed, int width, int height) {
  constexpr int kSpacing = 20;
  constexpr double kRadiusMin = 9.0;
  constexpr double kRadiusMax = 11.0;
  constexpr double kJitter = 0.10 * kSpacing;
  struct Bump {
    double cx, cy, radius, amplitude;
  };
  std::vector<Bump> bumps;
  const int ci_max = (width + kSpacing - 1) / kSpacing + 1;
  const int cj_max = (height + kSpacing - 1) / kSpacing + 1;
  for (int cj = -1; cj <= cj_max; ++cj) {
    for (int ci = -1; ci <= ci_max; ++ci) {
      Rng rng(motkit::derive_seed(seed, static_cast<std::uint64_t>(ci + 8) * 1000 +
                                    static_cast<std::uint64_t>(cj + 8)));
      const double jx = (rng.next_uniform() * 2.0 - 1.0) * kJitter;
      const double jy = (rng.next_uniform() * 2.0 - 1.0) * kJitter;
      const double r =
          kRadiusMin + rng.next_uniform() * (kRadiusMax - kRadiusMin);
      const double a = 90.0 + rng.next_uniform() * 60.0;
      bumps.push_back({(ci + 0.5) * kSpacing + jx, (cj + 0.5) * kSpacing + jy,
                       r, a});
    }
  }
  const Frame grain = smooth_frame(motkit::derive_seed(seed, 31337), width, height, 6);
  Frame canvas(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double v = 30.0 + (grain.at(x, y) - 127.5) / 127.5 * 6.0;
      for (const Bump& b : bumps) {
        const double dx = x - b.cx;
        const double dy = y - b.cy;
        const double d = std::sqrt(dx * dx + dy * dy);
        if (d < b.radius) {
          constexpr double kPi = 3.14159265358979323846;
          const double c = std::cos(kPi * d / (2.0 * b.radius));
          v += b.amplitude * c * c;
        }
      }
      canvas.at(x, y) = static_cast<std::uint8_t>(
          std::clamp(static_cast<int>(std::lround(v)), 0, 255));
    }
  }
  return canvas;
}

}  // namespace

std::pair<Frame, Frame> shifted_pair(std::uint64_t seed, int width, int height,
                                     int p, int q) {
  const int margin = 8;
  const Frame canvas = bump_canvas(seed, width + 2 * margin, height + 2 * margin);
  const auto cut = [&](int ox, int oy) {
    Frame f(width, height);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        f.at(x, y) = canvas.at(x + ox, y + oy);
      }
    }
    return f;
  };
  // content at reference position (a, b) reappears at (a + p, b + q)
  Frame reference = cut(margin, margin);
  Frame current = cut(margin - p, margin - q);
  return {std::move(reference), std::move(current)};
}

SearchResult full_search(const Frame& current, const Frame& reference,
                         int block_x, int block_y, int block_size,
                         int max_disp) {
  SearchResult best;
  bool any = false;
  for (int q = -max_disp; q <= max_disp; ++q) {
    for (int p = -max_disp; p <= max_disp; ++p) {
      const int rx = block_x - p;
      const int ry = block_y - q;
      if (rx < 0 || ry < 0 || rx + block_size > reference.width ||
          ry + block_size > reference.height) {
        continue;
      }
      long total = 0;
      for (int j = 0; j < block_size; ++j) {
        for (int i = 0; i < block_size; ++i) {
          total += std::abs(
              static_cast<int>(current.at(block_x + i, block_y + j)) -
              static_cast<int>(reference.at(rx + i, ry + j)));
        }
      }
      const long mag = static_cast<long>(p) * p + static_cast<long>(q) * q;
      const long best_mag = static_cast<long>(best.vec.p) * best.vec.p +
                            static_cast<long>(best.vec.q) * best.vec.q;
      const bool wins =
          !any || total < best.sad ||
          (total == best.sad &&
           (mag < best_mag ||
            (mag == best_mag &&
             (p < best.vec.p ||
              (p == best.vec.p && q < best.vec.q)))));
      if (wins) {
        best.sad = total;
        best.vec = MotionVec{p, q};
        any = true;
      }
    }
  }
  return best;
}

namespace {

/// Paints texture(0,0)-anchored pixels of `tex` into `frame` at (ox, oy),
/// clipped to the frame.
void blit(Frame& frame, const Frame& tex, int ox, int oy) {
  for (int j = 0; j < tex.height; ++j) {
    const int y = oy + j;
    if (y < 0 || y >= frame.height) continue;
    for (int i = 0; i < tex.width; ++i) {
      const int x = ox + i;
      if (x < 0 || x >= frame.width) continue;
      frame.at(x, y) = tex.at(i, j);
    }
  }
}

}  // namespace

MovingSquareScene make_moving_square_scene(std::uint64_t seed, int frame_count,
                                           bool with_sway) {
  MovingSquareScene scene;
  const Frame square_tex = smooth_frame(seed, MovingSquareScene::kSquare,
                                        MovingSquareScene::kSquare, 12);
  const Frame sway_tex = smooth_frame(seed + 1, 48, 32, 12);
  const int sway_x = 128;
  const int sway_y = 16;

  scene.frames.reserve(static_cast<std::size_t>(frame_count));
  for (int f = 0; f < frame_count; ++f) {
    Frame frame(MovingSquareScene::kWidth, MovingSquareScene::kHeight, 40);
    blit(frame, square_tex,
         MovingSquareScene::kStartX + MovingSquareScene::kSpeed * f,
         MovingSquareScene::kStartY);
    if (with_sway) {
      blit(frame, sway_tex, sway_x + (f % 2 ? 4 : 0), sway_y);
    }
    scene.frames.push_back(std::move(frame));
  }
  return scene;
}

CrossingScene make_crossing_scene(std::uint64_t seed, int frame_count) {
  CrossingScene scene;
  const Frame tex_a =
      smooth_frame(seed, CrossingScene::kSquare, CrossingScene::kSquare, 10);
  const Frame tex_b = smooth_frame(seed + 1, CrossingScene::kSquare,
                                   CrossingScene::kSquare, 10);
  scene.frames.reserve(static_cast<std::size_t>(frame_count));
  for (int f = 0; f < frame_count; ++f) {
    Frame frame(CrossingScene::kWidth, CrossingScene::kHeight, 50);
    blit(frame, tex_a, 16 + CrossingScene::kSpeed * f, 48);
    blit(frame, tex_b, 240 - CrossingScene::kSpeed * f, 56);
    scene.frames.push_back(std::move(frame));
  }
  return scene;
}

}  // namespace mtest
