#include "motkit/block_matching.hpp"

#include <gtest/gtest.h>

#include "support.hpp"

using namespace motkit;

namespace {

Frame uniform_frame(int w, int h, std::uint8_t value) {
  return Frame(w, h, value);
}

}  // namespace

// ---------------------------------------------------------------------------
// sad
// ---------------------------------------------------------------------------

TEST(Sad, IdenticalBlocksScoreZero) {
  const Frame f = mtest::smooth_frame(1, 64, 64);
  EXPECT_EQ(sad(f, f, 16, 16, 16, 0, 0), 0);
}

TEST(Sad, SinglePixelDifference) {
  Frame a = uniform_frame(32, 32, 100);
  Frame b = a;
  b.at(10, 12) = 137;  // differs by 37
  EXPECT_EQ(sad(a, b, 0, 0, 32, 0, 0), 37);
}

TEST(Sad, TwoByTwoHandCase) {
  Frame cur(2, 2);
  cur.at(0, 0) = 1;
  cur.at(1, 0) = 2;
  cur.at(0, 1) = 3;
  cur.at(1, 1) = 4;
  Frame ref = cur;
  ref.at(1, 1) = 5;
  EXPECT_EQ(sad(cur, ref, 0, 0, 2, 0, 0), 1);
}

TEST(Sad, DisplacementIndexesReferenceWindow) {
  // reference content one pixel right of the current block matches at p = 1
  Frame ref(32, 16, 0);
  Frame cur(32, 16, 0);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      cur.at(x, y) = static_cast<std::uint8_t>(10 + x + y);
      ref.at(x + 1, y) = static_cast<std::uint8_t>(10 + x + y);
    }
  }
  EXPECT_EQ(sad(cur, ref, 0, 0, 8, 1, 0), 0);
  EXPECT_GT(sad(cur, ref, 0, 0, 8, 0, 0), 0);
}

TEST(Sad, OutOfBoundsThrows) {
  const Frame f = uniform_frame(32, 32, 0);
  EXPECT_THROW(sad(f, f, 20, 0, 16, 0, 0), OutOfBoundsError);
  EXPECT_THROW(sad(f, f, 0, 0, 16, -1, 0), OutOfBoundsError);
  EXPECT_THROW(sad(f, f, 0, 0, 16, 17, 0), OutOfBoundsError);
}

// ---------------------------------------------------------------------------
// three-step search
// ---------------------------------------------------------------------------

TEST(Tss, StaticBlockStopsImmediately) {
  const Frame f = mtest::smooth_frame(2, 96, 96);
  const TssResult r = tss_search(f, f, 32, 32, 16);
  EXPECT_EQ(r.vec, (MotionVec{0, 0}));
  EXPECT_EQ(r.sad, 0);
  EXPECT_EQ(r.evaluations, 1);  // early exit on the zero-vector check
}

TEST(Tss, FindsForwardShift) {
  // whole frame content moves by (3, 2); the search reports exactly that
  const auto [ref, cur] = mtest::shifted_pair(3, 96, 96, 3, 2);
  const TssResult r = tss_search(cur, ref, 32, 32, 16);
  EXPECT_EQ(r.vec.p, 3);
  EXPECT_EQ(r.vec.q, 2);
  EXPECT_EQ(r.sad, 0);
}

TEST(Tss, FindsExtremeAndNegativeShifts) {
  for (const auto [p, q] : {std::pair{-5, 7}, {7, -7}, {-7, -7}, {4, 0}}) {
    const auto [ref, cur] = mtest::shifted_pair(17, 96, 96, p, q);
    const TssResult r = tss_search(cur, ref, 32, 32, 16);
    EXPECT_EQ(r.vec.p, p) << "shift (" << p << "," << q << ")";
    EXPECT_EQ(r.vec.q, q) << "shift (" << p << "," << q << ")";
  }
}

TEST(Tss, EvaluationBudget) {
  const auto [ref, cur] = mtest::shifted_pair(5, 96, 96, 6, -3);
  const TssResult r = tss_search(cur, ref, 32, 32, 16);
  EXPECT_LE(r.evaluations, 25);  // 1 + 3 rounds of 8
}

TEST(Tss, NeverWorseThanZeroVector) {
  // also holds on unstructured noise where the descent can only do so-so
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    Rng rng(seed);
    Frame a(64, 64), b(64, 64);
    for (auto& px : a.pixels) px = static_cast<std::uint8_t>(rng.next_int(0, 255));
    for (auto& px : b.pixels) px = static_cast<std::uint8_t>(rng.next_int(0, 255));
    const TssResult r = tss_search(b, a, 16, 16, 16);
    EXPECT_LE(r.sad, sad(b, a, 16, 16, 16, 0, 0));
  }
}

TEST(Tss, AgreesWithExhaustiveSearchOnSmoothShifts) {
  // small-scale rehearsal of the exhaustive-oracle comparison
  for (std::uint64_t seed = 40; seed < 45; ++seed) {
    for (const auto [p, q] : {std::pair{2, -6}, {5, 5}, {-7, 1}, {0, 3}}) {
      const auto [ref, cur] = mtest::shifted_pair(seed, 96, 96, p, q);
      for (int bx : {16, 48}) {
        for (int by : {16, 48}) {
          const TssResult tss = tss_search(cur, ref, bx, by, 16);
          const mtest::SearchResult full = mtest::full_search(cur, ref, bx, by, 16);
          EXPECT_EQ(tss.vec, full.vec)
              << "seed " << seed << " shift (" << p << "," << q << ") block ("
              << bx << "," << by << ")";
        }
      }
    }
  }
}

TEST(Tss, RejectsBadStep) {
  const Frame f = uniform_frame(32, 32, 0);
  TssParams params;
  params.initial_step = 3;
  EXPECT_THROW(tss_search(f, f, 0, 0, 16, params), ConfigError);
  params.initial_step = 0;
  EXPECT_THROW(tss_search(f, f, 0, 0, 16, params), ConfigError);
}

TEST(Tss, BlockOutsideFrameThrows) {
  const Frame f = uniform_frame(32, 32, 0);
  EXPECT_THROW(tss_search(f, f, 24, 0, 16), OutOfBoundsError);
}

// ---------------------------------------------------------------------------
// motion field
// ---------------------------------------------------------------------------

TEST(MotionField, IdenticalFramesAreAllZero) {
  const Frame f = mtest::smooth_frame(9, 128, 96);
  const MotionField field = compute_motion_field(f, f, 16);
  EXPECT_EQ(field.blocks_x, 8);
  EXPECT_EQ(field.blocks_y, 6);
  for (const MotionVec& v : field.vectors) {
    EXPECT_TRUE(v.is_zero());
  }
}

TEST(MotionField, GlobalShiftFillsInteriorUniformly) {
  const auto [ref, cur] = mtest::shifted_pair(21, 128, 96, 4, -3);
  const MotionField field = compute_motion_field(cur, ref, 16);
  // interior blocks (one block in from every edge) all see the global motion
  for (int by = 1; by < field.blocks_y - 1; ++by) {
    for (int bx = 1; bx < field.blocks_x - 1; ++bx) {
      EXPECT_EQ(field.at(bx, by), (MotionVec{4, -3}))
          << "block (" << bx << "," << by << ")";
    }
  }
}

TEST(MotionField, MovingSquareLightsUpOnlyNearTheSquare) {
  const mtest::MovingSquareScene scene = mtest::make_moving_square_scene(7, 2, false);
  const MotionField field =
      compute_motion_field(scene.frames[1], scene.frames[0], 16);
  // the square starts at x=16..48 and moved to 20..52: motion confined to
  // block columns 1..3, rows 2..3; far blocks stay silent
  int nonzero = 0;
  for (int by = 0; by < field.blocks_y; ++by) {
    for (int bx = 0; bx < field.blocks_x; ++bx) {
      if (!field.at(bx, by).is_zero()) {
        ++nonzero;
        EXPECT_GE(bx, 1);
        EXPECT_LE(bx, 3);
        EXPECT_GE(by, 2);
        EXPECT_LE(by, 3);
        EXPECT_EQ(field.at(bx, by).p, 4);
        EXPECT_EQ(field.at(bx, by).q, 0);
      }
    }
  }
  EXPECT_GE(nonzero, 3);
}

TEST(MotionField, SizeMismatchThrows) {
  EXPECT_THROW(
      compute_motion_field(uniform_frame(64, 64, 0), uniform_frame(64, 48, 0), 16),
      DimensionMismatchError);
  EXPECT_THROW(
      compute_motion_field(uniform_frame(8, 8, 0), uniform_frame(8, 8, 0), 16),
      DimensionMismatchError);
}
