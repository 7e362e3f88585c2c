#include <gtest/gtest.h>

#include "ctmap/encoder.hpp"
#include "ctmap/harness.hpp"
#include "support/checks.hpp"
#include "support/oracles.hpp"

namespace ctmap {
namespace {

using oracle::rectangle;

TextAnnotation ann(Polygon p, int id, bool ignore = false) { return TextAnnotation{std::move(p), ignore, id, {}}; }

TEST(GenerateLabels, EmptySceneIsAllBackground) {
  const LabelBundle b = generate_labels({}, 16, 20);
  EXPECT_EQ(count_set(b.kernel_map), 0u);
  EXPECT_EQ(count_set(b.training_mask), b.training_mask.size());
  for (const auto& s : b.shift_field.cells()) EXPECT_EQ(s, (Shift{0, 0}));
  EXPECT_TRUE(b.instances.empty());
}

TEST(GenerateLabels, RectangleShiftsLandOnItsReferenceRing) {
  const LabelBundle b = generate_labels({ann(rectangle(10, 20, 50, 40), 0)}, 64, 64);
  const BitMask ring = oracle::reference_ring(b, 1);
  int checked = 0;
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      if (b.instance_id(y, x) != 1 || b.kernel_id(y, x) != 0) continue;
      const PixelTarget t = shift_target(y, x, b.shift_field(y, x));
      ASSERT_TRUE(ring.contains(t.y, t.x));
      EXPECT_TRUE(ring(t.y, t.x));
      EXPECT_TRUE(b.reference_mask(t.y, t.x));
      const auto n = oracle::nearest_reference(ring, y, x);
      EXPECT_EQ(1LL * (t.y - y) * (t.y - y) + 1LL * (t.x - x) * (t.x - x), n.dist_sq);
      ++checked;
    }
  }
  EXPECT_GT(checked, 300);
}

TEST(GenerateLabels, KernelIsRasterizedInsetWithinInstance) {
  const Polygon p = rectangle(10, 20, 50, 40);
  const LabelBundle b = generate_labels({ann(p, 0)}, 64, 64);
  const auto shrunk = shrink_polygon(p, 0.7);
  ASSERT_TRUE(shrunk);
  EXPECT_EQ(b.kernel_map, oracle::rasterize(*shrunk, 64, 64));
  EXPECT_EQ(oracle::label_mask(b.instance_id, 1), oracle::rasterize(p, 64, 64));
  for (std::size_t i = 0; i < b.kernel_map.size(); ++i) {
    if (b.kernel_map[i]) EXPECT_EQ(b.instance_id.labels[i], 1);
    EXPECT_EQ(b.kernel_id.labels[i], b.kernel_map[i] ? 1 : 0);
  }
}

TEST(GenerateLabels, SmallerInstanceWinsOverlap) {
  // Areas 800 and 200.
  const LabelBundle b = generate_labels({ann(rectangle(0, 0, 40, 20), 0), ann(rectangle(30, 10, 50, 20), 1)}, 32, 64);
  EXPECT_EQ(b.instance_id(15, 35), 2);
  EXPECT_EQ(b.instance_id(5, 35), 1);
  EXPECT_EQ(b.instance_id(15, 45), 2);
  // Listing order does not matter.
  const LabelBundle swapped =
      generate_labels({ann(rectangle(30, 10, 50, 20), 0), ann(rectangle(0, 0, 40, 20), 1)}, 32, 64);
  EXPECT_EQ(swapped.instance_id(15, 35), 1);
}

TEST(GenerateLabels, TrainingMaskExcludesRingsAndIgnoredRegions) {
  const Polygon kept = rectangle(4, 4, 40, 24);
  const Polygon ignored = rectangle(44, 4, 60, 24);
  const LabelBundle b = generate_labels({ann(kept, 0), ann(ignored, 1, true)}, 32, 64);
  const BitMask ig = oracle::rasterize(ignored, 32, 64);
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 64; ++x) {
      const bool ring = b.instance_id(y, x) == 1 && b.kernel_id(y, x) == 0;
      const bool expected = !(ring || ig(y, x));
      EXPECT_EQ(b.training_mask(y, x) != 0, expected) << y << "," << x;
      if (ig(y, x)) {
        EXPECT_EQ(b.kernel_map(y, x), 0);
        EXPECT_EQ(b.shift_field(y, x), (Shift{0, 0}));
      }
    }
  }
  EXPECT_TRUE(b.instances[1].ignore);
  EXPECT_FALSE(b.supervised(2));
}

TEST(GenerateLabels, VanishedKernelIsMaskedNotAnError) {
  // Covers rows 5 and 6, but the inset band y in [5.57, 6.33] holds no pixel center.
  const Polygon thin = rectangle(5, 5.2, 45, 6.7);
  const LabelBundle b = generate_labels({ann(thin, 0)}, 16, 50);
  ASSERT_EQ(b.instances.size(), 1u);
  EXPECT_FALSE(b.instances[0].has_kernel);
  EXPECT_EQ(count_set(b.kernel_map), 0u);
  const BitMask t = oracle::rasterize(thin, 16, 50);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i]) EXPECT_EQ(b.training_mask[i], 0);
  }
}

TEST(GenerateLabels, InvalidPolygonThrows) {
  const Polygon bowtie{{{0, 0}, {10, 10}, {10, 0}, {0, 10}}};
  try {
    generate_labels({ann(bowtie, 0)}, 16, 16);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidPolygon);
  }
  EXPECT_THROW(generate_labels({}, 0, 4), Error);
  EXPECT_THROW(generate_labels({}, 4, 4, 0.0), Error);
}

TEST(GenerateLabels, DeterministicAcrossThreadCounts) {
  const auto scene = checks::random_scene(404, 96, 200);
  for (int threads : {2, 3, 8}) {
    EXPECT_EQ(generate_labels(scene.annotations, scene.bundle.height, scene.bundle.width, 0.7, threads), scene.bundle);
  }
}

TEST(GenerateLabels, NearestReferenceMatchesBruteForce) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const auto scene = checks::random_scene(seed, 48, 128);
    const auto outcome = checks::check_nearest_reference(scene);
    EXPECT_TRUE(outcome.ok) << "seed " << seed << ": " << outcome.detail;
  }
}

TEST(ShiftTarget, RoundsHalfAwayFromZero) {
  EXPECT_EQ(shift_target(5, 5, {0.5F, -0.5F}).x, 6);
  // Rounding applies to the target coordinate: 5 - 0.5 = 4.5 goes to 5.
  EXPECT_EQ(shift_target(5, 5, {0.5F, -0.5F}).y, 5);
  EXPECT_EQ(shift_target(5, 5, {0.0F, -6.5F}).y, -2);
  EXPECT_EQ(shift_target(5, 5, {0.49F, -0.49F}).x, 5);
  EXPECT_EQ(shift_target(0, 0, {-0.5F, 0.0F}).x, -1);
}

TEST(RegressionMask, GroundTruthShiftGivesZero) {
  const auto scene = checks::random_scene(7, 64, 160);
  EXPECT_EQ(count_set(compute_regression_mask(scene.bundle.shift_field, scene.bundle).mask), 0u);
}

TEST(RegressionMask, ZeroShiftFlagsExactlyTheRings) {
  const LabelBundle b = generate_labels({ann(rectangle(8, 8, 48, 28), 0)}, 40, 56);
  const RegressionMask r = compute_regression_mask(ShiftField(40, 56), b);
  for (std::size_t i = 0; i < r.mask.size(); ++i) {
    EXPECT_EQ(r.mask[i] != 0, b.instance_id.labels[i] == 1 && b.kernel_id.labels[i] == 0);
  }
}

TEST(RegressionMask, WrongKernelAndBackgroundIntoKernel) {
  const LabelBundle b =
      generate_labels({ann(rectangle(2, 2, 30, 22), 0), ann(rectangle(34, 2, 62, 22), 1)}, 24, 64);
  ShiftField s = b.shift_field;
  // A ring pixel of instance 1 aimed at the middle of kernel 2.
  int ry = -1, rx = -1;
  for (int x = 0; x < 64 && ry < 0; ++x) {
    if (b.instance_id(12, x) == 1 && b.kernel_id(12, x) == 0) ry = 12, rx = x;
  }
  ASSERT_GE(ry, 0);
  ASSERT_EQ(b.kernel_id(12, 48), 2);
  s(ry, rx) = Shift{static_cast<float>(48 - rx), 0.0F};
  // A background pixel aimed into kernel 1.
  ASSERT_EQ(b.instance_id(23, 10), 0);
  ASSERT_EQ(b.kernel_id(12, 10), 1);
  s(23, 10) = Shift{0.0F, -11.0F};
  // An out-of-grid target counts as background.
  s(0, 0) = Shift{-5.0F, -5.0F};
  const RegressionMask r = compute_regression_mask(s, b);
  EXPECT_EQ(r.mask(ry, rx), 1);
  EXPECT_EQ(r.mask(23, 10), 1);
  EXPECT_EQ(r.mask(0, 0), 0);
  EXPECT_EQ(count_set(r.mask), 2u);
}

TEST(RegressionMask, IgnoredInstancesAreExempt) {
  const LabelBundle b = generate_labels({ann(rectangle(4, 4, 40, 24), 0, true)}, 32, 48);
  ShiftField s(32, 48, Shift{30.0F, 30.0F});
  const RegressionMask r = compute_regression_mask(s, b);
  for (std::size_t i = 0; i < r.mask.size(); ++i) {
    if (b.instance_id.labels[i] == 1) EXPECT_EQ(r.mask[i], 0);
  }
}

TEST(RegressionMask, ShapeMismatchThrows) {
  const LabelBundle b = generate_labels({}, 8, 8);
  try {
    compute_regression_mask(ShiftField(8, 9), b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

TEST(RegressionMask, RetargetingInsideKernelsIsClosed) {
  const auto scene = checks::random_scene(31, 64, 160);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const PredictionMaps p = perturb(scene.bundle, {PerturbMode::kRetargetInKernel, 0.3 * static_cast<double>(seed), seed});
    EXPECT_EQ(count_set(compute_regression_mask(p.shift_field, scene.bundle).mask), 0u);
  }
}

}  // namespace
}  // namespace ctmap
