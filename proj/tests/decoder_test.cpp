#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "ctmap/decoder.hpp"
#include "ctmap/harness.hpp"
#include "support/checks.hpp"
#include "support/oracles.hpp"

namespace ctmap {
namespace {

using oracle::rectangle;

TEST(DecodeConfig, Defaults) {
  const DecodeConfig cfg;
  EXPECT_EQ(cfg.binarize_threshold, 0.2);
  EXPECT_EQ(cfg.connectivity, Connectivity::kEight);
  EXPECT_EQ(cfg.min_kernel_area, 2);
  EXPECT_EQ(cfg.min_instance_area, 16);
  EXPECT_EQ(cfg.score_threshold, 0.0);
}

TEST(Binarize, StrictThreshold) {
  FloatMap p(1, 3);
  p(0, 0) = 0.2F;
  p(0, 1) = 0.19F;
  p(0, 2) = 0.21F;
  const BitMask b = binarize(p, 0.2);
  EXPECT_EQ(b(0, 0), 0);
  EXPECT_EQ(b(0, 1), 0);
  EXPECT_EQ(b(0, 2), 1);
  EXPECT_EQ(count_set(binarize(FloatMap(4, 4, 0.0F), 0.2)), 0u);
  EXPECT_THROW(binarize(p, 1.0), Error);
}

TEST(Decode, SingleInstanceRoundTrip) {
  const Polygon t = rectangle(6, 5, 40, 21);
  const LabelBundle b = generate_labels({TextAnnotation{t, false, 0, {}}}, 32, 48);
  const auto out = decode(perfect_prediction(b));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].pixel_mask, oracle::rasterize(t, 32, 48));
  EXPECT_EQ(out[0].score, 1.0);
  EXPECT_EQ(out[0].pixel_count, count_set(out[0].pixel_mask));
  EXPECT_EQ(rasterize(out[0].contour, 32, 48), out[0].pixel_mask);
  for (std::size_t i = 0; i < b.kernel_map.size(); ++i) {
    if (b.kernel_map[i]) EXPECT_TRUE(out[0].pixel_mask[i]);
  }
}

TEST(Decode, BelowThresholdIsEmpty) {
  PredictionMaps p{FloatMap(16, 16, 0.2F), ShiftField(16, 16)};
  EXPECT_TRUE(decode(p).empty());
}

TEST(Decode, ShiftDecidesMembershipNotProximity) {
  // Two 3x3 kernels; pixel (4, 4) sits next to kernel 1 but points at kernel 2.
  PredictionMaps p{FloatMap(10, 20, 0.0F), ShiftField(10, 20)};
  for (int y = 3; y < 6; ++y) {
    for (int x = 1; x < 4; ++x) p.prob_map(y, x) = 0.9F;
    for (int x = 15; x < 18; ++x) p.prob_map(y, x) = 0.9F;
  }
  p.shift_field(4, 4) = Shift{12.0F, 0.0F};
  DecodeConfig cfg;
  cfg.min_instance_area = 0;
  const auto out = decode(p, cfg);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].kernel_id, 1);
  EXPECT_EQ(out[1].kernel_id, 2);
  EXPECT_FALSE(out[0].pixel_mask(4, 4));
  EXPECT_TRUE(out[1].pixel_mask(4, 4));
  EXPECT_EQ(out[1].pixel_count, 10u);
  EXPECT_NEAR(out[0].score, 0.9, 1e-6);
}

TEST(Decode, AreaAndScoreFilters) {
  PredictionMaps p{FloatMap(12, 12, 0.0F), ShiftField(12, 12)};
  p.prob_map(1, 1) = 0.9F;  // single-pixel kernel
  for (int y = 5; y < 10; ++y) {
    for (int x = 5; x < 10; ++x) p.prob_map(y, x) = 0.5F;
  }
  DecodeConfig cfg;
  cfg.min_instance_area = 0;
  EXPECT_EQ(decode(p, cfg).size(), 1u);  // min_kernel_area 2 drops the dot
  cfg.min_instance_area = 26;
  EXPECT_TRUE(decode(p, cfg).empty());
  cfg.min_instance_area = 0;
  cfg.score_threshold = 0.6;
  EXPECT_TRUE(decode(p, cfg).empty());
}

TEST(Decode, OutOfGridTargetsAreBackground) {
  PredictionMaps p{FloatMap(8, 8, 0.0F), ShiftField(8, 8)};
  for (int y = 2; y < 6; ++y) {
    for (int x = 2; x < 6; ++x) p.prob_map(y, x) = 1.0F;
  }
  p.shift_field(3, 3) = Shift{-100.0F, 0.0F};
  DecodeConfig cfg;
  cfg.min_instance_area = 0;
  const auto out = decode(p, cfg);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_FALSE(out[0].pixel_mask(3, 3));
}

TEST(Decode, RejectsBadInput) {
  PredictionMaps p{FloatMap(4, 4, 0.0F), ShiftField(4, 4)};
  p.shift_field(1, 1).dx = std::numeric_limits<float>::quiet_NaN();
  try {
    decode(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFiniteShift);
  }
  PredictionMaps q{FloatMap(4, 4), ShiftField(4, 5)};
  try {
    decode(q);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

TEST(Decode, ThreadCountDoesNotChangeOutput) {
  const auto scene = checks::random_scene(55, 128, 320);
  const PredictionMaps p = perturb(scene.bundle, {PerturbMode::kGaussianNoise, 1.0, 4});
  DecodeConfig cfg;
  cfg.proposals = true;
  const auto one = decode(p, cfg);
  for (int threads : {2, 4, 7}) {
    cfg.threads = threads;
    const auto many = decode(p, cfg);
    ASSERT_EQ(many.size(), one.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
      EXPECT_EQ(many[i].pixel_mask, one[i].pixel_mask);
      EXPECT_EQ(many[i].contour, one[i].contour);
      EXPECT_EQ(many[i].score, one[i].score);
      EXPECT_EQ(many[i].proposal->rect.area(), one[i].proposal->rect.area());
    }
  }
}

TEST(Decode, RaisingThresholdCreatesNoNewKernels) {
  const auto scene = checks::random_scene(56, 96, 200);
  PredictionMaps p = perturb(scene.bundle, {PerturbMode::kGaussianNoise, 0.5, 1});
  for (std::size_t i = 0; i < p.prob_map.size(); ++i) {
    p.prob_map[i] = static_cast<float>(0.5 * p.prob_map[i] + 0.5 * std::abs(std::sin(0.37 * static_cast<double>(i))));
  }
  DecodeConfig lo;
  lo.min_instance_area = 0;
  DecodeConfig hi = lo;
  hi.binarize_threshold = 0.6;
  const BitMask lower = binarize(p.prob_map, lo.binarize_threshold);
  for (const auto& inst : decode(p, hi)) {
    bool overlaps = false;
    for (std::size_t i = 0; i < lower.size() && !overlaps; ++i) overlaps = inst.pixel_mask[i] && lower[i];
    EXPECT_TRUE(overlaps);
  }
}

TEST(Proposals, AxisAlignedInstanceGivesSameRectangle) {
  const LabelBundle b = generate_labels({TextAnnotation{rectangle(6, 5, 40, 21), false, 0, {}}}, 32, 48);
  DecodeConfig cfg;
  cfg.proposals = true;
  const auto out = decode(perfect_prediction(b), cfg);
  ASSERT_EQ(out.size(), 1u);
  ASSERT_TRUE(out[0].proposal);
  const auto& r = out[0].proposal->rect;
  EXPECT_NEAR(r.area(), 34.0 * 16.0, 1e-9);
  EXPECT_NEAR(r.center.x, 23.0, 1e-9);
  EXPECT_NEAR(r.center.y, 13.0, 1e-9);
  EXPECT_EQ(out[0].proposal->mask, out[0].pixel_mask);
  const auto props = to_proposals(out);
  ASSERT_EQ(props.size(), 1u);
  EXPECT_EQ(props[0].rect.area(), r.area());
  EXPECT_TRUE(to_proposals({}).empty());
}

TEST(Proposals, DiagonalBarIsTighterThanItsBoundingBox) {
  const Polygon bar{{{10, 40}, {40, 10}, {46, 16}, {16, 46}}};
  const LabelBundle b = generate_labels({TextAnnotation{bar, false, 0, {}}}, 56, 56);
  const auto out = decode(perfect_prediction(b));
  ASSERT_EQ(out.size(), 1u);
  const auto props = to_proposals(out);
  const auto& bb = out[0].bounds;
  const double box = (bb.x1 - bb.x0 + 1.0) * (bb.y1 - bb.y0 + 1.0);
  EXPECT_LT(props[0].rect.area(), 0.6 * box);
  EXPECT_NEAR(props[0].rect.area(), oracle::min_rect_area_brute_force(out[0].contour.vertices), 1e-6);
}

}  // namespace
}  // namespace ctmap
