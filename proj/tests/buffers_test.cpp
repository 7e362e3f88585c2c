#include <gtest/gtest.h>

#include <vector>

#include "ctmap/buffers.hpp"
#include "ctmap/harness.hpp"
#include "support/checks.hpp"

namespace ctmap {
namespace {

struct Packed {
  std::vector<double> xy;
  std::vector<std::size_t> counts;
  std::vector<std::uint8_t> ignore;

  buffers::PolygonBuffer view() const { return {xy, counts, ignore}; }
};

Packed pack(const std::vector<TextAnnotation>& anns) {
  Packed p;
  for (const auto& a : anns) {
    for (const auto& v : a.polygon.vertices) {
      p.xy.push_back(v.x);
      p.xy.push_back(v.y);
    }
    p.counts.push_back(a.polygon.vertices.size());
    p.ignore.push_back(a.ignore ? 1 : 0);
  }
  return p;
}

std::vector<float> flat_shift(const ShiftField& s) {
  std::vector<float> out;
  for (const auto& v : s.cells()) {
    out.push_back(v.dx);
    out.push_back(v.dy);
  }
  return out;
}

TEST(Buffers, LabelsMatchCore) {
  auto scene = checks::random_scene(21, 64, 128);
  scene.annotations[0].ignore = true;
  const LabelBundle b = generate_labels(scene.annotations, scene.bundle.height, scene.bundle.width);
  const Packed p = pack(scene.annotations);
  const Packed copy = p;
  const auto arrays = buffers::generate_labels(p.view(), b.height, b.width);
  EXPECT_EQ(p.xy, copy.xy);
  const auto expected = buffers::to_arrays(b);
  EXPECT_EQ(arrays.kernel, expected.kernel);
  EXPECT_EQ(arrays.training_mask, expected.training_mask);
  EXPECT_EQ(arrays.shift, expected.shift);
  EXPECT_EQ(arrays.instance_id, expected.instance_id);
  EXPECT_EQ(arrays.kernel_id, expected.kernel_id);
  EXPECT_EQ(arrays.instance_flags, expected.instance_flags);
  EXPECT_EQ(arrays.shift, flat_shift(b.shift_field));
  EXPECT_EQ(arrays.instance_flags[0] & 1, 1);
}

TEST(Buffers, RegressionMaskAndLossMatchCore) {
  const auto scene = checks::random_scene(22, 64, 128);
  const PredictionMaps pred = perturb(scene.bundle, {PerturbMode::kGaussianNoise, 2.0, 1});
  const auto arrays = buffers::to_arrays(scene.bundle);
  const auto shift = flat_shift(pred.shift_field);
  std::vector<std::uint8_t> r(shift.size() / 2);
  buffers::compute_regression_mask(shift, arrays, r);
  const RegressionMask core_r = compute_regression_mask(pred.shift_field, scene.bundle);
  EXPECT_EQ(r, std::vector<std::uint8_t>(core_r.mask.cells().begin(), core_r.mask.cells().end()));

  std::vector<float> grad(shift.size());
  const double loss = buffers::relaxed_l1_loss(shift, arrays.shift, r, arrays.height, arrays.width, {}, grad);
  const ShiftLoss core = relaxed_l1_loss(pred.shift_field, scene.bundle, core_r);
  EXPECT_EQ(loss, core.loss);
  for (std::size_t i = 0; i < r.size(); ++i) {
    EXPECT_EQ(grad[2 * i], static_cast<float>(core.grad[i][0]));
    EXPECT_EQ(grad[2 * i + 1], static_cast<float>(core.grad[i][1]));
  }
}

TEST(Buffers, DecodeMatchesCore) {
  const auto scene = checks::random_scene(23, 64, 128);
  const PredictionMaps pred = perturb(scene.bundle, {PerturbMode::kGaussianNoise, 1.0, 2});
  const std::vector<float> prob(pred.prob_map.cells().begin(), pred.prob_map.cells().end());
  const auto out = buffers::decode(prob, flat_shift(pred.shift_field), pred.prob_map.height(), pred.prob_map.width());
  const auto core = decode(pred);
  ASSERT_EQ(out.size(), core.size());
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i].pixel_mask, core[i].pixel_mask);
}

TEST(Buffers, EmptyPolygonList) {
  const auto arrays = buffers::generate_labels({}, 8, 6);
  EXPECT_EQ(arrays.kernel, std::vector<std::uint8_t>(48, 0));
  EXPECT_EQ(arrays.training_mask, std::vector<std::uint8_t>(48, 1));
  EXPECT_EQ(arrays.shift, std::vector<float>(96, 0.0F));
  EXPECT_TRUE(arrays.instance_flags.empty());
}

TEST(Buffers, SizeErrors) {
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  const std::vector<double> xy{0, 0, 4, 0, 4, 4};
  const std::vector<std::size_t> too_many{4};
  EXPECT_EQ(code([&] { buffers::unpack_polygons({xy, too_many, {}}); }), ErrorCode::kShapeMismatch);
  const std::vector<std::size_t> ok{3};
  const std::vector<std::uint8_t> flags{0, 1};
  EXPECT_EQ(code([&] { buffers::unpack_polygons({xy, ok, flags}); }), ErrorCode::kShapeMismatch);
  EXPECT_EQ(buffers::unpack_polygons({xy, ok, {}}).size(), 1u);
  const std::vector<float> prob(12);
  const std::vector<float> shift(20);
  EXPECT_EQ(code([&] { buffers::decode(prob, shift, 3, 4); }), ErrorCode::kShapeMismatch);
}

}  // namespace
}  // namespace ctmap
