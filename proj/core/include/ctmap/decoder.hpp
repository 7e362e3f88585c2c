#pragma once

#include <optional>
#include <vector>

#include "ctmap/geometry.hpp"
#include "ctmap/grid.hpp"

namespace ctmap {

/// Network-style outputs: kernel probability and centripetal shift (dx, dy).
struct PredictionMaps {
  FloatMap prob_map;
  ShiftField shift_field;

  int height() const noexcept { return prob_map.height(); }
  int width() const noexcept { return prob_map.width(); }
  bool operator==(const PredictionMaps&) const = default;
};

inline constexpr double kDefaultBinarizeThreshold = 0.2;

struct DecodeConfig {
  double binarize_threshold = kDefaultBinarizeThreshold;
  Connectivity connectivity = Connectivity::kEight;
  int min_kernel_area = 2;
  int min_instance_area = 16;
  double score_threshold = 0.0;
  /// Fill DecodedInstance::proposal (CPN mode).
  bool proposals = false;
  /// Worker threads for pixel assignment and per-instance work.
  int threads = 1;

  void validate() const;
};

struct PixelBounds {
  int y0 = 0;
  int x0 = 0;
  int y1 = -1;  // inclusive
  int x1 = -1;
};

struct Proposal {
  RotatedRect rect;
  BitMask mask;
  double score = 0.0;
};

struct DecodedInstance {
  int kernel_id = 0;
  BitMask pixel_mask;
  PixelBounds bounds;
  std::size_t pixel_count = 0;
  Polygon contour;
  /// Mean probability over the kernel's pixels.
  double score = 0.0;
  /// Set when DecodeConfig::proposals is on.
  std::optional<Proposal> proposal;
};

/// Strict threshold: prob > threshold.
BitMask binarize(const FloatMap& prob_map, double threshold);

/// One-step pixel aggregation. Kernels are connected components of the
/// binarized probability map; every pixel joins the kernel its rounded target
/// round(p + shift) lands on, or is dropped. Output is ordered by kernel id
/// and does not depend on cfg.threads.
std::vector<DecodedInstance> decode(const PredictionMaps& pred, const DecodeConfig& cfg = {});

/// Full-resolution instance label map produced by the aggregation step, before
/// area and score filtering. Kernel ids index into connected_components().
LabeledGrid aggregate(const PredictionMaps& pred, const DecodeConfig& cfg = {});

/// CPN-style proposals: min-area rectangle of each contour plus its mask.
std::vector<Proposal> to_proposals(const std::vector<DecodedInstance>& instances);

}  // namespace ctmap
