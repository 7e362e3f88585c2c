#pragma once

#include <optional>
#include <vector>

#include "ctmap/encoder.hpp"
#include "ctmap/geometry.hpp"

namespace ctmap {

struct Match {
  int det_id = 0;
  int gt_id = 0;
  double iou = 0.0;

  bool operator==(const Match&) const = default;
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double fmeasure = 0.0;
  std::vector<Match> matches;
  /// Detections dropped because they cover a DO NOT CARE ground truth.
  int num_ignored_dets = 0;
  int num_valid_dets = 0;
  int num_valid_gts = 0;
};

struct EvalOptions {
  double iou_threshold = 0.5;
  /// Clip rasterization to an image of this size; unclipped when absent.
  std::optional<int> height;
  std::optional<int> width;
};

/// IoU of the pixel-center rasterizations of `a` and `b` on a height x width
/// grid; 0 when the union is empty.
double polygon_iou(const Polygon& a, const Polygon& b, int height, int width);

/// Same, without clipping to an image.
double polygon_iou(const Polygon& a, const Polygon& b);

/// Detections whose IoU with an ignored ground truth exceeds the threshold
/// are set aside. The rest are matched one-to-one to non-ignored ground
/// truths greedily by descending IoU, accepting IoU >= threshold. Precision
/// and recall are 0 when their denominators are 0.
EvalReport match_and_score(const std::vector<TextAnnotation>& dets, const std::vector<TextAnnotation>& gts,
                           const EvalOptions& options = {});

}  // namespace ctmap
