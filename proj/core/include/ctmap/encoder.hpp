#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctmap/geometry.hpp"
#include "ctmap/grid.hpp"

namespace ctmap {

inline constexpr double kDefaultShrinkRatio = 0.7;

/// One annotated text region. `ignore` marks DO NOT CARE regions.
struct TextAnnotation {
  Polygon polygon;
  bool ignore = false;
  int id = 0;
  std::optional<std::string> text;
};

/// Per-instance facts the label maps cannot express on their own.
struct InstanceInfo {
  int annotation_id = 0;
  bool ignore = false;
  bool has_kernel = false;
  double area = 0.0;

  bool operator==(const InstanceInfo&) const = default;
};

/// Rasterized supervision for one image. Instance ids are 1-based positions
/// in the annotation list; instances[id - 1] describes instance `id`.
struct LabelBundle {
  int height = 0;
  int width = 0;
  BitMask kernel_map;
  BitMask training_mask;
  ShiftField shift_field;
  LabeledGrid instance_id;
  LabeledGrid kernel_id;
  BitMask reference_mask;
  std::vector<InstanceInfo> instances;

  /// True when instance `id` takes part in shift supervision: not ignored and
  /// with a surviving kernel.
  bool supervised(int id) const noexcept {
    return id > 0 && id <= static_cast<int>(instances.size()) && !instances[id - 1].ignore &&
           instances[id - 1].has_kernel;
  }

  bool operator==(const LabelBundle&) const = default;
};

/// 1 where the predicted shift fails to reach the right region.
struct RegressionMask {
  BitMask mask;

  int height() const noexcept { return mask.height(); }
  int width() const noexcept { return mask.width(); }
};

/// Builds kernels, the training mask, and centripetal shift targets.
///
/// Overlapping instances resolve to the smaller polygon area (ties: earlier
/// annotation). Each kernel is the rasterized inset polygon restricted to its
/// instance's pixels; the shift target set is the ring between one and two
/// 3x3 erosions of the kernel, or the whole kernel when one erosion empties
/// it. Every pixel of T_i - K_i points at its nearest ring pixel (Euclidean,
/// ties to the earliest ring pixel in raster order). An instance whose kernel
/// vanishes is kept with has_kernel = false and masked out of training.
///
/// `threads` only affects speed; output is identical for every value.
LabelBundle generate_labels(const std::vector<TextAnnotation>& annotations, int height, int width,
                            double shrink_ratio = kDefaultShrinkRatio, int threads = 1);

/// Relaxation mask for a predicted shift field. Targets are round(p + s)
/// (half away from zero); out-of-grid targets hit no kernel. Foreground pixels
/// must land on their own kernel; background pixels must avoid every kernel.
/// Pixels of ignored or kernel-less instances are exempt (0).
RegressionMask compute_regression_mask(const ShiftField& pred_shift, const LabelBundle& bundle);

/// Rounded target of pixel (y, x) under shift s, as (ty, tx).
struct PixelTarget {
  int y = 0;
  int x = 0;
};
PixelTarget shift_target(int y, int x, Shift s) noexcept;

}  // namespace ctmap
