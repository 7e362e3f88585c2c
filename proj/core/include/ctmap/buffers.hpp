#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ctmap/decoder.hpp"
#include "ctmap/encoder.hpp"
#include "ctmap/loss.hpp"

// Flat-buffer entry points for language bindings. Every array is row-major
// and contiguous; shift arrays are H x W x 2 with (dx, dy) innermost. Results
// match the Grid-based functions exactly, and no input buffer is modified.
namespace ctmap::buffers {

/// Polygons packed as consecutive (x, y) pairs; vertex_counts[i] pairs
/// belong to polygon i.
struct PolygonBuffer {
  std::span<const double> xy;
  std::span<const std::size_t> vertex_counts;
  /// Empty, or one flag per polygon (nonzero = ignore).
  std::span<const std::uint8_t> ignore;
};

struct LabelArrays {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> kernel;
  std::vector<std::uint8_t> training_mask;
  std::vector<float> shift;
  std::vector<std::int32_t> instance_id;
  std::vector<std::int32_t> kernel_id;
  /// One byte per instance: bit 0 = ignore, bit 1 = has_kernel.
  std::vector<std::uint8_t> instance_flags;
};

std::vector<TextAnnotation> unpack_polygons(const PolygonBuffer& polygons);

LabelArrays generate_labels(const PolygonBuffer& polygons, int height, int width,
                            double shrink_ratio = kDefaultShrinkRatio);
LabelArrays to_arrays(const LabelBundle& bundle);

/// Writes H*W bytes of R into `out`.
void compute_regression_mask(std::span<const float> pred_shift, const LabelArrays& labels,
                             std::span<std::uint8_t> out);

/// Returns the unweighted relaxed L1 value. When `grad_out` is non-empty it
/// receives d loss / d shift (H*W*2 floats).
double relaxed_l1_loss(std::span<const float> pred_shift, std::span<const float> gt_shift,
                       std::span<const std::uint8_t> regression_mask, int height, int width,
                       const LossConfig& cfg = {}, std::span<float> grad_out = {});

std::vector<DecodedInstance> decode(std::span<const float> prob, std::span<const float> shift, int height,
                                    int width, const DecodeConfig& cfg = {});

}  // namespace ctmap::buffers
