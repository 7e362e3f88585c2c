#include "ctmap/buffers.hpp"

#include <algorithm>
#include <string>

namespace ctmap::buffers {
namespace {

void check_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw Error(ErrorCode::kShapeMismatch,
                std::string(what) + ": expected " + std::to_string(want) + " elements, got " + std::to_string(got));
  }
}

std::size_t cell_count(int height, int width) {
  if (height <= 0 || width <= 0) throw Error(ErrorCode::kInvalidArgument, "dimensions must be positive");
  return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
}

ShiftField shift_grid(std::span<const float> values, int height, int width, const char* what) {
  const std::size_t n = cell_count(height, width);
  check_size(values.size(), 2 * n, what);
  ShiftField field(height, width);
  for (std::size_t i = 0; i < n; ++i) field[i] = Shift{values[2 * i], values[2 * i + 1]};
  return field;
}

LabeledGrid label_grid(const std::vector<std::int32_t>& ids, int height, int width, int num_labels) {
  check_size(ids.size(), cell_count(height, width), "label array");
  LabeledGrid grid{Grid<std::int32_t>(height, width), num_labels};
  std::copy(ids.begin(), ids.end(), grid.labels.cells().begin());
  return grid;
}

}  // namespace

std::vector<TextAnnotation> unpack_polygons(const PolygonBuffer& polygons) {
  const auto n = polygons.vertex_counts.size();
  if (!polygons.ignore.empty()) check_size(polygons.ignore.size(), n, "ignore flags");
  std::size_t total = 0;
  for (auto c : polygons.vertex_counts) total += c;
  check_size(polygons.xy.size(), 2 * total, "polygon coordinates");

  std::vector<TextAnnotation> anns(n);
  std::size_t at = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto& ann = anns[i];
    ann.id = static_cast<int>(i);
    ann.ignore = !polygons.ignore.empty() && polygons.ignore[i] != 0;
    for (std::size_t k = 0; k < polygons.vertex_counts[i]; ++k, at += 2) {
      ann.polygon.vertices.push_back({polygons.xy[at], polygons.xy[at + 1]});
    }
  }
  return anns;
}

LabelArrays to_arrays(const LabelBundle& bundle) {
  LabelArrays out;
  out.height = bundle.height;
  out.width = bundle.width;
  out.kernel.assign(bundle.kernel_map.cells().begin(), bundle.kernel_map.cells().end());
  out.training_mask.assign(bundle.training_mask.cells().begin(), bundle.training_mask.cells().end());
  out.shift.reserve(bundle.shift_field.size() * 2);
  for (const auto& s : bundle.shift_field.cells()) {
    out.shift.push_back(s.dx);
    out.shift.push_back(s.dy);
  }
  out.instance_id.assign(bundle.instance_id.labels.cells().begin(), bundle.instance_id.labels.cells().end());
  out.kernel_id.assign(bundle.kernel_id.labels.cells().begin(), bundle.kernel_id.labels.cells().end());
  for (const auto& info : bundle.instances) {
    out.instance_flags.push_back(static_cast<std::uint8_t>((info.ignore ? 1 : 0) | (info.has_kernel ? 2 : 0)));
  }
  return out;
}

LabelArrays generate_labels(const PolygonBuffer& polygons, int height, int width, double shrink_ratio) {
  return to_arrays(ctmap::generate_labels(unpack_polygons(polygons), height, width, shrink_ratio));
}

void compute_regression_mask(std::span<const float> pred_shift, const LabelArrays& labels,
                             std::span<std::uint8_t> out) {
  const int h = labels.height;
  const int w = labels.width;
  check_size(out.size(), cell_count(h, w), "regression mask output");

  LabelBundle bundle;
  bundle.height = h;
  bundle.width = w;
  const int n = static_cast<int>(labels.instance_flags.size());
  bundle.instance_id = label_grid(labels.instance_id, h, w, n);
  bundle.kernel_id = label_grid(labels.kernel_id, h, w, n);
  for (int i = 0; i < n; ++i) {
    const std::uint8_t f = labels.instance_flags[static_cast<std::size_t>(i)];
    bundle.instances.push_back({i, (f & 1) != 0, (f & 2) != 0, 0.0});
  }
  const RegressionMask r =
      ctmap::compute_regression_mask(shift_grid(pred_shift, h, w, "predicted shift"), bundle);
  std::copy(r.mask.cells().begin(), r.mask.cells().end(), out.begin());
}

double relaxed_l1_loss(std::span<const float> pred_shift, std::span<const float> gt_shift,
                       std::span<const std::uint8_t> regression_mask, int height, int width, const LossConfig& cfg,
                       std::span<float> grad_out) {
  const std::size_t n = cell_count(height, width);
  check_size(regression_mask.size(), n, "regression mask");
  if (!grad_out.empty()) check_size(grad_out.size(), 2 * n, "gradient output");

  LabelBundle bundle;
  bundle.height = height;
  bundle.width = width;
  bundle.shift_field = shift_grid(gt_shift, height, width, "target shift");
  RegressionMask r{BitMask(height, width)};
  for (std::size_t i = 0; i < n; ++i) r.mask[i] = regression_mask[i] != 0 ? 1 : 0;

  const ShiftLoss loss = ctmap::relaxed_l1_loss(shift_grid(pred_shift, height, width, "predicted shift"), bundle, r, cfg);
  if (!grad_out.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      grad_out[2 * i] = static_cast<float>(loss.grad[i][0]);
      grad_out[2 * i + 1] = static_cast<float>(loss.grad[i][1]);
    }
  }
  return loss.loss;
}

std::vector<DecodedInstance> decode(std::span<const float> prob, std::span<const float> shift, int height,
                                    int width, const DecodeConfig& cfg) {
  check_size(prob.size(), cell_count(height, width), "probability map");
  PredictionMaps pred{FloatMap(height, width), shift_grid(shift, height, width, "shift field")};
  std::copy(prob.begin(), prob.end(), pred.prob_map.cells().begin());
  return ctmap::decode(pred, cfg);
}

}  // namespace ctmap::buffers
