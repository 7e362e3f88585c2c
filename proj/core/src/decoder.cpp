#include "ctmap/decoder.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

#include "ctmap/encoder.hpp"
#include "ctmap/parallel.hpp"

namespace ctmap {
namespace {

struct Aggregation {
  LabeledGrid kernels;
  LabeledGrid assignment;
  std::vector<std::size_t> kernel_area;  // indexed by kernel id
};

void check_inputs(const PredictionMaps& pred) {
  require_same_shape(pred.prob_map, pred.shift_field, "probability and shift maps differ in shape");
  for (const auto& s : pred.shift_field.cells()) {
    if (!std::isfinite(s.dx) || !std::isfinite(s.dy)) {
      throw Error(ErrorCode::kNonFiniteShift, "shift field contains NaN or Inf");
    }
  }
}

Aggregation run_aggregation(const PredictionMaps& pred, const DecodeConfig& cfg) {
  cfg.validate();
  check_inputs(pred);
  const int h = pred.height();
  const int w = pred.width();

  Aggregation agg;
  agg.kernels = connected_components(binarize(pred.prob_map, cfg.binarize_threshold), cfg.connectivity);
  agg.kernel_area.assign(static_cast<std::size_t>(agg.kernels.num_labels) + 1, 0);
  for (auto l : agg.kernels.labels.cells()) ++agg.kernel_area[static_cast<std::size_t>(l)];

  std::vector<std::int32_t> keep(agg.kernel_area.size(), 0);
  for (std::size_t c = 1; c < keep.size(); ++c) {
    keep[c] = agg.kernel_area[c] >= static_cast<std::size_t>(cfg.min_kernel_area) ? static_cast<std::int32_t>(c) : 0;
  }

  agg.assignment = LabeledGrid{Grid<std::int32_t>(h, w, 0), agg.kernels.num_labels};
  const auto& kernels = agg.kernels.labels;
  auto& out = agg.assignment.labels;
  parallel_for(0, h, cfg.threads, [&](int row_begin, int row_end) {
    for (int y = row_begin; y < row_end; ++y) {
      for (int x = 0; x < w; ++x) {
        const PixelTarget t = shift_target(y, x, pred.shift_field(y, x));
        if (!kernels.contains(t.y, t.x)) continue;
        out(y, x) = keep[static_cast<std::size_t>(kernels(t.y, t.x))];
      }
    }
  });
  return agg;
}

}  // namespace

void DecodeConfig::validate() const {
  if (!(binarize_threshold > 0.0 && binarize_threshold < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "binarize threshold must lie in (0, 1)");
  }
  if (connectivity != Connectivity::kFour && connectivity != Connectivity::kEight) {
    throw Error(ErrorCode::kInvalidArgument, "connectivity must be 4 or 8");
  }
  if (min_kernel_area < 0 || min_instance_area < 0) {
    throw Error(ErrorCode::kInvalidArgument, "area filters must be non-negative");
  }
  if (threads < 1) throw Error(ErrorCode::kInvalidArgument, "threads must be at least 1");
}

BitMask binarize(const FloatMap& prob_map, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "binarize threshold must lie in (0, 1)");
  }
  // Compare at the map's float32 precision so a stored 0.2F is not above 0.2.
  const float t = static_cast<float>(threshold);
  BitMask out(prob_map.height(), prob_map.width(), 0);
  for (std::size_t i = 0; i < prob_map.size(); ++i) out[i] = prob_map[i] > t ? 1 : 0;
  return out;
}

LabeledGrid aggregate(const PredictionMaps& pred, const DecodeConfig& cfg) {
  return run_aggregation(pred, cfg).assignment;
}

std::vector<DecodedInstance> decode(const PredictionMaps& pred, const DecodeConfig& cfg) {
  const Aggregation agg = run_aggregation(pred, cfg);
  const int h = pred.height();
  const int w = pred.width();
  const auto num = static_cast<std::size_t>(agg.kernels.num_labels);

  std::vector<std::size_t> count(num + 1, 0);
  std::vector<PixelBounds> bounds(num + 1, PixelBounds{INT_MAX, INT_MAX, INT_MIN, INT_MIN});
  std::vector<double> kernel_sum(num + 1, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      kernel_sum[static_cast<std::size_t>(agg.kernels(y, x))] += pred.prob_map(y, x);
      const auto c = static_cast<std::size_t>(agg.assignment(y, x));
      if (c == 0) continue;
      ++count[c];
      auto& b = bounds[c];
      b.y0 = std::min(b.y0, y);
      b.x0 = std::min(b.x0, x);
      b.y1 = std::max(b.y1, y);
      b.x1 = std::max(b.x1, x);
    }
  }

  std::vector<DecodedInstance> instances;
  for (std::size_t c = 1; c <= num; ++c) {
    if (count[c] == 0 || count[c] < static_cast<std::size_t>(cfg.min_instance_area)) continue;
    const double score = kernel_sum[c] / static_cast<double>(agg.kernel_area[c]);
    if (score < cfg.score_threshold) continue;
    DecodedInstance inst;
    inst.kernel_id = static_cast<int>(c);
    inst.bounds = bounds[c];
    inst.pixel_count = count[c];
    inst.score = score;
    instances.push_back(std::move(inst));
  }

  const auto& labels = agg.assignment.labels;
  parallel_for(0, static_cast<int>(instances.size()), cfg.threads, [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      auto& inst = instances[static_cast<std::size_t>(i)];
      const int id = inst.kernel_id;
      const auto& b = inst.bounds;
      inst.pixel_mask = BitMask(h, w, 0);
      int start_x = -1;
      for (int y = b.y0; y <= b.y1; ++y) {
        for (int x = b.x0; x <= b.x1; ++x) {
          if (labels(y, x) != id) continue;
          inst.pixel_mask(y, x) = 1;
          if (start_x < 0 && y == b.y0) start_x = x;
        }
      }
      inst.contour = trace_outer_boundary(h, w, b.y0, start_x,
                                          [&labels, id](int yy, int xx) { return labels(yy, xx) == id; });
      if (cfg.proposals) {
        inst.proposal = Proposal{min_area_rect(inst.contour.vertices), inst.pixel_mask, inst.score};
      }
    }
  });
  return instances;
}

std::vector<Proposal> to_proposals(const std::vector<DecodedInstance>& instances) {
  std::vector<Proposal> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) {
    out.push_back(Proposal{min_area_rect(inst.contour.vertices), inst.pixel_mask, inst.score});
  }
  return out;
}

}  // namespace ctmap
