#include "ctmap/encoder.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numeric>

#include "ctmap/parallel.hpp"

namespace ctmap {
namespace {

struct PixelBox {
  int y0 = INT_MAX;
  int x0 = INT_MAX;
  int y1 = INT_MIN;  // inclusive
  int x1 = INT_MIN;

  bool empty() const noexcept { return y1 < y0; }
  void add(int y, int x) noexcept {
    y0 = std::min(y0, y);
    x0 = std::min(x0, x);
    y1 = std::max(y1, y);
    x1 = std::max(x1, x);
  }
};

// Shift targets of one instance, bucketed by row with x sorted ascending.
struct ReferenceIndex {
  int row0 = 0;
  std::vector<std::vector<int>> rows;

  bool empty() const noexcept { return rows.empty(); }
};

// Kernel reference: the ring erode(K) minus erode(erode(K)), or K itself when
// the first erosion already removes everything. Works on a crop padded by one
// pixel, which gives the same erosion as the full grid.
ReferenceIndex kernel_reference(const LabeledGrid& kernel_id, int id, const PixelBox& box,
                                BitMask& reference_mask) {
  const int h = kernel_id.height();
  const int w = kernel_id.width();
  const int cy0 = std::max(0, box.y0 - 1);
  const int cx0 = std::max(0, box.x0 - 1);
  const int cy1 = std::min(h - 1, box.y1 + 1);
  const int cx1 = std::min(w - 1, box.x1 + 1);
  BitMask crop(cy1 - cy0 + 1, cx1 - cx0 + 1, 0);
  for (int y = cy0; y <= cy1; ++y) {
    for (int x = cx0; x <= cx1; ++x) crop(y - cy0, x - cx0) = kernel_id(y, x) == id ? 1 : 0;
  }
  // A crop edge that is not the image edge is padding, so border handling in
  // erode() matches the full-grid result.
  const BitMask once = erode(crop);
  const BitMask twice = erode(once);
  const bool fallback = count_set(once) == 0;
  const BitMask& source = fallback ? crop : once;

  ReferenceIndex index;
  index.row0 = cy0;
  index.rows.resize(static_cast<std::size_t>(cy1 - cy0 + 1));
  for (int y = 0; y < crop.height(); ++y) {
    for (int x = 0; x < crop.width(); ++x) {
      if (source(y, x) && (fallback || !twice(y, x))) {
        index.rows[static_cast<std::size_t>(y)].push_back(x + cx0);
        reference_mask(y + cy0, x + cx0) = 1;
      }
    }
  }
  return index;
}

// Nearest reference pixel to (py, px); ties go to the smaller (y, x).
PixelTarget nearest_reference(const ReferenceIndex& ref, int py, int px) {
  long long best_d2 = LLONG_MAX;
  PixelTarget best{INT_MAX, INT_MAX};
  auto consider = [&](int y, int x) {
    const long long dx = x - px;
    const long long dy = y - py;
    const long long d2 = dx * dx + dy * dy;
    if (d2 < best_d2 || (d2 == best_d2 && (y < best.y || (y == best.y && x < best.x)))) {
      best_d2 = d2;
      best = {y, x};
    }
  };
  auto scan_row = [&](int y) {
    const auto& xs = ref.rows[static_cast<std::size_t>(y - ref.row0)];
    if (xs.empty()) return;
    const auto it = std::lower_bound(xs.begin(), xs.end(), px);
    if (it != xs.end()) consider(y, *it);
    if (it != xs.begin()) consider(y, *std::prev(it));
  };

  const int row_count = static_cast<int>(ref.rows.size());
  const int last = ref.row0 + row_count - 1;
  for (int dy = 0;; ++dy) {
    const long long dy2 = static_cast<long long>(dy) * dy;
    if (dy2 > best_d2) break;
    const int up = py - dy;
    const int down = py + dy;
    if (up < ref.row0 && down > last) break;
    if (up >= ref.row0 && up <= last) scan_row(up);
    if (dy != 0 && down >= ref.row0 && down <= last) scan_row(down);
  }
  return best;
}

}  // namespace

PixelTarget shift_target(int y, int x, Shift s) noexcept {
  const double ty = std::round(static_cast<double>(y) + static_cast<double>(s.dy));
  const double tx = std::round(static_cast<double>(x) + static_cast<double>(s.dx));
  constexpr double kLimit = 1e9;
  if (!(std::abs(ty) < kLimit && std::abs(tx) < kLimit)) return {INT_MIN, INT_MIN};
  return {static_cast<int>(ty), static_cast<int>(tx)};
}

LabelBundle generate_labels(const std::vector<TextAnnotation>& annotations, int height, int width,
                            double shrink_ratio, int threads) {
  if (height <= 0 || width <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "label grid dimensions must be positive");
  }
  if (!(shrink_ratio > 0.0 && shrink_ratio <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "shrink ratio must lie in (0, 1]");
  }
  for (const auto& a : annotations) validate(a.polygon);

  const int n = static_cast<int>(annotations.size());
  LabelBundle bundle;
  bundle.height = height;
  bundle.width = width;
  bundle.kernel_map = BitMask(height, width, 0);
  bundle.training_mask = BitMask(height, width, 1);
  bundle.shift_field = ShiftField(height, width);
  bundle.instance_id = LabeledGrid{Grid<std::int32_t>(height, width, 0), n};
  bundle.kernel_id = LabeledGrid{Grid<std::int32_t>(height, width, 0), n};
  bundle.reference_mask = BitMask(height, width, 0);
  bundle.instances.resize(static_cast<std::size_t>(n));

  for (int i = 0; i < n; ++i) {
    const auto& a = annotations[static_cast<std::size_t>(i)];
    bundle.instances[static_cast<std::size_t>(i)] = {a.id, a.ignore, false, area(a.polygon)};
  }

  // Paint larger instances first so smaller ones win overlaps; among equal
  // areas the earlier annotation is painted last and wins.
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double aa = bundle.instances[static_cast<std::size_t>(a)].area;
    const double ab = bundle.instances[static_cast<std::size_t>(b)].area;
    return aa != ab ? aa > ab : a > b;
  });
  for (int i : order) {
    rasterize_into<std::int32_t>(annotations[static_cast<std::size_t>(i)].polygon, bundle.instance_id.labels, i + 1);
  }

  // Kernels: inset polygon cells that belong to the instance after overlap resolution.
  std::vector<PixelBox> kernel_boxes(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& a = annotations[static_cast<std::size_t>(i)];
    if (a.ignore) continue;
    const auto shrunk = shrink_polygon(a.polygon, shrink_ratio);
    if (!shrunk) continue;
    const int id = i + 1;
    auto& box = kernel_boxes[static_cast<std::size_t>(i)];
    for_each_raster_span(*shrunk, height, width, [&](int y, int x0, int x1) {
      for (int x = x0; x < x1; ++x) {
        if (bundle.instance_id(y, x) != id) continue;
        bundle.kernel_id.labels(y, x) = id;
        bundle.kernel_map(y, x) = 1;
        box.add(y, x);
      }
    });
    bundle.instances[static_cast<std::size_t>(i)].has_kernel = !box.empty();
  }

  std::vector<ReferenceIndex> references(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (!bundle.instances[static_cast<std::size_t>(i)].has_kernel) continue;
    references[static_cast<std::size_t>(i)] =
        kernel_reference(bundle.kernel_id, i + 1, kernel_boxes[static_cast<std::size_t>(i)], bundle.reference_mask);
  }

  // Centripetal shifts on T_i - K_i; each row is independent.
  parallel_for(0, height, threads, [&](int row_begin, int row_end) {
    for (int y = row_begin; y < row_end; ++y) {
      for (int x = 0; x < width; ++x) {
        const int id = bundle.instance_id(y, x);
        if (id == 0 || bundle.kernel_id(y, x) == id || !bundle.supervised(id)) continue;
        const PixelTarget t = nearest_reference(references[static_cast<std::size_t>(id - 1)], y, x);
        bundle.shift_field(y, x) = Shift{static_cast<float>(t.x - x), static_cast<float>(t.y - y)};
      }
    }
  });

  // Training mask: zero on every T_i - K_i and on the full polygon of ignored instances.
  for (std::size_t i = 0; i < bundle.training_mask.size(); ++i) {
    const int id = bundle.instance_id.labels[i];
    if (id != 0 && bundle.kernel_id.labels[i] != id) bundle.training_mask[i] = 0;
  }
  for (const auto& a : annotations) {
    if (a.ignore) rasterize_into<std::uint8_t>(a.polygon, bundle.training_mask, 0);
  }
  return bundle;
}

RegressionMask compute_regression_mask(const ShiftField& pred_shift, const LabelBundle& bundle) {
  require_same_shape(pred_shift, bundle.kernel_id.labels, "predicted shift does not match label bundle");
  const int h = bundle.height;
  const int w = bundle.width;
  RegressionMask r{BitMask(h, w, 0)};
  const auto& kernel = bundle.kernel_id.labels;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int id = bundle.instance_id(y, x);
      if (id != 0 && !bundle.supervised(id)) continue;
      const PixelTarget t = shift_target(y, x, pred_shift(y, x));
      const int hit = kernel.contains(t.y, t.x) ? kernel(t.y, t.x) : 0;
      const bool correct = id != 0 ? hit == id : hit == 0;
      r.mask(y, x) = correct ? 0 : 1;
    }
  }
  return r;
}

}  // namespace ctmap
