#include "ctmap/eval.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <tuple>

namespace ctmap {
namespace {

struct Span {
  int y;
  int x0;
  int x1;
};

using Region = std::vector<Span>;

RasterWindow unclipped_window(const Polygon& poly) {
  double min_x = poly.vertices.front().x;
  double max_x = min_x;
  double min_y = poly.vertices.front().y;
  double max_y = min_y;
  for (const auto& p : poly.vertices) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  constexpr double kLimit = 1 << 28;
  if (std::max({std::abs(min_x), std::abs(max_x), std::abs(min_y), std::abs(max_y)}) > kLimit) {
    throw Error(ErrorCode::kInvalidPolygon, "polygon coordinates out of raster range");
  }
  return {static_cast<int>(std::floor(min_y)) - 1, static_cast<int>(std::ceil(max_y)) + 1,
          static_cast<int>(std::floor(min_x)) - 1, static_cast<int>(std::ceil(max_x)) + 1};
}

Region raster_region(const Polygon& poly, const EvalOptions& options) {
  validate(poly);
  RasterWindow window = unclipped_window(poly);
  if (options.height && options.width) {
    window.y_begin = std::max(window.y_begin, 0);
    window.x_begin = std::max(window.x_begin, 0);
    window.y_end = std::min(window.y_end, *options.height);
    window.x_end = std::min(window.x_end, *options.width);
  }
  Region region;
  for_each_raster_span(poly, window, [&region](int y, int x0, int x1) { region.push_back({y, x0, x1}); });
  return region;
}

long long region_area(const Region& r) {
  long long total = 0;
  for (const auto& s : r) total += s.x1 - s.x0;
  return total;
}

// Both regions list spans by ascending row, then ascending x, non-overlapping.
long long intersection_area(const Region& a, const Region& b) {
  long long total = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].y != b[j].y) {
      if (a[i].y < b[j].y) {
        ++i;
      } else {
        ++j;
      }
      continue;
    }
    const int lo = std::max(a[i].x0, b[j].x0);
    const int hi = std::min(a[i].x1, b[j].x1);
    if (hi > lo) total += hi - lo;
    if (a[i].x1 < b[j].x1) {
      ++i;
    } else {
      ++j;
    }
  }
  return total;
}

double region_iou(const Region& a, const Region& b, long long area_a, long long area_b) {
  const long long inter = intersection_area(a, b);
  const long long uni = area_a + area_b - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

}  // namespace

double polygon_iou(const Polygon& a, const Polygon& b, int height, int width) {
  if (height <= 0 || width <= 0) throw Error(ErrorCode::kInvalidArgument, "raster dimensions must be positive");
  EvalOptions opts;
  opts.height = height;
  opts.width = width;
  const Region ra = raster_region(a, opts);
  const Region rb = raster_region(b, opts);
  return region_iou(ra, rb, region_area(ra), region_area(rb));
}

double polygon_iou(const Polygon& a, const Polygon& b) {
  const Region ra = raster_region(a, {});
  const Region rb = raster_region(b, {});
  return region_iou(ra, rb, region_area(ra), region_area(rb));
}

EvalReport match_and_score(const std::vector<TextAnnotation>& dets, const std::vector<TextAnnotation>& gts,
                           const EvalOptions& options) {
  if (!(options.iou_threshold > 0.0 && options.iou_threshold < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "IoU threshold must lie in (0, 1)");
  }
  const double thr = options.iou_threshold;

  struct Entry {
    const TextAnnotation* ann;
    Region region;
    long long area;
  };
  auto build = [&](const TextAnnotation& a) {
    Region r = raster_region(a.polygon, options);
    const long long area = region_area(r);
    return Entry{&a, std::move(r), area};
  };

  std::vector<Entry> valid_gts;
  std::vector<Entry> ignored_gts;
  for (const auto& g : gts) (g.ignore ? ignored_gts : valid_gts).push_back(build(g));

  EvalReport report;
  std::vector<Entry> valid_dets;
  for (const auto& d : dets) {
    Entry e = build(d);
    const bool covers_ignored = std::any_of(ignored_gts.begin(), ignored_gts.end(), [&](const Entry& g) {
      return region_iou(e.region, g.region, e.area, g.area) > thr;
    });
    if (covers_ignored) {
      ++report.num_ignored_dets;
    } else {
      valid_dets.push_back(std::move(e));
    }
  }

  struct Candidate {
    double iou;
    std::size_t det;
    std::size_t gt;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < valid_dets.size(); ++i) {
    for (std::size_t j = 0; j < valid_gts.size(); ++j) {
      const double iou = region_iou(valid_dets[i].region, valid_gts[j].region, valid_dets[i].area, valid_gts[j].area);
      if (iou >= thr) candidates.push_back({iou, i, j});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(b.iou, a.det, a.gt) < std::tie(a.iou, b.det, b.gt);
  });

  std::vector<bool> det_used(valid_dets.size(), false);
  std::vector<bool> gt_used(valid_gts.size(), false);
  for (const auto& c : candidates) {
    if (det_used[c.det] || gt_used[c.gt]) continue;
    det_used[c.det] = true;
    gt_used[c.gt] = true;
    report.matches.push_back({valid_dets[c.det].ann->id, valid_gts[c.gt].ann->id, c.iou});
  }

  report.num_valid_dets = static_cast<int>(valid_dets.size());
  report.num_valid_gts = static_cast<int>(valid_gts.size());
  const auto matched = static_cast<double>(report.matches.size());
  report.precision = valid_dets.empty() ? 0.0 : matched / static_cast<double>(valid_dets.size());
  report.recall = valid_gts.empty() ? 0.0 : matched / static_cast<double>(valid_gts.size());
  const double pr = report.precision + report.recall;
  report.fmeasure = pr > 0.0 ? 2.0 * report.precision * report.recall / pr : 0.0;
  return report;
}

}  // namespace ctmap
