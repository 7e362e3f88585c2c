#include "ctmap/geometry.hpp"

// Exact floating-point buffering instead of integer-grid rescaling.
#define BOOST_GEOMETRY_NO_ROBUSTNESS
#define BOOST_ALLOW_DEPRECATED_HEADERS
#include <boost/geometry.hpp>
#undef BOOST_ALLOW_DEPRECATED_HEADERS

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>

namespace ctmap {
namespace {

namespace bg = boost::geometry;
using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint, /*ClockWise=*/false, /*Closed=*/true>;
using BgMultiPolygon = bg::model::multi_polygon<BgPolygon>;

constexpr int kRoundJoinPoints = 36;

double cross(Point o, Point a, Point b) noexcept {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

int sign(double v) noexcept { return (v > 0.0) - (v < 0.0); }

bool segments_cross(Point a, Point b, Point c, Point d) noexcept {
  const int o1 = sign(cross(a, b, c));
  const int o2 = sign(cross(a, b, d));
  const int o3 = sign(cross(c, d, a));
  const int o4 = sign(cross(c, d, b));
  return o1 * o2 < 0 && o3 * o4 < 0;
}

}  // namespace

namespace detail {

void validate_for_raster(const Polygon& poly) {
  if (poly.vertices.size() < 3) {
    throw Error(ErrorCode::kInvalidPolygon, "polygon needs at least 3 vertices");
  }
  for (const auto& p : poly.vertices) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::kInvalidPolygon, "non-finite vertex coordinate");
    }
  }
}

}  // namespace detail

double signed_area(const Polygon& poly) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

double area(const Polygon& poly) { return std::abs(signed_area(poly)); }

double perimeter(const Polygon& poly) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  if (n < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % n];
    total += std::hypot(b.x - a.x, b.y - a.y);
  }
  return total;
}

void validate(const Polygon& poly) {
  detail::validate_for_raster(poly);
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % n];
    // Edge j = i + 1 is adjacent; so is edge n - 1 when i == 0.
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_cross(a, b, v[j], v[(j + 1) % n])) {
        throw Error(ErrorCode::kInvalidPolygon, "polygon edges " + std::to_string(i) + " and " +
                                                    std::to_string(j) + " cross");
      }
    }
  }
}

Polygon normalized(Polygon poly) {
  auto& v = poly.vertices;
  v.erase(std::unique(v.begin(), v.end()), v.end());
  while (v.size() > 1 && v.front() == v.back()) v.pop_back();
  if (signed_area(poly) < 0.0) std::reverse(v.begin(), v.end());
  return poly;
}

Polygon translated(const Polygon& poly, double dx, double dy) {
  Polygon out = poly;
  for (auto& p : out.vertices) {
    p.x += dx;
    p.y += dy;
  }
  return out;
}

Polygon scaled(const Polygon& poly, double factor) {
  Polygon out = poly;
  for (auto& p : out.vertices) {
    p.x *= factor;
    p.y *= factor;
  }
  return out;
}

bool contains_point(const Polygon& poly, Point p) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  bool inside = false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % n];
    if (detail::edge_spans(a, b, p.y) && p.x < detail::edge_crossing_x(a, b, p.y)) inside = !inside;
  }
  return inside;
}

double shrink_offset(const Polygon& poly, double ratio) {
  const double len = perimeter(poly);
  if (len <= 0.0) return 0.0;
  return area(poly) * (1.0 - ratio * ratio) / len;
}

std::optional<Polygon> shrink_polygon(const Polygon& poly, double ratio) {
  validate(poly);
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "shrink ratio must lie in (0, 1]");
  }
  if (ratio == 1.0) return poly;

  const Polygon src = normalized(poly);
  if (src.vertices.size() < 3 || area(src) <= 0.0) return std::nullopt;
  const double offset = shrink_offset(src, ratio);

  BgPolygon in;
  for (const auto& p : src.vertices) bg::append(in.outer(), BgPoint(p.x, p.y));
  bg::append(in.outer(), BgPoint(src.vertices.front().x, src.vertices.front().y));
  bg::correct(in);

  const bg::strategy::buffer::distance_symmetric<double> distance(-offset);
  const bg::strategy::buffer::side_straight side;
  const bg::strategy::buffer::join_round join(kRoundJoinPoints);
  const bg::strategy::buffer::end_flat end;
  const bg::strategy::buffer::point_circle circle(kRoundJoinPoints);
  BgMultiPolygon pieces;
  bg::buffer(in, pieces, distance, side, join, end, circle);

  const BgPolygon* best = nullptr;
  double best_area = 0.0;
  for (const auto& piece : pieces) {
    const double a = std::abs(bg::area(piece));
    if (a > best_area) {
      best_area = a;
      best = &piece;
    }
  }
  if (best == nullptr) return std::nullopt;

  Polygon out;
  for (const auto& p : best->outer()) out.vertices.push_back({p.x(), p.y()});
  out = normalized(std::move(out));
  if (out.vertices.size() < 3) return std::nullopt;
  return out;
}

BitMask rasterize(const Polygon& poly, int height, int width) {
  if (height <= 0 || width <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "raster dimensions must be positive");
  }
  validate(poly);
  BitMask mask(height, width, 0);
  rasterize_into<std::uint8_t>(poly, mask, 1);
  return mask;
}

BitMask erode(const BitMask& mask) {
  const int h = mask.height();
  const int w = mask.width();
  BitMask horizontal(h, w, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 1; x + 1 < w; ++x) {
      horizontal(y, x) = (mask(y, x - 1) & mask(y, x) & mask(y, x + 1)) ? 1 : 0;
    }
  }
  BitMask out(h, w, 0);
  for (int y = 1; y + 1 < h; ++y) {
    for (int x = 1; x + 1 < w; ++x) {
      out(y, x) = (horizontal(y - 1, x) & horizontal(y, x) & horizontal(y + 1, x)) ? 1 : 0;
    }
  }
  return out;
}

LabeledGrid connected_components(const BitMask& mask, Connectivity connectivity) {
  const int h = mask.height();
  const int w = mask.width();
  LabeledGrid result{Grid<std::int32_t>(h, w, 0), 0};
  auto& labels = result.labels;

  // Provisional labels with a union-find over their equivalences.
  std::vector<std::int32_t> parent{0};
  auto find = [&parent](std::int32_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  };
  auto unite = [&](std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent[a] = b;
  };

  const bool eight = connectivity == Connectivity::kEight;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask(y, x)) continue;
      std::int32_t current = 0;
      auto visit = [&](int ny, int nx) {
        if (!labels.contains(ny, nx)) return;
        const std::int32_t l = labels(ny, nx);
        if (l == 0) return;
        if (current == 0) {
          current = l;
        } else {
          unite(current, l);
        }
      };
      visit(y, x - 1);
      if (eight) visit(y - 1, x - 1);
      visit(y - 1, x);
      if (eight) visit(y - 1, x + 1);
      if (current == 0) {
        current = static_cast<std::int32_t>(parent.size());
        parent.push_back(current);
      }
      labels(y, x) = current;
    }
  }

  // Final ids follow the raster order in which each root is first met.
  std::vector<std::int32_t> final_id(parent.size(), 0);
  std::int32_t next = 0;
  for (auto& l : labels.cells()) {
    if (l == 0) continue;
    const std::int32_t root = find(l);
    if (final_id[root] == 0) final_id[root] = ++next;
    l = final_id[root];
  }
  result.num_labels = next;
  return result;
}

Polygon extract_contour(const BitMask& mask) {
  const int h = mask.height();
  const int w = mask.width();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask(y, x)) {
        return trace_outer_boundary(h, w, y, x, [&mask](int yy, int xx) { return mask(yy, xx) != 0; });
      }
    }
  }
  throw Error(ErrorCode::kEmptyComponent, "mask has no set pixels");
}

Polygon extract_contour(const LabeledGrid& grid, int id) {
  const auto& labels = grid.labels;
  const int h = labels.height();
  const int w = labels.width();
  if (id > 0) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (labels(y, x) == id) {
          return trace_outer_boundary(h, w, y, x, [&labels, id](int yy, int xx) { return labels(yy, xx) == id; });
        }
      }
    }
  }
  throw Error(ErrorCode::kEmptyComponent, "component " + std::to_string(id) + " has no pixels");
}

std::vector<Point> RotatedRect::corners() const {
  const double rad = angle * std::numbers::pi / 180.0;
  const Point u{std::cos(rad) * width / 2.0, std::sin(rad) * width / 2.0};
  const Point v{-std::sin(rad) * height / 2.0, std::cos(rad) * height / 2.0};
  return {
      {center.x - u.x - v.x, center.y - u.y - v.y},
      {center.x + u.x - v.x, center.y + u.y - v.y},
      {center.x + u.x + v.x, center.y + u.y + v.y},
      {center.x - u.x + v.x, center.y - u.y + v.y},
  };
}

std::vector<Point> convex_hull(std::span<const Point> points) {
  std::vector<Point> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;

  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

namespace {

RotatedRect normalize_angle(RotatedRect r) {
  while (r.angle >= 0.0) {
    r.angle -= 90.0;
    std::swap(r.width, r.height);
  }
  while (r.angle < -90.0) {
    r.angle += 90.0;
    std::swap(r.width, r.height);
  }
  return r;
}

}  // namespace

RotatedRect min_area_rect(std::span<const Point> points) {
  if (points.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "min_area_rect needs at least one point");
  }
  const std::vector<Point> hull = convex_hull(points);
  if (hull.size() == 1) {
    return RotatedRect{hull[0], 0.0, 0.0, -90.0};
  }
  if (hull.size() == 2) {
    const Point a = hull[0];
    const Point b = hull[1];
    RotatedRect r{{(a.x + b.x) / 2.0, (a.y + b.y) / 2.0},
                  std::hypot(b.x - a.x, b.y - a.y),
                  0.0,
                  std::atan2(b.y - a.y, b.x - a.x) * 180.0 / std::numbers::pi};
    return normalize_angle(r);
  }

  const std::size_t m = hull.size();
  auto dot = [](Point a, Point b) { return a.x * b.x + a.y * b.y; };
  auto at = [&](std::size_t i) { return hull[i % m]; };

  // Calipers: for edge i with unit direction u and inward normal n, keep the
  // hull indices of max u-projection, max n-projection, and min u-projection.
  std::size_t right = 0;
  std::size_t top = 0;
  std::size_t left = 0;
  double best_area = std::numeric_limits<double>::infinity();
  RotatedRect best;
  for (std::size_t i = 0; i < m; ++i) {
    const Point p = hull[i];
    const Point q = at(i + 1);
    const double len = std::hypot(q.x - p.x, q.y - p.y);
    const Point u{(q.x - p.x) / len, (q.y - p.y) / len};
    const Point n{-u.y, u.x};
    auto proj_u = [&](std::size_t k) { const Point r = at(k); return dot({r.x - p.x, r.y - p.y}, u); };
    auto proj_n = [&](std::size_t k) { const Point r = at(k); return dot({r.x - p.x, r.y - p.y}, n); };

    if (i == 0) {
      for (std::size_t k = 0; k < m; ++k) {
        if (proj_u(k) > proj_u(right)) right = k;
        if (proj_n(k) > proj_n(top)) top = k;
        if (proj_u(k) < proj_u(left)) left = k;
      }
    } else {
      for (std::size_t s = 0; s < m && proj_u(right + 1) > proj_u(right); ++s) right = (right + 1) % m;
      for (std::size_t s = 0; s < m && proj_n(top + 1) > proj_n(top); ++s) top = (top + 1) % m;
      for (std::size_t s = 0; s < m && proj_u(left + 1) < proj_u(left); ++s) left = (left + 1) % m;
    }

    const double u_max = proj_u(right);
    const double u_min = proj_u(left);
    const double h = proj_n(top);
    const double a = (u_max - u_min) * h;
    if (a < best_area) {
      best_area = a;
      const double mid_u = (u_max + u_min) / 2.0;
      best.center = {p.x + u.x * mid_u + n.x * h / 2.0, p.y + u.y * mid_u + n.y * h / 2.0};
      best.width = u_max - u_min;
      best.height = h;
      best.angle = std::atan2(u.y, u.x) * 180.0 / std::numbers::pi;
    }
  }
  return normalize_angle(best);
}

}  // namespace ctmap
