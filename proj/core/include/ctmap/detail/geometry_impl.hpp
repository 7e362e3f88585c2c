#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace ctmap {
namespace detail {

// x where the edge (a, b) crosses the horizontal line y = yc. Endpoints are
// ordered first so the result does not depend on edge direction; the same
// expression backs both rasterize() and contains_point().
inline double edge_crossing_x(Point a, Point b, double yc) noexcept {
  if (b.y < a.y || (b.y == a.y && b.x < a.x)) std::swap(a, b);
  return a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y);
}

inline bool edge_spans(const Point& a, const Point& b, double yc) noexcept {
  return (a.y > yc) != (b.y > yc);
}

void validate_for_raster(const Polygon& poly);

}  // namespace detail

template <typename SpanFn>
void for_each_raster_span(const Polygon& poly, const RasterWindow& window, SpanFn&& fn) {
  detail::validate_for_raster(poly);
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  if (window.y_end <= window.y_begin || window.x_end <= window.x_begin) return;

  double min_y = v[0].y;
  double max_y = v[0].y;
  for (const auto& p : v) {
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  if (max_y < window.y_begin || min_y > window.y_end) return;
  const int row_begin = static_cast<int>(std::max<double>(window.y_begin, std::floor(min_y - 0.5)));
  const int row_end = static_cast<int>(std::min<double>(window.y_end - 1, std::ceil(max_y)));

  std::vector<double> crossings;
  crossings.reserve(n);
  for (int y = row_begin; y <= row_end; ++y) {
    const double yc = y + 0.5;
    crossings.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const Point& a = v[i];
      const Point& b = v[(i + 1) % n];
      if (detail::edge_spans(a, b, yc)) crossings.push_back(detail::edge_crossing_x(a, b, yc));
    }
    std::sort(crossings.begin(), crossings.end());
    for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
      const double lo = crossings[k];
      const double hi = crossings[k + 1];
      // Cell x is inside iff lo <= x + 0.5 < hi; fix up rounding from ceil.
      double start = std::ceil(lo - 0.5);
      while (start - 0.5 >= lo) start -= 1.0;
      while (start + 0.5 < lo) start += 1.0;
      if (start >= window.x_end) continue;
      const int x0 = static_cast<int>(std::max<double>(start, window.x_begin));
      int x1 = x0;
      while (x1 < window.x_end && x1 + 0.5 < hi) ++x1;
      if (x1 > x0) fn(y, x0, x1);
    }
  }
}

template <typename SpanFn>
void for_each_raster_span(const Polygon& poly, int height, int width, SpanFn&& fn) {
  for_each_raster_span(poly, RasterWindow{0, height, 0, width}, std::forward<SpanFn>(fn));
}

template <typename T>
void rasterize_into(const Polygon& poly, Grid<T>& grid, T value) {
  for_each_raster_span(poly, grid.height(), grid.width(), [&](int y, int x0, int x1) {
    for (int x = x0; x < x1; ++x) grid(y, x) = value;
  });
}

template <typename Inside>
Polygon trace_outer_boundary(int height, int width, int start_y, int start_x, Inside&& inside) {
  // Lattice directions, clockwise on screen (y down): E, S, W, N. The region
  // is kept on the clockwise side of travel.
  constexpr int kDx[4] = {1, 0, -1, 0};
  constexpr int kDy[4] = {0, 1, 0, -1};

  auto is_in = [&](int y, int x) {
    return y >= 0 && y < height && x >= 0 && x < width && inside(y, x);
  };

  Polygon contour;
  const int sx = start_x;
  const int sy = start_y;
  int wx = sx;
  int wy = sy;
  int dir = 0;
  contour.vertices.push_back({static_cast<double>(sx), static_cast<double>(sy)});

  const long long guard = 4LL * (static_cast<long long>(height) + 1) * (static_cast<long long>(width) + 1) + 8;
  for (long long step = 0; step < guard; ++step) {
    wx += kDx[dir];
    wy += kDy[dir];
    if (wx == sx && wy == sy) break;
    const int rx = -kDy[dir];
    const int ry = kDx[dir];
    // Pixel ahead on the left/right of travel, addressed by its top-left corner.
    const int lx = wx + (kDx[dir] - rx - 1) / 2;
    const int ly = wy + (kDy[dir] - ry - 1) / 2;
    const int ax = wx + (kDx[dir] + rx - 1) / 2;
    const int ay = wy + (kDy[dir] + ry - 1) / 2;
    int next = dir;
    if (is_in(ly, lx)) {
      next = (dir + 3) % 4;
    } else if (!is_in(ay, ax)) {
      next = (dir + 1) % 4;
    }
    if (next != dir) {
      contour.vertices.push_back({static_cast<double>(wx), static_cast<double>(wy)});
      dir = next;
    }
  }
  return contour;
}

}  // namespace ctmap
