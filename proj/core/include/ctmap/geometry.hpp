#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ctmap/grid.hpp"

namespace ctmap {

struct Point {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point&) const = default;
};

/// Closed contour given by its vertices; the closing edge is implicit.
/// Orientation follows the shoelace sign: normalized polygons have positive
/// signed area (counter-clockwise with y pointing up, clockwise on screen).
struct Polygon {
  std::vector<Point> vertices;

  std::size_t size() const noexcept { return vertices.size(); }
  bool operator==(const Polygon&) const = default;
};

double signed_area(const Polygon& poly);
double area(const Polygon& poly);
double perimeter(const Polygon& poly);

/// Throws InvalidPolygon for fewer than 3 vertices, non-finite coordinates,
/// or a proper crossing between two non-adjacent edges. Edges that only touch
/// (a pinch vertex shared by two boundary passes) are accepted.
void validate(const Polygon& poly);

/// Drops repeated consecutive vertices and reorients to positive signed area.
Polygon normalized(Polygon poly);

Polygon translated(const Polygon& poly, double dx, double dy);
Polygon scaled(const Polygon& poly, double factor);

/// Even-odd test against the pixel-center convention used by rasterize().
bool contains_point(const Polygon& poly, Point p);

/// Inset distance used by shrink_polygon: Area * (1 - ratio^2) / Perimeter.
double shrink_offset(const Polygon& poly, double ratio);

/// Insets `poly` by shrink_offset(poly, ratio). Returns nullopt when the inset
/// annihilates the polygon; when it splits, the largest-area piece is kept.
std::optional<Polygon> shrink_polygon(const Polygon& poly, double ratio);

/// Sets every cell of a height x width grid whose center lies inside `poly`
/// (even-odd rule). Parts outside the grid are clipped.
BitMask rasterize(const Polygon& poly, int height, int width);

/// Half-open integer cell range [y_begin, y_end) x [x_begin, x_end).
struct RasterWindow {
  int y_begin = 0;
  int y_end = 0;
  int x_begin = 0;
  int x_end = 0;
};

/// Calls fn(y, x_begin, x_end) for every run of cells inside `window` whose
/// centers lie inside `poly`. Only checks vertex count and finiteness, not
/// simplicity.
template <typename SpanFn>
void for_each_raster_span(const Polygon& poly, const RasterWindow& window, SpanFn&& fn);

template <typename SpanFn>
void for_each_raster_span(const Polygon& poly, int height, int width, SpanFn&& fn);

/// Writes `value` into every cell rasterize() would set.
template <typename T>
void rasterize_into(const Polygon& poly, Grid<T>& grid, T value);

/// Morphological erosion with a full 3x3 structuring element. Cells outside
/// the grid count as background.
BitMask erode(const BitMask& mask);

enum class Connectivity { kFour = 4, kEight = 8 };

/// Labels connected foreground regions. Ids are dense and assigned in
/// raster-scan order of each component's first pixel.
LabeledGrid connected_components(const BitMask& mask, Connectivity connectivity = Connectivity::kEight);

/// Outer boundary of the region containing the first set pixel of `mask`
/// (raster order), traced along pixel edges with 8-connected semantics and
/// with collinear vertices removed. Throws EmptyComponent on an empty mask.
Polygon extract_contour(const BitMask& mask);

/// Outer boundary of the pixels labelled `id`.
Polygon extract_contour(const LabeledGrid& grid, int id);

/// Boundary trace starting at pixel (start_y, start_x), which must be the
/// first pixel in raster order for which `inside` holds within its region.
template <typename Inside>
Polygon trace_outer_boundary(int height, int width, int start_y, int start_x, Inside&& inside);

struct RotatedRect {
  Point center;
  double width = 0.0;
  double height = 0.0;
  /// Degrees in [-90, 0); `width` runs along this direction.
  double angle = -90.0;

  double area() const noexcept { return width * height; }
  std::vector<Point> corners() const;
};

/// Convex hull by monotone chain, positive orientation, no collinear points.
std::vector<Point> convex_hull(std::span<const Point> points);

/// Minimum-area enclosing rectangle by rotating calipers over the convex hull.
/// Collinear input yields a zero-height rectangle; a single point a zero-size one.
RotatedRect min_area_rect(std::span<const Point> points);

}  // namespace ctmap

#include "ctmap/detail/geometry_impl.hpp"
