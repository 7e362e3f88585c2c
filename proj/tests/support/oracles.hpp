#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ctmap/encoder.hpp"
#include "ctmap/geometry.hpp"
#include "ctmap/grid.hpp"

// Slow, independent reference implementations used to check the library.
namespace ctmap::oracle {

/// Cell-center ray casting per pixel (crossing-number form).
bool point_in_polygon(const Polygon& poly, double x, double y);
BitMask rasterize(const Polygon& poly, int height, int width);

/// Erosion by direct 3x3 neighborhood inspection.
BitMask erode(const BitMask& mask);

/// Disjoint-set union over every adjacent pair of set pixels, ids renumbered
/// by the raster position of each component's first pixel.
LabeledGrid union_find_components(const BitMask& mask, Connectivity connectivity);

/// Ring between one and two erosions of instance `id`'s kernel, or the
/// kernel itself when one erosion empties it.
BitMask reference_ring(const LabelBundle& bundle, int id);

struct NearestReference {
  long long dist_sq = -1;  // -1 when the reference set is empty
  int y = -1;
  int x = -1;
};

/// Exhaustive scan of `ref` for the pixel closest to (y, x); ties keep the
/// earliest pixel in raster order.
NearestReference nearest_reference(const BitMask& ref, int y, int x);

/// Minimum enclosing rectangle area over the directions of every pair of
/// distinct input points.
double min_rect_area_brute_force(std::span<const Point> points);

/// OHEM selection via a full stable sort of the negatives.
BitMask ohem_by_sort(const FloatMap& prob, const BitMask& gt, const BitMask& training, double ratio);

/// Inset of an axis-aligned rectangle by d on every side.
Polygon inset_rectangle(double x0, double y0, double x1, double y1, double d);

Polygon rectangle(double x0, double y0, double x1, double y1);

/// Mask of all pixels whose label equals `id`.
BitMask label_mask(const LabeledGrid& grid, int id);

}  // namespace ctmap::oracle
