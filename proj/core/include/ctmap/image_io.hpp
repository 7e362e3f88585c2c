#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "ctmap/geometry.hpp"
#include "ctmap/grid.hpp"
#include "ctmap/harness.hpp"

namespace ctmap {

using Rgb = std::array<std::uint8_t, 3>;
using RgbImage = Grid<Rgb>;

inline constexpr Rgb kDetectionColor{0, 200, 0};
inline constexpr Rgb kGroundTruthColor{220, 0, 0};

void write_png(const std::filesystem::path& path, const RgbImage& image);

/// Polygon outline, clipped to the image.
void draw_polygon(RgbImage& image, const Polygon& poly, Rgb color);

/// Grayscale probability map with ground truth outlined in red and
/// detections in green.
RgbImage render_overlay(const FloatMap& prob, const std::vector<Polygon>& detections,
                        const std::vector<Polygon>& ground_truth);

/// Line plot of mean IoU against magnitude; x axis spans [0, max magnitude].
RgbImage render_curve(const std::vector<CurvePoint>& curve, int height = 300, int width = 400);

}  // namespace ctmap
