#include "ctmap/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include <png.h>

namespace ctmap {
namespace {

void put_pixel(RgbImage& image, int y, int x, Rgb color) {
  if (image.contains(y, x)) image(y, x) = color;
}

void draw_line(RgbImage& image, Point a, Point b, Rgb color) {
  const double len = std::max(std::abs(b.x - a.x), std::abs(b.y - a.y));
  const int steps = std::max(1, static_cast<int>(std::ceil(len)));
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    // Vertex coordinates are pixel corners; pixel (y, x) covers [x, x+1).
    put_pixel(image, static_cast<int>(std::floor(a.y + t * (b.y - a.y))),
              static_cast<int>(std::floor(a.x + t * (b.x - a.x))), color);
  }
}

}  // namespace

void write_png(const std::filesystem::path& path, const RgbImage& image) {
  if (image.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot write an empty image");
  std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!file) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorCode::kIoError, "libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kIoError, "failed writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()), static_cast<png_uint_32>(image.height()), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  static_assert(sizeof(Rgb) == 3);
  for (int y = 0; y < image.height(); ++y) {
    auto* row = const_cast<Rgb*>(&image(y, 0));
    png_write_row(png, reinterpret_cast<png_bytep>(row));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void draw_polygon(RgbImage& image, const Polygon& poly, Rgb color) {
  const auto& v = poly.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) draw_line(image, v[i], v[(i + 1) % v.size()], color);
}

RgbImage render_overlay(const FloatMap& prob, const std::vector<Polygon>& detections,
                        const std::vector<Polygon>& ground_truth) {
  RgbImage image(prob.height(), prob.width(), Rgb{0, 0, 0});
  for (std::size_t i = 0; i < prob.size(); ++i) {
    const float p = std::clamp(std::isfinite(prob[i]) ? prob[i] : 0.0F, 0.0F, 1.0F);
    const auto g = static_cast<std::uint8_t>(std::lround(p * 255.0F));
    image[i] = Rgb{g, g, g};
  }
  for (const auto& poly : ground_truth) draw_polygon(image, poly, kGroundTruthColor);
  for (const auto& poly : detections) draw_polygon(image, poly, kDetectionColor);
  return image;
}

RgbImage render_curve(const std::vector<CurvePoint>& curve, int height, int width) {
  if (height < 32 || width < 32) throw Error(ErrorCode::kInvalidArgument, "plot must be at least 32x32");
  RgbImage image(height, width, Rgb{255, 255, 255});
  constexpr int kMargin = 12;
  const Rgb axis{0, 0, 0};
  const Rgb grid{220, 220, 220};
  const Rgb line{30, 90, 200};
  const double x0 = kMargin;
  const double x1 = width - kMargin;
  const double y0 = height - kMargin;  // IoU 0
  const double y1 = kMargin;           // IoU 1

  for (int k = 1; k < 4; ++k) {
    const double y = y0 + (y1 - y0) * k / 4.0;
    draw_line(image, {x0, y}, {x1, y}, grid);
  }
  draw_line(image, {x0, y0}, {x1, y0}, axis);
  draw_line(image, {x0, y0}, {x0, y1}, axis);
  if (curve.empty()) return image;

  double max_mag = 0.0;
  for (const auto& c : curve) max_mag = std::max(max_mag, c.magnitude);
  if (max_mag <= 0.0) max_mag = 1.0;
  auto to_px = [&](const CurvePoint& c) {
    return Point{x0 + (x1 - x0) * c.magnitude / max_mag, y0 + (y1 - y0) * std::clamp(c.mean_iou, 0.0, 1.0)};
  };
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) draw_line(image, to_px(curve[i]), to_px(curve[i + 1]), line);
  for (const auto& c : curve) {
    const Point p = to_px(c);
    for (int dy = -2; dy <= 2; ++dy) {
      for (int dx = -2; dx <= 2; ++dx) {
        put_pixel(image, static_cast<int>(p.y) + dy, static_cast<int>(p.x) + dx, line);
      }
    }
  }
  return image;
}

}  // namespace ctmap
