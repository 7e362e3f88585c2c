#include "ctmap/harness.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <unordered_map>

#include "ctmap/random.hpp"

namespace ctmap {
namespace {

// Stream ids keep the draws of different modes independent.
constexpr std::uint64_t kStreamGaussian = 1;
constexpr std::uint64_t kStreamRetarget = 2;
constexpr std::uint64_t kStreamUniform = 3;
constexpr std::uint64_t kStreamJitter = 4;

}  // namespace

std::string_view to_string(PerturbMode mode) {
  switch (mode) {
    case PerturbMode::kGaussianNoise: return "gaussian_noise";
    case PerturbMode::kRetargetInKernel: return "retarget_in_kernel";
    case PerturbMode::kRetargetUniform: return "retarget_uniform";
  }
  return "unknown";
}

PerturbMode parse_perturb_mode(std::string_view name) {
  for (auto mode : {PerturbMode::kGaussianNoise, PerturbMode::kRetargetInKernel, PerturbMode::kRetargetUniform}) {
    if (to_string(mode) == name) return mode;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown perturbation mode '" + std::string(name) + "'");
}

PredictionMaps perfect_prediction(const LabelBundle& bundle) {
  PredictionMaps pred{FloatMap(bundle.height, bundle.width, 0.0F), bundle.shift_field};
  for (std::size_t i = 0; i < pred.prob_map.size(); ++i) pred.prob_map[i] = bundle.kernel_map[i] ? 1.0F : 0.0F;
  return pred;
}

PredictionMaps perturb(const LabelBundle& bundle, const PerturbSpec& spec) {
  if (!(spec.magnitude >= 0.0) || !std::isfinite(spec.magnitude)) {
    throw Error(ErrorCode::kInvalidArgument, "perturbation magnitude must be finite and non-negative");
  }
  PredictionMaps pred = perfect_prediction(bundle);
  const CounterRng rng(spec.seed);
  auto& shift = pred.shift_field;
  const double m = spec.magnitude;

  switch (spec.mode) {
    case PerturbMode::kGaussianNoise:
      for (std::size_t i = 0; i < shift.size(); ++i) {
        shift[i].dx = static_cast<float>(shift[i].dx + m * rng.normal(2 * kStreamGaussian, i));
        shift[i].dy = static_cast<float>(shift[i].dy + m * rng.normal(2 * kStreamGaussian + 1, i));
      }
      break;
    case PerturbMode::kRetargetUniform:
      for (std::size_t i = 0; i < shift.size(); ++i) {
        shift[i].dx = static_cast<float>(shift[i].dx + m * (2.0 * rng.uniform(2 * kStreamUniform, i) - 1.0));
        shift[i].dy = static_cast<float>(shift[i].dy + m * (2.0 * rng.uniform(2 * kStreamUniform + 1, i) - 1.0));
      }
      break;
    case PerturbMode::kRetargetInKernel: {
      std::vector<std::vector<std::size_t>> kernel_pixels(bundle.instances.size() + 1);
      for (std::size_t i = 0; i < shift.size(); ++i) {
        const int k = bundle.kernel_id.labels[i];
        if (k > 0) kernel_pixels[static_cast<std::size_t>(k)].push_back(i);
      }
      const auto w = static_cast<std::size_t>(bundle.width);
      const double jitter = std::min(m, 0.49);
      for (std::size_t i = 0; i < shift.size(); ++i) {
        const int id = bundle.instance_id.labels[i];
        if (!bundle.supervised(id)) continue;
        const auto& pool = kernel_pixels[static_cast<std::size_t>(id)];
        const std::size_t target = pool[rng.below(kStreamRetarget, i, pool.size())];
        const auto dx = static_cast<long long>(target % w) - static_cast<long long>(i % w);
        const auto dy = static_cast<long long>(target / w) - static_cast<long long>(i / w);
        const double jx = jitter * (2.0 * rng.uniform(2 * kStreamJitter, i) - 1.0);
        const double jy = jitter * (2.0 * rng.uniform(2 * kStreamJitter + 1, i) - 1.0);
        shift[i] = Shift{static_cast<float>(static_cast<double>(dx) + jx), static_cast<float>(static_cast<double>(dy) + jy)};
      }
      break;
    }
  }
  return pred;
}

double mean_instance_iou(const LabelBundle& bundle, const std::vector<DecodedInstance>& decoded) {
  const std::size_t n = bundle.instances.size();
  std::vector<std::size_t> gt_area(n + 1, 0);
  for (auto id : bundle.instance_id.labels.cells()) ++gt_area[static_cast<std::size_t>(id)];

  std::vector<double> best(n + 1, 0.0);
  std::unordered_map<int, std::size_t> overlap;
  for (const auto& inst : decoded) {
    overlap.clear();
    const auto& b = inst.bounds;
    for (int y = b.y0; y <= b.y1; ++y) {
      for (int x = b.x0; x <= b.x1; ++x) {
        if (inst.pixel_mask(y, x)) ++overlap[bundle.instance_id(y, x)];
      }
    }
    for (const auto& [id, inter] : overlap) {
      if (id == 0) continue;
      const auto uni = static_cast<double>(gt_area[static_cast<std::size_t>(id)] + inst.pixel_count - inter);
      best[static_cast<std::size_t>(id)] = std::max(best[static_cast<std::size_t>(id)], static_cast<double>(inter) / uni);
    }
  }

  double total = 0.0;
  int counted = 0;
  for (std::size_t id = 1; id <= n; ++id) {
    if (bundle.instances[id - 1].ignore) continue;
    total += best[id];
    ++counted;
  }
  if (counted == 0) return decoded.empty() ? 1.0 : 0.0;
  return total / counted;
}

std::vector<CurvePoint> robustness_curve(const LabelBundle& bundle, PerturbMode mode,
                                         const std::vector<double>& magnitudes, std::uint64_t seed,
                                         const DecodeConfig& cfg) {
  if (!std::is_sorted(magnitudes.begin(), magnitudes.end())) {
    throw Error(ErrorCode::kInvalidArgument, "magnitudes must be sorted ascending");
  }
  std::vector<CurvePoint> curve;
  curve.reserve(magnitudes.size());
  for (double m : magnitudes) {
    const PredictionMaps pred = perturb(bundle, PerturbSpec{mode, m, seed});
    curve.push_back({m, mean_instance_iou(bundle, decode(pred, cfg))});
  }
  return curve;
}

TimingStats time_repeated(const std::function<void()>& body, int repetitions) {
  if (repetitions < 1) throw Error(ErrorCode::kInvalidArgument, "repetitions must be at least 1");
  using Clock = std::chrono::steady_clock;
  body();  // warmup

  TimingStats stats;
  stats.samples_ms.reserve(static_cast<std::size_t>(repetitions));
  for (int r = 0; r < repetitions; ++r) {
    const auto start = Clock::now();
    body();
    const auto stop = Clock::now();
    stats.samples_ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
  }

  std::vector<double> sorted = stats.samples_ms;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  stats.mean_ms = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
  stats.median_ms = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  stats.p95_ms = sorted[std::max<std::size_t>(rank, 1) - 1];
  return stats;
}

BenchReport bench_decode(const PredictionMaps& pred, const DecodeConfig& cfg, int repetitions) {
  std::size_t found = 0;
  const TimingStats stats = time_repeated([&] { found = decode(pred, cfg).size(); }, repetitions);

  BenchReport report;
  report.height = pred.height();
  report.width = pred.width();
  report.instances = static_cast<int>(found);
  report.repetitions = repetitions;
  report.threads = cfg.threads;
  report.mean_ms = stats.mean_ms;
  report.median_ms = stats.median_ms;
  report.p95_ms = stats.p95_ms;
  report.pixels_per_second =
      static_cast<double>(pred.prob_map.size()) / (stats.mean_ms / 1000.0);
  return report;
}

namespace {

Polygon make_bar(SequentialRng& rng, double dim, double thickness) {
  const double length = rng.uniform(0.12, 0.4) * dim;
  const double angle = rng.uniform(-60.0, 60.0) * std::numbers::pi / 180.0;
  const Point c{0.0, 0.0};
  const Point u{std::cos(angle) * length / 2.0, std::sin(angle) * length / 2.0};
  const Point v{-std::sin(angle) * thickness / 2.0, std::cos(angle) * thickness / 2.0};
  return Polygon{{{c.x - u.x - v.x, c.y - u.y - v.y},
                  {c.x + u.x - v.x, c.y + u.y - v.y},
                  {c.x + u.x + v.x, c.y + u.y + v.y},
                  {c.x - u.x + v.x, c.y - u.y + v.y}}};
}

Polygon make_band(SequentialRng& rng, double dim, double thickness) {
  const double radius = std::max(rng.uniform(0.15, 0.35) * dim, thickness);
  const double span = rng.uniform(40.0, 120.0) * std::numbers::pi / 180.0;
  const double start = rng.uniform(0.0, 2.0 * std::numbers::pi);
  constexpr int kSegments = 8;
  const double outer = radius + thickness / 2.0;
  const double inner = radius - thickness / 2.0;
  Polygon p;
  for (int k = 0; k <= kSegments; ++k) {
    const double a = start + span * k / kSegments;
    p.vertices.push_back({outer * std::cos(a), outer * std::sin(a)});
  }
  for (int k = kSegments; k >= 0; --k) {
    const double a = start + span * k / kSegments;
    p.vertices.push_back({inner * std::cos(a), inner * std::sin(a)});
  }
  // Center the band on its own arc midpoint.
  const double mid = start + span / 2.0;
  return translated(p, -radius * std::cos(mid), -radius * std::sin(mid));
}

Polygon make_quad(SequentialRng& rng, double dim, double thickness) {
  const double w = rng.uniform(0.1, 0.3) * dim;
  const double h = std::max(thickness, rng.uniform(0.5, 1.0) * std::min(w, 2.5 * thickness));
  auto jitter = [&](double s) { return rng.uniform(-0.15, 0.15) * s; };
  return Polygon{{{-w / 2 + jitter(w), -h / 2 + jitter(h)},
                  {w / 2 + jitter(w), -h / 2 + jitter(h)},
                  {w / 2 + jitter(w), h / 2 + jitter(h)},
                  {-w / 2 + jitter(w), h / 2 + jitter(h)}}};
}

}  // namespace

std::vector<TextAnnotation> make_synthetic_scene(const SceneSpec& spec) {
  if (spec.height <= 0 || spec.width <= 0) throw Error(ErrorCode::kInvalidArgument, "scene dimensions must be positive");
  if (spec.min_instances < 0 || spec.max_instances < spec.min_instances) {
    throw Error(ErrorCode::kInvalidArgument, "bad instance count range");
  }
  constexpr int kGap = 2;
  constexpr int kMinInstanceArea = 16;
  constexpr int kMinKernelArea = 2;
  constexpr int kAttemptsPerInstance = 200;

  SequentialRng rng(spec.seed, 0x5CE4E);
  const int wanted = rng.uniform_int(spec.min_instances, spec.max_instances);
  const double dim = std::min(spec.height, spec.width);
  const double max_thickness = std::max(12.0, 0.1 * dim);

  // Cells within kGap (Chebyshev) of a placed instance.
  BitMask blocked(spec.height, spec.width, 0);
  std::vector<TextAnnotation> scene;

  for (int attempt = 0; attempt < wanted * kAttemptsPerInstance && static_cast<int>(scene.size()) < wanted; ++attempt) {
    const double thickness = rng.uniform(10.0, max_thickness);
    Polygon shape;
    switch (rng.uniform_int(0, 2)) {
      case 0: shape = make_bar(rng, dim, thickness); break;
      case 1: shape = make_band(rng, dim, thickness); break;
      default: shape = make_quad(rng, dim, thickness); break;
    }
    shape = translated(shape, rng.uniform(0.0, spec.width), rng.uniform(0.0, spec.height));

    const bool inside = std::all_of(shape.vertices.begin(), shape.vertices.end(), [&](const Point& p) {
      return p.x >= 1.0 && p.y >= 1.0 && p.x <= spec.width - 1.0 && p.y <= spec.height - 1.0;
    });
    if (!inside) continue;
    shape = normalized(std::move(shape));
    try {
      validate(shape);
    } catch (const Error&) {
      continue;
    }

    std::vector<std::array<int, 3>> spans;
    bool clear = true;
    long long cells = 0;
    for_each_raster_span(shape, spec.height, spec.width, [&](int y, int x0, int x1) {
      spans.push_back({y, x0, x1});
      cells += x1 - x0;
      for (int x = x0; x < x1 && clear; ++x) clear = !blocked(y, x);
    });
    if (!clear || cells < kMinInstanceArea) continue;

    const auto kernel = shrink_polygon(shape, spec.shrink_ratio);
    if (!kernel) continue;
    BitMask kernel_mask(spec.height, spec.width, 0);
    rasterize_into<std::uint8_t>(*kernel, kernel_mask, 1);
    if (count_set(kernel_mask) < kMinKernelArea) continue;
    if (connected_components(kernel_mask, Connectivity::kEight).num_labels != 1) continue;

    for (const auto& [y, x0, x1] : spans) {
      for (int yy = std::max(0, y - kGap); yy <= std::min(spec.height - 1, y + kGap); ++yy) {
        for (int xx = std::max(0, x0 - kGap); xx < std::min(spec.width, x1 + kGap); ++xx) blocked(yy, xx) = 1;
      }
    }
    TextAnnotation ann;
    ann.polygon = std::move(shape);
    ann.id = static_cast<int>(scene.size());
    scene.push_back(std::move(ann));
  }
  return scene;
}

}  // namespace ctmap
