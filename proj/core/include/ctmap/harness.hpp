#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "ctmap/decoder.hpp"
#include "ctmap/encoder.hpp"

namespace ctmap {

enum class PerturbMode { kGaussianNoise, kRetargetInKernel, kRetargetUniform };

std::string_view to_string(PerturbMode mode);
PerturbMode parse_perturb_mode(std::string_view name);

struct PerturbSpec {
  PerturbMode mode = PerturbMode::kGaussianNoise;
  /// Pixels; standard deviation for gaussian_noise, half-width for
  /// retarget_uniform. retarget_in_kernel adds a sub-pixel jitter of
  /// half-width min(magnitude, 0.49) that never changes the rounded target.
  double magnitude = 0.0;
  std::uint64_t seed = 0;
};

/// Prediction that reproduces the bundle exactly: kernel map as {0, 1}
/// probabilities and the ground-truth shifts.
PredictionMaps perfect_prediction(const LabelBundle& bundle);

/// Perfect prediction with its shift field disturbed per `spec`. Draws come
/// from fixed per-pixel streams, so results depend only on (bundle, spec).
PredictionMaps perturb(const LabelBundle& bundle, const PerturbSpec& spec);

struct CurvePoint {
  double magnitude = 0.0;
  double mean_iou = 0.0;
};

/// Mean over non-ignored ground-truth instances of the best pixel IoU between
/// the instance's pixels and any decoded instance, one decode per magnitude.
std::vector<CurvePoint> robustness_curve(const LabelBundle& bundle, PerturbMode mode,
                                         const std::vector<double>& magnitudes, std::uint64_t seed,
                                         const DecodeConfig& cfg = {});

/// Mean best-IoU of decoded instances against the bundle's instances.
double mean_instance_iou(const LabelBundle& bundle, const std::vector<DecodedInstance>& decoded);

struct BenchReport {
  int height = 0;
  int width = 0;
  int instances = 0;
  int repetitions = 0;
  int threads = 1;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double p95_ms = 0.0;
  double pixels_per_second = 0.0;
};

struct TimingStats {
  std::vector<double> samples_ms;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double p95_ms = 0.0;
};

/// Runs `body` once untimed, then `repetitions` timed runs.
TimingStats time_repeated(const std::function<void()>& body, int repetitions);

/// Times decode() alone on `pred`.
BenchReport bench_decode(const PredictionMaps& pred, const DecodeConfig& cfg, int repetitions);

struct SceneSpec {
  int height = 640;
  int width = 640;
  int min_instances = 1;
  int max_instances = 10;
  double shrink_ratio = kDefaultShrinkRatio;
  std::uint64_t seed = 0;
};

/// Random scene of separated, non-ignored text-like polygons (rotated bars,
/// curved bands, convex quads). Every instance is at least two pixels away
/// from the others, covers at least 16 pixels, and has a single 8-connected
/// kernel of at least 2 pixels at `shrink_ratio`, so the scene decodes back
/// exactly. May place fewer than the requested count on crowded canvases.
std::vector<TextAnnotation> make_synthetic_scene(const SceneSpec& spec);

}  // namespace ctmap
