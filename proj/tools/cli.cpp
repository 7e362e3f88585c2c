#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctmap/annotation_io.hpp"
#include "ctmap/decoder.hpp"
#include "ctmap/encoder.hpp"
#include "ctmap/eval.hpp"
#include "ctmap/harness.hpp"
#include "ctmap/image_io.hpp"
#include "ctmap/label_io.hpp"
#include "ctmap/loss.hpp"
#include "ctmap/tensor_io.hpp"

namespace ctmap::cli {
namespace {

using nlohmann::json;

struct Globals {
  double shrink_ratio = kDefaultShrinkRatio;
  double threshold = kDefaultBinarizeThreshold;
  int connectivity = 8;
  double lambda = LossConfig{}.lambda;
  double ohem_ratio = LossConfig{}.ohem_ratio;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct EncodeArgs {
  std::string annotations;
  int height = 0;
  int width = 0;
  std::string out_dir;
};

struct PredictionArgs {
  std::string labels;
  std::string prob;
  std::string shift;
};

struct DecodeArgs {
  PredictionArgs input;
  std::string out;
  bool proposals = false;
  std::string overlay;
  std::string ground_truth;
  int min_kernel_area = DecodeConfig{}.min_kernel_area;
  int min_instance_area = DecodeConfig{}.min_instance_area;
};

struct LossArgs {
  std::string labels;
  std::string prob;
  std::string shift;
  std::string out;
  std::string grad_dir;
};

struct EvalArgs {
  std::string detections;
  std::string ground_truth;
  double iou = EvalOptions{}.iou_threshold;
  int height = 0;
  int width = 0;
  std::string out;
};

struct PerturbArgs {
  std::string labels;
  std::string mode = "gaussian_noise";
  std::vector<double> magnitudes{0.0, 1.0, 2.0, 4.0, 8.0};
  std::string curve;
  std::string plot;
  std::string pred_out;
  double magnitude = 0.0;
};

struct BenchArgs {
  std::string prob;
  std::string shift;
  int height = 640;
  int width = 640;
  int instances = 10;
  int repetitions = 20;
  std::string csv;
};

DecodeConfig decode_config(const Globals& g) {
  DecodeConfig cfg;
  cfg.binarize_threshold = g.threshold;
  cfg.connectivity = g.connectivity == 4 ? Connectivity::kFour : Connectivity::kEight;
  cfg.threads = g.threads;
  return cfg;
}

LossConfig loss_config(const Globals& g) {
  LossConfig cfg;
  cfg.lambda = g.lambda;
  cfg.ohem_ratio = g.ohem_ratio;
  return cfg;
}

// Writes to `path`, or to `fallback` when the path is empty.
template <typename Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(path);
  if (!file) throw Error(ErrorCode::kIoError, "cannot open " + path + " for writing");
  write(file);
  if (!file) throw Error(ErrorCode::kIoError, "failed writing " + path);
}

PredictionMaps load_input(const PredictionArgs& in) {
  if (!in.labels.empty()) return perfect_prediction(load_label_bundle(in.labels));
  return load_prediction(in.prob, in.shift);
}

std::vector<Polygon> polygons_of(const std::vector<TextAnnotation>& anns) {
  std::vector<Polygon> out;
  for (const auto& a : anns) out.push_back(a.polygon);
  return out;
}

int run_encode(const Globals& g, const EncodeArgs& a, std::ostream& out) {
  const auto anns = read_annotations(a.annotations);
  const LabelBundle bundle = generate_labels(anns, a.height, a.width, g.shrink_ratio, g.threads);
  save_label_bundle(a.out_dir, bundle);
  int kernels = 0;
  for (const auto& info : bundle.instances) kernels += info.has_kernel ? 1 : 0;
  out << json{{"instances", bundle.instances.size()}, {"kernels", kernels}, {"height", a.height},
              {"width", a.width}, {"out", a.out_dir}}
             .dump()
      << '\n';
  return kExitOk;
}

int run_decode(const Globals& g, const DecodeArgs& a, std::ostream& out) {
  const PredictionMaps pred = load_input(a.input);
  DecodeConfig cfg = decode_config(g);
  cfg.proposals = a.proposals;
  cfg.min_kernel_area = a.min_kernel_area;
  cfg.min_instance_area = a.min_instance_area;
  const auto instances = decode(pred, cfg);

  emit(a.out, out, [&](std::ostream& os) {
    for (const auto& inst : instances) os << detection_to_json_line(inst) << '\n';
  });
  if (!a.overlay.empty()) {
    std::vector<Polygon> dets;
    for (const auto& inst : instances) dets.push_back(inst.contour);
    const auto gt = a.ground_truth.empty() ? std::vector<Polygon>{} : polygons_of(read_annotations(a.ground_truth));
    write_png(a.overlay, render_overlay(pred.prob_map, dets, gt));
  }
  return kExitOk;
}

int run_loss(const Globals& g, const LossArgs& a, std::ostream& out) {
  const LabelBundle bundle = load_label_bundle(a.labels);
  const PredictionMaps pred = load_prediction(a.prob, a.shift);
  const LossConfig cfg = loss_config(g);
  const LossReport report = total_loss(pred, bundle, cfg);

  const json doc{{"seg_loss", report.seg_loss},
                 {"reg_loss", report.reg_loss},
                 {"total", report.total},
                 {"lambda", cfg.lambda},
                 {"ohem_ratio", cfg.ohem_ratio},
                 {"ohem_pixels", count_set(report.ohem_mask)},
                 {"regression_pixels", count_set(report.regression_mask.mask)}};
  emit(a.out, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  if (!a.grad_dir.empty()) {
    std::filesystem::create_directories(a.grad_dir);
    const std::filesystem::path dir(a.grad_dir);
    write_tensor(dir / "grad_prob.ctmp", to_tensor(report.grad_prob));
    write_tensor(dir / "grad_shift.ctmp", to_tensor(report.grad_shift));
    write_tensor(dir / "regression_mask.ctmp", to_tensor(report.regression_mask.mask));
    write_tensor(dir / "ohem_mask.ctmp", to_tensor(report.ohem_mask));
  }
  return kExitOk;
}

int run_eval(const EvalArgs& a, std::ostream& out) {
  const auto dets = read_annotations(a.detections);
  const auto gts = read_annotations(a.ground_truth);
  EvalOptions options;
  options.iou_threshold = a.iou;
  if (a.height > 0 && a.width > 0) {
    options.height = a.height;
    options.width = a.width;
  }
  const EvalReport report = match_and_score(dets, gts, options);
  json matches = json::array();
  for (const auto& m : report.matches) matches.push_back({{"det", m.det_id}, {"gt", m.gt_id}, {"iou", m.iou}});
  const json doc{{"precision", report.precision},
                 {"recall", report.recall},
                 {"fmeasure", report.fmeasure},
                 {"num_valid_dets", report.num_valid_dets},
                 {"num_valid_gts", report.num_valid_gts},
                 {"num_ignored_dets", report.num_ignored_dets},
                 {"iou_threshold", a.iou},
                 {"matches", matches}};
  emit(a.out, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  return kExitOk;
}

int run_perturb(const Globals& g, const PerturbArgs& a, std::ostream& out) {
  const PerturbMode mode = parse_perturb_mode(a.mode);
  const LabelBundle bundle = load_label_bundle(a.labels);
  const auto curve = robustness_curve(bundle, mode, a.magnitudes, g.seed, decode_config(g));
  emit(a.curve, out, [&](std::ostream& os) {
    os << "magnitude,iou\n";
    for (const auto& c : curve) os << c.magnitude << ',' << c.mean_iou << '\n';
  });
  if (!a.plot.empty()) write_png(a.plot, render_curve(curve));
  if (!a.pred_out.empty()) save_prediction(a.pred_out, perturb(bundle, PerturbSpec{mode, a.magnitude, g.seed}));
  return kExitOk;
}

void write_bench_row(std::ostream& os, const BenchReport& r) {
  os << r.height << ',' << r.width << ',' << r.instances << ',' << r.repetitions << ',' << r.threads << ','
     << r.mean_ms << ',' << r.median_ms << ',' << r.p95_ms << ',' << r.pixels_per_second << '\n';
}

int run_bench(const Globals& g, const BenchArgs& a, std::ostream& out) {
  PredictionMaps pred;
  if (!a.prob.empty() || !a.shift.empty()) {
    pred = load_prediction(a.prob, a.shift);
  } else {
    SceneSpec spec;
    spec.height = a.height;
    spec.width = a.width;
    spec.min_instances = a.instances;
    spec.max_instances = a.instances;
    spec.shrink_ratio = g.shrink_ratio;
    spec.seed = g.seed;
    pred = perfect_prediction(generate_labels(make_synthetic_scene(spec), a.height, a.width, g.shrink_ratio));
  }
  DecodeConfig cfg = decode_config(g);
  std::vector<BenchReport> rows;
  cfg.threads = 1;
  rows.push_back(bench_decode(pred, cfg, a.repetitions));
  if (g.threads > 1) {
    cfg.threads = g.threads;
    rows.push_back(bench_decode(pred, cfg, a.repetitions));
  }
  emit(a.csv, out, [&](std::ostream& os) {
    os << "height,width,instances,repetitions,threads,mean_ms,median_ms,p95_ms,pixels_per_second\n";
    for (const auto& r : rows) write_bench_row(os, r);
  });
  return kExitOk;
}

void add_prediction_inputs(CLI::App* cmd, std::string& prob, std::string& shift) {
  cmd->add_option("--prob", prob, "Probability map tensor (float32 H x W)");
  cmd->add_option("--shift", shift, "Shift field tensor (float32 H x W x 2)");
}

int exit_code_for(const Error& e) {
  return e.code() == ErrorCode::kInvalidArgument ? kExitUsage : kExitData;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Globals g;
  CLI::App app{"Centripetal text map codec: encode, decode, loss, eval, perturb, bench", "ctmap"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.add_option("--shrink-ratio", g.shrink_ratio, "Kernel shrink ratio")->capture_default_str();
  app.add_option("--threshold", g.threshold, "Kernel binarization threshold")->capture_default_str();
  app.add_option("--connectivity", g.connectivity, "Kernel connectivity (4 or 8)")
      ->check(CLI::IsMember({4, 8}))
      ->capture_default_str();
  app.add_option("--lambda", g.lambda, "Regression loss weight")->capture_default_str();
  app.add_option("--ohem-ratio", g.ohem_ratio, "OHEM negative:positive ratio")->capture_default_str();
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  EncodeArgs enc;
  auto* encode = app.add_subcommand("encode", "Annotations -> label tensors");
  encode->fallthrough();
  encode->add_option("--annotations", enc.annotations, "Annotation JSONL")->required();
  encode->add_option("--height", enc.height, "Map height")->required()->check(CLI::PositiveNumber);
  encode->add_option("--width", enc.width, "Map width")->required()->check(CLI::PositiveNumber);
  encode->add_option("--out", enc.out_dir, "Output directory")->required();

  DecodeArgs dec;
  auto* decode_cmd = app.add_subcommand("decode", "Prediction tensors -> detection JSONL");
  decode_cmd->fallthrough();
  auto* dec_labels =
      decode_cmd->add_option("--labels", dec.input.labels, "Label directory; decodes its perfect prediction");
  add_prediction_inputs(decode_cmd, dec.input.prob, dec.input.shift);
  decode_cmd->add_option("--out", dec.out, "Detections JSONL (default: stdout)");
  decode_cmd->add_flag("--proposals", dec.proposals, "Attach minimum-area rectangles");
  decode_cmd->add_option("--overlay", dec.overlay, "Write an overlay PNG");
  decode_cmd->add_option("--gt", dec.ground_truth, "Ground-truth annotations drawn on the overlay");
  decode_cmd->add_option("--min-kernel-area", dec.min_kernel_area, "Smallest kept kernel (px)")->capture_default_str();
  decode_cmd->add_option("--min-instance-area", dec.min_instance_area, "Smallest kept instance (px)")
      ->capture_default_str();

  LossArgs loss;
  auto* loss_cmd = app.add_subcommand("loss", "Prediction + label tensors -> loss report JSON");
  loss_cmd->fallthrough();
  loss_cmd->add_option("--labels", loss.labels, "Label directory")->required();
  loss_cmd->add_option("--prob", loss.prob, "Probability map tensor")->required();
  loss_cmd->add_option("--shift", loss.shift, "Shift field tensor")->required();
  loss_cmd->add_option("--out", loss.out, "Report path (default: stdout)");
  loss_cmd->add_option("--grad-dir", loss.grad_dir, "Write gradient and mask tensors here");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Detections vs ground truth -> evaluation JSON");
  eval_cmd->fallthrough();
  eval_cmd->add_option("--det", ev.detections, "Detection JSONL")->required();
  eval_cmd->add_option("--gt", ev.ground_truth, "Ground-truth JSONL")->required();
  eval_cmd->add_option("--iou", ev.iou, "Match IoU threshold")->capture_default_str();
  eval_cmd->add_option("--height", ev.height, "Clip rasterization to this height");
  eval_cmd->add_option("--width", ev.width, "Clip rasterization to this width");
  eval_cmd->add_option("--out", ev.out, "Report path (default: stdout)");

  PerturbArgs pert;
  auto* perturb_cmd = app.add_subcommand("perturb", "Robustness curve of decode under shift perturbation");
  perturb_cmd->fallthrough();
  perturb_cmd->add_option("--labels", pert.labels, "Label directory")->required();
  perturb_cmd->add_option("--mode", pert.mode, "gaussian_noise | retarget_in_kernel | retarget_uniform")
      ->check(CLI::IsMember({"gaussian_noise", "retarget_in_kernel", "retarget_uniform"}))
      ->capture_default_str();
  perturb_cmd->add_option("--magnitudes", pert.magnitudes, "Ascending magnitudes (px)")
      ->delimiter(',')
      ->capture_default_str();
  perturb_cmd->add_option("--curve", pert.curve, "Curve CSV (default: stdout)");
  perturb_cmd->add_option("--plot", pert.plot, "Curve plot PNG");
  perturb_cmd->add_option("--pred-out", pert.pred_out, "Write the prediction perturbed at --magnitude");
  perturb_cmd->add_option("--magnitude", pert.magnitude, "Magnitude for --pred-out")->capture_default_str();

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Decode timing; reports 1 thread and --threads when above 1");
  bench_cmd->fallthrough();
  add_prediction_inputs(bench_cmd, bench.prob, bench.shift);
  bench_cmd->add_option("--height", bench.height, "Synthetic scene height")->capture_default_str();
  bench_cmd->add_option("--width", bench.width, "Synthetic scene width")->capture_default_str();
  bench_cmd->add_option("--instances", bench.instances, "Synthetic instance count")->capture_default_str();
  bench_cmd->add_option("--reps", bench.repetitions, "Timed repetitions")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--csv", bench.csv, "CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (decode_cmd->parsed()) {
      const bool tensors = !dec.input.prob.empty() && !dec.input.shift.empty();
      if (dec_labels->count() == 0 && !tensors) {
        err << "decode: give --labels, or both --prob and --shift\n";
        return kExitUsage;
      }
    }
    if (bench_cmd->parsed() && bench.prob.empty() != bench.shift.empty()) {
      err << "bench: --prob and --shift go together\n";
      return kExitUsage;
    }
    if (encode->parsed()) return run_encode(g, enc, out);
    if (decode_cmd->parsed()) return run_decode(g, dec, out);
    if (loss_cmd->parsed()) return run_loss(g, loss, out);
    if (eval_cmd->parsed()) return run_eval(ev, out);
    if (perturb_cmd->parsed()) return run_perturb(g, pert, out);
    if (bench_cmd->parsed()) return run_bench(g, bench, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

int cli_dispatch(int argc, const char* const* argv) { return cli_dispatch(argc, argv, std::cout, std::cerr); }

}  // namespace ctmap::cli
