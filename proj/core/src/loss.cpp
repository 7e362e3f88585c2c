#include "ctmap/loss.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "ctmap/decoder.hpp"

namespace ctmap {

void LossConfig::validate() const {
  if (!(lambda > 0.0)) throw Error(ErrorCode::kInvalidArgument, "lambda must be positive");
  if (!(ohem_ratio > 0.0)) throw Error(ErrorCode::kInvalidArgument, "OHEM ratio must be positive");
  if (!(smooth_l1_beta > 0.0)) throw Error(ErrorCode::kInvalidArgument, "smooth L1 beta must be positive");
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps must be positive");
}

BitMask ohem_select(const FloatMap& pred_prob, const BitMask& gt_kernel, const BitMask& training_mask,
                    double ratio) {
  require_same_shape(pred_prob, gt_kernel, "probability map does not match kernel map");
  require_same_shape(pred_prob, training_mask, "probability map does not match training mask");
  if (!(ratio > 0.0)) throw Error(ErrorCode::kInvalidArgument, "OHEM ratio must be positive");

  std::size_t positives = 0;
  std::vector<std::pair<float, std::size_t>> negatives;
  for (std::size_t i = 0; i < pred_prob.size(); ++i) {
    if (!training_mask[i]) continue;
    if (gt_kernel[i]) {
      ++positives;
    } else {
      if (!std::isfinite(pred_prob[i])) throw Error(ErrorCode::kDomainError, "non-finite probability");
      negatives.emplace_back(pred_prob[i], i);
    }
  }
  if (positives == 0) return training_mask;

  const auto wanted = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(positives)));
  const std::size_t k = std::min(wanted, negatives.size());
  auto harder = [](const std::pair<float, std::size_t>& a, const std::pair<float, std::size_t>& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  };
  if (k < negatives.size()) {
    std::nth_element(negatives.begin(), negatives.begin() + static_cast<std::ptrdiff_t>(k), negatives.end(), harder);
  }

  BitMask selected(pred_prob.height(), pred_prob.width(), 0);
  for (std::size_t i = 0; i < selected.size(); ++i) {
    if (training_mask[i] && gt_kernel[i]) selected[i] = 1;
  }
  for (std::size_t j = 0; j < k; ++j) selected[negatives[j].second] = 1;
  return selected;
}

ScalarLoss dice_loss(const FloatMap& pred_prob, const BitMask& gt_kernel, const BitMask& mask, double eps) {
  require_same_shape(pred_prob, gt_kernel, "probability map does not match kernel map");
  require_same_shape(pred_prob, mask, "probability map does not match mask");

  double inter = 0.0;
  double pred_sq = 0.0;
  double gt_sq = 0.0;
  for (std::size_t i = 0; i < pred_prob.size(); ++i) {
    const double p = pred_prob[i];
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::kDomainError, "probability outside [0, 1]");
    if (!mask[i]) continue;
    const double g = gt_kernel[i] ? 1.0 : 0.0;
    inter += p * g;
    pred_sq += p * p;
    gt_sq += g;
  }
  const double numer = 2.0 * inter + eps;
  const double denom = pred_sq + gt_sq + eps;

  ScalarLoss out{1.0 - numer / denom, Grid<double>(pred_prob.height(), pred_prob.width(), 0.0)};
  const double denom_sq = denom * denom;
  for (std::size_t i = 0; i < pred_prob.size(); ++i) {
    if (!mask[i]) continue;
    const double p = pred_prob[i];
    const double g = gt_kernel[i] ? 1.0 : 0.0;
    out.grad[i] = -(2.0 * g * denom - numer * 2.0 * p) / denom_sq;
  }
  return out;
}

double smooth_l1(double d, double beta) noexcept {
  const double a = std::abs(d);
  return a < beta ? 0.5 * d * d / beta : a - 0.5 * beta;
}

double smooth_l1_grad(double d, double beta) noexcept {
  if (std::abs(d) < beta) return d / beta;
  return d > 0.0 ? 1.0 : -1.0;
}

ShiftLoss relaxed_l1_loss(const ShiftField& pred_shift, const LabelBundle& bundle, const RegressionMask& r,
                          const LossConfig& cfg) {
  cfg.validate();
  require_same_shape(pred_shift, bundle.shift_field, "predicted shift does not match label bundle");
  require_same_shape(pred_shift, r.mask, "predicted shift does not match regression mask");

  const double beta = cfg.smooth_l1_beta;
  double weighted = 0.0;
  double count = 0.0;
  for (std::size_t i = 0; i < pred_shift.size(); ++i) {
    if (!r.mask[i]) continue;
    const Shift p = pred_shift[i];
    const Shift g = bundle.shift_field[i];
    weighted += smooth_l1(static_cast<double>(p.dx) - g.dx, beta) + smooth_l1(static_cast<double>(p.dy) - g.dy, beta);
    count += 1.0;
  }
  const double norm = count + cfg.eps;

  ShiftLoss out{weighted / norm, Grid<std::array<double, 2>>(pred_shift.height(), pred_shift.width(), {0.0, 0.0})};
  for (std::size_t i = 0; i < pred_shift.size(); ++i) {
    if (!r.mask[i]) continue;
    const Shift p = pred_shift[i];
    const Shift g = bundle.shift_field[i];
    out.grad[i] = {smooth_l1_grad(static_cast<double>(p.dx) - g.dx, beta) / norm,
                   smooth_l1_grad(static_cast<double>(p.dy) - g.dy, beta) / norm};
  }
  return out;
}

LossReport total_loss(const PredictionMaps& pred, const LabelBundle& bundle, const LossConfig& cfg) {
  cfg.validate();
  require_same_shape(pred.prob_map, pred.shift_field, "probability and shift maps differ in shape");
  require_same_shape(pred.prob_map, bundle.kernel_map, "prediction does not match label bundle");

  LossReport report;
  report.regression_mask = compute_regression_mask(pred.shift_field, bundle);
  report.ohem_mask = ohem_select(pred.prob_map, bundle.kernel_map, bundle.training_mask, cfg.ohem_ratio);

  BitMask effective = bundle.training_mask;
  for (std::size_t i = 0; i < effective.size(); ++i) effective[i] &= report.ohem_mask[i];

  ScalarLoss seg = dice_loss(pred.prob_map, bundle.kernel_map, effective, cfg.eps);
  ShiftLoss reg = relaxed_l1_loss(pred.shift_field, bundle, report.regression_mask, cfg);

  report.seg_loss = seg.loss;
  report.reg_loss = reg.loss;
  report.total = seg.loss + cfg.lambda * reg.loss;
  report.grad_prob = std::move(seg.grad);
  report.grad_shift = std::move(reg.grad);
  for (auto& g : report.grad_shift.cells()) {
    g[0] *= cfg.lambda;
    g[1] *= cfg.lambda;
  }
  return report;
}

}  // namespace ctmap
