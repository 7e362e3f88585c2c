#pragma once

#include <array>

#include "ctmap/encoder.hpp"
#include "ctmap/grid.hpp"

namespace ctmap {

struct PredictionMaps;

struct LossConfig {
  /// Weight of the regression term in seg + lambda * reg.
  double lambda = 0.05;
  /// Hard negatives kept per positive.
  double ohem_ratio = 3.0;
  double smooth_l1_beta = 1.0;
  double eps = 1e-6;

  void validate() const;
};

struct LossReport {
  double seg_loss = 0.0;
  double reg_loss = 0.0;
  double total = 0.0;
  /// d total / d prob.
  Grid<double> grad_prob;
  /// d total / d shift, (x, y) per pixel.
  Grid<std::array<double, 2>> grad_shift;
  BitMask ohem_mask;
  RegressionMask regression_mask;
};

/// Positives (kernel inside the training mask) plus the k highest-scoring
/// negatives, k = floor(ratio * #pos) capped at #neg, ties broken by raster
/// order. With no positives the training mask is returned unchanged.
BitMask ohem_select(const FloatMap& pred_prob, const BitMask& gt_kernel, const BitMask& training_mask,
                    double ratio);

struct ScalarLoss {
  double loss = 0.0;
  Grid<double> grad;
};

/// Global masked Dice: 1 - (2 sum(p g) + eps) / (sum(p^2) + sum(g^2) + eps)
/// over masked pixels, with its gradient w.r.t. the prediction.
ScalarLoss dice_loss(const FloatMap& pred_prob, const BitMask& gt_kernel, const BitMask& mask, double eps = 1e-6);

double smooth_l1(double d, double beta) noexcept;
double smooth_l1_grad(double d, double beta) noexcept;

struct ShiftLoss {
  double loss = 0.0;
  Grid<std::array<double, 2>> grad;
};

/// Smooth L1 on shift residuals gated by R and normalized by sum(R) + eps.
/// R is a constant: no gradient flows through it.
ShiftLoss relaxed_l1_loss(const ShiftField& pred_shift, const LabelBundle& bundle, const RegressionMask& r,
                          const LossConfig& cfg = {});

/// seg (Dice under training mask and OHEM) + lambda * relaxed L1.
LossReport total_loss(const PredictionMaps& pred, const LabelBundle& bundle, const LossConfig& cfg = {});

}  // namespace ctmap
