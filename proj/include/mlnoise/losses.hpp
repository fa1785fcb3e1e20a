#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mlnoise/transition.hpp"

namespace mlnoise {

enum class LossMode { standard, reweight, forward, backward };

std::string to_string(LossMode m);
LossMode loss_mode_from_string(const std::string& s);

// Posteriors are clipped this far away from {0,1} before entering logs or
// importance ratios.
inline constexpr double kProbClip = 1e-7;
// Logits are clipped here before exponentiation when emitting posteriors.
inline constexpr double kLogitClip = 30.0;
// Backward correction refuses transition matrices with |1-rho_- -rho_+| below
// this.
inline constexpr double kBackwardDetFloor = 1e-3;

double sigmoid(double h);
double clip_probability(double g);

// Stable binary cross entropy from the logit: max(h,0) - y*h + log1p(exp(-|h|)).
double bce_from_logit(double h, int y);
// Binary cross entropy from a probability, with clipping.
double bce_from_prob(double g, int y);

// Importance weight  [1-g, g]_{y_bar} / [T^T (1-g, g)]_{y_bar}.
// Bounded by 1 / (1 - max(rho_minus, rho_plus)) under Assumption 1.
double importance_weight(double g, const TransitionMatrix2& t, int y_bar);

// Per-label corrected loss and its derivative w.r.t. the logit. The reweight
// ratio is treated as a constant during the gradient step.
struct LossGrad {
  double loss = 0.0;
  double dlogit = 0.0;
};
LossGrad per_label_loss(double logit, int y_bar, LossMode mode, const TransitionMatrix2* t);

// Sum over classes of the per-class corrected loss, evaluated from posteriors.
double corrected_loss(const Eigen::VectorXd& posteriors,
                      const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>& y_bar,
                      LossMode mode, const std::vector<TransitionMatrix2>& t);

}  // namespace mlnoise
