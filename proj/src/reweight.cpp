#include "mlnoise/reweight.hpp"

#include <algorithm>
#include <cmath>

#include "mlnoise/errors.hpp"
#include "mlnoise/losses.hpp"

namespace mlnoise {

TrainResult train_consistent(const MultiLabelDataset& ds_noisy,
                             const std::vector<TransitionMatrix2>& t_hat, LossMode mode,
                             TrainConfig config) {
  for (const auto& t : t_hat) {
    if (mode == LossMode::reweight && !t.satisfies_assumption1()) {
      throw ValidationError("reweight training requires rho_minus + rho_plus < 1");
    }
  }
  config.loss_mode = mode;
  return train(ds_noisy, config, &t_hat);
}

std::string to_string(LossMode m) {
  switch (m) {
    case LossMode::standard: return "standard";
    case LossMode::reweight: return "reweight";
    case LossMode::forward: return "forward";
    case LossMode::backward: return "backward";
  }
  return "?";
}

LossMode loss_mode_from_string(const std::string& s) {
  if (s == "standard") return LossMode::standard;
  if (s == "reweight") return LossMode::reweight;
  if (s == "forward") return LossMode::forward;
  if (s == "backward") return LossMode::backward;
  throw ValidationError("unknown loss mode: " + s);
}

double sigmoid(double h) {
  if (h >= 0.0) return 1.0 / (1.0 + std::exp(-h));
  const double e = std::exp(h);
  return e / (1.0 + e);
}

double clip_probability(double g) {
  return std::clamp(g, kProbClip, 1.0 - kProbClip);
}

double bce_from_logit(double h, int y) {
  return std::max(h, 0.0) - y * h + std::log1p(std::exp(-std::abs(h)));
}

double bce_from_prob(double g, int y) {
  g = clip_probability(g);
  return y ? -std::log(g) : -std::log(1.0 - g);
}

double importance_weight(double g, const TransitionMatrix2& t, int y_bar) {
  g = clip_probability(g);
  const double clean = y_bar ? g : 1.0 - g;
  const double noisy = y_bar ? t.rho_minus * (1.0 - g) + (1.0 - t.rho_plus) * g
                             : (1.0 - t.rho_minus) * (1.0 - g) + t.rho_plus * g;
  if (noisy < 1e-12) {
    throw ConditioningError("importance weight denominator below 1e-12");
  }
  return clean / noisy;
}

namespace {

LossGrad forward_loss(double g, int y_bar, const TransitionMatrix2& t) {
  // Noisy positive posterior (T^T g')_1.
  const double det = 1.0 - t.rho_minus - t.rho_plus;
  const double pbar1 = t.rho_minus * (1.0 - g) + (1.0 - t.rho_plus) * g;
  const double p = clip_probability(pbar1);
  LossGrad out;
  out.loss = y_bar ? -std::log(p) : -std::log(1.0 - p);
  const double denom = std::max(p * (1.0 - p), 1e-14);
  out.dlogit = (pbar1 - y_bar) * (det * g * (1.0 - g) / denom);
  return out;
}

LossGrad backward_loss(double g, int y_bar, const TransitionMatrix2& t) {
  const double det = 1.0 - t.rho_minus - t.rho_plus;
  if (std::abs(det) < kBackwardDetFloor) {
    throw ConditioningError("backward correction: transition matrix nearly singular");
  }
  // Row y_bar of T^{-1}; rows of the inverse sum to 1.
  const double c0 = (y_bar ? -t.rho_plus : 1.0 - t.rho_plus) / det;
  const double c1 = (y_bar ? 1.0 - t.rho_minus : -t.rho_minus) / det;
  LossGrad out;
  out.loss = c0 * bce_from_prob(g, 0) + c1 * bce_from_prob(g, 1);
  out.dlogit = c0 * g + c1 * (g - 1.0);
  return out;
}

}  // namespace

LossGrad per_label_loss(double logit, int y_bar, LossMode mode, const TransitionMatrix2* t) {
  const double g = sigmoid(logit);
  switch (mode) {
    case LossMode::standard:
      return {bce_from_logit(logit, y_bar), g - y_bar};
    case LossMode::reweight: {
      const double w = importance_weight(g, *t, y_bar);
      return {w * bce_from_prob(g, y_bar), w * (g - y_bar)};
    }
    case LossMode::forward:
      return forward_loss(g, y_bar, *t);
    case LossMode::backward:
      return backward_loss(g, y_bar, *t);
  }
  return {};
}

double corrected_loss(const Eigen::VectorXd& posteriors,
                      const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>& y_bar,
                      LossMode mode, const std::vector<TransitionMatrix2>& t) {
  const auto q = posteriors.size();
  if (y_bar.size() != q) throw ValidationError("corrected_loss: size mismatch");
  if (mode != LossMode::standard && static_cast<Eigen::Index>(t.size()) != q) {
    throw ValidationError("corrected_loss: need one transition matrix per class");
  }
  double total = 0.0;
  for (Eigen::Index j = 0; j < q; ++j) {
    const double g = posteriors(j);
    const int y = y_bar(j);
    switch (mode) {
      case LossMode::standard:
        total += bce_from_prob(g, y);
        break;
      case LossMode::reweight:
        total += importance_weight(g, t[j], y) * bce_from_prob(g, y);
        break;
      case LossMode::forward: {
        const double pbar1 = t[j].rho_minus * (1.0 - g) + (1.0 - t[j].rho_plus) * g;
        total += bce_from_prob(pbar1, y);
        break;
      }
      case LossMode::backward: {
        const double det = 1.0 - t[j].rho_minus - t[j].rho_plus;
        if (std::abs(det) < kBackwardDetFloor) {
          throw ConditioningError("backward correction: transition matrix nearly singular");
        }
        const double c0 = (y ? -t[j].rho_plus : 1.0 - t[j].rho_plus) / det;
        const double c1 = (y ? 1.0 - t[j].rho_minus : -t[j].rho_minus) / det;
        total += c0 * bce_from_prob(g, 0) + c1 * bce_from_prob(g, 1);
        break;
      }
    }
  }
  return total;
}

}  // namespace mlnoise
