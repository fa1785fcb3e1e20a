#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mlnoise/datagen.hpp"
#include "mlnoise/transition.hpp"

namespace mlnoise {

struct MetricsBundle {
  double map = 0.0;  // mean average precision
  double of1 = 0.0;  // micro F1 at the threshold
  double cf1 = 0.0;  // macro F1 at the threshold
  Eigen::VectorXd per_class_ap;
  std::vector<int> skipped_classes;  // no positives in truth; AP undefined
};

// Sum over classes of the entrywise L1 distance of the 2x2 matrices.
double estimation_error(const std::vector<TransitionMatrix2>& t_true,
                        const std::vector<TransitionMatrix2>& t_hat);

// AP averages precision at each positive over the score-descending ranking
// (no interpolation); ties broken by original index. Predictions are positive
// when the score is strictly greater than the threshold.
MetricsBundle classification_metrics(const Eigen::MatrixXd& scores, const LabelMatrix& truth,
                                     double threshold = 0.5);

}  // namespace mlnoise
