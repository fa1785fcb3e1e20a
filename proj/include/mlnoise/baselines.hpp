#pragma once

#include <Eigen/Dense>
#include <string>

#include "mlnoise/datagen.hpp"
#include "mlnoise/estimator.hpp"

namespace mlnoise {

struct AnchorConfig {
  enum class Mode { max, percentile };
  Mode mode = Mode::max;
  double percentile = 0.97;

  void validate() const;
};

// Anchor-point estimator: per class j and clean value c, take the example
// with the largest (or percentile-ranked) estimated posterior of that value
// and read T row c off its noisy posterior [1-g, g]. Rows are screened and
// clipped like our candidates; a screened-out matrix is still emitted with
// its flags so the comparison table stays complete.
EstimationReport t_estimator(const Eigen::MatrixXd& noisy_posteriors, const AnchorConfig& cfg,
                             const ScreenOptions& screen = {});

// Dual-T: factorizes through the intermediate predicted label ybar_hat =
// I[g > 0.5]. The clean->intermediate factor comes from anchor points of the
// intermediate posterior; the intermediate->noisy factor from counting
// agreement between predicted and noisy labels. Throws
// DegenerateIntermediate when a class has no predicted positives/negatives.
EstimationReport dual_t_estimator(const Eigen::MatrixXd& noisy_posteriors,
                                  const LabelMatrix& noisy_labels, const AnchorConfig& cfg,
                                  const ScreenOptions& screen = {});

}  // namespace mlnoise
