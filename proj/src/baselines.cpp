#include "mlnoise/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "mlnoise/errors.hpp"

namespace mlnoise {

void AnchorConfig::validate() const {
  if (percentile <= 0.0 || percentile > 1.0) {
    throw ValidationError("anchor percentile must lie in (0,1]");
  }
}

namespace {

// Index of the anchor example for "posterior of this value", given the
// per-example posterior of value 1.
int anchor_index(const Eigen::VectorXd& g, int value, const AnchorConfig& cfg) {
  const Eigen::Index n = g.size();
  std::vector<int> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  // Ascending by posterior of the requested value; ties by original index.
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double pa = value ? g(a) : 1.0 - g(a);
    const double pb = value ? g(b) : 1.0 - g(b);
    return pa < pb;
  });
  if (cfg.mode == AnchorConfig::Mode::max) return order.back();
  const auto pos = static_cast<Eigen::Index>(std::floor(cfg.percentile * (n - 1)));
  return order[pos];
}

ClassEstimate finish_class(int j, const Eigen::Matrix2d& raw, const ScreenOptions& screen) {
  ClassEstimate ce;
  ce.class_index = j;
  CandidateEstimate cand = screen_candidate(raw, screen);
  cand.pair = {j, -1};
  ce.candidates.push_back(cand);
  // Anchor methods always report a row-stochastic matrix; failed screening is
  // carried as a flag, not a missing entry.
  if (!cand.accepted && cand.reject_reason == "raw entry outside screening window") {
    Eigen::Matrix2d t = raw.cwiseMax(0.0).cwiseMin(1.0);
    for (int r = 0; r < 2; ++r) {
      const double sum = t(r, 0) + t(r, 1);
      if (sum < 1e-9) {
        t(r, 0) = t(r, 1) = 0.5;
      } else {
        t.row(r) /= sum;
      }
    }
    cand.t_hat = transition_from_matrix(t);
  }
  ce.aggregated = cand.t_hat;
  ce.mean_aggregated = cand.t_hat;
  ce.p_hat = cand.p_hat;
  return ce;
}

}  // namespace

EstimationReport t_estimator(const Eigen::MatrixXd& noisy_posteriors, const AnchorConfig& cfg,
                             const ScreenOptions& screen) {
  cfg.validate();
  if (noisy_posteriors.rows() < 1) throw ValidationError("t_estimator: no posteriors");
  EstimationReport report;
  report.method = cfg.mode == AnchorConfig::Mode::max ? "t_max" : "t_percentile";
  const int q = static_cast<int>(noisy_posteriors.cols());
  for (int j = 0; j < q; ++j) {
    const Eigen::VectorXd g = noisy_posteriors.col(j);
    Eigen::Matrix2d raw;
    for (int c = 0; c < 2; ++c) {
      const int anchor = anchor_index(g, c, cfg);
      raw(c, 0) = 1.0 - g(anchor);
      raw(c, 1) = g(anchor);
    }
    report.classes.push_back(finish_class(j, raw, screen));
  }
  return report;
}

EstimationReport dual_t_estimator(const Eigen::MatrixXd& noisy_posteriors,
                                  const LabelMatrix& noisy_labels, const AnchorConfig& cfg,
                                  const ScreenOptions& screen) {
  cfg.validate();
  if (noisy_posteriors.rows() != noisy_labels.rows() ||
      noisy_posteriors.cols() != noisy_labels.cols()) {
    throw ValidationError("dual_t_estimator: posterior/label shape mismatch");
  }
  EstimationReport report;
  report.method = cfg.mode == AnchorConfig::Mode::max ? "dual_t_max" : "dual_t_percentile";
  const int q = static_cast<int>(noisy_posteriors.cols());
  const Eigen::Index n = noisy_posteriors.rows();
  for (int j = 0; j < q; ++j) {
    const Eigen::VectorXd g = noisy_posteriors.col(j);

    // Intermediate -> noisy factor by counting over hard predictions.
    long long count[2][2] = {{0, 0}, {0, 0}};
    for (Eigen::Index i = 0; i < n; ++i) {
      const int pred = g(i) > 0.5 ? 1 : 0;
      ++count[pred][noisy_labels(i, j)];
    }
    Eigen::Matrix2d counting;
    for (int l = 0; l < 2; ++l) {
      const long long row = count[l][0] + count[l][1];
      if (row == 0) {
        throw DegenerateIntermediate("dual_t_estimator: class " + std::to_string(j) +
                                     " has no predicted " + (l ? "positives" : "negatives"));
      }
      counting(l, 0) = static_cast<double>(count[l][0]) / row;
      counting(l, 1) = static_cast<double>(count[l][1]) / row;
    }

    // Clean -> intermediate factor from anchor points of the intermediate
    // posterior (the model output re-read as P(ybar_hat | x)).
    Eigen::Matrix2d anchor_factor;
    for (int c = 0; c < 2; ++c) {
      const int anchor = anchor_index(g, c, cfg);
      anchor_factor(c, 0) = 1.0 - g(anchor);
      anchor_factor(c, 1) = g(anchor);
    }

    const Eigen::Matrix2d raw = anchor_factor * counting;
    report.classes.push_back(finish_class(j, raw, screen));
  }
  return report;
}

}  // namespace mlnoise
