#include "mlnoise/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "mlnoise/errors.hpp"

namespace mlnoise {

double estimation_error(const std::vector<TransitionMatrix2>& t_true,
                        const std::vector<TransitionMatrix2>& t_hat) {
  if (t_true.size() != t_hat.size()) {
    throw ValidationError("estimation_error: list length mismatch");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < t_true.size(); ++j) {
    total += l1_distance(t_true[j], t_hat[j]);
  }
  return total;
}

MetricsBundle classification_metrics(const Eigen::MatrixXd& scores, const LabelMatrix& truth,
                                     double threshold) {
  if (scores.rows() != truth.rows() || scores.cols() != truth.cols()) {
    throw ValidationError("classification_metrics: shape mismatch");
  }
  const int n = static_cast<int>(scores.rows());
  const int q = static_cast<int>(scores.cols());

  MetricsBundle out;
  out.per_class_ap = Eigen::VectorXd::Zero(q);

  long long micro_tp = 0, micro_fp = 0, micro_fn = 0;
  double macro_f1_sum = 0.0;
  double ap_sum = 0.0;
  int ap_classes = 0;

  std::vector<int> order(n);
  for (int j = 0; j < q; ++j) {
    long long positives = 0;
    for (int i = 0; i < n; ++i) positives += truth(i, j);

    long long tp = 0, fp = 0, fn = 0;
    for (int i = 0; i < n; ++i) {
      const bool pred = scores(i, j) > threshold;
      const bool pos = truth(i, j) != 0;
      if (pred && pos) ++tp;
      if (pred && !pos) ++fp;
      if (!pred && pos) ++fn;
    }
    micro_tp += tp;
    micro_fp += fp;
    micro_fn += fn;
    const double denom = 2.0 * tp + fp + fn;
    macro_f1_sum += denom > 0.0 ? 2.0 * tp / denom : 0.0;

    if (positives == 0) {
      out.skipped_classes.push_back(j);
      out.per_class_ap(j) = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores(a, j) > scores(b, j); });
    long long hits = 0;
    double precision_sum = 0.0;
    for (int rank = 0; rank < n; ++rank) {
      if (truth(order[rank], j)) {
        ++hits;
        precision_sum += static_cast<double>(hits) / (rank + 1);
      }
    }
    out.per_class_ap(j) = precision_sum / positives;
    ap_sum += out.per_class_ap(j);
    ++ap_classes;
  }

  const double micro_denom = 2.0 * micro_tp + micro_fp + micro_fn;
  out.of1 = micro_denom > 0.0 ? 2.0 * micro_tp / micro_denom : 0.0;
  out.cf1 = q > 0 ? macro_f1_sum / q : 0.0;
  out.map = ap_classes > 0 ? ap_sum / ap_classes : 0.0;
  return out;
}

}  // namespace mlnoise
