#include "mlnoise/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mlnoise/errors.hpp"

namespace mlnoise {

namespace {
constexpr long long kLowSupport = 10;
}

Table2 estimate_joint(const LabelMatrix& noisy, int i, int j) {
  if (i == j) throw ValidationError("estimate_joint: need two distinct classes");
  const long long n = noisy.rows();
  if (n < 1) throw ValidationError("estimate_joint: empty label matrix");
  Table2 t;
  for (long long r = 0; r < n; ++r) {
    ++t.counts[noisy(r, j)][noisy(r, i)];
  }
  long long mn = n;
  for (int k = 0; k < 2; ++k) {
    for (int v = 0; v < 2; ++v) {
      t.prob(k, v) = static_cast<double>(t.counts[k][v]) / static_cast<double>(n);
      mn = std::min(mn, t.counts[k][v]);
    }
  }
  t.min_stratum = mn;
  t.low_support = mn < kLowSupport;
  return t;
}

Table2 estimate_conditional(const LabelMatrix& noisy, const SelectionReport& selected, int i,
                            int j) {
  if (i == j) throw ValidationError("estimate_conditional: need two distinct classes");
  Table2 t;
  for (int idx : selected.selected) {
    ++t.counts[noisy(idx, j)][noisy(idx, i)];
  }
  long long mn = std::numeric_limits<long long>::max();
  for (int k = 0; k < 2; ++k) {
    const long long row = t.counts[k][0] + t.counts[k][1];
    if (row == 0) {
      throw EmptyStratum("estimate_conditional: no selected examples with y^j=" +
                         std::to_string(k));
    }
    for (int v = 0; v < 2; ++v) {
      t.prob(k, v) = static_cast<double>(t.counts[k][v]) / static_cast<double>(row);
    }
    mn = std::min(mn, row);
  }
  t.min_stratum = mn;
  t.low_support = mn < kLowSupport;
  return t;
}

BilinearSolution solve_bilinear(const Eigen::Matrix2d& e, const Eigen::Matrix2d& m,
                                const BilinearOptions& opt) {
  const double rho_m = m(0, 1);  // rho'_-
  const double rho_p = m(1, 0);  // rho'_+
  const double denom = 1.0 - rho_m - rho_p;  // equals det(M) for row-stochastic M
  if (std::abs(denom) < opt.singularity_floor) {
    throw NonInvertibleConditional("solve_bilinear: |1 - rho'_- - rho'_+| = " +
                                   std::to_string(std::abs(denom)) + " below floor");
  }
  BilinearSolution out;
  out.p_hat = ((1.0 - rho_m) - (e(0, 0) + e(1, 0))) / denom;
  if (out.p_hat < opt.p_floor || out.p_hat > 1.0 - opt.p_floor) {
    throw DegeneratePrior("solve_bilinear: recovered prior " + std::to_string(out.p_hat) +
                          " outside [" + std::to_string(opt.p_floor) + ", 1-p_floor]");
  }
  Eigen::Matrix2d m_inv;
  m_inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  m_inv /= m.determinant();
  Eigen::Matrix2d p_inv = Eigen::Matrix2d::Zero();
  p_inv(0, 0) = 1.0 / (1.0 - out.p_hat);
  p_inv(1, 1) = 1.0 / out.p_hat;
  out.raw_T = (e * m_inv * p_inv).transpose();
  return out;
}

namespace {

CandidateEstimate screen_impl(const Eigen::Matrix2d& raw_t, const ScreenOptions& opt,
                              std::optional<double> p_hat) {
  CandidateEstimate cand;
  cand.raw_t = raw_t;
  cand.p_hat = p_hat.value_or(0.5);

  if (p_hat && (*p_hat < opt.p_floor || *p_hat > 1.0 - opt.p_floor)) {
    cand.reject_reason = "prior outside [p_floor, 1 - p_floor]";
    return cand;
  }
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      if (raw_t(r, c) < opt.window_low || raw_t(r, c) > opt.window_high) {
        cand.reject_reason = "raw entry outside screening window";
        return cand;
      }
    }
  }

  Eigen::Matrix2d t = raw_t.cwiseMax(0.0).cwiseMin(1.0);
  cand.clipped = (t - raw_t).cwiseAbs().maxCoeff() > 0.0;
  for (int r = 0; r < 2; ++r) {
    const double sum = t(r, 0) + t(r, 1);
    if (sum < 1e-9) {
      cand.reject_reason = "row degenerated to zero after clipping";
      return cand;
    }
    t.row(r) /= sum;
  }

  TransitionMatrix2 tm = transition_from_matrix(t);
  if (tm.rho_minus + tm.rho_plus > 1.0) {
    tm = tm.permuted();
    cand.permuted = true;
    if (p_hat) cand.p_hat = 1.0 - *p_hat;
  }
  cand.assumption1_ok = tm.satisfies_assumption1();
  if (!cand.assumption1_ok) {
    // rho_- + rho_+ == 1 exactly: a rank-one matrix the permutation cannot fix.
    cand.t_hat = tm;
    cand.reject_reason = "rho_- + rho_+ = 1; transition matrix uninformative";
    return cand;
  }
  cand.t_hat = tm;
  cand.accepted = true;
  return cand;
}

}  // namespace

CandidateEstimate screen_candidate(double p_hat, const Eigen::Matrix2d& raw_t,
                                   const ScreenOptions& opt) {
  return screen_impl(raw_t, opt, p_hat);
}

CandidateEstimate screen_candidate(const Eigen::Matrix2d& raw_t, const ScreenOptions& opt) {
  return screen_impl(raw_t, opt, std::nullopt);
}

namespace {

std::vector<const CandidateEstimate*> accepted_of(const std::vector<CandidateEstimate>& cs) {
  std::vector<const CandidateEstimate*> out;
  for (const auto& c : cs) {
    if (c.accepted) out.push_back(&c);
  }
  return out;
}

}  // namespace

TransitionMatrix2 aggregate(const std::vector<CandidateEstimate>& candidates) {
  const auto accepted = accepted_of(candidates);
  if (accepted.empty()) throw NoAcceptedCandidate("aggregate: no accepted candidate");
  std::size_t best = 0;
  double best_sum = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < accepted.size(); ++r) {
    double sum = 0.0;
    for (std::size_t s = 0; s < accepted.size(); ++s) {
      sum += l1_distance(accepted[r]->t_hat, accepted[s]->t_hat);
    }
    if (sum < best_sum) {
      best_sum = sum;
      best = r;
    }
  }
  return accepted[best]->t_hat;
}

TransitionMatrix2 aggregate_mean(const std::vector<CandidateEstimate>& candidates) {
  const auto accepted = accepted_of(candidates);
  if (accepted.empty()) throw NoAcceptedCandidate("aggregate_mean: no accepted candidate");
  double rm = 0.0, rp = 0.0;
  for (const auto* c : accepted) {
    rm += c->t_hat.rho_minus;
    rp += c->t_hat.rho_plus;
  }
  return {rm / accepted.size(), rp / accepted.size()};
}

PairingStrategy pairing_from_string(const std::string& s) {
  if (s == "correlation") return PairingStrategy::correlation;
  if (s == "sequential") return PairingStrategy::sequential;
  throw ValidationError("unknown pairing strategy: " + s);
}

std::string to_string(PairingStrategy p) {
  return p == PairingStrategy::correlation ? "correlation" : "sequential";
}

std::vector<int> pairing_order(const LabelMatrix& noisy, int j, PairingStrategy strategy) {
  const int q = static_cast<int>(noisy.cols());
  std::vector<int> order;
  for (int i = 0; i < q; ++i) {
    if (i != j) order.push_back(i);
  }
  if (strategy == PairingStrategy::sequential) return order;

  // Correlation score of each partner on the noisy labels.
  const long long n = noisy.rows();
  long long nj0 = 0;
  std::vector<long long> zeros_given0(q, 0), zeros_given1(q, 0);
  for (long long r = 0; r < n; ++r) {
    const bool j1 = noisy(r, j) != 0;
    if (!j1) ++nj0;
    for (int i = 0; i < q; ++i) {
      if (noisy(r, i) == 0) {
        (j1 ? zeros_given1[i] : zeros_given0[i])++;
      }
    }
  }
  const long long nj1 = n - nj0;
  std::vector<double> score(q, 0.0);
  for (int i = 0; i < q; ++i) {
    if (nj0 == 0 || nj1 == 0) continue;
    score[i] = std::abs(static_cast<double>(zeros_given0[i]) / nj0 -
                        static_cast<double>(zeros_given1[i]) / nj1);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return score[a] > score[b]; });
  return order;
}

int ClassEstimate::accepted_count() const {
  int k = 0;
  for (const auto& c : candidates) k += c.accepted ? 1 : 0;
  return k;
}

std::vector<TransitionMatrix2> EstimationReport::aggregated() const {
  std::vector<TransitionMatrix2> out;
  out.reserve(classes.size());
  for (const auto& c : classes) {
    if (!c.aggregated) {
      throw NoAcceptedCandidate("class " + std::to_string(c.class_index) + ": " + c.failure);
    }
    out.push_back(*c.aggregated);
  }
  return out;
}

EstimationReport estimate_all(const LabelMatrix& noisy,
                              const std::vector<SelectionReport>& selections,
                              const EstimatorOptions& opt) {
  const int q = static_cast<int>(noisy.cols());
  if (static_cast<int>(selections.size()) != q) {
    throw ValidationError("estimate_all: need one selection per class");
  }
  const int r_max = opt.repetitions < 0 ? q - 1 : opt.repetitions;
  if (r_max < 1 || r_max > q - 1) {
    throw ValidationError("estimate_all: R must lie in [1, q-1]");
  }

  EstimationReport report;
  for (int j = 0; j < q; ++j) {
    ClassEstimate ce;
    ce.class_index = j;
    ce.pairing_order = pairing_order(noisy, j, opt.pairing);
    int accepted = 0;
    for (int i : ce.pairing_order) {
      if (accepted >= r_max) break;
      CandidateEstimate cand;
      cand.pair = {j, i};
      try {
        const Table2 e = estimate_joint(noisy, i, j);
        const Table2 m = estimate_conditional(noisy, selections[j], i, j);
        const BilinearSolution sol = solve_bilinear(e.prob, m.prob, opt.bilinear);
        cand = screen_candidate(sol.p_hat, sol.raw_T, opt.screen);
        cand.pair = {j, i};
      } catch (const std::runtime_error& err) {
        cand.accepted = false;
        cand.reject_reason = err.what();
      }
      if (cand.accepted) ++accepted;
      ce.candidates.push_back(std::move(cand));
    }
    if (accepted > 0) {
      ce.aggregated = aggregate(ce.candidates);
      ce.mean_aggregated = aggregate_mean(ce.candidates);
      for (const auto& c : ce.candidates) {
        if (c.accepted && l1_distance(c.t_hat, *ce.aggregated) == 0.0) {
          ce.p_hat = c.p_hat;
          break;
        }
      }
    } else {
      ce.failure = "no accepted candidate";
    }
    report.classes.push_back(std::move(ce));
  }
  return report;
}

void attach_truth(EstimationReport& report, const std::vector<TransitionMatrix2>& t_true) {
  if (t_true.size() != report.classes.size()) {
    throw ValidationError("attach_truth: class count mismatch");
  }
  report.per_class_error.assign(report.classes.size(), 0.0);
  double total = 0.0;
  double total_mean = 0.0;
  bool any_failed = false;
  for (std::size_t j = 0; j < report.classes.size(); ++j) {
    const auto& ce = report.classes[j];
    if (!ce.aggregated) {
      any_failed = true;
      continue;
    }
    report.per_class_error[j] = l1_distance(t_true[j], *ce.aggregated);
    total += report.per_class_error[j];
    if (ce.mean_aggregated) total_mean += l1_distance(t_true[j], *ce.mean_aggregated);
  }
  if (!any_failed) {
    report.total_error = total;
    report.total_error_mean_aggregate = total_mean;
  }
}

}  // namespace mlnoise
