#include "mlnoise/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mlnoise/errors.hpp"
#include "mlnoise/rng.hpp"

namespace mlnoise {

namespace {

constexpr double kVarianceFloor = 1e-8;
constexpr double kMeanTie = 1e-6;

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double pos = p * (sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - lo;
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

double log_normal_pdf(double x, double mean, double var) {
  const double diff = x - mean;
  return -0.5 * (std::log(2.0 * M_PI * var) + diff * diff / var);
}

}  // namespace

Gmm2 fit_gmm_1d(const std::vector<double>& losses, int max_iter, double tol) {
  const std::size_t m = losses.size();
  if (m < 4) throw ValidationError("fit_gmm_1d: need at least 4 samples");
  if (tol <= 0.0 || max_iter < 1) throw ValidationError("fit_gmm_1d: bad max_iter/tol");

  std::vector<double> sorted(losses);
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) {
    throw DegenerateMixture("fit_gmm_1d: all loss values equal");
  }

  Gmm2 gmm;
  gmm.mean[0] = quantile_sorted(sorted, 0.25);
  gmm.mean[1] = quantile_sorted(sorted, 0.75);
  double mean = std::accumulate(losses.begin(), losses.end(), 0.0) / m;
  double var = 0.0;
  for (double x : losses) var += (x - mean) * (x - mean);
  var = std::max(var / m, kVarianceFloor);
  gmm.variance[0] = gmm.variance[1] = var;

  std::vector<double> resp(m);
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iter; ++iter) {
    // E step.
    double ll = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double a = std::log(gmm.weight[0]) + log_normal_pdf(losses[i], gmm.mean[0], gmm.variance[0]);
      const double b = std::log(gmm.weight[1]) + log_normal_pdf(losses[i], gmm.mean[1], gmm.variance[1]);
      const double hi = std::max(a, b);
      const double lse = hi + std::log(std::exp(a - hi) + std::exp(b - hi));
      resp[i] = std::exp(a - lse);
      ll += lse;
    }
    gmm.log_likelihood_trace.push_back(ll);
    gmm.iterations = iter + 1;

    // M step.
    double n0 = 0.0, s0 = 0.0, s1 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      n0 += resp[i];
      s0 += resp[i] * losses[i];
      s1 += (1.0 - resp[i]) * losses[i];
    }
    const double n1 = m - n0;
    if (n0 < 1e-10 || n1 < 1e-10) {
      throw DegenerateMixture("fit_gmm_1d: component weight collapsed");
    }
    gmm.weight[0] = n0 / m;
    gmm.weight[1] = n1 / m;
    gmm.mean[0] = s0 / n0;
    gmm.mean[1] = s1 / n1;
    double v0 = 0.0, v1 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double d0 = losses[i] - gmm.mean[0];
      const double d1 = losses[i] - gmm.mean[1];
      v0 += resp[i] * d0 * d0;
      v1 += (1.0 - resp[i]) * d1 * d1;
    }
    gmm.variance[0] = v0 / n0;
    gmm.variance[1] = v1 / n1;
    if (gmm.variance[0] < kVarianceFloor || gmm.variance[1] < kVarianceFloor) {
      throw DegenerateMixture("fit_gmm_1d: component variance collapsed below 1e-8");
    }

    if (std::abs(ll - prev_ll) < tol) {
      gmm.converged = true;
      break;
    }
    prev_ll = ll;
  }

  if (std::abs(gmm.mean[0] - gmm.mean[1]) < kMeanTie) {
    throw DegenerateMixture("fit_gmm_1d: component means indistinguishable");
  }
  return gmm;
}

double clean_posterior(const Gmm2& gmm, double x) {
  const int lo = gmm.lower_mean_component();
  const double a = std::log(gmm.weight[lo]) + log_normal_pdf(x, gmm.mean[lo], gmm.variance[lo]);
  const double b =
      std::log(gmm.weight[1 - lo]) + log_normal_pdf(x, gmm.mean[1 - lo], gmm.variance[1 - lo]);
  const double hi = std::max(a, b);
  return std::exp(a - hi) / (std::exp(a - hi) + std::exp(b - hi));
}

std::vector<int> select_clean(const std::vector<double>& losses, const Gmm2& gmm, double tau) {
  if (tau < 0.0 || tau > 1.0) throw ValidationError("select_clean: tau must lie in [0,1]");
  if (std::abs(gmm.mean[0] - gmm.mean[1]) < kMeanTie) {
    throw DegenerateMixture("select_clean: component means indistinguishable");
  }
  std::vector<int> out;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (clean_posterior(gmm, losses[i]) >= tau) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::string to_string(SelectionMode m) {
  switch (m) {
    case SelectionMode::gmm: return "gmm";
    case SelectionMode::gold: return "gold";
    case SelectionMode::biased: return "biased";
  }
  return "?";
}

SelectionMode selection_mode_from_string(const std::string& s) {
  if (s == "gmm") return SelectionMode::gmm;
  if (s == "gold") return SelectionMode::gold;
  if (s == "biased") return SelectionMode::biased;
  throw ValidationError("unknown selection mode: " + s);
}

void measure_selection_stats(const MultiLabelDataset& ds, SelectionReport& report) {
  const int j = report.class_index;
  const int q = ds.q();
  const long long n = ds.n();

  long long sel0 = 0, sel1 = 0;
  for (int idx : report.selected) {
    (ds.noisy_labels(idx, j) ? sel1 : sel0)++;
  }
  report.stratum_count[0] = sel0;
  report.stratum_count[1] = sel1;
  report.lambda0 = static_cast<double>(sel0) / n;
  report.lambda1 = static_cast<double>(sel1) / n;
  report.low_support = sel0 < 10 || sel1 < 10;

  report.delta0_by_partner.assign(q, 0.0);
  report.delta1_by_partner.assign(q, 0.0);
  report.realized_delta0 = 0.0;
  report.realized_delta1 = 0.0;

  // Population strata by the true clean label of class j.
  std::vector<long long> pop_count(2, 0);
  std::vector<std::vector<long long>> pop_pos(2, std::vector<long long>(q, 0));
  for (int i = 0; i < ds.n(); ++i) {
    const int c = ds.clean_labels(i, j) ? 1 : 0;
    ++pop_count[c];
    for (int k = 0; k < q; ++k) pop_pos[c][k] += ds.noisy_labels(i, k);
  }
  // Selected strata by the treated-as-clean noisy label of class j.
  std::vector<std::vector<long long>> sel_pos(2, std::vector<long long>(q, 0));
  for (int idx : report.selected) {
    const int c = ds.noisy_labels(idx, j) ? 1 : 0;
    for (int k = 0; k < q; ++k) sel_pos[c][k] += ds.noisy_labels(idx, k);
  }
  for (int i = 0; i < q; ++i) {
    if (i == j) continue;
    if (sel0 > 0 && pop_count[0] > 0) {
      const double sel_p = static_cast<double>(sel_pos[0][i]) / sel0;
      const double pop_p = static_cast<double>(pop_pos[0][i]) / pop_count[0];
      report.delta0_by_partner[i] = sel_p - pop_p;
    }
    if (sel1 > 0 && pop_count[1] > 0) {
      const double sel_p0 = 1.0 - static_cast<double>(sel_pos[1][i]) / sel1;
      const double pop_p0 = 1.0 - static_cast<double>(pop_pos[1][i]) / pop_count[1];
      report.delta1_by_partner[i] = sel_p0 - pop_p0;
    }
    report.realized_delta0 = std::max(report.realized_delta0, std::abs(report.delta0_by_partner[i]));
    report.realized_delta1 = std::max(report.realized_delta1, std::abs(report.delta1_by_partner[i]));
  }
}

SelectionReport gmm_select(const MultiLabelDataset& ds, int j, const std::vector<double>& losses,
                           double tau) {
  if (static_cast<int>(losses.size()) != ds.n()) {
    throw ValidationError("gmm_select: loss vector length mismatch");
  }
  Gmm2 gmm = fit_gmm_1d(losses);
  SelectionReport report;
  report.class_index = j;
  report.mode = SelectionMode::gmm;
  report.tau = tau;
  report.selected = select_clean(losses, gmm, tau);
  measure_selection_stats(ds, report);
  return report;
}

SelectionReport gold_select(const MultiLabelDataset& ds, int j, double subsample,
                            std::uint64_t seed) {
  if (subsample <= 0.0 || subsample > 1.0) {
    throw ValidationError("gold_select: subsample must lie in (0,1]");
  }
  Rng rng = Rng::substream(seed, "gold-select", static_cast<std::uint64_t>(j));
  SelectionReport report;
  report.class_index = j;
  report.mode = SelectionMode::gold;
  report.subsample = subsample;
  for (int i = 0; i < ds.n(); ++i) {
    if (ds.noisy_labels(i, j) != ds.clean_labels(i, j)) continue;
    if (subsample < 1.0 && !rng.bernoulli(subsample)) continue;
    report.selected.push_back(i);
  }
  measure_selection_stats(ds, report);
  if (report.stratum_count[0] == 0 || report.stratum_count[1] == 0) {
    throw EmptyStratum("gold_select: a class value has zero selected examples");
  }
  return report;
}

SelectionReport biased_select(const MultiLabelDataset& ds, int j, double bias_strength,
                              std::uint64_t seed, double keep_fraction) {
  if (bias_strength < 0.0) throw ValidationError("biased_select: bias_strength must be >= 0");
  if (keep_fraction <= 0.0 || keep_fraction > 1.0) {
    throw ValidationError("biased_select: keep_fraction must lie in (0,1]");
  }
  std::vector<int> base;
  for (int i = 0; i < ds.n(); ++i) {
    if (ds.noisy_labels(i, j) == ds.clean_labels(i, j)) base.push_back(i);
  }
  Rng rng = Rng::substream(seed, "biased-select", static_cast<std::uint64_t>(j));

  // Weighted sampling without replacement (exponential-keys scheme): keep the
  // K largest keys log(u)/w, w = exp(bias_strength * margin).
  std::vector<std::pair<double, int>> keyed(base.size());
  for (std::size_t k = 0; k < base.size(); ++k) {
    const int i = base[k];
    const double score = ds.class_prototypes.row(j).dot(ds.features.row(i));
    const double margin = std::abs(score - 0.5);
    const double w = std::exp(bias_strength * margin);
    const double u = std::max(rng.uniform01(), 1e-300);
    keyed[k] = {std::log(u) / w, i};
  }
  const std::size_t keep = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(keep_fraction * base.size())));
  std::partial_sort(keyed.begin(), keyed.begin() + std::min(keep, keyed.size()), keyed.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });

  SelectionReport report;
  report.class_index = j;
  report.mode = SelectionMode::biased;
  report.bias_strength = bias_strength;
  report.subsample = keep_fraction;
  for (std::size_t k = 0; k < std::min(keep, keyed.size()); ++k) {
    report.selected.push_back(keyed[k].second);
  }
  std::sort(report.selected.begin(), report.selected.end());
  measure_selection_stats(ds, report);
  return report;
}

}  // namespace mlnoise
