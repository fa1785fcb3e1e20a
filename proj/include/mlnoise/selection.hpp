#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mlnoise/datagen.hpp"

namespace mlnoise {

// Two-component 1-D Gaussian mixture fitted by EM.
struct Gmm2 {
  double weight[2] = {0.5, 0.5};
  double mean[2] = {0.0, 0.0};
  double variance[2] = {1.0, 1.0};
  std::vector<double> log_likelihood_trace;
  int iterations = 0;
  bool converged = false;

  int lower_mean_component() const { return mean[0] <= mean[1] ? 0 : 1; }
};

// EM with quantile initialization (means at the 25th/75th percentiles).
// Throws DegenerateMixture on all-equal input, a variance collapsing below
// 1e-8, or final means closer than 1e-6.
Gmm2 fit_gmm_1d(const std::vector<double>& losses, int max_iter = 200, double tol = 1e-8);

// Posterior membership of the lower-mean ("clean") component.
double clean_posterior(const Gmm2& gmm, double x);

// Indices whose clean-component membership is >= tau, ascending.
std::vector<int> select_clean(const std::vector<double>& losses, const Gmm2& gmm, double tau);

enum class SelectionMode { gmm, gold, biased };

std::string to_string(SelectionMode m);
SelectionMode selection_mode_from_string(const std::string& s);

struct SelectionReport {
  int class_index = -1;
  SelectionMode mode = SelectionMode::gmm;
  double tau = 0.5;
  double bias_strength = 0.0;
  double subsample = 1.0;
  std::vector<int> selected;  // sorted ascending

  // lambda_k: fraction of training examples that are selected and carry
  // noisy label k for this class.
  double lambda0 = 0.0, lambda1 = 0.0;
  long long stratum_count[2] = {0, 0};

  // Realized selection bias per partner class i (Delta of the conditional
  // noisy-label tables, selected set vs. full population):
  //   delta0[i] = P_sel(Ybar^i=1 | y^j=0) - P_pop(Ybar^i=1 | Y^j=0)
  //   delta1[i] = P_sel(Ybar^i=0 | y^j=1) - P_pop(Ybar^i=0 | Y^j=1)
  // Own-class slots are zero; the scalars are the max-abs over partners.
  std::vector<double> delta0_by_partner, delta1_by_partner;
  double realized_delta0 = 0.0, realized_delta1 = 0.0;
  bool low_support = false;
};

// Fills lambda/stratum/delta fields from the selected set (clean labels of
// the dataset are the unbiased reference).
void measure_selection_stats(const MultiLabelDataset& ds, SelectionReport& report);

// Selection via the loss mixture; `losses` is this class's warmup loss vector.
SelectionReport gmm_select(const MultiLabelDataset& ds, int j, const std::vector<double>& losses,
                           double tau);

// Oracle selection of the examples whose noisy label agrees with the clean
// one, optionally uniformly thinned. Throws EmptyStratum when a class value
// has no selected examples.
SelectionReport gold_select(const MultiLabelDataset& ds, int j, double subsample = 1.0,
                            std::uint64_t seed = 0);

// Among clean-consistent examples, keeps a fixed fraction preferring large
// class-j margin |prototype score - 1/2| with weight exp(bias_strength *
// margin). bias_strength = 0 reduces to a uniform subsample.
SelectionReport biased_select(const MultiLabelDataset& ds, int j, double bias_strength,
                              std::uint64_t seed, double keep_fraction = 0.5);

}  // namespace mlnoise
