#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mlnoise/transition.hpp"

namespace mlnoise {

using LabelMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

enum class NoiseRegime { MLML, PML, ULF, ALF, PAIRWISE };

std::string to_string(NoiseRegime r);
NoiseRegime noise_regime_from_string(const std::string& s);

struct NoiseConfig {
  NoiseRegime regime = NoiseRegime::ULF;
  double rho = 0.0;
  double n_a = 1.5;        // mean labels per example; ALF only
  double pair_rate = 0.0;  // PAIRWISE only
  std::vector<TransitionMatrix2> per_class_override;
  bool strict_assumption1 = true;

  void validate(int q) const;
};

// Per-regime flip rates:
//   MLML: (0, rho)   PML: (rho, 0)   ULF: (rho, rho)
//   ALF:  (n_a * rho / (q - n_a), rho)
// PAIRWISE returns identities; the pair-wise corruption is applied separately.
std::vector<TransitionMatrix2> make_noise_matrices(const NoiseConfig& config, int q);

// Mixture-of-profiles clean generator. Each group is independently "active"
// per example; classes of an active group fire with p_out + s_j*(p_in - p_out)
// where s_j decays along the group (affinity_spread), classes of inactive
// groups fire with p_out. Cross-group labels are therefore independent while
// same-group pairs carry a tunable correlation margin. Features are the sum of
// the prototypes of the positive classes plus isotropic Gaussian noise, so
// every label stays linearly separable.
struct GeneratorConfig {
  int n = 1000;
  int q = 10;
  int d = 16;
  int groups = 2;
  double sigma = 0.3;
  std::uint64_t seed = 1;

  double group_activation = 0.35;  // P(group active)
  double p_in = 0.6;               // fire rate in an active group at s=1
  double p_out = 0.05;             // fire rate otherwise
  double affinity_spread = 0.5;    // s_j spans [1 - spread, 1] within a group
  double prototype_overlap = 0.35; // shared within-group prototype component

  void validate() const;
};

struct MultiLabelDataset {
  Eigen::MatrixXd features;         // n x d
  LabelMatrix clean_labels;         // n x q
  LabelMatrix noisy_labels;         // n x q
  Eigen::MatrixXd class_prototypes; // q x d
  std::vector<int> group_assignment;
  std::uint64_t seed = 0;

  int n() const { return static_cast<int>(features.rows()); }
  int q() const { return static_cast<int>(clean_labels.cols()); }
  int d() const { return static_cast<int>(features.cols()); }

  // Every class has at least one positive and one negative clean example.
  bool estimable() const;
};

MultiLabelDataset generate_clean_dataset(const GeneratorConfig& config);
MultiLabelDataset generate_clean_dataset(int n, int q, int d, int groups, double sigma,
                                         std::uint64_t seed);

// Flips each bit independently with the probability given by its class matrix.
// Clean labels are carried along for evaluation only. One RNG substream per
// class keeps per-class flips reproducible independent of q.
MultiLabelDataset inject_class_dependent_noise(const MultiLabelDataset& ds,
                                               const std::vector<TransitionMatrix2>& t,
                                               std::uint64_t seed);

struct PairwiseNoiseReport {
  MultiLabelDataset dataset;
  std::vector<int> partner;  // partner[i] = paired class, -1 if unpaired
  bool has_unpaired = false;
  long long eligible = 0;  // positive labels whose partner slot was free
  long long swapped = 0;
};

// Moves a positive label to its fixed partner class with probability
// pair_rate; a move is skipped when the partner is already positive.
PairwiseNoiseReport inject_pairwise_noise(const MultiLabelDataset& ds, double pair_rate,
                                          std::uint64_t seed);

// Measured (rho_minus_hat, rho_plus_hat) of class j against the clean labels.
std::pair<double, double> empirical_flip_rates(const MultiLabelDataset& ds, int j);

// |P(Y^i=0 | Y^j=0) - P(Y^i=0 | Y^j=1)| on clean labels; the correlation
// margin behind the identifiability requirement.
double correlation_margin(const MultiLabelDataset& ds, int i, int j);

}  // namespace mlnoise
