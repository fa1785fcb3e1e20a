#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mlnoise/datagen.hpp"
#include "mlnoise/losses.hpp"
#include "mlnoise/transition.hpp"

namespace mlnoise {

// One linear score + sigmoid per class.
struct PerLabelClassifier {
  Eigen::MatrixXd weights;  // q x d
  Eigen::VectorXd biases;   // q

  int q() const { return static_cast<int>(weights.rows()); }
  int d() const { return static_cast<int>(weights.cols()); }
};

struct TrainConfig {
  int epochs = 20;
  int batch_size = 128;
  double learning_rate = 0.5;
  std::uint64_t seed = 0;
  LossMode loss_mode = LossMode::standard;
  // When > 0, the per-example per-class losses of the last k epochs are
  // averaged and returned; this is what sample selection consumes.
  int loss_snapshot_epochs = 0;
  // Posterior logits are multiplied by this factor (miscalibration probe).
  double temperature_scale = 1.0;

  void validate() const;
};

struct TrainResult {
  PerLabelClassifier classifier;
  std::vector<double> epoch_mean_loss;
  Eigen::MatrixXd mean_warmup_losses;  // n x q; empty unless snapshots requested
};

// Mini-batch SGD on the configured empirical risk. Deterministic given the
// seed. Corrected modes require the transition matrices.
TrainResult train(const MultiLabelDataset& ds, const TrainConfig& config,
                  const std::vector<TransitionMatrix2>* t = nullptr);

Eigen::VectorXd logits(const PerLabelClassifier& clf, const Eigen::VectorXd& x);

// Sigmoid posteriors with logits clipped to +-30 before exponentiation, so
// outputs stay within [sigmoid(-30), sigmoid(30)].
Eigen::VectorXd posteriors(const PerLabelClassifier& clf, const Eigen::VectorXd& x);
// Batch variant, one row per example; logit_scale applies a temperature probe.
Eigen::MatrixXd posterior_matrix(const PerLabelClassifier& clf, const Eigen::MatrixXd& x,
                           double logit_scale = 1.0);

// Per-example BCE of class j against the noisy (or clean) labels.
Eigen::VectorXd per_class_losses(const PerLabelClassifier& clf, const MultiLabelDataset& ds,
                                 int j, bool use_noisy);
// All classes at once (n x q); column j equals per_class_losses(clf, ds, j, .).
Eigen::MatrixXd all_class_losses(const PerLabelClassifier& clf, const MultiLabelDataset& ds,
                                 bool use_noisy);

}  // namespace mlnoise
