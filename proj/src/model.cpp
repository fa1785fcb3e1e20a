#include "mlnoise/model.hpp"

#include <cmath>
#include <numeric>

#include "mlnoise/errors.hpp"
#include "mlnoise/rng.hpp"

namespace mlnoise {

void TrainConfig::validate() const {
  if (epochs < 1) throw ValidationError("training.epochs must be >= 1");
  if (batch_size < 1) throw ValidationError("training.batch_size must be >= 1");
  if (learning_rate <= 0.0) throw ValidationError("training.learning_rate must be > 0");
  if (loss_snapshot_epochs < 0 || loss_snapshot_epochs > epochs) {
    throw ValidationError("training.loss_snapshot_epochs must lie in [0, epochs]");
  }
}

Eigen::VectorXd logits(const PerLabelClassifier& clf, const Eigen::VectorXd& x) {
  return clf.weights * x + clf.biases;
}

Eigen::VectorXd posteriors(const PerLabelClassifier& clf, const Eigen::VectorXd& x) {
  Eigen::VectorXd h = logits(clf, x);
  Eigen::VectorXd g(h.size());
  for (Eigen::Index j = 0; j < h.size(); ++j) {
    g(j) = sigmoid(std::clamp(h(j), -kLogitClip, kLogitClip));
  }
  return g;
}

Eigen::MatrixXd posterior_matrix(const PerLabelClassifier& clf, const Eigen::MatrixXd& x,
                           double logit_scale) {
  Eigen::MatrixXd h = x * clf.weights.transpose();
  h.rowwise() += clf.biases.transpose();
  Eigen::MatrixXd g(h.rows(), h.cols());
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      g(i, j) = sigmoid(std::clamp(logit_scale * h(i, j), -kLogitClip, kLogitClip));
    }
  }
  return g;
}

Eigen::MatrixXd all_class_losses(const PerLabelClassifier& clf, const MultiLabelDataset& ds,
                                 bool use_noisy) {
  const auto& labels = use_noisy ? ds.noisy_labels : ds.clean_labels;
  Eigen::MatrixXd h = ds.features * clf.weights.transpose();
  h.rowwise() += clf.biases.transpose();
  Eigen::MatrixXd loss(h.rows(), h.cols());
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      loss(i, j) = bce_from_logit(h(i, j), labels(i, j));
    }
  }
  return loss;
}

Eigen::VectorXd per_class_losses(const PerLabelClassifier& clf, const MultiLabelDataset& ds,
                                 int j, bool use_noisy) {
  if (j < 0 || j >= ds.q()) throw ValidationError("per_class_losses: class index out of range");
  const auto& labels = use_noisy ? ds.noisy_labels : ds.clean_labels;
  Eigen::VectorXd h = ds.features * clf.weights.row(j).transpose();
  h.array() += clf.biases(j);
  Eigen::VectorXd loss(h.size());
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    loss(i) = bce_from_logit(h(i), labels(i, j));
  }
  return loss;
}

TrainResult train(const MultiLabelDataset& ds, const TrainConfig& config,
                  const std::vector<TransitionMatrix2>* t) {
  config.validate();
  if (config.loss_mode != LossMode::standard) {
    if (t == nullptr || static_cast<int>(t->size()) != ds.q()) {
      throw ValidationError("corrected training requires one transition matrix per class");
    }
  }
  const int n = ds.n(), q = ds.q(), d = ds.d();

  TrainResult result;
  result.classifier.weights = Eigen::MatrixXd::Zero(q, d);
  result.classifier.biases = Eigen::VectorXd::Zero(q);

  Rng rng = Rng::substream(config.seed, "train");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  Eigen::MatrixXd snapshot_accum;
  const int snapshot_from = config.epochs - config.loss_snapshot_epochs;

  auto& w = result.classifier.weights;
  auto& b = result.classifier.biases;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (int start = 0; start < n; start += config.batch_size) {
      const int bsz = std::min(config.batch_size, n - start);
      Eigen::MatrixXd xb(bsz, d);
      for (int r = 0; r < bsz; ++r) xb.row(r) = ds.features.row(order[start + r]);
      Eigen::MatrixXd h = xb * w.transpose();
      h.rowwise() += b.transpose();

      Eigen::MatrixXd dlogit(bsz, q);
      for (int r = 0; r < bsz; ++r) {
        const int row = order[start + r];
        for (int j = 0; j < q; ++j) {
          const LossGrad lg = per_label_loss(h(r, j), ds.noisy_labels(row, j),
                                             config.loss_mode, t ? &(*t)[j] : nullptr);
          loss_sum += lg.loss;
          dlogit(r, j) = lg.dlogit;
        }
      }
      const double scale = config.learning_rate / bsz;
      w.noalias() -= scale * (dlogit.transpose() * xb);
      b -= scale * dlogit.colwise().sum().transpose();
    }
    const double mean_loss = loss_sum / n;
    if (!std::isfinite(mean_loss) || mean_loss > 1e6 * q) {
      throw TrainingDiverged("epoch " + std::to_string(epoch) +
                             ": training loss diverged (learning rate too high?)");
    }
    result.epoch_mean_loss.push_back(mean_loss);

    if (config.loss_snapshot_epochs > 0 && epoch >= snapshot_from) {
      Eigen::MatrixXd snap = all_class_losses(result.classifier, ds, /*use_noisy=*/true);
      if (snapshot_accum.size() == 0) {
        snapshot_accum = snap;
      } else {
        snapshot_accum += snap;
      }
    }
  }

  if (config.loss_snapshot_epochs > 0) {
    result.mean_warmup_losses = snapshot_accum / config.loss_snapshot_epochs;
  }
  return result;
}

}  // namespace mlnoise
