#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mlnoise/baselines.hpp"
#include "mlnoise/datagen.hpp"
#include "mlnoise/estimator.hpp"
#include "mlnoise/io.hpp"
#include "mlnoise/metrics.hpp"
#include "mlnoise/model.hpp"
#include "mlnoise/selection.hpp"

namespace mlnoise {

enum class EstimationMethod { ours, ours_gold, t_max, t_97, dual_t_max, dual_t_97 };

EstimationMethod method_from_string(const std::string& s);
std::string to_string(EstimationMethod m);

// One experiment: dataset, noise, selection, estimation, and training blocks.
struct ExperimentConfig {
  GeneratorConfig dataset;
  NoiseConfig noise;

  struct Selection {
    SelectionMode mode = SelectionMode::gmm;
    double tau = 0.5;
    double bias_strength = 0.0;
    double subsample = 1.0;
    double keep_fraction = 0.5;  // biased mode
    int warmup_epochs = 20;
    int snapshot_epochs = 5;
    // Posterior logits handed to anchor baselines are scaled by this
    // (temperature miscalibration probe).
    double posterior_logit_scale = 1.0;
  } selection;

  struct Estimation {
    int repetitions = -1;  // R; -1 means q-1
    PairingStrategy pairing = PairingStrategy::correlation;
    double singularity_floor = 0.05;
    double screen_low = -0.05;
    double screen_high = 1.05;
    double p_floor = 0.01;
  } estimation;

  TrainConfig training;

  std::string output_dir = "out";

  EstimatorOptions estimator_options() const;
  void validate() const;
};

DatasetBundle build_dataset(const ExperimentConfig& config);

struct PipelineResult {
  EstimationReport report;
  std::vector<SelectionReport> selections;
  std::vector<TransitionMatrix2> true_t;
  double runtime_ms = 0.0;
};

// Warmup training (when the method needs it), per-class selection, then
// estimation; errors vs. the stored truth are attached.
PipelineResult run_estimation(const ExperimentConfig& config, EstimationMethod method,
                              const DatasetBundle& data);
PipelineResult run_estimation(const ExperimentConfig& config, EstimationMethod method);

struct TrainEvalResult {
  TrainResult train;
  MetricsBundle clean_test;   // metrics on a held-out clean split
  double runtime_ms = 0.0;
};

// Trains with the corrected loss and the given matrices, then evaluates on a
// fresh clean split drawn from the same generator with a shifted seed.
TrainEvalResult run_training(const ExperimentConfig& config,
                             const std::vector<TransitionMatrix2>& t, LossMode mode,
                             const DatasetBundle& data);

}  // namespace mlnoise
