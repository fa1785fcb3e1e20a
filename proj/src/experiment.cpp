#include "mlnoise/experiment.hpp"

#include <chrono>

#include "mlnoise/errors.hpp"
#include "mlnoise/rng.hpp"

namespace mlnoise {

EstimationMethod method_from_string(const std::string& s) {
  if (s == "ours") return EstimationMethod::ours;
  if (s == "ours_gold") return EstimationMethod::ours_gold;
  if (s == "t_max") return EstimationMethod::t_max;
  if (s == "t_97") return EstimationMethod::t_97;
  if (s == "dual_t_max") return EstimationMethod::dual_t_max;
  if (s == "dual_t_97") return EstimationMethod::dual_t_97;
  throw ValidationError("unknown method: " + s +
                        " (expected ours|ours_gold|t_max|t_97|dual_t_max|dual_t_97)");
}

std::string to_string(EstimationMethod m) {
  switch (m) {
    case EstimationMethod::ours: return "ours";
    case EstimationMethod::ours_gold: return "ours_gold";
    case EstimationMethod::t_max: return "t_max";
    case EstimationMethod::t_97: return "t_97";
    case EstimationMethod::dual_t_max: return "dual_t_max";
    case EstimationMethod::dual_t_97: return "dual_t_97";
  }
  return "?";
}

EstimatorOptions ExperimentConfig::estimator_options() const {
  EstimatorOptions opt;
  opt.repetitions = estimation.repetitions;
  opt.pairing = estimation.pairing;
  opt.bilinear.singularity_floor = estimation.singularity_floor;
  opt.bilinear.p_floor = estimation.p_floor;
  opt.screen.window_low = estimation.screen_low;
  opt.screen.window_high = estimation.screen_high;
  opt.screen.p_floor = estimation.p_floor;
  return opt;
}

void ExperimentConfig::validate() const {
  dataset.validate();
  noise.validate(dataset.q);
  training.validate();
  if (selection.tau < 0.0 || selection.tau > 1.0) {
    throw ValidationError("selection.tau must lie in [0,1]");
  }
  if (selection.warmup_epochs < 1) throw ValidationError("selection.warmup_epochs must be >= 1");
  if (selection.snapshot_epochs < 1 || selection.snapshot_epochs > selection.warmup_epochs) {
    throw ValidationError("selection.snapshot_epochs must lie in [1, warmup_epochs]");
  }
  if (selection.subsample <= 0.0 || selection.subsample > 1.0) {
    throw ValidationError("selection.subsample must lie in (0,1]");
  }
  if (selection.bias_strength < 0.0) throw ValidationError("selection.bias_strength must be >= 0");
  const int r = estimation.repetitions;
  if (r != -1 && (r < 1 || r > dataset.q - 1)) {
    throw ValidationError("estimation.R must lie in [1, q-1]");
  }
  if (estimation.singularity_floor <= 0.0) {
    throw ValidationError("estimation.singularity_floor must be > 0");
  }
  if (estimation.screen_low > 0.0 || estimation.screen_high < 1.0) {
    throw ValidationError("estimation screening window must contain [0,1]");
  }
  if (estimation.p_floor <= 0.0 || estimation.p_floor >= 0.5) {
    throw ValidationError("estimation.p_floor must lie in (0, 0.5)");
  }
}

DatasetBundle build_dataset(const ExperimentConfig& config) {
  config.validate();
  DatasetBundle bundle;
  bundle.gen = config.dataset;
  bundle.noise = config.noise;
  MultiLabelDataset clean = generate_clean_dataset(config.dataset);
  bundle.true_t = make_noise_matrices(config.noise, config.dataset.q);
  const std::uint64_t noise_seed = mix_u64(config.dataset.seed ^ 0x6e6f697365ULL);
  if (config.noise.regime == NoiseRegime::PAIRWISE) {
    bundle.ds = inject_pairwise_noise(clean, config.noise.pair_rate, noise_seed).dataset;
  } else {
    bundle.ds = inject_class_dependent_noise(clean, bundle.true_t, noise_seed);
  }
  return bundle;
}

namespace {

std::vector<SelectionReport> make_selections(const ExperimentConfig& config,
                                             const DatasetBundle& data,
                                             EstimationMethod method,
                                             const TrainResult* warmup) {
  const auto& ds = data.ds;
  std::vector<SelectionReport> selections;
  selections.reserve(ds.q());
  const std::uint64_t sel_seed = mix_u64(config.dataset.seed ^ 0x73656c65637469ULL);
  for (int j = 0; j < ds.q(); ++j) {
    if (method == EstimationMethod::ours_gold) {
      selections.push_back(gold_select(ds, j, config.selection.subsample, sel_seed));
      continue;
    }
    switch (config.selection.mode) {
      case SelectionMode::gold:
        selections.push_back(gold_select(ds, j, config.selection.subsample, sel_seed));
        break;
      case SelectionMode::biased:
        selections.push_back(biased_select(ds, j, config.selection.bias_strength, sel_seed,
                                           config.selection.keep_fraction));
        break;
      case SelectionMode::gmm: {
        const Eigen::VectorXd col = warmup->mean_warmup_losses.col(j);
        std::vector<double> losses(col.data(), col.data() + col.size());
        selections.push_back(gmm_select(ds, j, losses, config.selection.tau));
        break;
      }
    }
  }
  return selections;
}

}  // namespace

PipelineResult run_estimation(const ExperimentConfig& config, EstimationMethod method,
                              const DatasetBundle& data) {
  const auto start = std::chrono::steady_clock::now();
  PipelineResult result;
  result.true_t = data.true_t;

  const bool needs_warmup =
      method == EstimationMethod::t_max || method == EstimationMethod::t_97 ||
      method == EstimationMethod::dual_t_max || method == EstimationMethod::dual_t_97 ||
      (method == EstimationMethod::ours && config.selection.mode == SelectionMode::gmm);

  TrainResult warmup;
  if (needs_warmup) {
    TrainConfig warm_cfg = config.training;
    warm_cfg.loss_mode = LossMode::standard;
    warm_cfg.epochs = config.selection.warmup_epochs;
    warm_cfg.loss_snapshot_epochs =
        std::min(config.selection.snapshot_epochs, config.selection.warmup_epochs);
    warmup = train(data.ds, warm_cfg);
  }

  switch (method) {
    case EstimationMethod::ours:
    case EstimationMethod::ours_gold: {
      result.selections = make_selections(config, data, method, &warmup);
      result.report = estimate_all(data.ds.noisy_labels, result.selections,
                                   config.estimator_options());
      result.report.method = to_string(method);
      break;
    }
    case EstimationMethod::t_max:
    case EstimationMethod::t_97:
    case EstimationMethod::dual_t_max:
    case EstimationMethod::dual_t_97: {
      const Eigen::MatrixXd post = posterior_matrix(warmup.classifier, data.ds.features,
                                              config.selection.posterior_logit_scale);
      AnchorConfig anchor;
      anchor.mode = (method == EstimationMethod::t_max || method == EstimationMethod::dual_t_max)
                        ? AnchorConfig::Mode::max
                        : AnchorConfig::Mode::percentile;
      ScreenOptions screen = config.estimator_options().screen;
      if (method == EstimationMethod::t_max || method == EstimationMethod::t_97) {
        result.report = t_estimator(post, anchor, screen);
      } else {
        result.report = dual_t_estimator(post, data.ds.noisy_labels, anchor, screen);
      }
      result.report.method = to_string(method);
      break;
    }
  }

  attach_truth(result.report, data.true_t);
  result.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

PipelineResult run_estimation(const ExperimentConfig& config, EstimationMethod method) {
  return run_estimation(config, method, build_dataset(config));
}

TrainEvalResult run_training(const ExperimentConfig& config,
                             const std::vector<TransitionMatrix2>& t, LossMode mode,
                             const DatasetBundle& data) {
  const auto start = std::chrono::steady_clock::now();
  TrainEvalResult result;
  TrainConfig cfg = config.training;
  cfg.loss_mode = mode;
  result.train = train(data.ds, cfg, mode == LossMode::standard ? nullptr : &t);

  // Held-out clean split from the same generator, different stream.
  GeneratorConfig test_gen = config.dataset;
  test_gen.seed = mix_u64(config.dataset.seed ^ 0x7465737473ULL);
  test_gen.n = std::max(2000, config.dataset.n / 5);
  MultiLabelDataset test = generate_clean_dataset(test_gen);
  const Eigen::MatrixXd scores = posterior_matrix(result.train.classifier, test.features);
  result.clean_test = classification_metrics(scores, test.clean_labels);
  result.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace mlnoise
