#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mlnoise/datagen.hpp"
#include "mlnoise/estimator.hpp"
#include "mlnoise/metrics.hpp"
#include "mlnoise/model.hpp"
#include "mlnoise/selection.hpp"

namespace mlnoise {

// A generated dataset plus its provenance: the generator settings, the noise
// settings, and the true per-class transition matrices.
struct DatasetBundle {
  MultiLabelDataset ds;
  std::vector<TransitionMatrix2> true_t;
  GeneratorConfig gen;
  NoiseConfig noise;
};

// Directory layout: meta.json plus headerless CSV matrices `features.csv`
// (%.17g), `clean.csv` / `noisy.csv` (0/1), `prototypes.csv` (%.17g).
void save_dataset(const std::filesystem::path& dir, const DatasetBundle& bundle);
DatasetBundle load_dataset(const std::filesystem::path& dir);

void save_classifier(const std::filesystem::path& file, const PerLabelClassifier& clf,
                     const TrainConfig& config);
PerLabelClassifier load_classifier(const std::filesystem::path& file);

nlohmann::json selection_to_json(const SelectionReport& report);
void save_selection_indices(const std::filesystem::path& file, const SelectionReport& report);

nlohmann::json report_to_json(const EstimationReport& report);
void save_report(const std::filesystem::path& file, const EstimationReport& report);
// Reads back the per-class aggregated matrices of a saved report.
std::vector<TransitionMatrix2> load_report_matrices(const std::filesystem::path& file);

nlohmann::json metrics_to_json(const MetricsBundle& metrics);

// %.17g rendering used for every float that lands in a CSV.
std::string format_g17(double v);

}  // namespace mlnoise
