#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mlnoise/experiment.hpp"
#include "mlnoise/metrics.hpp"

namespace mlnoise {

enum class SweepAxis { n, R, delta, rho, method };

SweepAxis sweep_axis_from_string(const std::string& s);
std::string to_string(SweepAxis a);

struct SweepRow {
  double axis_value = 0.0;
  std::uint64_t seed = 0;
  std::string method;
  double total_error = 0.0;
  double map = std::numeric_limits<double>::quiet_NaN();
  double of1 = std::numeric_limits<double>::quiet_NaN();
  double cf1 = std::numeric_limits<double>::quiet_NaN();
  double runtime_ms = 0.0;
  double realized_delta = std::numeric_limits<double>::quiet_NaN();
  bool failed = false;
  std::string failure;
};

struct SweepPoint {
  double setting = 0.0;
  std::string label;
  double mean_error = 0.0;
  double std_error = 0.0;
  int seeds_ok = 0;
  bool missing = false;  // every seed failed
};

struct SweepResult {
  SweepAxis axis = SweepAxis::n;
  std::vector<SweepPoint> points;
  std::vector<SweepRow> rows;  // grid-major, then seed order
};

struct SweepOptions {
  EstimationMethod method = EstimationMethod::ours;
  int workers = 1;
  // When set, additionally trains with the estimated matrices and records
  // clean-test metrics per row.
  bool with_training = false;
  LossMode training_mode = LossMode::reweight;
  // Method axis only: the methods to compare.
  std::vector<EstimationMethod> methods;
};

// For each grid point, rebuilds the dataset per seed, runs the pipeline, and
// records mean +- std estimation error. Per-point failures become missing
// points rather than aborting the sweep.
SweepResult run_sweep(SweepAxis axis, const std::vector<double>& grid,
                      const ExperimentConfig& base, const std::vector<std::uint64_t>& seeds,
                      const SweepOptions& opt = {});

// CSV columns: axis_value,seed,method,total_error,map,of1,cf1,runtime_ms
void write_sweep_csv(const std::filesystem::path& file, const SweepResult& result);
void write_sweep_summary(const std::filesystem::path& file, const SweepResult& result);

}  // namespace mlnoise
