#include "mlnoise/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "mlnoise/errors.hpp"
#include "mlnoise/rng.hpp"

namespace mlnoise {

SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "n") return SweepAxis::n;
  if (s == "R" || s == "r") return SweepAxis::R;
  if (s == "delta") return SweepAxis::delta;
  if (s == "rho") return SweepAxis::rho;
  if (s == "method") return SweepAxis::method;
  throw ValidationError("unknown sweep axis: " + s);
}

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::n: return "n";
    case SweepAxis::R: return "R";
    case SweepAxis::delta: return "delta";
    case SweepAxis::rho: return "rho";
    case SweepAxis::method: return "method";
  }
  return "?";
}

namespace {

ExperimentConfig config_at(const ExperimentConfig& base, SweepAxis axis, double value) {
  ExperimentConfig cfg = base;
  switch (axis) {
    case SweepAxis::n:
      cfg.dataset.n = static_cast<int>(std::llround(value));
      break;
    case SweepAxis::R:
      cfg.estimation.repetitions = static_cast<int>(std::llround(value));
      break;
    case SweepAxis::delta:
      cfg.selection.mode = SelectionMode::biased;
      cfg.selection.bias_strength = value;
      break;
    case SweepAxis::rho:
      cfg.noise.rho = value;
      break;
    case SweepAxis::method:
      break;
  }
  return cfg;
}

double mean_realized_delta(const std::vector<SelectionReport>& selections) {
  if (selections.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (const auto& s : selections) {
    sum += std::max(s.realized_delta0, s.realized_delta1);
  }
  return sum / selections.size();
}

}  // namespace

SweepResult run_sweep(SweepAxis axis, const std::vector<double>& grid,
                      const ExperimentConfig& base, const std::vector<std::uint64_t>& seeds,
                      const SweepOptions& opt) {
  if (grid.size() < 2) throw ValidationError("run_sweep: grid needs at least 2 points");
  if (axis != SweepAxis::method && !std::is_sorted(grid.begin(), grid.end())) {
    throw ValidationError("run_sweep: grid must be sorted ascending");
  }
  if (seeds.size() < 3) throw ValidationError("run_sweep: need at least 3 seeds per point");
  if (axis == SweepAxis::method &&
      (opt.methods.empty() || opt.methods.size() != grid.size())) {
    throw ValidationError("run_sweep: method axis needs one method per grid point");
  }

  SweepResult result;
  result.axis = axis;
  result.rows.resize(grid.size() * seeds.size());

  auto run_one = [&](std::size_t gi, std::size_t si) {
    SweepRow& row = result.rows[gi * seeds.size() + si];
    row.axis_value = grid[gi];
    row.seed = seeds[si];
    const EstimationMethod method =
        axis == SweepAxis::method ? opt.methods[gi] : opt.method;
    row.method = to_string(method);
    try {
      ExperimentConfig cfg = config_at(base, axis, grid[gi]);
      cfg.dataset.seed = seeds[si];
      cfg.training.seed = mix_u64(seeds[si]);
      cfg.validate();
      const DatasetBundle data = build_dataset(cfg);
      PipelineResult pipe = run_estimation(cfg, method, data);
      row.runtime_ms = pipe.runtime_ms;
      row.realized_delta = mean_realized_delta(pipe.selections);
      if (!pipe.report.total_error) {
        row.failed = true;
        row.failure = "estimation failed for at least one class";
        return;
      }
      row.total_error = *pipe.report.total_error;
      if (opt.with_training) {
        const TrainEvalResult tr =
            run_training(cfg, pipe.report.aggregated(), opt.training_mode, data);
        row.map = tr.clean_test.map;
        row.of1 = tr.clean_test.of1;
        row.cf1 = tr.clean_test.cf1;
        row.runtime_ms += tr.runtime_ms;
      }
    } catch (const std::exception& e) {
      row.failed = true;
      row.failure = e.what();
    }
  };

  const std::size_t tasks = grid.size() * seeds.size();
  const int workers = std::max(1, opt.workers);
  if (workers == 1) {
    for (std::size_t t = 0; t < tasks; ++t) run_one(t / seeds.size(), t % seeds.size());
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        for (std::size_t t = w; t < tasks; t += workers) {
          run_one(t / seeds.size(), t % seeds.size());
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    SweepPoint point;
    point.setting = grid[gi];
    point.label = axis == SweepAxis::method ? to_string(opt.methods[gi]) : to_string(axis);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      const SweepRow& row = result.rows[gi * seeds.size() + si];
      if (row.failed) continue;
      sum += row.total_error;
      sum2 += row.total_error * row.total_error;
      ++point.seeds_ok;
    }
    if (point.seeds_ok == 0) {
      point.missing = true;
    } else {
      point.mean_error = sum / point.seeds_ok;
      const double var = sum2 / point.seeds_ok - point.mean_error * point.mean_error;
      point.std_error = std::sqrt(std::max(0.0, var));
    }
    result.points.push_back(point);
  }
  return result;
}

void write_sweep_csv(const std::filesystem::path& file, const SweepResult& result) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  out << "axis_value,seed,method,total_error,map,of1,cf1,runtime_ms\n";
  for (const auto& row : result.rows) {
    out << format_g17(row.axis_value) << ',' << row.seed << ',' << row.method << ','
        << (row.failed ? "nan" : format_g17(row.total_error)) << ',' << format_g17(row.map)
        << ',' << format_g17(row.of1) << ',' << format_g17(row.cf1) << ','
        << format_g17(row.runtime_ms) << '\n';
  }
}

void write_sweep_summary(const std::filesystem::path& file, const SweepResult& result) {
  nlohmann::json j;
  j["axis"] = to_string(result.axis);
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : result.points) {
    nlohmann::json pj;
    pj["setting"] = p.setting;
    pj["label"] = p.label;
    pj["missing"] = p.missing;
    pj["seeds_ok"] = p.seeds_ok;
    if (!p.missing) {
      pj["mean_error"] = p.mean_error;
      pj["std_error"] = p.std_error;
    }
    points.push_back(pj);
  }
  j["points"] = points;
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& row : result.rows) {
    if (row.failed) {
      failures.push_back({{"axis_value", row.axis_value},
                          {"seed", row.seed},
                          {"failure", row.failure}});
    }
  }
  j["failures"] = failures;
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  out << j.dump(2) << "\n";
}

}  // namespace mlnoise
