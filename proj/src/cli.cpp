#include "mlnoise/cli.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mlnoise/config.hpp"
#include "mlnoise/errors.hpp"
#include "mlnoise/eval.hpp"
#include "mlnoise/identifiability.hpp"
#include "mlnoise/io.hpp"
#include "mlnoise/reweight.hpp"

namespace mlnoise::cli {

namespace {

ExperimentConfig load_config(const CommonArgs& args) {
  ExperimentConfig cfg;
  if (!args.config_path.empty()) cfg = parse_experiment_config(args.config_path);
  for (const auto& o : args.overrides) apply_override(cfg, o);
  cfg.validate();
  return cfg;
}

int guard(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPipeline;
  }
}

std::vector<double> parse_grid(const std::string& grid) {
  std::vector<double> out;
  std::istringstream in(grid);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& seeds) {
  std::vector<std::uint64_t> out;
  std::istringstream in(seeds);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stoull(tok));
  }
  return out;
}

void write_json(const std::filesystem::path& file, const nlohmann::json& j) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  out << j.dump(2) << "\n";
}

Eigen::Matrix2d matrix_from_params(const std::vector<double>& v, const char* what) {
  if (v.size() != 4) {
    throw ValidationError(std::string(what) + " needs 4 values (row-major 2x2)");
  }
  Eigen::Matrix2d m;
  m << v[0], v[1], v[2], v[3];
  return m;
}

}  // namespace

int cmd_generate(const CommonArgs& args, const std::string& out_dir) {
  return guard([&]() {
    const ExperimentConfig cfg = load_config(args);
    const DatasetBundle bundle = build_dataset(cfg);
    const std::string dir = out_dir.empty() ? cfg.output_dir : out_dir;
    save_dataset(dir, bundle);
    std::cout << "wrote dataset (n=" << bundle.ds.n() << ", q=" << bundle.ds.q()
              << ", d=" << bundle.ds.d() << ") to " << dir << "\n";
    return kOk;
  });
}

int cmd_estimate(const CommonArgs& args, const std::string& data_dir, const std::string& method,
                 const std::string& out_file) {
  return guard([&]() {
    const EstimationMethod m = method_from_string(method);
    ExperimentConfig cfg = load_config(args);
    DatasetBundle bundle = load_dataset(data_dir);
    cfg.dataset = bundle.gen;
    cfg.noise = bundle.noise;
    PipelineResult result = run_estimation(cfg, m, bundle);

    nlohmann::json j = report_to_json(result.report);
    j["runtime_ms"] = result.runtime_ms;
    nlohmann::json sels = nlohmann::json::array();
    for (const auto& s : result.selections) sels.push_back(selection_to_json(s));
    j["selections"] = sels;
    write_json(out_file, j);

    int failed = 0;
    for (const auto& ce : result.report.classes) {
      if (!ce.aggregated) ++failed;
    }
    if (failed == static_cast<int>(result.report.classes.size())) {
      std::cerr << "error: estimation failed for every class\n";
      return kPipeline;
    }
    if (result.report.total_error) {
      std::cout << "total_error = " << *result.report.total_error << "\n";
    }
    std::cout << "wrote report to " << out_file << "\n";
    return kOk;
  });
}

int cmd_train(const CommonArgs& args, const std::string& data_dir, const std::string& t_source,
              const std::string& mode, const std::string& out_file) {
  return guard([&]() {
    const LossMode loss_mode = loss_mode_from_string(mode);
    ExperimentConfig cfg = load_config(args);
    DatasetBundle bundle = load_dataset(data_dir);
    cfg.dataset = bundle.gen;
    cfg.noise = bundle.noise;

    std::vector<TransitionMatrix2> t;
    if (loss_mode == LossMode::standard) {
      t = bundle.true_t;  // ignored by the standard loss
    } else if (t_source == "true") {
      t = bundle.true_t;
    } else {
      t = load_report_matrices(t_source);
      if (static_cast<int>(t.size()) != bundle.ds.q()) {
        throw ValidationError("report " + t_source + " has " + std::to_string(t.size()) +
                              " classes, dataset has " + std::to_string(bundle.ds.q()));
      }
    }
    if (loss_mode == LossMode::reweight) {
      for (std::size_t j = 0; j < t.size(); ++j) {
        if (!t[j].satisfies_assumption1()) {
          throw ValidationError("class " + std::to_string(j) +
                                ": loaded T violates rho_minus + rho_plus < 1");
        }
      }
    }

    const TrainEvalResult result = run_training(cfg, t, loss_mode, bundle);
    nlohmann::json j = metrics_to_json(result.clean_test);
    j["mode"] = mode;
    j["t_source"] = loss_mode == LossMode::standard ? "unused" : t_source;
    j["epoch_mean_loss"] = result.train.epoch_mean_loss;
    j["runtime_ms"] = result.runtime_ms;
    write_json(out_file, j);
    std::cout << "clean-test mAP=" << result.clean_test.map << " OF1=" << result.clean_test.of1
              << " CF1=" << result.clean_test.cf1 << "\n";
    return kOk;
  });
}

int cmd_sweep(const CommonArgs& args, const std::string& axis, const std::string& grid,
              const std::string& seeds, const std::string& out_dir, int workers,
              const std::string& method, bool with_training) {
  return guard([&]() {
    const SweepAxis ax = sweep_axis_from_string(axis);
    const ExperimentConfig cfg = load_config(args);
    SweepOptions opt;
    opt.workers = workers;
    opt.with_training = with_training;

    std::vector<double> grid_values;
    if (ax == SweepAxis::method) {
      std::istringstream in(grid);
      std::string tok;
      while (std::getline(in, tok, ',')) {
        if (tok.empty()) continue;
        opt.methods.push_back(method_from_string(tok));
        grid_values.push_back(static_cast<double>(opt.methods.size() - 1));
      }
    } else {
      grid_values = parse_grid(grid);
      opt.method = method_from_string(method);
    }
    const std::vector<std::uint64_t> seed_list = parse_seeds(seeds);
    if (seed_list.empty()) throw ValidationError("sweep: no seeds given");

    const SweepResult result = run_sweep(ax, grid_values, cfg, seed_list, opt);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create directory " + out_dir);
    write_sweep_csv(std::filesystem::path(out_dir) / ("sweep_" + axis + ".csv"), result);
    write_sweep_summary(std::filesystem::path(out_dir) / ("sweep_" + axis + ".json"), result);
    for (const auto& p : result.points) {
      std::cout << axis << "=" << p.setting << (p.missing ? "  (missing)" : "")
                << "  mean_error=" << p.mean_error << "  std=" << p.std_error << "\n";
    }
    return kOk;
  });
}

int cmd_identifiability_witness(const std::vector<double>& t_params, double p,
                                const std::vector<double>& m_params, double a_minus,
                                double b_minus, const std::string& out_file) {
  return guard([&]() {
    if (t_params.size() != 2) {
      throw ValidationError("T takes 2 values: rho_minus,rho_plus");
    }
    const TransitionMatrix2 t{t_params[0], t_params[1]};
    const Eigen::Matrix2d m = matrix_from_params(m_params, "M");
    const AlternativeSolution sol = construct_alternative(t, p, m, a_minus, b_minus);
    nlohmann::json j;
    j["a_minus"] = sol.a_minus;
    j["a_plus"] = sol.a_plus;
    j["b_minus"] = sol.b_minus;
    j["b_plus"] = sol.b_plus;
    j["T_alt"] = {sol.t_alt(0, 0), sol.t_alt(0, 1), sol.t_alt(1, 0), sol.t_alt(1, 1)};
    j["M_alt"] = {sol.m_alt(0, 0), sol.m_alt(0, 1), sol.m_alt(1, 0), sol.m_alt(1, 1)};
    j["p_alt"] = sol.p_alt(1, 1);
    j["reconstruction_residual"] = sol.reconstruction_residual;
    j["gap_from_original"] = sol.gap_from_original;
    write_json(out_file, j);
    std::cout << "residual = " << sol.reconstruction_residual
              << ", ||T - T_alt||_1 = " << sol.gap_from_original << "\n";
    return kOk;
  });
}

int cmd_identifiability_certify(const std::vector<double>& t_params, double p,
                                const std::vector<double>& m_params, int candidates,
                                std::uint64_t seed, const std::string& out_file) {
  return guard([&]() {
    if (t_params.size() != 2) {
      throw ValidationError("T takes 2 values: rho_minus,rho_plus");
    }
    const TransitionMatrix2 t{t_params[0], t_params[1]};
    const Eigen::Matrix2d m = matrix_from_params(m_params, "M");
    Eigen::Matrix2d prior = Eigen::Matrix2d::Zero();
    prior(0, 0) = 1.0 - p;
    prior(1, 1) = p;
    const Eigen::Matrix2d e = t.matrix().transpose() * prior * m;
    const UniquenessCertificate cert = certify_unique_given_M(e, m, candidates, seed);
    nlohmann::json j;
    j["unique"] = cert.unique;
    j["candidates_tested"] = cert.candidates_tested;
    j["p_hat"] = cert.p_hat;
    j["t_hat"] = {{"rho_minus", cert.t_hat.rho_minus}, {"rho_plus", cert.t_hat.rho_plus}};
    if (cert.counterexample_t) {
      j["counterexample"] = {{"rho_minus", cert.counterexample_t->rho_minus},
                             {"rho_plus", cert.counterexample_t->rho_plus},
                             {"p", *cert.counterexample_p}};
    }
    write_json(out_file, j);
    std::cout << (cert.unique ? "no counterexample found over "
                              : "counterexample found after ")
              << cert.candidates_tested << " candidates\n";
    return kOk;
  });
}

}  // namespace mlnoise::cli
