#include <CLI11.hpp>

#include "mlnoise/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Multi-label noise transition matrix experiments"};
  app.require_subcommand(1);

  mlnoise::cli::CommonArgs common;
  std::string out;
  std::string data_dir;
  std::string method = "ours";
  std::string t_source = "true";
  std::string mode = "reweight";
  std::string axis = "n";
  std::string grid;
  std::string seeds = "1,2,3";
  int workers = 1;
  bool with_training = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "experiment config file");
    sub->add_option("--set", common.overrides,
                    "override a config field, e.g. --set dataset.n=1000");
  };

  auto* generate = app.add_subcommand("generate", "generate a noisy dataset directory");
  add_common(generate);
  generate->add_option("--out", out, "output directory (defaults to output.dir)");

  auto* estimate = app.add_subcommand("estimate", "estimate transition matrices");
  add_common(estimate);
  estimate->add_option("--data", data_dir, "dataset directory")->required();
  estimate->add_option("--method", method,
                       "ours|ours_gold|t_max|t_97|dual_t_max|dual_t_97");
  estimate->add_option("--out", out, "report JSON path")->required();

  auto* train = app.add_subcommand("train", "train with a corrected loss and evaluate");
  add_common(train);
  train->add_option("--data", data_dir, "dataset directory")->required();
  train->add_option("--t-source", t_source, "'true' or a report JSON path");
  train->add_option("--mode", mode, "standard|reweight|forward|backward");
  train->add_option("--out", out, "metrics JSON path")->required();

  auto* sweep = app.add_subcommand("sweep", "sweep one axis and write CSV results");
  add_common(sweep);
  sweep->add_option("--axis", axis, "n|R|delta|rho|method")->required();
  sweep->add_option("--grid", grid, "comma-separated grid values (method names for axis=method)")
      ->required();
  sweep->add_option("--seeds", seeds, "comma-separated seeds");
  sweep->add_option("--method", method, "estimator for non-method axes");
  sweep->add_option("--workers", workers, "parallel sweep workers");
  sweep->add_flag("--train", with_training, "also train and record clean-test metrics");
  sweep->add_option("--out", out, "output directory")->required();

  std::vector<double> t_params = {0.2, 0.2};
  std::vector<double> m_params = {0.9, 0.1, 0.3, 0.7};
  double p = 0.5, a_minus = 0.1, b_minus = 0.1;
  int candidates = 10000;
  std::uint64_t cert_seed = 0;

  auto* ident = app.add_subcommand("identifiability", "identifiability probes");
  ident->require_subcommand(1);
  auto* witness = ident->add_subcommand("witness", "construct a non-uniqueness witness");
  witness->add_option("--t", t_params, "rho_minus,rho_plus")->expected(2);
  witness->add_option("--p", p, "clean class prior");
  witness->add_option("--m", m_params, "row-major 2x2 conditional")->expected(4);
  witness->add_option("--a-minus", a_minus, "mixing parameter a_-");
  witness->add_option("--b-minus", b_minus, "mixing parameter b_-");
  witness->add_option("--out", out, "witness JSON path")->required();
  auto* certify = ident->add_subcommand("certify", "randomized uniqueness certificate given M");
  certify->add_option("--t", t_params, "rho_minus,rho_plus")->expected(2);
  certify->add_option("--p", p, "clean class prior");
  certify->add_option("--m", m_params, "row-major 2x2 conditional")->expected(4);
  certify->add_option("--candidates", candidates, "random candidates to test");
  certify->add_option("--seed", cert_seed, "search seed");
  certify->add_option("--out", out, "certificate JSON path")->required();

  CLI11_PARSE(app, argc, argv);

  if (generate->parsed()) return mlnoise::cli::cmd_generate(common, out);
  if (estimate->parsed()) return mlnoise::cli::cmd_estimate(common, data_dir, method, out);
  if (train->parsed()) return mlnoise::cli::cmd_train(common, data_dir, t_source, mode, out);
  if (sweep->parsed()) {
    return mlnoise::cli::cmd_sweep(common, axis, grid, seeds, out, workers, method,
                                   with_training);
  }
  if (ident->parsed()) {
    if (witness->parsed()) {
      return mlnoise::cli::cmd_identifiability_witness(t_params, p, m_params, a_minus, b_minus,
                                                       out);
    }
    return mlnoise::cli::cmd_identifiability_certify(t_params, p, m_params, candidates,
                                                     cert_seed, out);
  }
  return mlnoise::cli::kValidation;
}
