#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mlnoise::cli {

// Exit codes: 0 success, 2 validation, 3 pipeline failure, 4 I/O.
inline constexpr int kOk = 0;
inline constexpr int kValidation = 2;
inline constexpr int kPipeline = 3;
inline constexpr int kIo = 4;

struct CommonArgs {
  std::string config_path;            // optional; defaults used when empty
  std::vector<std::string> overrides; // section.key=value, applied in order
};

int cmd_generate(const CommonArgs& args, const std::string& out_dir);
int cmd_estimate(const CommonArgs& args, const std::string& data_dir, const std::string& method,
                 const std::string& out_file);
int cmd_train(const CommonArgs& args, const std::string& data_dir, const std::string& t_source,
              const std::string& mode, const std::string& out_file);
int cmd_sweep(const CommonArgs& args, const std::string& axis, const std::string& grid,
              const std::string& seeds, const std::string& out_dir, int workers,
              const std::string& method, bool with_training);
int cmd_identifiability_witness(const std::vector<double>& t_params, double p,
                                const std::vector<double>& m_params, double a_minus,
                                double b_minus, const std::string& out_file);
int cmd_identifiability_certify(const std::vector<double>& t_params, double p,
                                const std::vector<double>& m_params, int candidates,
                                std::uint64_t seed, const std::string& out_file);

}  // namespace mlnoise::cli
