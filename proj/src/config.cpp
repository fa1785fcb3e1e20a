#include "mlnoise/config.hpp"

#include <fstream>
#include <sstream>

#include "mlnoise/errors.hpp"
#include "mlnoise/io.hpp"

namespace mlnoise {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError(where + ": " + what);
}

double to_double(const std::string& where, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) fail(where, "trailing characters in number '" + v + "'");
    return x;
  } catch (const std::logic_error&) {
    fail(where, "expected a number, got '" + v + "'");
  }
}

int to_int(const std::string& where, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) fail(where, "trailing characters in integer '" + v + "'");
    return static_cast<int>(x);
  } catch (const std::logic_error&) {
    fail(where, "expected an integer, got '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& where, const std::string& v) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) fail(where, "trailing characters in integer '" + v + "'");
    return x;
  } catch (const std::logic_error&) {
    fail(where, "expected a non-negative integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& where, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(where, "expected a boolean, got '" + v + "'");
}

void apply_key(ExperimentConfig& cfg, const std::string& section, const std::string& key,
               const std::string& value, const std::string& where) {
  try {
    if (section == "dataset") {
      if (key == "n") cfg.dataset.n = to_int(where, value);
      else if (key == "q") cfg.dataset.q = to_int(where, value);
      else if (key == "d") cfg.dataset.d = to_int(where, value);
      else if (key == "groups") cfg.dataset.groups = to_int(where, value);
      else if (key == "sigma") cfg.dataset.sigma = to_double(where, value);
      else if (key == "seed") cfg.dataset.seed = to_u64(where, value);
      else if (key == "group_activation") cfg.dataset.group_activation = to_double(where, value);
      else if (key == "p_in") cfg.dataset.p_in = to_double(where, value);
      else if (key == "p_out") cfg.dataset.p_out = to_double(where, value);
      else if (key == "affinity_spread") cfg.dataset.affinity_spread = to_double(where, value);
      else if (key == "prototype_overlap") cfg.dataset.prototype_overlap = to_double(where, value);
      else fail(where, "unknown key 'dataset." + key + "'");
    } else if (section == "noise") {
      if (key == "regime") cfg.noise.regime = noise_regime_from_string(value);
      else if (key == "rho") cfg.noise.rho = to_double(where, value);
      else if (key == "n_a") cfg.noise.n_a = to_double(where, value);
      else if (key == "pair_rate") cfg.noise.pair_rate = to_double(where, value);
      else if (key == "strict_assumption1") cfg.noise.strict_assumption1 = to_bool(where, value);
      else fail(where, "unknown key 'noise." + key + "'");
    } else if (section == "selection") {
      if (key == "mode") cfg.selection.mode = selection_mode_from_string(value);
      else if (key == "tau") cfg.selection.tau = to_double(where, value);
      else if (key == "bias_strength") cfg.selection.bias_strength = to_double(where, value);
      else if (key == "subsample") cfg.selection.subsample = to_double(where, value);
      else if (key == "keep_fraction") cfg.selection.keep_fraction = to_double(where, value);
      else if (key == "warmup_epochs") cfg.selection.warmup_epochs = to_int(where, value);
      else if (key == "snapshot_epochs") cfg.selection.snapshot_epochs = to_int(where, value);
      else if (key == "posterior_logit_scale")
        cfg.selection.posterior_logit_scale = to_double(where, value);
      else fail(where, "unknown key 'selection." + key + "'");
    } else if (section == "estimation") {
      if (key == "R") cfg.estimation.repetitions = to_int(where, value);
      else if (key == "pairing") cfg.estimation.pairing = pairing_from_string(value);
      else if (key == "singularity_floor") cfg.estimation.singularity_floor = to_double(where, value);
      else if (key == "screen_low") cfg.estimation.screen_low = to_double(where, value);
      else if (key == "screen_high") cfg.estimation.screen_high = to_double(where, value);
      else if (key == "p_floor") cfg.estimation.p_floor = to_double(where, value);
      else fail(where, "unknown key 'estimation." + key + "'");
    } else if (section == "training") {
      if (key == "mode") cfg.training.loss_mode = loss_mode_from_string(value);
      else if (key == "epochs") cfg.training.epochs = to_int(where, value);
      else if (key == "batch_size") cfg.training.batch_size = to_int(where, value);
      else if (key == "learning_rate") cfg.training.learning_rate = to_double(where, value);
      else if (key == "seed") cfg.training.seed = to_u64(where, value);
      else fail(where, "unknown key 'training." + key + "'");
    } else if (section == "output") {
      if (key == "dir") cfg.output_dir = value;
      else fail(where, "unknown key 'output." + key + "'");
    } else {
      fail(where, "unknown section [" + section + "]");
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    fail(where, e.what());
  }
}

}  // namespace

ExperimentConfig parse_experiment_config_text(const std::string& text,
                                              const std::string& origin) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(where, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(where, "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(where, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(where, "empty key");
    if (value.empty()) fail(where, "empty value for key '" + key + "'");
    if (section.empty()) fail(where, "key '" + key + "' appears before any [section]");
    apply_key(cfg, section, key, value, where);
  }
  return cfg;
}

ExperimentConfig parse_experiment_config(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot read config " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config_text(ss.str(), file.string());
}

void apply_override(ExperimentConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ValidationError("override '" + assignment + "': expected section.key=value");
  }
  const std::string path = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  const auto dot = path.find('.');
  if (dot == std::string::npos) {
    throw ValidationError("override '" + assignment + "': expected section.key=value");
  }
  apply_key(config, path.substr(0, dot), path.substr(dot + 1), value,
            "override '" + assignment + "'");
}

std::string render_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[dataset]\n"
      << "n = " << c.dataset.n << "\nq = " << c.dataset.q << "\nd = " << c.dataset.d
      << "\ngroups = " << c.dataset.groups << "\nsigma = " << format_g17(c.dataset.sigma)
      << "\nseed = " << c.dataset.seed
      << "\ngroup_activation = " << format_g17(c.dataset.group_activation)
      << "\np_in = " << format_g17(c.dataset.p_in) << "\np_out = " << format_g17(c.dataset.p_out)
      << "\naffinity_spread = " << format_g17(c.dataset.affinity_spread)
      << "\nprototype_overlap = " << format_g17(c.dataset.prototype_overlap) << "\n\n";
  out << "[noise]\nregime = " << to_string(c.noise.regime)
      << "\nrho = " << format_g17(c.noise.rho) << "\nn_a = " << format_g17(c.noise.n_a)
      << "\npair_rate = " << format_g17(c.noise.pair_rate)
      << "\nstrict_assumption1 = " << (c.noise.strict_assumption1 ? "true" : "false") << "\n\n";
  out << "[selection]\nmode = " << to_string(c.selection.mode)
      << "\ntau = " << format_g17(c.selection.tau)
      << "\nbias_strength = " << format_g17(c.selection.bias_strength)
      << "\nsubsample = " << format_g17(c.selection.subsample)
      << "\nkeep_fraction = " << format_g17(c.selection.keep_fraction)
      << "\nwarmup_epochs = " << c.selection.warmup_epochs
      << "\nsnapshot_epochs = " << c.selection.snapshot_epochs
      << "\nposterior_logit_scale = " << format_g17(c.selection.posterior_logit_scale) << "\n\n";
  out << "[estimation]\nR = " << c.estimation.repetitions
      << "\npairing = " << to_string(c.estimation.pairing)
      << "\nsingularity_floor = " << format_g17(c.estimation.singularity_floor)
      << "\nscreen_low = " << format_g17(c.estimation.screen_low)
      << "\nscreen_high = " << format_g17(c.estimation.screen_high)
      << "\np_floor = " << format_g17(c.estimation.p_floor) << "\n\n";
  out << "[training]\nmode = " << to_string(c.training.loss_mode)
      << "\nepochs = " << c.training.epochs << "\nbatch_size = " << c.training.batch_size
      << "\nlearning_rate = " << format_g17(c.training.learning_rate)
      << "\nseed = " << c.training.seed << "\n\n";
  out << "[output]\ndir = " << c.output_dir << "\n";
  return out.str();
}

}  // namespace mlnoise
