#include "mlnoise/datagen.hpp"

#include <cmath>
#include <utility>

#include "mlnoise/errors.hpp"
#include "mlnoise/rng.hpp"

namespace mlnoise {

std::string to_string(NoiseRegime r) {
  switch (r) {
    case NoiseRegime::MLML: return "MLML";
    case NoiseRegime::PML: return "PML";
    case NoiseRegime::ULF: return "ULF";
    case NoiseRegime::ALF: return "ALF";
    case NoiseRegime::PAIRWISE: return "PAIRWISE";
  }
  return "?";
}

NoiseRegime noise_regime_from_string(const std::string& s) {
  if (s == "MLML") return NoiseRegime::MLML;
  if (s == "PML") return NoiseRegime::PML;
  if (s == "ULF") return NoiseRegime::ULF;
  if (s == "ALF") return NoiseRegime::ALF;
  if (s == "PAIRWISE") return NoiseRegime::PAIRWISE;
  throw ValidationError("unknown noise regime: " + s);
}

void NoiseConfig::validate(int q) const {
  if (rho < 0.0 || rho >= 1.0) throw ValidationError("noise.rho must lie in [0,1)");
  if (regime == NoiseRegime::ALF) {
    if (n_a <= 0.0 || n_a >= q) {
      throw ValidationError("noise.n_a must lie in (0, q) for ALF");
    }
    const double rho_minus = n_a * rho / (q - n_a);
    if (rho_minus < 0.0 || rho_minus >= 1.0) {
      throw ValidationError("ALF rho_minus = n_a*rho/(q-n_a) must lie in [0,1)");
    }
  }
  if (regime == NoiseRegime::PAIRWISE && (pair_rate < 0.0 || pair_rate >= 1.0)) {
    throw ValidationError("noise.pair_rate must lie in [0,1)");
  }
  if (!per_class_override.empty() && static_cast<int>(per_class_override.size()) != q) {
    throw ValidationError("per_class_override must have exactly q entries");
  }
}

std::vector<TransitionMatrix2> make_noise_matrices(const NoiseConfig& config, int q) {
  config.validate(q);
  if (!config.per_class_override.empty()) {
    for (const auto& t : config.per_class_override) {
      if (!t.valid_probabilities()) throw ValidationError("override matrix outside [0,1]");
      if (config.strict_assumption1 && !t.satisfies_assumption1()) {
        throw ValidationError("override matrix violates rho_minus + rho_plus < 1");
      }
    }
    return config.per_class_override;
  }
  TransitionMatrix2 t;
  switch (config.regime) {
    case NoiseRegime::MLML: t = {0.0, config.rho}; break;
    case NoiseRegime::PML: t = {config.rho, 0.0}; break;
    case NoiseRegime::ULF: t = {config.rho, config.rho}; break;
    case NoiseRegime::ALF: t = {config.n_a * config.rho / (q - config.n_a), config.rho}; break;
    case NoiseRegime::PAIRWISE: t = {0.0, 0.0}; break;
  }
  if (config.strict_assumption1 && !t.satisfies_assumption1()) {
    throw ValidationError("configured rho violates rho_minus + rho_plus < 1");
  }
  return std::vector<TransitionMatrix2>(q, t);
}

void GeneratorConfig::validate() const {
  if (n < 1) throw ValidationError("dataset.n must be >= 1");
  if (q < 2) throw ValidationError("dataset.q must be >= 2");
  if (d < 1) throw ValidationError("dataset.d must be >= 1");
  if (groups < 1 || groups > q) throw ValidationError("dataset.groups must lie in [1, q]");
  if (sigma < 0.0) throw ValidationError("dataset.sigma must be >= 0");
  if (p_in <= 0.0 || p_in > 1.0 || p_out < 0.0 || p_out >= p_in) {
    throw ValidationError("require 0 <= p_out < p_in <= 1");
  }
  if (group_activation <= 0.0 || group_activation >= 1.0) {
    throw ValidationError("group_activation must lie in (0,1)");
  }
  if (affinity_spread < 0.0 || affinity_spread >= 1.0) {
    throw ValidationError("affinity_spread must lie in [0,1)");
  }
  if (prototype_overlap < 0.0 || prototype_overlap >= 1.0) {
    throw ValidationError("prototype_overlap must lie in [0,1)");
  }
}

bool MultiLabelDataset::estimable() const {
  for (int j = 0; j < q(); ++j) {
    long long pos = 0;
    for (int i = 0; i < n(); ++i) pos += clean_labels(i, j);
    if (pos == 0 || pos == n()) return false;
  }
  return true;
}

MultiLabelDataset generate_clean_dataset(const GeneratorConfig& config) {
  config.validate();
  const int n = config.n, q = config.q, d = config.d, g = config.groups;

  MultiLabelDataset ds;
  ds.seed = config.seed;
  ds.group_assignment.resize(q);
  std::vector<int> group_rank(q, 0);
  std::vector<int> group_size(g, 0);
  for (int j = 0; j < q; ++j) {
    ds.group_assignment[j] = j % g;
    group_rank[j] = group_size[j % g]++;
  }

  // Prototypes: per-class direction blended with a shared per-group direction.
  Rng proto_rng = Rng::substream(config.seed, "prototypes");
  Eigen::MatrixXd shared(g, d);
  for (int k = 0; k < g; ++k)
    for (int c = 0; c < d; ++c) shared(k, c) = proto_rng.normal();
  ds.class_prototypes.resize(q, d);
  for (int j = 0; j < q; ++j) {
    for (int c = 0; c < d; ++c) {
      const double own = proto_rng.normal();
      ds.class_prototypes(j, c) = (1.0 - config.prototype_overlap) * own +
                                  config.prototype_overlap * shared(ds.group_assignment[j], c);
    }
    ds.class_prototypes.row(j).normalize();
  }

  // Per-class fire rate when its group is active; decays along the group so
  // partner quality varies within a group.
  std::vector<double> fire_active(q);
  for (int j = 0; j < q; ++j) {
    const int size = group_size[ds.group_assignment[j]];
    const double s = size > 1
                         ? 1.0 - config.affinity_spread * group_rank[j] / (size - 1.0)
                         : 1.0;
    fire_active[j] = config.p_out + s * (config.p_in - config.p_out);
  }

  Rng label_rng = Rng::substream(config.seed, "labels");
  ds.clean_labels.resize(n, q);
  std::vector<bool> active(g);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < g; ++k) active[k] = label_rng.bernoulli(config.group_activation);
    for (int j = 0; j < q; ++j) {
      const double p = active[ds.group_assignment[j]] ? fire_active[j] : config.p_out;
      ds.clean_labels(i, j) = label_rng.bernoulli(p) ? 1 : 0;
    }
  }

  Rng feature_rng = Rng::substream(config.seed, "features");
  ds.features.resize(n, d);
  for (int i = 0; i < n; ++i) {
    Eigen::RowVectorXd x = Eigen::RowVectorXd::Zero(d);
    for (int j = 0; j < q; ++j) {
      if (ds.clean_labels(i, j)) x += ds.class_prototypes.row(j);
    }
    if (config.sigma > 0.0) {
      for (int c = 0; c < d; ++c) x(c) += config.sigma * feature_rng.normal();
    }
    ds.features.row(i) = x;
  }

  ds.noisy_labels = ds.clean_labels;
  return ds;
}

MultiLabelDataset generate_clean_dataset(int n, int q, int d, int groups, double sigma,
                                         std::uint64_t seed) {
  GeneratorConfig config;
  config.n = n;
  config.q = q;
  config.d = d;
  config.groups = groups;
  config.sigma = sigma;
  config.seed = seed;
  return generate_clean_dataset(config);
}

MultiLabelDataset inject_class_dependent_noise(const MultiLabelDataset& ds,
                                               const std::vector<TransitionMatrix2>& t,
                                               std::uint64_t seed) {
  if (static_cast<int>(t.size()) != ds.q()) {
    throw ValidationError("need one transition matrix per class");
  }
  MultiLabelDataset out = ds;
  for (int j = 0; j < ds.q(); ++j) {
    Rng rng = Rng::substream(seed, "class-noise", static_cast<std::uint64_t>(j));
    const double flip0 = t[j].rho_minus;
    const double flip1 = t[j].rho_plus;
    for (int i = 0; i < ds.n(); ++i) {
      const bool clean = ds.clean_labels(i, j) != 0;
      const double flip = clean ? flip1 : flip0;
      const bool flipped = rng.bernoulli(flip);
      out.noisy_labels(i, j) = static_cast<std::uint8_t>(clean != flipped ? 1 : 0);
    }
  }
  return out;
}

PairwiseNoiseReport inject_pairwise_noise(const MultiLabelDataset& ds, double pair_rate,
                                          std::uint64_t seed) {
  if (pair_rate < 0.0 || pair_rate >= 1.0) {
    throw ValidationError("pair_rate must lie in [0,1)");
  }
  PairwiseNoiseReport report;
  report.dataset = ds;
  report.dataset.noisy_labels = ds.clean_labels;
  report.partner.assign(ds.q(), -1);
  for (int j = 0; j + 1 < ds.q(); j += 2) {
    report.partner[j] = j + 1;
    report.partner[j + 1] = j;
  }
  report.has_unpaired = (ds.q() % 2) != 0;

  Rng rng = Rng::substream(seed, "pairwise-noise");
  auto& noisy = report.dataset.noisy_labels;
  for (int i = 0; i < ds.n(); ++i) {
    for (int j = 0; j < ds.q(); ++j) {
      const int pj = report.partner[j];
      if (pj < 0 || ds.clean_labels(i, j) == 0) continue;
      if (noisy(i, pj) != 0) continue;  // the class change would not occur
      ++report.eligible;
      if (rng.bernoulli(pair_rate)) {
        noisy(i, j) = 0;
        noisy(i, pj) = 1;
        ++report.swapped;
      }
    }
  }
  return report;
}

std::pair<double, double> empirical_flip_rates(const MultiLabelDataset& ds, int j) {
  long long n0 = 0, n1 = 0, f0 = 0, f1 = 0;
  for (int i = 0; i < ds.n(); ++i) {
    if (ds.clean_labels(i, j)) {
      ++n1;
      if (!ds.noisy_labels(i, j)) ++f1;
    } else {
      ++n0;
      if (ds.noisy_labels(i, j)) ++f0;
    }
  }
  return {n0 > 0 ? static_cast<double>(f0) / n0 : 0.0,
          n1 > 0 ? static_cast<double>(f1) / n1 : 0.0};
}

double correlation_margin(const MultiLabelDataset& ds, int i, int j) {
  long long n0 = 0, n1 = 0, z0 = 0, z1 = 0;
  for (int r = 0; r < ds.n(); ++r) {
    if (ds.clean_labels(r, j)) {
      ++n1;
      if (!ds.clean_labels(r, i)) ++z1;
    } else {
      ++n0;
      if (!ds.clean_labels(r, i)) ++z0;
    }
  }
  if (n0 == 0 || n1 == 0) return 0.0;
  return std::abs(static_cast<double>(z0) / n0 - static_cast<double>(z1) / n1);
}

}  // namespace mlnoise
