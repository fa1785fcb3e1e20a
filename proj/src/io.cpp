#include "mlnoise/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mlnoise/errors.hpp"

namespace mlnoise {

using nlohmann::json;

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  out << text;
  if (!out) throw IoError("short write to " + file.string());
}

std::string read_text(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_matrix_csv(const std::filesystem::path& file, const Eigen::MatrixXd& m) {
  std::string out;
  out.reserve(static_cast<std::size_t>(m.size()) * 20);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_g17(m(r, c));
    }
    out += '\n';
  }
  write_text(file, out);
}

void write_labels_csv(const std::filesystem::path& file, const LabelMatrix& m) {
  std::string out;
  out.reserve(static_cast<std::size_t>(m.size()) * 2);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += m(r, c) ? '1' : '0';
    }
    out += '\n';
  }
  write_text(file, out);
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& file, Eigen::Index rows,
                                Eigen::Index cols) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot read " + file.string());
  Eigen::MatrixXd m(rows, cols);
  std::string line;
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) throw IoError(file.string() + ": unexpected end of file");
    const char* p = line.c_str();
    char* end = nullptr;
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = std::strtod(p, &end);
      if (end == p) throw IoError(file.string() + ": malformed row " + std::to_string(r));
      p = (*end == ',') ? end + 1 : end;
    }
  }
  return m;
}

LabelMatrix read_labels_csv(const std::filesystem::path& file, Eigen::Index rows,
                            Eigen::Index cols) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot read " + file.string());
  LabelMatrix m(rows, cols);
  std::string line;
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) throw IoError(file.string() + ": unexpected end of file");
    Eigen::Index c = 0;
    for (std::size_t k = 0; k < line.size() && c < cols; ++k) {
      if (line[k] == '0' || line[k] == '1') m(r, c++) = line[k] - '0';
    }
    if (c != cols) throw IoError(file.string() + ": malformed row " + std::to_string(r));
  }
  return m;
}

json transition_to_json(const TransitionMatrix2& t) {
  return json{{"rho_minus", t.rho_minus}, {"rho_plus", t.rho_plus}};
}

TransitionMatrix2 transition_from_json(const json& j) {
  return {j.at("rho_minus").get<double>(), j.at("rho_plus").get<double>()};
}

}  // namespace

void save_dataset(const std::filesystem::path& dir, const DatasetBundle& bundle) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string());

  const auto& ds = bundle.ds;
  json meta;
  meta["format_version"] = 1;
  meta["n"] = ds.n();
  meta["q"] = ds.q();
  meta["d"] = ds.d();
  meta["seed"] = ds.seed;
  meta["regime"] = to_string(bundle.noise.regime);
  meta["rho"] = bundle.noise.rho;
  meta["n_a"] = bundle.noise.n_a;
  meta["pair_rate"] = bundle.noise.pair_rate;
  meta["group_assignment"] = ds.group_assignment;
  json true_t = json::array();
  for (const auto& t : bundle.true_t) true_t.push_back(transition_to_json(t));
  meta["true_T"] = true_t;
  json gen;
  gen["n"] = bundle.gen.n;
  gen["q"] = bundle.gen.q;
  gen["d"] = bundle.gen.d;
  gen["groups"] = bundle.gen.groups;
  gen["sigma"] = bundle.gen.sigma;
  gen["seed"] = bundle.gen.seed;
  gen["group_activation"] = bundle.gen.group_activation;
  gen["p_in"] = bundle.gen.p_in;
  gen["p_out"] = bundle.gen.p_out;
  gen["affinity_spread"] = bundle.gen.affinity_spread;
  gen["prototype_overlap"] = bundle.gen.prototype_overlap;
  meta["generator"] = gen;
  write_text(dir / "meta.json", meta.dump(2) + "\n");

  write_matrix_csv(dir / "features.csv", ds.features);
  write_labels_csv(dir / "clean.csv", ds.clean_labels);
  write_labels_csv(dir / "noisy.csv", ds.noisy_labels);
  write_matrix_csv(dir / "prototypes.csv", ds.class_prototypes);
}

DatasetBundle load_dataset(const std::filesystem::path& dir) {
  json meta;
  try {
    meta = json::parse(read_text(dir / "meta.json"));
  } catch (const json::exception& e) {
    throw IoError(dir.string() + "/meta.json: " + e.what());
  }
  DatasetBundle bundle;
  const int n = meta.at("n").get<int>();
  const int q = meta.at("q").get<int>();
  const int d = meta.at("d").get<int>();
  bundle.ds.seed = meta.at("seed").get<std::uint64_t>();
  bundle.ds.group_assignment = meta.at("group_assignment").get<std::vector<int>>();
  for (const auto& t : meta.at("true_T")) bundle.true_t.push_back(transition_from_json(t));
  bundle.noise.regime = noise_regime_from_string(meta.at("regime").get<std::string>());
  bundle.noise.rho = meta.at("rho").get<double>();
  bundle.noise.n_a = meta.at("n_a").get<double>();
  bundle.noise.pair_rate = meta.at("pair_rate").get<double>();
  const auto& gen = meta.at("generator");
  bundle.gen.n = gen.at("n").get<int>();
  bundle.gen.q = gen.at("q").get<int>();
  bundle.gen.d = gen.at("d").get<int>();
  bundle.gen.groups = gen.at("groups").get<int>();
  bundle.gen.sigma = gen.at("sigma").get<double>();
  bundle.gen.seed = gen.at("seed").get<std::uint64_t>();
  bundle.gen.group_activation = gen.at("group_activation").get<double>();
  bundle.gen.p_in = gen.at("p_in").get<double>();
  bundle.gen.p_out = gen.at("p_out").get<double>();
  bundle.gen.affinity_spread = gen.at("affinity_spread").get<double>();
  bundle.gen.prototype_overlap = gen.at("prototype_overlap").get<double>();

  bundle.ds.features = read_matrix_csv(dir / "features.csv", n, d);
  bundle.ds.clean_labels = read_labels_csv(dir / "clean.csv", n, q);
  bundle.ds.noisy_labels = read_labels_csv(dir / "noisy.csv", n, q);
  bundle.ds.class_prototypes = read_matrix_csv(dir / "prototypes.csv", q, d);
  return bundle;
}

void save_classifier(const std::filesystem::path& file, const PerLabelClassifier& clf,
                     const TrainConfig& config) {
  json j;
  j["q"] = clf.q();
  j["d"] = clf.d();
  // Eigen stores column-major; emit row-major explicitly.
  json weights = json::array();
  for (int r = 0; r < clf.q(); ++r) {
    for (int c = 0; c < clf.d(); ++c) weights.push_back(clf.weights(r, c));
  }
  j["weights_row_major"] = weights;
  j["biases"] = std::vector<double>(clf.biases.data(), clf.biases.data() + clf.biases.size());
  j["config"] = {{"epochs", config.epochs},
                 {"batch_size", config.batch_size},
                 {"learning_rate", config.learning_rate},
                 {"seed", config.seed},
                 {"loss_mode", to_string(config.loss_mode)},
                 {"loss_snapshot_epochs", config.loss_snapshot_epochs}};
  write_text(file, j.dump(2) + "\n");
}

PerLabelClassifier load_classifier(const std::filesystem::path& file) {
  json j;
  try {
    j = json::parse(read_text(file));
  } catch (const json::exception& e) {
    throw IoError(file.string() + ": " + e.what());
  }
  PerLabelClassifier clf;
  const int q = j.at("q").get<int>();
  const int d = j.at("d").get<int>();
  const auto w = j.at("weights_row_major").get<std::vector<double>>();
  if (static_cast<int>(w.size()) != q * d) throw IoError(file.string() + ": weight size mismatch");
  clf.weights.resize(q, d);
  for (int r = 0; r < q; ++r) {
    for (int c = 0; c < d; ++c) clf.weights(r, c) = w[r * d + c];
  }
  const auto b = j.at("biases").get<std::vector<double>>();
  if (static_cast<int>(b.size()) != q) throw IoError(file.string() + ": bias size mismatch");
  clf.biases = Eigen::Map<const Eigen::VectorXd>(b.data(), q);
  return clf;
}

json selection_to_json(const SelectionReport& report) {
  json j;
  j["class"] = report.class_index;
  j["mode"] = to_string(report.mode);
  j["tau"] = report.tau;
  j["bias_strength"] = report.bias_strength;
  j["subsample"] = report.subsample;
  j["selected_count"] = report.selected.size();
  j["lambda0"] = report.lambda0;
  j["lambda1"] = report.lambda1;
  j["realized_delta0"] = report.realized_delta0;
  j["realized_delta1"] = report.realized_delta1;
  j["delta0_by_partner"] = report.delta0_by_partner;
  j["delta1_by_partner"] = report.delta1_by_partner;
  j["low_support"] = report.low_support;
  return j;
}

void save_selection_indices(const std::filesystem::path& file, const SelectionReport& report) {
  std::string out;
  for (int idx : report.selected) {
    out += std::to_string(idx);
    out += '\n';
  }
  write_text(file, out);
}

json report_to_json(const EstimationReport& report) {
  json j;
  j["method"] = report.method;
  if (report.total_error) j["total_error"] = *report.total_error;
  if (report.total_error_mean_aggregate) {
    j["total_error_mean_aggregate"] = *report.total_error_mean_aggregate;
  }
  json classes = json::array();
  for (const auto& ce : report.classes) {
    json c;
    c["class"] = ce.class_index;
    c["pairing_order"] = ce.pairing_order;
    if (ce.aggregated) {
      c["t_hat"] = transition_to_json(*ce.aggregated);
      c["p_hat"] = ce.p_hat;
    }
    if (ce.mean_aggregated) c["t_hat_mean_aggregate"] = transition_to_json(*ce.mean_aggregated);
    if (!ce.failure.empty()) c["failure"] = ce.failure;
    if (!report.per_class_error.empty() && ce.aggregated) {
      c["error"] = report.per_class_error[ce.class_index];
    }
    json cands = json::array();
    for (const auto& cand : ce.candidates) {
      json k;
      k["pair"] = {cand.pair.first, cand.pair.second};
      k["accepted"] = cand.accepted;
      if (!cand.accepted) k["reason"] = cand.reject_reason;
      k["t_hat"] = transition_to_json(cand.t_hat);
      k["p_hat"] = cand.p_hat;
      k["raw_T"] = {cand.raw_t(0, 0), cand.raw_t(0, 1), cand.raw_t(1, 0), cand.raw_t(1, 1)};
      k["clipped"] = cand.clipped;
      k["permuted"] = cand.permuted;
      k["assumption1_ok"] = cand.assumption1_ok;
      cands.push_back(std::move(k));
    }
    c["candidates"] = std::move(cands);
    classes.push_back(std::move(c));
  }
  j["classes"] = std::move(classes);
  return j;
}

void save_report(const std::filesystem::path& file, const EstimationReport& report) {
  write_text(file, report_to_json(report).dump(2) + "\n");
}

std::vector<TransitionMatrix2> load_report_matrices(const std::filesystem::path& file) {
  json j;
  try {
    j = json::parse(read_text(file));
  } catch (const json::exception& e) {
    throw IoError(file.string() + ": " + e.what());
  }
  std::vector<TransitionMatrix2> out;
  for (const auto& c : j.at("classes")) {
    if (!c.contains("t_hat")) {
      throw IoError(file.string() + ": class " + c.at("class").dump() + " has no estimate");
    }
    out.push_back(transition_from_json(c.at("t_hat")));
  }
  return out;
}

json metrics_to_json(const MetricsBundle& metrics) {
  json j;
  j["map"] = metrics.map;
  j["of1"] = metrics.of1;
  j["cf1"] = metrics.cf1;
  std::vector<double> ap(metrics.per_class_ap.data(),
                         metrics.per_class_ap.data() + metrics.per_class_ap.size());
  j["per_class_ap"] = ap;
  j["skipped_classes"] = metrics.skipped_classes;
  return j;
}

}  // namespace mlnoise
