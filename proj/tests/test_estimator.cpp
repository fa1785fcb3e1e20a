#include <doctest.h>

#include <cmath>

#include "mlnoise/datagen.hpp"
#include "mlnoise/errors.hpp"
#include "mlnoise/estimator.hpp"
#include "mlnoise/rng.hpp"
#include "mlnoise/selection.hpp"

using namespace mlnoise;

namespace {

Eigen::Matrix2d forward_joint(const TransitionMatrix2& t, double p, const Eigen::Matrix2d& m) {
  Eigen::Matrix2d prior = Eigen::Matrix2d::Zero();
  prior(0, 0) = 1.0 - p;
  prior(1, 1) = p;
  return t.matrix().transpose() * prior * m;
}

}  // namespace

TEST_CASE("joint counting on tiny fixtures") {
  LabelMatrix labels(4, 2);
  labels << 0, 0, 0, 1, 1, 0, 1, 1;
  const Table2 t = estimate_joint(labels, /*i=*/1, /*j=*/0);
  for (int k = 0; k < 2; ++k) {
    for (int v = 0; v < 2; ++v) CHECK(t.prob(k, v) == 0.25);
  }

  LabelMatrix equal(6, 2);
  equal << 0, 0, 1, 1, 0, 0, 1, 1, 1, 1, 0, 0;
  const Table2 diag = estimate_joint(equal, 1, 0);
  CHECK(diag.prob(0, 1) == 0.0);
  CHECK(diag.prob(1, 0) == 0.0);
  CHECK(diag.prob(0, 0) == 0.5);
  CHECK(diag.prob(1, 1) == 0.5);
}

TEST_CASE("counting is exact as integer ratios") {
  Rng rng(3);
  LabelMatrix labels(997, 3);
  for (int i = 0; i < labels.rows(); ++i) {
    for (int j = 0; j < 3; ++j) labels(i, j) = rng.bernoulli(0.4) ? 1 : 0;
  }
  const Table2 joint = estimate_joint(labels, 2, 0);
  long long total = 0;
  for (int k = 0; k < 2; ++k) {
    for (int v = 0; v < 2; ++v) {
      total += joint.counts[k][v];
      CHECK(joint.prob(k, v) ==
            static_cast<double>(joint.counts[k][v]) / static_cast<double>(labels.rows()));
    }
  }
  CHECK(total == labels.rows());
  CHECK(std::abs(joint.prob.sum() - 1.0) <= 1e-12);

  SelectionReport all;
  all.class_index = 0;
  for (int i = 0; i < labels.rows(); ++i) all.selected.push_back(i);
  const Table2 cond = estimate_conditional(labels, all, 2, 0);
  for (int k = 0; k < 2; ++k) {
    const long long row = cond.counts[k][0] + cond.counts[k][1];
    for (int v = 0; v < 2; ++v) {
      CHECK(cond.prob(k, v) ==
            static_cast<double>(cond.counts[k][v]) / static_cast<double>(row));
    }
    CHECK(std::abs(cond.prob.row(k).sum() - 1.0) <= 1e-12);
  }
}

TEST_CASE("conditional table degenerate cases") {
  LabelMatrix labels(4, 2);
  labels << 1, 1, 1, 1, 0, 0, 0, 0;
  SelectionReport sel;
  sel.class_index = 0;
  sel.selected = {0, 1, 2, 3};
  const Table2 t = estimate_conditional(labels, sel, 1, 0);
  CHECK(t.prob(0, 0) == 1.0);
  CHECK(t.prob(1, 1) == 1.0);

  SelectionReport only_ones;
  only_ones.class_index = 0;
  only_ones.selected = {0, 1};
  CHECK_THROWS_AS(estimate_conditional(labels, only_ones, 1, 0), EmptyStratum);

  SelectionReport tiny;
  tiny.class_index = 0;
  tiny.selected = {0, 2, 3};
  const Table2 low = estimate_conditional(labels, tiny, 1, 0);
  CHECK(low.low_support);
  CHECK(low.prob(0, 0) == 1.0);  // unit row from a stratum of size 2
}

TEST_CASE("bilinear solve on the identity fixture") {
  const TransitionMatrix2 t{0.0, 0.0};
  Eigen::Matrix2d m;
  m << 0.9, 0.1, 0.2, 0.8;
  const Eigen::Matrix2d e = forward_joint(t, 0.3, m);
  CHECK(e(0, 0) == doctest::Approx(0.63).epsilon(1e-12));
  CHECK(e(0, 1) == doctest::Approx(0.07).epsilon(1e-12));
  CHECK(e(1, 0) == doctest::Approx(0.06).epsilon(1e-12));
  CHECK(e(1, 1) == doctest::Approx(0.24).epsilon(1e-12));

  const BilinearSolution sol = solve_bilinear(e, m);
  CHECK(sol.p_hat == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(l1_distance(sol.raw_T, t.matrix()) <= 1e-12);
}

TEST_CASE("bilinear solve on the worked noisy fixture") {
  const TransitionMatrix2 t{0.2, 0.2};
  Eigen::Matrix2d m;
  m << 0.9, 0.1, 0.3, 0.7;
  const Eigen::Matrix2d e = forward_joint(t, 0.4, m);
  CHECK(e(0, 0) == doctest::Approx(0.456).epsilon(1e-12));
  CHECK(e(0, 1) == doctest::Approx(0.104).epsilon(1e-12));
  CHECK(e(1, 0) == doctest::Approx(0.204).epsilon(1e-12));
  CHECK(e(1, 1) == doctest::Approx(0.236).epsilon(1e-12));

  const BilinearSolution sol = solve_bilinear(e, m);
  CHECK(std::abs(sol.p_hat - 0.4) <= 1e-12);
  CHECK(l1_distance(sol.raw_T, t.matrix()) <= 1e-12);
}

TEST_CASE("rank-one conditional is rejected") {
  Eigen::Matrix2d m;
  m << 0.7, 0.3, 0.7, 0.3;  // rho'_- + rho'_+ = 1
  Eigen::Matrix2d e;
  e << 0.4, 0.2, 0.1, 0.3;
  CHECK_THROWS_AS(solve_bilinear(e, m), NonInvertibleConditional);
}

TEST_CASE("degenerate prior is rejected") {
  const TransitionMatrix2 t{0.1, 0.1};
  Eigen::Matrix2d m;
  m << 0.9, 0.1, 0.3, 0.7;
  const Eigen::Matrix2d e = forward_joint(t, 0.001, m);
  CHECK_THROWS_AS(solve_bilinear(e, m), DegeneratePrior);
}

TEST_CASE("oracle round-trip over random instances") {
  Rng rng(20240);
  int done = 0;
  while (done < 1000) {
    const double rm = rng.uniform01() * 0.9;
    const double rp = rng.uniform01() * (0.9 - rm);
    const double p = 0.05 + 0.9 * rng.uniform01();
    const double gap = (rng.bernoulli(0.5) ? 1.0 : -1.0) * (0.1 + 0.9 * rng.uniform01());
    // Build a row-stochastic M with 1 - rho'_- - rho'_+ = gap.
    const double rho_m = rng.uniform01() * std::min(1.0, 1.0 - gap);
    const double rho_p = 1.0 - gap - rho_m;
    if (rho_p < 0.0 || rho_p > 1.0) continue;
    Eigen::Matrix2d m;
    m << 1.0 - rho_m, rho_m, rho_p, 1.0 - rho_p;
    const TransitionMatrix2 t{rm, rp};
    const BilinearSolution sol = solve_bilinear(forward_joint(t, p, m), m);
    CHECK(std::abs(sol.p_hat - p) <= 1e-9);
    CHECK(l1_distance(sol.raw_T, t.matrix()) <= 1e-9);
    ++done;
  }
}

TEST_CASE("generator joints match the analytic factorization at n=1e6") {
  const TransitionMatrix2 t{0.2, 0.3};
  const double p = 0.35;
  Eigen::Matrix2d m;
  m << 0.85, 0.15, 0.25, 0.75;
  Rng rng(555);
  const int n = 1000000;
  LabelMatrix labels(n, 2);
  for (int i = 0; i < n; ++i) {
    const int yj = rng.bernoulli(p) ? 1 : 0;
    const double flip = yj ? t.rho_plus : t.rho_minus;
    const int ybar_j = rng.bernoulli(flip) ? 1 - yj : yj;
    const int ybar_i = rng.bernoulli(m(yj, 1)) ? 1 : 0;
    labels(i, 0) = static_cast<std::uint8_t>(ybar_j);
    labels(i, 1) = static_cast<std::uint8_t>(ybar_i);
  }
  const Table2 e_hat = estimate_joint(labels, 1, 0);
  const Eigen::Matrix2d e = forward_joint(t, p, m);
  CHECK((e_hat.prob - e).cwiseAbs().maxCoeff() <= 0.003);
}

TEST_CASE("screening accepts, clips, swaps, and rejects") {
  SUBCASE("valid candidate passes unchanged") {
    Eigen::Matrix2d raw;
    raw << 0.8, 0.2, 0.1, 0.9;
    const CandidateEstimate c = screen_candidate(0.4, raw);
    CHECK(c.accepted);
    CHECK(!c.clipped);
    CHECK(!c.permuted);
    CHECK(c.t_hat.rho_minus == 0.2);
    CHECK(c.t_hat.rho_plus == 0.1);
  }

  SUBCASE("small overshoot is clipped and renormalized") {
    Eigen::Matrix2d raw;
    raw << 1.02, -0.02, 0.1, 0.9;
    const CandidateEstimate c = screen_candidate(0.4, raw);
    CHECK(c.accepted);
    CHECK(c.clipped);
    CHECK(c.t_hat.rho_minus == 0.0);
    CHECK(c.t_hat.rho_plus == 0.1);
  }

  SUBCASE("large overshoot is rejected") {
    Eigen::Matrix2d raw;
    raw << 1.2, -0.2, 0.1, 0.9;
    const CandidateEstimate c = screen_candidate(0.4, raw);
    CHECK(!c.accepted);
    CHECK(c.reject_reason == "raw entry outside screening window");
  }

  SUBCASE("assumption-1 violation is fixed by the label permutation") {
    Eigen::Matrix2d raw;
    raw << 0.2, 0.8, 0.8, 0.2;
    const CandidateEstimate c = screen_candidate(0.4, raw);
    CHECK(c.accepted);
    CHECK(c.permuted);
    CHECK(c.t_hat.rho_minus == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(c.t_hat.rho_plus == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(c.p_hat == doctest::Approx(0.6).epsilon(1e-12));
  }

  SUBCASE("out-of-range prior is rejected") {
    Eigen::Matrix2d raw;
    raw << 0.9, 0.1, 0.1, 0.9;
    const CandidateEstimate c = screen_candidate(0.001, raw);
    CHECK(!c.accepted);
  }
}

TEST_CASE("permutation consistency of the forward model and screening") {
  const TransitionMatrix2 t{0.15, 0.25};
  const double p = 0.3;
  Eigen::Matrix2d m;
  m << 0.8, 0.2, 0.35, 0.65;
  const Eigen::Matrix2d e = forward_joint(t, p, m);

  // Swapped labeling: rows of T and M swapped, prior 1-p.
  const TransitionMatrix2 t_swap = t.permuted();
  Eigen::Matrix2d m_swap;
  m_swap << m(1, 0), m(1, 1), m(0, 0), m(0, 1);
  const Eigen::Matrix2d e_swap = forward_joint(t_swap, 1.0 - p, m_swap);
  CHECK(l1_distance(e, e_swap) <= 1e-12);

  const CandidateEstimate a = screen_candidate(p, t.matrix());
  const CandidateEstimate b = screen_candidate(1.0 - p, t_swap.matrix());
  REQUIRE(a.accepted);
  REQUIRE(b.accepted);
  CHECK(l1_distance(a.t_hat, b.t_hat) <= 1e-12);
  CHECK(a.p_hat == doctest::Approx(b.p_hat).epsilon(1e-12));
}

TEST_CASE("medoid aggregation") {
  auto cand = [](double rm, double rp) {
    CandidateEstimate c;
    c.accepted = true;
    c.t_hat = {rm, rp};
    return c;
  };

  SUBCASE("identical candidates return that matrix") {
    std::vector<CandidateEstimate> cs = {cand(0.2, 0.1), cand(0.2, 0.1), cand(0.2, 0.1)};
    const TransitionMatrix2 t = aggregate(cs);
    CHECK(t.rho_minus == 0.2);
    CHECK(t.rho_plus == 0.1);
  }

  SUBCASE("worked three-candidate case picks the middle") {
    std::vector<CandidateEstimate> cs = {cand(0.10, 0.3), cand(0.12, 0.3), cand(0.50, 0.3)};
    // Pairwise L1 sums: 2*(0.42), 2*(0.40), 2*(0.78) -> medoid is 0.12.
    const TransitionMatrix2 t = aggregate(cs);
    CHECK(t.rho_minus == 0.12);
  }

  SUBCASE("single candidate is returned as-is") {
    std::vector<CandidateEstimate> cs = {cand(0.07, 0.21)};
    CHECK(aggregate(cs).rho_minus == 0.07);
  }

  SUBCASE("rejected candidates are excluded and emptiness throws") {
    std::vector<CandidateEstimate> cs = {cand(0.1, 0.1)};
    cs[0].accepted = false;
    CHECK_THROWS_AS(aggregate(cs), NoAcceptedCandidate);
  }

  SUBCASE("medoid attains the minimum L1 sum (exhaustive)") {
    Rng rng(88);
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<CandidateEstimate> cs;
      const int k = 2 + static_cast<int>(rng.below(6));
      for (int i = 0; i < k; ++i) {
        cs.push_back(cand(rng.uniform01() * 0.5, rng.uniform01() * 0.4));
      }
      const TransitionMatrix2 best = aggregate(cs);
      double best_sum = 0.0;
      for (const auto& c : cs) best_sum += l1_distance(best, c.t_hat);
      for (const auto& c : cs) {
        double sum = 0.0;
        for (const auto& other : cs) sum += l1_distance(c.t_hat, other.t_hat);
        CHECK(best_sum <= sum + 1e-12);
      }
    }
  }

  SUBCASE("mean aggregate averages entries") {
    std::vector<CandidateEstimate> cs = {cand(0.1, 0.2), cand(0.3, 0.4)};
    const TransitionMatrix2 t = aggregate_mean(cs);
    CHECK(t.rho_minus == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(t.rho_plus == doctest::Approx(0.3).epsilon(1e-12));
  }
}

TEST_CASE("pairing order ranks strong partners first") {
  // Class 1 perfectly tracks class 0; class 2 is independent coin flips.
  Rng rng(91);
  LabelMatrix labels(4000, 3);
  for (int i = 0; i < labels.rows(); ++i) {
    const int a = rng.bernoulli(0.4) ? 1 : 0;
    labels(i, 0) = static_cast<std::uint8_t>(a);
    labels(i, 1) = static_cast<std::uint8_t>(rng.bernoulli(0.1) ? 1 - a : a);
    labels(i, 2) = static_cast<std::uint8_t>(rng.bernoulli(0.5) ? 1 : 0);
  }
  const auto order = pairing_order(labels, 0, PairingStrategy::correlation);
  REQUIRE(order.size() == 2);
  CHECK(order[0] == 1);
  CHECK(order[1] == 2);

  const auto seq = pairing_order(labels, 1, PairingStrategy::sequential);
  CHECK(seq == std::vector<int>{0, 2});
}

TEST_CASE("estimate_all recovers matrices from generated data with gold selection") {
  GeneratorConfig gen;
  gen.n = 20000;
  gen.q = 6;
  gen.d = 12;
  gen.groups = 2;
  gen.seed = 1234;
  const auto clean = generate_clean_dataset(gen);
  const auto t_true = make_noise_matrices({NoiseRegime::ULF, 0.2}, gen.q);
  const auto ds = inject_class_dependent_noise(clean, t_true, 77);

  std::vector<SelectionReport> selections;
  for (int j = 0; j < gen.q; ++j) selections.push_back(gold_select(ds, j));

  EstimationReport report = estimate_all(ds.noisy_labels, selections);
  attach_truth(report, t_true);
  REQUIRE(report.total_error.has_value());
  CHECK(*report.total_error < 1.2);
  CHECK(*report.total_error / gen.q < 0.2);
  for (const auto& ce : report.classes) {
    CHECK(ce.accepted_count() >= 1);
    REQUIRE(ce.aggregated.has_value());
    // The medoid is one of the accepted candidates.
    bool found = false;
    for (const auto& c : ce.candidates) {
      if (c.accepted && l1_distance(c.t_hat, *ce.aggregated) == 0.0) found = true;
    }
    CHECK(found);
  }
}

TEST_CASE("q=2 forces R=1") {
  const auto clean = generate_clean_dataset(4000, 2, 6, 1, 0.3, 4321);
  const auto t_true = make_noise_matrices({NoiseRegime::ULF, 0.1}, 2);
  const auto ds = inject_class_dependent_noise(clean, t_true, 5);
  std::vector<SelectionReport> selections = {gold_select(ds, 0), gold_select(ds, 1)};
  EstimatorOptions opt;
  opt.repetitions = 5;  // more than q-1
  CHECK_THROWS_AS(estimate_all(ds.noisy_labels, selections, opt), ValidationError);
  opt.repetitions = -1;  // defaults to q-1 = 1
  const EstimationReport report = estimate_all(ds.noisy_labels, selections, opt);
  for (const auto& ce : report.classes) {
    CHECK(ce.accepted_count() <= 1);
  }
}

TEST_CASE("per-class failures leave other classes standing") {
  // Class 2 is an independent coin: every partner pairing for it is rejected
  // by the singularity floor, but classes 0 and 1 still estimate.
  Rng rng(6);
  const int n = 20000;
  LabelMatrix labels(n, 3);
  for (int i = 0; i < n; ++i) {
    const int a = rng.bernoulli(0.4) ? 1 : 0;
    labels(i, 0) = static_cast<std::uint8_t>(rng.bernoulli(0.1) ? 1 - a : a);
    labels(i, 1) = static_cast<std::uint8_t>(rng.bernoulli(0.15) ? 1 - a : a);
    labels(i, 2) = static_cast<std::uint8_t>(rng.bernoulli(0.5) ? 1 : 0);
  }
  MultiLabelDataset ds;
  ds.features = Eigen::MatrixXd::Zero(n, 1);
  ds.class_prototypes = Eigen::MatrixXd::Zero(3, 1);
  ds.group_assignment = {0, 0, 0};
  ds.clean_labels = labels;
  ds.noisy_labels = labels;
  std::vector<SelectionReport> selections;
  for (int j = 0; j < 3; ++j) {
    SelectionReport sel;
    sel.class_index = j;
    for (int i = 0; i < n; ++i) sel.selected.push_back(i);
    measure_selection_stats(ds, sel);
    selections.push_back(sel);
  }
  const EstimationReport report = estimate_all(labels, selections);
  CHECK(report.classes[0].aggregated.has_value());
  CHECK(report.classes[1].aggregated.has_value());
  CHECK(!report.classes[2].aggregated.has_value());
  CHECK(report.classes[2].failure == "no accepted candidate");
}
