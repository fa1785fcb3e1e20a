#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mlnoise/datagen.hpp"
#include "mlnoise/errors.hpp"
#include "mlnoise/rng.hpp"
#include "mlnoise/selection.hpp"

using namespace mlnoise;

namespace {

std::vector<double> two_cluster_sample(double m0, double m1, double sd, int n,
                                       std::vector<int>* truth = nullptr) {
  Rng rng(4242);
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    const bool low = rng.bernoulli(0.5);
    out.push_back(rng.normal(low ? m0 : m1, sd));
    if (truth) truth->push_back(low ? 0 : 1);
  }
  return out;
}

MultiLabelDataset ulf_fixture(int n, std::uint64_t seed, double rho = 0.2) {
  const auto clean = generate_clean_dataset(n, 4, 8, 2, 0.3, seed);
  return inject_class_dependent_noise(clean, make_noise_matrices({NoiseRegime::ULF, rho}, 4),
                                      seed + 1);
}

}  // namespace

TEST_CASE("EM recovers a well-separated mixture") {
  const auto xs = two_cluster_sample(0.1, 2.0, 0.01, 10000);
  const Gmm2 gmm = fit_gmm_1d(xs);
  const double lo = std::min(gmm.mean[0], gmm.mean[1]);
  const double hi = std::max(gmm.mean[0], gmm.mean[1]);
  CHECK(std::abs(lo - 0.1) < 0.05);
  CHECK(std::abs(hi - 2.0) < 0.05);
  CHECK(gmm.converged);
}

TEST_CASE("log-likelihood trace is monotone non-decreasing") {
  const auto xs = two_cluster_sample(0.3, 1.2, 0.2, 3000);
  const Gmm2 gmm = fit_gmm_1d(xs);
  for (std::size_t i = 1; i < gmm.log_likelihood_trace.size(); ++i) {
    CHECK(gmm.log_likelihood_trace[i] >= gmm.log_likelihood_trace[i - 1] - 1e-9);
  }
}

TEST_CASE("degenerate inputs are rejected") {
  CHECK_THROWS_AS(fit_gmm_1d(std::vector<double>(100, 0.25)), DegenerateMixture);
  CHECK_THROWS_AS(fit_gmm_1d({1.0, 2.0}), ValidationError);
  // A single tight cluster collapses onto itself.
  Rng rng(5);
  std::vector<double> tight;
  for (int i = 0; i < 500; ++i) tight.push_back(rng.normal(1.0, 1e-5));
  CHECK_THROWS_AS(fit_gmm_1d(tight), DegenerateMixture);
}

TEST_CASE("tau controls selection monotonically") {
  std::vector<int> truth;
  const auto xs = two_cluster_sample(0.1, 2.0, 0.01, 10000, &truth);
  const Gmm2 gmm = fit_gmm_1d(xs);

  const auto all = select_clean(xs, gmm, 0.0);
  CHECK(all.size() == xs.size());

  const auto half = select_clean(xs, gmm, 0.5);
  const auto strict = select_clean(xs, gmm, 1.0);
  CHECK(std::includes(half.begin(), half.end(), strict.begin(), strict.end()));

  // Precision and recall of the low-loss cluster at tau = 0.5.
  long long tp = 0, fp = 0, pos = 0;
  for (int idx : half) (truth[idx] == 0 ? tp : fp)++;
  for (int v : truth) pos += v == 0 ? 1 : 0;
  CHECK(static_cast<double>(tp) / (tp + fp) >= 0.99);
  CHECK(static_cast<double>(tp) / pos >= 0.99);
}

TEST_CASE("gold selection with no noise keeps everything with zero bias") {
  const auto clean = generate_clean_dataset(2000, 4, 8, 2, 0.3, 7);
  const auto report = gold_select(clean, 1);
  CHECK(report.selected.size() == static_cast<std::size_t>(clean.n()));
  CHECK(report.realized_delta0 == 0.0);
  CHECK(report.realized_delta1 == 0.0);
}

TEST_CASE("gold subsample halves the lambdas") {
  const auto ds = ulf_fixture(40000, 11);
  const auto full = gold_select(ds, 0);
  const auto half = gold_select(ds, 0, 0.5, 3);
  CHECK(half.lambda0 == doctest::Approx(full.lambda0 / 2).epsilon(0.05));
  CHECK(half.lambda1 == doctest::Approx(full.lambda1 / 2).epsilon(0.05));
}

TEST_CASE("gold selection bias stays small at n=1e5") {
  const auto big = ulf_fixture(100000, 13);
  for (int j = 0; j < big.q(); ++j) {
    const auto report = gold_select(big, j);
    CHECK(report.realized_delta0 <= 0.01);
    CHECK(report.realized_delta1 <= 0.01);
  }
}

TEST_CASE("gold selection bias shrinks with n") {
  double prev = 1.0;
  for (int n : {1000, 10000, 100000}) {
    const auto ds = ulf_fixture(n, 17);
    const auto report = gold_select(ds, 0);
    const double delta = std::max(report.realized_delta0, report.realized_delta1);
    CHECK(delta <= prev + 0.02);
    prev = delta;
  }
  CHECK(prev <= 0.01);
}

TEST_CASE("report lambdas are recomputable from the selected set") {
  const auto ds = ulf_fixture(5000, 19);
  const auto report = gold_select(ds, 2);
  long long c0 = 0, c1 = 0;
  for (int idx : report.selected) (ds.noisy_labels(idx, 2) ? c1 : c0)++;
  CHECK(report.lambda0 == static_cast<double>(c0) / ds.n());
  CHECK(report.lambda1 == static_cast<double>(c1) / ds.n());
  CHECK(report.stratum_count[0] == c0);
  CHECK(report.stratum_count[1] == c1);
}

TEST_CASE("gmm_select on a noisy fixture keeps mostly clean labels") {
  // Loss vector built directly from the labels: clean-consistent examples get
  // small losses, flipped ones large, with slight overlap.
  const auto ds = ulf_fixture(5000, 23);
  Rng rng(29);
  std::vector<double> losses(ds.n());
  for (int i = 0; i < ds.n(); ++i) {
    const bool flipped = ds.noisy_labels(i, 0) != ds.clean_labels(i, 0);
    losses[i] = std::abs(rng.normal(flipped ? 2.0 : 0.3, 0.25));
  }
  const auto report = gmm_select(ds, 0, losses, 0.5);
  long long agree = 0;
  for (int idx : report.selected) {
    agree += ds.noisy_labels(idx, 0) == ds.clean_labels(idx, 0) ? 1 : 0;
  }
  CHECK(static_cast<double>(agree) / report.selected.size() > 0.97);
}

TEST_CASE("biased selection bias grows with strength on overlapping prototypes") {
  GeneratorConfig gen;
  gen.n = 30000;
  gen.q = 4;
  gen.d = 8;
  gen.groups = 1;
  gen.sigma = 0.3;
  gen.seed = 31;
  gen.prototype_overlap = 0.6;
  const auto clean = generate_clean_dataset(gen);
  const auto ds = inject_class_dependent_noise(
      clean, make_noise_matrices({NoiseRegime::ULF, 0.2}, 4), 32);

  double prev = -1.0;
  for (double strength : {0.0, 3.0, 8.0}) {
    const auto report = biased_select(ds, 0, strength, 33);
    const double delta = std::max(report.realized_delta0, report.realized_delta1);
    CHECK(delta > prev);
    prev = delta;
  }
}

TEST_CASE("disjoint-group partners stay nearly unbiased under strong bias") {
  GeneratorConfig gen;
  gen.n = 50000;
  gen.q = 4;
  gen.d = 16;
  gen.groups = 2;  // classes {0,2} vs {1,3}
  gen.sigma = 0.2;
  gen.seed = 37;
  gen.prototype_overlap = 0.6;
  const auto clean = generate_clean_dataset(gen);
  const auto ds = inject_class_dependent_noise(
      clean, make_noise_matrices({NoiseRegime::ULF, 0.2}, 4), 38);
  const auto report = biased_select(ds, 0, 8.0, 39);
  // Partner 1 and 3 live in the other group: their conditional tables stay
  // within counting noise of the population.
  CHECK(std::abs(report.delta0_by_partner[1]) <= 0.02);
  CHECK(std::abs(report.delta1_by_partner[1]) <= 0.02);
  CHECK(std::abs(report.delta0_by_partner[3]) <= 0.02);
  CHECK(std::abs(report.delta1_by_partner[3]) <= 0.02);
}

TEST_CASE("biased selection with zero strength matches a uniform subsample") {
  const auto ds = ulf_fixture(20000, 41);
  const auto biased = biased_select(ds, 1, 0.0, 43, 0.5);
  const auto gold = gold_select(ds, 1, 0.5, 43);
  CHECK(biased.lambda0 == doctest::Approx(gold.lambda0).epsilon(0.08));
  CHECK(biased.lambda1 == doctest::Approx(gold.lambda1).epsilon(0.08));
  CHECK(std::max(biased.realized_delta0, biased.realized_delta1) < 0.03);
}
