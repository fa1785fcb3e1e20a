#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mlnoise/datagen.hpp"
#include "mlnoise/selection.hpp"
#include "mlnoise/transition.hpp"

namespace mlnoise {

// A 2x2 frequency table together with its raw tallies, so probabilities are
// reproducible as exact count ratios.
struct Table2 {
  Eigen::Matrix2d prob = Eigen::Matrix2d::Zero();
  std::array<std::array<long long, 2>, 2> counts = {{{0, 0}, {0, 0}}};
  bool low_support = false;
  long long min_stratum = 0;
};

// Joint and conditional tables for one (j, i) pair.
struct CooccurrenceTables {
  Table2 joint;        // E: rows indexed by ybar^j, cols by ybar^i
  Table2 conditional;  // M: rows indexed by the treated-as-clean y^j
  int j = -1, i = -1;
};

// E_hat(k, v) = #{ybar^j = k and ybar^i = v} / n over the full noisy set.
Table2 estimate_joint(const LabelMatrix& noisy, int i, int j);

// M_hat row k = empirical distribution of ybar^i among selected examples
// whose treated-as-clean label for class j equals k. Throws EmptyStratum.
Table2 estimate_conditional(const LabelMatrix& noisy, const SelectionReport& selected, int i,
                            int j);

struct BilinearOptions {
  double singularity_floor = 0.05;  // on |1 - rho'_- - rho'_+| = det M
  double p_floor = 0.01;            // recovered prior must lie in [p_floor, 1-p_floor]
};

struct BilinearSolution {
  double p_hat = 0.0;
  Eigen::Matrix2d raw_T = Eigen::Matrix2d::Zero();
};

// Solves E = T^T P M for (p, T) given E and M:
//   p = ((1 - rho'_-) - (e00 + e10)) / (1 - rho'_- - rho'_+),
//   T = [E M^{-1} P^{-1}]^T.
// Throws NonInvertibleConditional / DegeneratePrior.
BilinearSolution solve_bilinear(const Eigen::Matrix2d& e, const Eigen::Matrix2d& m,
                                const BilinearOptions& opt = {});

struct ScreenOptions {
  double window_low = -0.05;
  double window_high = 1.05;
  double p_floor = 0.01;
};

struct CandidateEstimate {
  TransitionMatrix2 t_hat;
  double p_hat = 0.5;
  std::pair<int, int> pair = {-1, -1};  // (j, i)
  bool accepted = false;
  std::string reject_reason;
  Eigen::Matrix2d raw_t = Eigen::Matrix2d::Zero();
  bool clipped = false;
  bool permuted = false;
  bool assumption1_ok = true;
};

// Rejects raw solutions outside the screening window, clips survivors into
// the simplex, and swaps rows (permutation ambiguity) when that restores
// rho_- + rho_+ < 1.
CandidateEstimate screen_candidate(double p_hat, const Eigen::Matrix2d& raw_t,
                                   const ScreenOptions& opt = {});
// Variant without a prior check (anchor baselines have no recovered prior).
CandidateEstimate screen_candidate(const Eigen::Matrix2d& raw_t, const ScreenOptions& opt = {});

// Accepted candidate minimizing the sum of entrywise L1 distances to the
// other accepted candidates; ties broken by lowest index.
TransitionMatrix2 aggregate(const std::vector<CandidateEstimate>& candidates);
// Entrywise mean of the accepted candidates (the "Avg." ablation).
TransitionMatrix2 aggregate_mean(const std::vector<CandidateEstimate>& candidates);

enum class PairingStrategy { correlation, sequential };

PairingStrategy pairing_from_string(const std::string& s);
std::string to_string(PairingStrategy p);

struct EstimatorOptions {
  int repetitions = -1;  // R; -1 means q - 1
  PairingStrategy pairing = PairingStrategy::correlation;
  BilinearOptions bilinear;
  ScreenOptions screen;
};

struct ClassEstimate {
  int class_index = -1;
  std::vector<int> pairing_order;
  std::vector<CandidateEstimate> candidates;  // accepted and rejected, in visit order
  std::optional<TransitionMatrix2> aggregated;       // medoid
  std::optional<TransitionMatrix2> mean_aggregated;  // "Avg."
  double p_hat = 0.0;  // prior of the medoid candidate
  std::string failure;  // set when no candidate was accepted

  int accepted_count() const;
};

struct EstimationReport {
  std::string method = "ours";
  std::vector<ClassEstimate> classes;
  std::vector<double> per_class_error;  // vs. truth; filled by attach_truth
  std::optional<double> total_error;
  std::optional<double> total_error_mean_aggregate;

  std::vector<TransitionMatrix2> aggregated() const;  // throws on failed classes
};

// Partner order for class j: descending |P(ybar^i=0 | ybar^j=0) -
// P(ybar^i=0 | ybar^j=1)| measured on the noisy labels.
std::vector<int> pairing_order(const LabelMatrix& noisy, int j, PairingStrategy strategy);

// Algorithm: for each class, walk partners in pairing order, keep up to R
// accepted candidates, aggregate by medoid. Per-class failures are recorded
// and other classes proceed.
EstimationReport estimate_all(const LabelMatrix& noisy,
                              const std::vector<SelectionReport>& selections,
                              const EstimatorOptions& opt = {});

// Fills per-class and total L1 errors against the true matrices.
void attach_truth(EstimationReport& report, const std::vector<TransitionMatrix2>& t_true);

}  // namespace mlnoise
