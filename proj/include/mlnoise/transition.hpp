#pragma once

#include <Eigen/Dense>
#include <vector>

namespace mlnoise {

// Row-stochastic 2x2 flip-probability matrix for one class:
//   [[1 - rho_minus, rho_minus],
//    [rho_plus,      1 - rho_plus]]
// rho_minus = P(noisy=1 | clean=0), rho_plus = P(noisy=0 | clean=1).
// Rows are materialized as (1-x, x) so each row sums to 1 exactly.
struct TransitionMatrix2 {
  double rho_minus = 0.0;
  double rho_plus = 0.0;

  Eigen::Matrix2d matrix() const {
    Eigen::Matrix2d t;
    t << 1.0 - rho_minus, rho_minus, rho_plus, 1.0 - rho_plus;
    return t;
  }

  bool valid_probabilities() const {
    return rho_minus >= 0.0 && rho_minus <= 1.0 && rho_plus >= 0.0 && rho_plus <= 1.0;
  }

  // Noisy label agrees with the clean one on average.
  bool satisfies_assumption1() const { return rho_minus + rho_plus < 1.0; }

  // Swapping the 0/1 class values swaps the rows; in (rho_minus, rho_plus)
  // parameters that is (1 - rho_plus, 1 - rho_minus).
  TransitionMatrix2 permuted() const { return {1.0 - rho_plus, 1.0 - rho_minus}; }

  // Representative with rho_minus + rho_plus <= 1 of the permutation
  // equivalence class.
  TransitionMatrix2 canonical() const {
    return satisfies_assumption1() || rho_minus + rho_plus == 1.0 ? *this : permuted();
  }

  bool is_identity() const { return rho_minus == 0.0 && rho_plus == 0.0; }
};

inline double l1_distance(const Eigen::Matrix2d& a, const Eigen::Matrix2d& b) {
  return (a - b).cwiseAbs().sum();
}

inline double l1_distance(const TransitionMatrix2& a, const TransitionMatrix2& b) {
  return 2.0 * std::abs(a.rho_minus - b.rho_minus) + 2.0 * std::abs(a.rho_plus - b.rho_plus);
}

// Reads (rho_minus, rho_plus) off a row-stochastic matrix.
inline TransitionMatrix2 transition_from_matrix(const Eigen::Matrix2d& t) {
  return {t(0, 1), t(1, 0)};
}

// Importance-weight bound U = 1 / min_j (1 - max(rho_minus^j, rho_plus^j)).
double weight_bound(const std::vector<TransitionMatrix2>& ts);

}  // namespace mlnoise
