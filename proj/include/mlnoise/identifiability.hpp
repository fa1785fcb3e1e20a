#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "mlnoise/estimator.hpp"
#include "mlnoise/transition.hpp"

namespace mlnoise {

// A distinct (T', P', M') triple reproducing the same joint E = T^T P M;
// witnesses that E alone cannot identify T when M is unknown.
struct AlternativeSolution {
  Eigen::Matrix2d t_alt, m_alt;
  Eigen::Matrix2d p_alt;  // diagonal
  double a_minus = 0.0, b_minus = 0.0;
  double a_plus = 0.0, b_plus = 0.0;
  double reconstruction_residual = 0.0;  // ||E - T_alt^T P_alt M_alt||_1
  double gap_from_original = 0.0;        // ||T - T_alt||_1
};

// Constructs the alternative from mixing matrices A, B with rows summing to 1:
//   a_+ = b_-(1-p)/(b_- - p),  b_+ = a_-(1-p)/(a_- - p),
//   T_alt = A T,  M_alt = B M,  P_alt = (A^T)^{-1} P B^{-1}.
// Throws InvalidWitness when the resulting T_alt or M_alt leaves [0,1] or the
// alternative prior leaves (0,1).
AlternativeSolution construct_alternative(const TransitionMatrix2& t, double p,
                                          const Eigen::Matrix2d& m, double a_minus,
                                          double b_minus);

struct UniquenessCertificate {
  bool unique = false;
  double p_hat = 0.0;
  TransitionMatrix2 t_hat;
  int candidates_tested = 0;
  // Counterexample, present when unique == false.
  std::optional<TransitionMatrix2> counterexample_t;
  std::optional<double> counterexample_p;
  double reproduction_tol = 1e-6;
  double distinctness_tol = 1e-3;
};

// Solves E = T^T P M for the given M, then searches random valid (T', p')
// candidates for one that reproduces E within reproduction_tol while
// differing from the solution by at least distinctness_tol after permutation
// canonicalization. No counterexample found => certificate (not a proof).
UniquenessCertificate certify_unique_given_M(const Eigen::Matrix2d& e, const Eigen::Matrix2d& m,
                                             int candidates = 10000, std::uint64_t seed = 0,
                                             const BilinearOptions& opt = {});

// Largest I such that every set of I rows is linearly independent:
// 0 for a zero row, 1 for dependent rows, else 2.
int kruskal_rank_2x2(const Eigen::Matrix2d& m);

}  // namespace mlnoise
