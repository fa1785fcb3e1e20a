#include "mlnoise/identifiability.hpp"

#include <cmath>

#include "mlnoise/errors.hpp"
#include "mlnoise/rng.hpp"

namespace mlnoise {

namespace {

bool in_simplex(const Eigen::Matrix2d& m) {
  return m.minCoeff() >= 0.0 && m.maxCoeff() <= 1.0;
}

Eigen::Matrix2d mixing_matrix(double minus, double plus) {
  Eigen::Matrix2d a;
  a << 1.0 - minus, minus, plus, 1.0 - plus;
  return a;
}

}  // namespace

AlternativeSolution construct_alternative(const TransitionMatrix2& t, double p,
                                          const Eigen::Matrix2d& m, double a_minus,
                                          double b_minus) {
  if (p <= 0.0 || p >= 1.0) throw ValidationError("construct_alternative: p must lie in (0,1)");
  if (std::abs(b_minus - p) < 1e-12 || std::abs(a_minus - p) < 1e-12) {
    throw ValidationError("construct_alternative: a_-, b_- must differ from p");
  }

  AlternativeSolution sol;
  sol.a_minus = a_minus;
  sol.b_minus = b_minus;
  sol.a_plus = b_minus * (1.0 - p) / (b_minus - p);
  sol.b_plus = a_minus * (1.0 - p) / (a_minus - p);

  const Eigen::Matrix2d a = mixing_matrix(a_minus, sol.a_plus);
  const Eigen::Matrix2d b = mixing_matrix(b_minus, sol.b_plus);
  if (std::abs(a.determinant()) < 1e-12 || std::abs(b.determinant()) < 1e-12) {
    throw InvalidWitness("construct_alternative: mixing matrix singular");
  }

  const Eigen::Matrix2d t0 = t.matrix();
  Eigen::Matrix2d p0 = Eigen::Matrix2d::Zero();
  p0(0, 0) = 1.0 - p;
  p0(1, 1) = p;

  sol.t_alt = a * t0;
  sol.m_alt = b * m;
  sol.p_alt = a.transpose().inverse() * p0 * b.inverse();

  if (!in_simplex(sol.t_alt) || !in_simplex(sol.m_alt)) {
    throw InvalidWitness("construct_alternative: T_alt or M_alt leaves [0,1]");
  }
  const double p_alt = sol.p_alt(1, 1);
  if (p_alt < 0.0 || p_alt > 1.0) {
    throw InvalidWitness("construct_alternative: alternative prior leaves [0,1]");
  }

  const Eigen::Matrix2d e = t0.transpose() * p0 * m;
  sol.reconstruction_residual =
      l1_distance(e, sol.t_alt.transpose() * sol.p_alt * sol.m_alt);
  sol.gap_from_original = l1_distance(t0, sol.t_alt);
  return sol;
}

UniquenessCertificate certify_unique_given_M(const Eigen::Matrix2d& e, const Eigen::Matrix2d& m,
                                             int candidates, std::uint64_t seed,
                                             const BilinearOptions& opt) {
  UniquenessCertificate cert;
  const BilinearSolution sol = solve_bilinear(e, m, opt);
  cert.t_hat = transition_from_matrix(sol.raw_T).canonical();
  cert.p_hat = sol.p_hat;
  cert.unique = true;

  Rng rng = Rng::substream(seed, "uniqueness-search");
  for (int k = 0; k < candidates; ++k) {
    // Random valid candidate under the agreement assumption, canonical form.
    double rm = rng.uniform01();
    double rp = rng.uniform01() * (1.0 - rm);
    const double p = 0.01 + 0.98 * rng.uniform01();
    TransitionMatrix2 cand{rm, rp};
    Eigen::Matrix2d pc = Eigen::Matrix2d::Zero();
    pc(0, 0) = 1.0 - p;
    pc(1, 1) = p;
    const Eigen::Matrix2d e_cand = cand.matrix().transpose() * pc * m;
    ++cert.candidates_tested;
    if (l1_distance(e_cand, e) <= cert.reproduction_tol &&
        l1_distance(cand.canonical(), cert.t_hat) >= cert.distinctness_tol) {
      cert.unique = false;
      cert.counterexample_t = cand;
      cert.counterexample_p = p;
      break;
    }
  }
  return cert;
}

int kruskal_rank_2x2(const Eigen::Matrix2d& m) {
  const bool row0_zero = m.row(0).cwiseAbs().sum() == 0.0;
  const bool row1_zero = m.row(1).cwiseAbs().sum() == 0.0;
  if (row0_zero || row1_zero) return 0;
  return std::abs(m.determinant()) > 1e-12 ? 2 : 1;
}

}  // namespace mlnoise
