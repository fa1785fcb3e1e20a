#pragma once

#include <stdexcept>
#include <string>

namespace mlnoise {

// Thrown when a 1-d mixture fit cannot distinguish two components
// (all-equal input, collapsed variance, or means closer than the tie floor).
struct DegenerateMixture : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A conditional-table stratum has no support.
struct EmptyStratum : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// |1 - rho'_- - rho'_+| fell below the singularity floor; M cannot be inverted.
struct NonInvertibleConditional : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Recovered class prior left [p_floor, 1 - p_floor].
struct DegeneratePrior : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All candidate estimates for a class were rejected.
struct NoAcceptedCandidate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dual-T intermediate labels have an unsupported stratum.
struct DegenerateIntermediate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Backward correction asked to invert a near-singular transition matrix.
struct ConditioningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Training loss became non-finite.
struct TrainingDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Appendix-style alternative-solution parameters left the probability simplex.
struct InvalidWitness : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Configuration / precondition violations surfaced to the CLI with exit code 2.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem problems surfaced to the CLI with exit code 4.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mlnoise
