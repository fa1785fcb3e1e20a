#include "mlnoise/transition.hpp"

#include <algorithm>
#include <limits>

#include "mlnoise/errors.hpp"

namespace mlnoise {

double weight_bound(const std::vector<TransitionMatrix2>& ts) {
  if (ts.empty()) throw ValidationError("weight_bound: empty transition list");
  double worst = 0.0;
  for (const auto& t : ts) {
    if (!t.satisfies_assumption1()) {
      return std::numeric_limits<double>::infinity();
    }
    worst = std::max(worst, std::max(t.rho_minus, t.rho_plus));
  }
  return 1.0 / (1.0 - worst);
}

}  // namespace mlnoise
