#include <sstream>

#include "vlab/error.hpp"
#include "vlab/volterra.hpp"

namespace vlab {

void validate_simulation(const CoefficientSet& coeffs, const ControlPath& ctrl,
                         const TimeGrid& time, std::size_t n_paths, int substeps) {
  if (n_paths == 0) throw DomainError("simulation: n_paths must be positive");
  if (substeps < 1) throw DomainError("simulation: substeps must be >= 1");
  ctrl.validate(time.intervals());
  const auto check = check_coefficients(coeffs, time.horizon(), ctrl.box());
  if (!check.ok()) {
    std::ostringstream msg;
    msg << "simulation: coefficients violate the declared structure (";
    if (!check.bounded_ok) msg << "bound M=" << coeffs.bound << " exceeded: " << check.max_bound_seen;
    if (!check.bounded_ok && !check.lipschitz_ok) msg << "; ";
    if (!check.lipschitz_ok) {
      msg << "Lipschitz L=" << coeffs.lipschitz << " exceeded: " << check.max_lipschitz_seen;
    }
    msg << ")";
    throw DomainError(msg.str());
  }
}

double tail_trace(const CoefficientSet& coeffs, const BasisSet& basis, int retained, double t,
                  const SobolevPath& x, double a) {
  if (retained < 0 || static_cast<std::size_t>(retained) >= basis.size()) {
    throw DomainError("tail_trace: retained count must be below the basis size");
  }
  const SobolevPath sigma = coeffs.vol_profile(t, x, a);
  double tail = 0.0;
  for (std::size_t k = static_cast<std::size_t>(retained); k < basis.size(); ++k) {
    const double c = inner_product(sigma, basis.members[k]);
    tail += c * c;
  }
  return tail;
}

}  // namespace vlab
