#include <cmath>

#include "vlab/contract.hpp"
#include "vlab/error.hpp"
#include "vlab/rng.hpp"

namespace vlab {
void check_reduced(const DiscountSpec& spec, const ZRule& z_rule, const CostRule& cost,
                   std::span<const double> y0, std::size_t n_paths);
}

namespace vlab::reference {

ReducedEnsemble simulate_reduced(const DiscountSpec& spec, const ZRule& z_rule, const CostRule& cost,
                                 std::span<const double> y0, const TimeGrid& time,
                                 std::size_t n_paths, std::uint64_t seed) {
  check_reduced(spec, z_rule, cost, y0, n_paths);
  const std::size_t dim = spec.size();
  const int nt = time.intervals();
  const double h = time.step();
  ReducedEnsemble ens{time, n_paths, dim, {}};
  for (std::size_t p = 0; p < n_paths; ++p) {
    std::vector<double> dw(static_cast<std::size_t>(nt));
    brownian_increments(seed, p, h, 1, dw);
    std::vector<double> y(y0.begin(), y0.end()), z(dim);
    ens.y.insert(ens.y.end(), y.begin(), y.end());
    for (int i = 0; i < nt; ++i) {
      const double t = time.point(i);
      z_rule(t, y, z);
      double agg = 0.0;
      for (std::size_t k = 0; k < dim; ++k) agg += spec.phi(k, t) * z[k];
      const double c = cost(t, agg);
      for (std::size_t k = 0; k < dim; ++k) {
        y[k] = y[k] + std::exp(-spec.rhos[k] * t) * c * h + z[k] * dw[static_cast<std::size_t>(i)];
        if (!std::isfinite(y[k])) throw NumericalError(p, i + 1, "reduced state became non-finite");
      }
      ens.y.insert(ens.y.end(), y.begin(), y.end());
    }
  }
  return ens;
}

}  // namespace vlab::reference
