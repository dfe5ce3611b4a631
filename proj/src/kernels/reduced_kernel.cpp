#include <cmath>

#include "vlab/contract.hpp"
#include "vlab/error.hpp"
#include "vlab/parallel.hpp"
#include "vlab/rng.hpp"

namespace vlab {

void check_reduced(const DiscountSpec& spec, const ZRule& z_rule, const CostRule& cost,
                   std::span<const double> y0, std::size_t n_paths);

ReducedEnsemble simulate_reduced(const DiscountSpec& spec, const ZRule& z_rule, const CostRule& cost,
                                 std::span<const double> y0, const TimeGrid& time,
                                 std::size_t n_paths, std::uint64_t seed) {
  check_reduced(spec, z_rule, cost, y0, n_paths);
  const std::size_t dim = spec.size();
  const int nt = time.intervals();
  const auto rows = static_cast<std::size_t>(time.size());
  const double h = time.step();
  // Per-step factors shared by all paths.
  std::vector<double> disc(rows * dim), phis(rows * dim);
  for (std::size_t i = 0; i < rows; ++i) {
    const double t = time.point(static_cast<int>(i));
    for (std::size_t k = 0; k < dim; ++k) {
      disc[i * dim + k] = std::exp(-spec.rhos[k] * t);
      phis[i * dim + k] = spec.phi(k, t);
    }
  }
  ReducedEnsemble ens{time, n_paths, dim, std::vector<double>(n_paths * rows * dim)};

  parallel_paths(n_paths, [&](std::size_t p) {
    std::vector<double> dw(static_cast<std::size_t>(nt)), z(dim);
    brownian_increments(seed, p, h, 1, dw);
    double* y = ens.y.data() + p * rows * dim;
    std::copy(y0.begin(), y0.end(), y);
    for (int i = 0; i < nt; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const double t = time.point(i);
      const double* cur = y + ui * dim;
      double* nxt = y + (ui + 1) * dim;
      z_rule(t, std::span<const double>(cur, dim), z);
      double agg = 0.0;
      for (std::size_t k = 0; k < dim; ++k) agg += phis[ui * dim + k] * z[k];
      const double c = cost(t, agg);
      for (std::size_t k = 0; k < dim; ++k) {
        nxt[k] = cur[k] + disc[ui * dim + k] * c * h + z[k] * dw[ui];
        if (!std::isfinite(nxt[k])) throw NumericalError(p, i + 1, "reduced state became non-finite");
      }
    }
  });
  return ens;
}

}  // namespace vlab
