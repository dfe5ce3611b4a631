#include <cmath>
#include <limits>

#include "vlab/error.hpp"
#include "vlab/rng.hpp"
#include "vlab/volterra.hpp"

namespace vlab::reference {

PathEnsemble simulate_direct(const CoefficientSet& coeffs, const ControlPath& ctrl, double x0,
                             const TimeGrid& time, std::size_t n_paths, std::uint64_t seed,
                             const DirectOptions& opts) {
  validate_simulation(coeffs, ctrl, time, n_paths, opts.substeps);
  if (coeffs.depends_on_slice() || ctrl.kind() == ControlPath::Kind::lifted_feedback) {
    throw DomainError("simulate_direct: needs slice-free coefficients and diagonal controls");
  }
  if (!std::isfinite(x0)) throw DomainError("simulate_direct: x0 must be finite");
  const int nt = time.intervals();
  const double h = time.step();
  std::vector<double> out;
  out.reserve(n_paths * static_cast<std::size_t>(nt + 1));
  for (std::size_t p = 0; p < n_paths; ++p) {
    std::vector<double> dw(static_cast<std::size_t>(nt));
    brownian_increments(seed, p, h, opts.substeps, dw);
    std::vector<double> x, a;
    for (int i = 0; i <= nt; ++i) {
      double acc = x0;
      for (int j = 0; j < i; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        acc = acc + coeffs.b1(time.point(j), time.point(i), x[uj], a[uj]) * h;
        acc = acc + coeffs.s1(time.point(j), time.point(i), x[uj], a[uj]) * dw[uj];
      }
      if (!std::isfinite(acc)) throw NumericalError(p, i, "direct state became non-finite");
      x.push_back(acc);
      const StepContext ctx{p, i, time.point(i), acc, {}};
      if (i == nt) {
        if (opts.observer) opts.observer(ctx, std::numeric_limits<double>::quiet_NaN());
        break;
      }
      a.push_back(ctrl.at(ctx));
      if (opts.observer) opts.observer(ctx, a.back());
    }
    out.insert(out.end(), x.begin(), x.end());
  }
  return PathEnsemble::make_diagonal(time, n_paths, seed, std::move(out));
}

}  // namespace vlab::reference
