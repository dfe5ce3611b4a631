#include <cmath>
#include <limits>

#include "vlab/error.hpp"
#include "vlab/parallel.hpp"
#include "vlab/rng.hpp"
#include "vlab/volterra.hpp"

namespace vlab {

namespace {

void check_direct(const CoefficientSet& coeffs, const ControlPath& ctrl) {
  if (coeffs.depends_on_slice()) {
    throw DomainError("simulate_direct: slice-dependent coefficients need the lifted simulator");
  }
  if (ctrl.kind() == ControlPath::Kind::lifted_feedback) {
    throw DomainError("simulate_direct: lifted feedback needs the lifted simulator");
  }
}

}  // namespace

PathEnsemble simulate_direct(const CoefficientSet& coeffs, const ControlPath& ctrl, double x0,
                             const TimeGrid& time, std::size_t n_paths, std::uint64_t seed,
                             const DirectOptions& opts) {
  validate_simulation(coeffs, ctrl, time, n_paths, opts.substeps);
  check_direct(coeffs, ctrl);
  if (!std::isfinite(x0)) throw DomainError("simulate_direct: x0 must be finite");
  const int nt = time.intervals();
  const auto rows = static_cast<std::size_t>(time.size());
  const double h = time.step();
  std::vector<double> t_pts(rows);
  for (std::size_t i = 0; i < rows; ++i) t_pts[i] = time.point(static_cast<int>(i));
  std::vector<double> out(n_paths * rows);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  parallel_paths(n_paths, [&](std::size_t p) {
    std::vector<double> dw(static_cast<std::size_t>(nt));
    std::vector<double> ctl(static_cast<std::size_t>(nt));
    brownian_increments(seed, p, h, opts.substeps, dw);
    double* x = out.data() + p * rows;
    for (int i = 0; i <= nt; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const double ti = t_pts[ui];
      double acc = x0;
      for (std::size_t j = 0; j < ui; ++j) {
        acc = acc + coeffs.b1(t_pts[j], ti, x[j], ctl[j]) * h;
        acc = acc + coeffs.s1(t_pts[j], ti, x[j], ctl[j]) * dw[j];
      }
      if (!std::isfinite(acc)) throw NumericalError(p, i, "direct state became non-finite");
      x[ui] = acc;
      const StepContext ctx{p, i, ti, acc, {}};
      if (i == nt) {
        if (opts.observer) opts.observer(ctx, nan);
        break;
      }
      ctl[ui] = ctrl.at(ctx);
      if (opts.observer) opts.observer(ctx, ctl[ui]);
    }
  });
  return PathEnsemble::make_diagonal(time, n_paths, seed, std::move(out));
}

}  // namespace vlab
