#include <cmath>
#include <limits>

#include "vlab/error.hpp"
#include "vlab/parallel.hpp"
#include "vlab/rng.hpp"
#include "vlab/volterra.hpp"

namespace vlab {

PathEnsemble simulate_lifted(const CoefficientSet& coeffs, const ControlPath& ctrl,
                             const SobolevPath& x0_path, const TimeGrid& time,
                             std::size_t n_paths, std::uint64_t seed, const LiftedOptions& opts) {
  validate_simulation(coeffs, ctrl, time, n_paths, opts.substeps);
  const TimeGrid& space = x0_path.grid();
  if (space.horizon() != time.horizon()) {
    throw DimensionError("simulate_lifted: s-grid and t-grid horizons differ");
  }
  const int nt = time.intervals();
  const auto ns = static_cast<std::size_t>(space.size());
  const auto rows = static_cast<std::size_t>(time.size());
  const double h = time.step();

  std::vector<double> s_pts(ns);
  for (std::size_t j = 0; j < ns; ++j) s_pts[j] = space.point(static_cast<int>(j));
  std::vector<double> t_pts(rows);
  for (std::size_t i = 0; i < rows; ++i) t_pts[i] = time.point(static_cast<int>(i));

  std::vector<double> out(opts.store_sheets ? n_paths * rows * ns : n_paths * rows);
  const auto x0 = x0_path.values();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  parallel_paths(n_paths, [&](std::size_t p) {
    std::vector<double> row(x0.begin(), x0.end());
    std::vector<double> dw(static_cast<std::size_t>(nt));
    brownian_increments(seed, p, h, opts.substeps, dw);
    for (int i = 0; i <= nt; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const double t = t_pts[ui];
      const double xd = interpolate(space, row, t);
      if (opts.store_sheets) {
        std::copy(row.begin(), row.end(), out.begin() + static_cast<std::ptrdiff_t>((p * rows + ui) * ns));
      } else {
        out[p * rows + ui] = xd;
      }
      const StepContext ctx{p, i, t, xd, row};
      if (i == nt) {
        if (opts.observer) opts.observer(ctx, nan);
        break;
      }
      const double a = ctrl.at(ctx);
      if (opts.observer) opts.observer(ctx, a);
      const double w = dw[ui];
      bool finite = true;
      for (std::size_t j = 0; j < ns; ++j) {
        const double y = row[j];
        const double next = y + coeffs.drift(t, s_pts[j], xd, y, a) * h + coeffs.vol(t, s_pts[j], xd, y, a) * w;
        finite = finite && std::isfinite(next);
        row[j] = next;
      }
      if (!finite) throw NumericalError(p, i + 1, "lifted state became non-finite");
    }
  });

  if (opts.store_sheets) return PathEnsemble::make_lifted(time, space, n_paths, seed, std::move(out));
  return PathEnsemble::make_diagonal(time, n_paths, seed, std::move(out));
}

}  // namespace vlab
