#include <cmath>
#include <limits>

#include "vlab/error.hpp"
#include "vlab/rng.hpp"
#include "vlab/volterra.hpp"

// Straight serial loops, full history kept per path. Slow but obvious.

namespace vlab::reference {

PathEnsemble simulate_lifted(const CoefficientSet& coeffs, const ControlPath& ctrl,
                             const SobolevPath& x0_path, const TimeGrid& time,
                             std::size_t n_paths, std::uint64_t seed, const LiftedOptions& opts) {
  validate_simulation(coeffs, ctrl, time, n_paths, opts.substeps);
  const TimeGrid& space = x0_path.grid();
  if (space.horizon() != time.horizon()) {
    throw DimensionError("simulate_lifted: s-grid and t-grid horizons differ");
  }
  const int nt = time.intervals();
  const int ns = space.size();
  const double h = time.step();
  std::vector<double> out;

  for (std::size_t p = 0; p < n_paths; ++p) {
    std::vector<double> dw(static_cast<std::size_t>(nt));
    brownian_increments(seed, p, h, opts.substeps, dw);
    std::vector<std::vector<double>> sheet(static_cast<std::size_t>(nt + 1));
    sheet[0].assign(x0_path.values().begin(), x0_path.values().end());
    for (int i = 0; i <= nt; ++i) {
      const auto& cur = sheet[static_cast<std::size_t>(i)];
      const double t = time.point(i);
      const double xd = interpolate(space, cur, t);
      const StepContext ctx{p, i, t, xd, cur};
      if (i == nt) {
        if (opts.observer) opts.observer(ctx, std::numeric_limits<double>::quiet_NaN());
        break;
      }
      const double a = ctrl.at(ctx);
      if (opts.observer) opts.observer(ctx, a);
      auto& nxt = sheet[static_cast<std::size_t>(i + 1)];
      nxt.resize(cur.size());
      for (int j = 0; j < ns; ++j) {
        const double s = space.point(j);
        const double y = cur[static_cast<std::size_t>(j)];
        const double v = y + coeffs.drift(t, s, xd, y, a) * h + coeffs.vol(t, s, xd, y, a) * dw[static_cast<std::size_t>(i)];
        if (!std::isfinite(v)) throw NumericalError(p, i + 1, "lifted state became non-finite");
        nxt[static_cast<std::size_t>(j)] = v;
      }
    }
    for (int i = 0; i <= nt; ++i) {
      const auto& r = sheet[static_cast<std::size_t>(i)];
      if (opts.store_sheets) {
        out.insert(out.end(), r.begin(), r.end());
      } else {
        out.push_back(interpolate(space, r, time.point(i)));
      }
    }
  }
  if (opts.store_sheets) return PathEnsemble::make_lifted(time, space, n_paths, seed, std::move(out));
  return PathEnsemble::make_diagonal(time, n_paths, seed, std::move(out));
}

}  // namespace vlab::reference
