#include <cmath>

#include "vlab/error.hpp"
#include "vlab/markov.hpp"
#include "vlab/parallel.hpp"
#include "vlab/rng.hpp"

namespace vlab {

void check_truncated(int n, const ProjectedCoefficients& proj, const RepresenterCoefficients& rep,
                     std::size_t n_paths, int substeps) {
  if (n < 1 || n > proj.n || n > rep.n) throw DomainError("simulate_truncated: n outside [1, basis size]");
  if (!(proj.time == rep.time)) throw DimensionError("simulate_truncated: time grids differ");
  if (n_paths == 0 || substeps < 1) throw DomainError("simulate_truncated: need paths and substeps >= 1");
}

PathEnsemble simulate_truncated(int n, const ProjectedCoefficients& proj,
                                const RepresenterCoefficients& rep, double x_start,
                                std::size_t n_paths, std::uint64_t seed, int substeps) {
  check_truncated(n, proj, rep, n_paths, substeps);
  const TimeGrid& time = proj.time;
  const int nt = time.intervals();
  const auto rows = static_cast<std::size_t>(time.size());
  const auto un = static_cast<std::size_t>(n);
  const auto stride = static_cast<std::size_t>(proj.n);
  const double h = time.step();
  std::vector<double> out(n_paths * rows);

  parallel_paths(n_paths, [&](std::size_t p) {
    std::vector<double> dw(static_cast<std::size_t>(nt));
    brownian_increments(seed, p, h, substeps, dw);
    std::vector<double> comp(proj.x.begin(), proj.x.begin() + static_cast<std::ptrdiff_t>(un));
    double* x = out.data() + p * rows;
    x[0] = x_start;
    for (int i = 0; i < nt; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const double x0 = x[ui];
      const double fb = proj.fb(x0);
      const double fs = proj.fs(x0);
      // d(v X) = dv X + v dX with dv the exact increment of the tabulated v,
      // so X^{0,n} - sum_k v^k X^{k,n} is conserved step by step.
      const auto v = rep.v_at(i);
      const auto v1 = rep.v_at(i + 1);
      const double* kb = proj.kb.data() + ui * stride;
      const double* ks = proj.ks.data() + ui * stride;
      double next = x0;
      for (std::size_t k = 0; k < un; ++k) {
        const double dc = kb[k] * fb * h + ks[k] * fs * dw[ui];
        next = next + ((v1[k] - v[k]) * comp[k] + v1[k] * dc);
        comp[k] = comp[k] + dc;
      }
      if (!std::isfinite(next)) throw NumericalError(p, i + 1, "truncated state became non-finite");
      x[ui + 1] = next;
    }
  });
  return PathEnsemble::make_diagonal(time, n_paths, seed, std::move(out));
}

}  // namespace vlab
