#include <cmath>

#include "vlab/error.hpp"
#include "vlab/markov.hpp"
#include "vlab/rng.hpp"

namespace vlab {
void check_truncated(int n, const ProjectedCoefficients& proj, const RepresenterCoefficients& rep,
                     std::size_t n_paths, int substeps);
}

namespace vlab::reference {

PathEnsemble simulate_truncated(int n, const ProjectedCoefficients& proj,
                                const RepresenterCoefficients& rep, double x_start,
                                std::size_t n_paths, std::uint64_t seed, int substeps) {
  check_truncated(n, proj, rep, n_paths, substeps);
  const TimeGrid& time = proj.time;
  const int nt = time.intervals();
  const double h = time.step();
  std::vector<double> out;
  for (std::size_t p = 0; p < n_paths; ++p) {
    std::vector<double> dw(static_cast<std::size_t>(nt));
    brownian_increments(seed, p, h, substeps, dw);
    std::vector<std::vector<double>> comp(static_cast<std::size_t>(nt + 1));
    std::vector<double> x(static_cast<std::size_t>(nt + 1));
    comp[0].assign(proj.x.begin(), proj.x.begin() + n);
    x[0] = x_start;
    for (int i = 0; i < nt; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const double fb = proj.fb(x[ui]);
      const double fs = proj.fs(x[ui]);
      comp[ui + 1].resize(static_cast<std::size_t>(n));
      double next = x[ui];
      for (int k = 0; k < n; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        const auto at = ui * static_cast<std::size_t>(proj.n) + uk;
        const auto rt = ui * static_cast<std::size_t>(rep.n) + uk;
        const auto rt1 = rt + static_cast<std::size_t>(rep.n);
        const double dc = proj.kb[at] * fb * h + proj.ks[at] * fs * dw[ui];
        next = next + ((rep.v[rt1] - rep.v[rt]) * comp[ui][uk] + rep.v[rt1] * dc);
        comp[ui + 1][uk] = comp[ui][uk] + dc;
      }
      x[ui + 1] = next;
      if (!std::isfinite(x[ui + 1])) throw NumericalError(p, i + 1, "truncated state became non-finite");
    }
    out.insert(out.end(), x.begin(), x.end());
  }
  return PathEnsemble::make_diagonal(time, n_paths, seed, std::move(out));
}

}  // namespace vlab::reference
