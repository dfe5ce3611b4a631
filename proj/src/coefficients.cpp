#include <algorithm>
#include <cmath>

#include "vlab/error.hpp"
#include "vlab/rng.hpp"
#include "vlab/volterra.hpp"

namespace vlab {

double CoefficientSet::drift_ds(double t, double s, double x, double y, double dy,
                                double a) const {
  double d = db1 ? db1(t, s, x, a) : 0.0;
  if (b2) d += (db2 ? db2(t, s, a) * y : 0.0) + b2(t, s, a) * dy;
  return d;
}

double CoefficientSet::vol_ds(double t, double s, double x, double y, double dy, double a) const {
  double d = ds1 ? ds1(t, s, x, a) : 0.0;
  if (s2) d += (ds2 ? ds2(t, s, a) * y : 0.0) + s2(t, s, a) * dy;
  return d;
}

namespace {

SobolevPath profile(const CoefficientSet& c, double t, const SobolevPath& x, double a, bool vol) {
  const TimeGrid& g = x.grid();
  const double xt = x.at(t);
  const bool have_ds = vol ? static_cast<bool>(c.ds1) : static_cast<bool>(c.db1);
  std::vector<double> v(static_cast<std::size_t>(g.size()));
  std::vector<double> d(v.size());
  for (int i = 0; i < g.size(); ++i) {
    const double s = g.point(i);
    const auto k = static_cast<std::size_t>(i);
    v[k] = vol ? c.vol(t, s, xt, x.value(i), a) : c.drift(t, s, xt, x.value(i), a);
    if (have_ds) {
      d[k] = vol ? c.vol_ds(t, s, xt, x.value(i), x.deriv(i), a)
                 : c.drift_ds(t, s, xt, x.value(i), x.deriv(i), a);
    }
  }
  if (!have_ds) return SobolevPath::from_samples(g, std::move(v));
  return SobolevPath(g, std::move(v), std::move(d));
}

}  // namespace

SobolevPath CoefficientSet::vol_profile(double t, const SobolevPath& x, double a) const {
  return profile(*this, t, x, a, true);
}

SobolevPath CoefficientSet::drift_profile(double t, const SobolevPath& x, double a) const {
  return profile(*this, t, x, a, false);
}

CoefficientCheck check_coefficients(const CoefficientSet& c, double horizon, ControlBox box,
                                    int probes, std::uint64_t seed) {
  if (!c.b1 || !c.s1) throw DomainError("CoefficientSet: b1 and s1 are required");
  const double lo = std::isfinite(box.lo) ? box.lo : (std::isfinite(box.hi) ? box.hi - 2.0 : -1.0);
  const double hi = std::isfinite(box.hi) ? box.hi : lo + 2.0;
  CoefficientCheck r;
  const double m_tol = c.bound * (1.0 + 1e-12) + 1e-12;
  const double l_tol = c.lipschitz * (1.0 + 1e-6) + 1e-9;
  std::uint64_t idx = 0;
  for (int p = 0; p < probes; ++p) {
    const double t = horizon * uniform01(seed, 0, idx++);
    const double s = horizon * uniform01(seed, 0, idx++);
    const double a = lo + (hi - lo) * uniform01(seed, 0, idx++);
    const double x = -10.0 + 20.0 * uniform01(seed, 0, idx++);
    for (const auto* rule : {&c.b2, &c.db2, &c.s2, &c.ds2}) {
      if (!*rule) continue;
      const double v = std::abs((*rule)(t, s, a));
      r.max_bound_seen = std::max(r.max_bound_seen, v);
      if (!(v <= m_tol)) r.bounded_ok = false;
    }
    const double dx = 1e-4 * (1.0 + std::abs(x));
    for (const auto* rule : {&c.b1, &c.db1, &c.s1, &c.ds1}) {
      if (!*rule) continue;
      const double slope = std::abs((*rule)(t, s, x + dx, a) - (*rule)(t, s, x, a)) / dx;
      r.max_lipschitz_seen = std::max(r.max_lipschitz_seen, slope);
      if (!(slope <= l_tol)) r.lipschitz_ok = false;
    }
  }
  return r;
}

}  // namespace vlab
