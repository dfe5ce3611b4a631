#include <cmath>

#include "vlab/error.hpp"
#include "vlab/volterra.hpp"

namespace vlab {

ControlPath ControlPath::constant(double a, ControlBox box) {
  if (!box.contains(a)) throw DomainError("ControlPath: constant control outside the box");
  ControlPath c;
  c.kind_ = Kind::constant;
  c.box_ = box;
  c.constant_ = a;
  return c;
}

ControlPath ControlPath::piecewise(std::vector<double> values, ControlBox box) {
  for (double v : values) {
    if (!box.contains(v)) throw DomainError("ControlPath: piecewise value outside the box");
  }
  ControlPath c;
  c.kind_ = Kind::piecewise;
  c.box_ = box;
  c.values_ = std::move(values);
  return c;
}

ControlPath ControlPath::feedback(std::function<double(double, double)> rule, ControlBox box) {
  if (!rule) throw DomainError("ControlPath: empty feedback rule");
  ControlPath c;
  c.kind_ = Kind::diagonal_feedback;
  c.box_ = box;
  c.diag_rule_ = std::move(rule);
  return c;
}

ControlPath ControlPath::lifted_feedback(std::function<double(const StepContext&)> rule,
                                         ControlBox box) {
  if (!rule) throw DomainError("ControlPath: empty feedback rule");
  ControlPath c;
  c.kind_ = Kind::lifted_feedback;
  c.box_ = box;
  c.lifted_rule_ = std::move(rule);
  return c;
}

double ControlPath::at(const StepContext& ctx) const {
  switch (kind_) {
    case Kind::constant:
      return constant_;
    case Kind::piecewise:
      return values_[static_cast<std::size_t>(ctx.step)];
    case Kind::diagonal_feedback:
      return box_.clamp(diag_rule_(ctx.t, ctx.x_diag));
    case Kind::lifted_feedback:
      return box_.clamp(lifted_rule_(ctx));
  }
  return 0.0;
}

void ControlPath::validate(int steps) const {
  if (kind_ == Kind::piecewise && values_.size() != static_cast<std::size_t>(steps)) {
    throw DimensionError("ControlPath: piecewise control needs one value per time step");
  }
}

}  // namespace vlab
