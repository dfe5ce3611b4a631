#include "vlab/error.hpp"

namespace vlab {

NumericalError::NumericalError(std::size_t path, int step, const std::string& what)
    : std::runtime_error(what + " (path " + std::to_string(path) + ", step " +
                         std::to_string(step) + ")"),
      path_(path),
      step_(step) {}

SolverError::SolverError(int step, const std::string& what)
    : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

}  // namespace vlab
