#pragma once

#include <cstddef>
#include <functional>

#include "mns/tensor_algebra.hpp"

namespace mns {

struct NelderMeadOptions {
  std::size_t max_evaluations = 4000;
  /// Stop once the simplex spread in f and its diameter both fall below these.
  double value_tolerance = 1e-15;
  double size_tolerance = 1e-10;
};

struct NelderMeadResult {
  RealVector x;
  double value = 0.0;
  std::size_t evaluations = 0;
};

/// Derivative-free simplex minimization (reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2) from an axis-aligned simplex of edge `step`.
NelderMeadResult nelder_mead(const std::function<double(const RealVector&)>& f, const RealVector& x0,
                             double step, const NelderMeadOptions& options = {});

}  // namespace mns
