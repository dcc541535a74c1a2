#pragma once

#include <cstddef>
#include <functional>
#include <string_view>
#include <vector>

#include "mns/tensor_algebra.hpp"

namespace mns {

/// Returns f(x) and writes grad f(x) into the second argument.
using ValueAndGradient = std::function<double(const RealVector&, RealVector&)>;

struct BfgsOptions {
  std::size_t max_iterations = 2000;
  double gradient_tolerance = 1e-8;
  double objective_tolerance = 1e-12;
  /// Wolfe constants for sufficient decrease and curvature.
  double c1 = 1e-4;
  double c2 = 0.9;
  std::size_t max_line_search_evaluations = 40;
  /// Steps whose predicted decrease is below roundoff_scale * max(1, |f|)
  /// are accepted on the approximate Wolfe conditions.
  double roundoff_scale = 1e-10;
};

enum class BfgsStatus { GradientConverged, ObjectiveConverged, MaxIterations, LineSearchFailed };

std::string_view to_string(BfgsStatus s);

struct BfgsResult {
  RealVector x;
  double value = 0.0;
  RealVector gradient;
  /// f at the start and after every accepted step; non-increasing up to
  /// roundoff (1e-14 relative).
  std::vector<double> trace;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  BfgsStatus status = BfgsStatus::MaxIterations;

  bool converged() const {
    return status == BfgsStatus::GradientConverged || status == BfgsStatus::ObjectiveConverged;
  }
};

/// Quasi-Newton minimization with the inverse-Hessian BFGS update and a
/// line search enforcing the strong Wolfe conditions (approximate Wolfe
/// conditions once decreases in f reach roundoff level).
///
/// The inverse Hessian starts at the identity; the first step is scaled to
/// unit length and, before the first update, H is rescaled by s'y / y'y.
/// Terminates when ||grad|| <= gradient_tolerance, when one step changes f by
/// at most objective_tolerance (0 disables this test), or after
/// max_iterations. A failed line search
/// returns the best point found with status LineSearchFailed.
BfgsResult bfgs_minimize(const ValueAndGradient& f, RealVector x0, const BfgsOptions& options = {});

}  // namespace mns
