#include "mns/bfgs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace mns {

std::string_view to_string(BfgsStatus s) {
  switch (s) {
    case BfgsStatus::GradientConverged:
      return "gradient-converged";
    case BfgsStatus::ObjectiveConverged:
      return "objective-converged";
    case BfgsStatus::MaxIterations:
      return "max-iterations";
    case BfgsStatus::LineSearchFailed:
      return "line-search-failed";
  }
  return "unknown";
}

namespace {

constexpr double kRoundoff = 1e-14;

struct Sample {
  double alpha = 0.0;
  double value = 0.0;
  double slope = 0.0;
  RealVector x;
  RealVector grad;
};

class LineSearch {
 public:
  LineSearch(const ValueAndGradient& f, const RealVector& x, const RealVector& dir, double f0,
             double slope0, const BfgsOptions& opt)
      : f_(f), x_(x), dir_(dir), f0_(f0), slope0_(slope0), opt_(opt) {}

  /// Point satisfying the strong Wolfe conditions, or else the best point with
  /// sufficient decrease, or nothing.
  std::optional<Sample> run(double alpha0) {
    Sample prev{0.0, f0_, slope0_, x_, {}};
    double alpha = alpha0;
    for (std::size_t i = 0; i < opt_.max_line_search_evaluations; ++i) {
      Sample cur = eval(alpha);
      if (approximate_wolfe(cur)) return cur;
      if (!std::isfinite(cur.value) || cur.value > armijo(alpha) || (i > 0 && cur.value >= prev.value)) {
        return zoom(prev, cur);
      }
      if (std::abs(cur.slope) <= -opt_.c2 * slope0_) return cur;
      if (cur.slope >= 0.0) return zoom(cur, prev);
      keep_best(cur);
      prev = std::move(cur);
      alpha *= 2.0;
    }
    return best_;
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  double armijo(double alpha) const { return f0_ + opt_.c1 * alpha * slope0_; }

  // Once the predicted decrease is lost in roundoff of f, the Armijo test is
  // meaningless; accept on the slope alone (Hager-Zhang approximate Wolfe),
  // allowing f to rise by at most a few ulps.
  bool approximate_wolfe(const Sample& s) const {
    const double scale = std::max(1.0, std::abs(f0_));
    if (!std::isfinite(s.value) || s.value > f0_ + kRoundoff * scale) return false;
    if (-s.alpha * slope0_ > opt_.roundoff_scale * scale) return false;
    return s.slope >= opt_.c2 * slope0_ && s.slope <= (2.0 * opt_.c1 - 1.0) * slope0_;
  }

  Sample eval(double alpha) {
    ++evaluations_;
    Sample s;
    s.alpha = alpha;
    s.x = x_ + alpha * dir_;
    s.value = f_(s.x, s.grad);
    s.slope = s.grad.dot(dir_);
    return s;
  }

  void keep_best(const Sample& s) {
    if (s.alpha > 0.0 && s.value <= armijo(s.alpha) && (!best_ || s.value < best_->value)) best_ = s;
  }

  // Minimizer of the cubic through (lo, hi) values and slopes, clamped to the
  // middle 80% of the bracket.
  static double interpolate(const Sample& lo, const Sample& hi) {
    const double a = lo.alpha, b = hi.alpha;
    const double d1 = lo.slope + hi.slope - 3.0 * (lo.value - hi.value) / (a - b);
    const double disc = d1 * d1 - lo.slope * hi.slope;
    double t = 0.5 * (a + b);
    if (disc >= 0.0) {
      const double d2 = std::copysign(std::sqrt(disc), b - a);
      const double denom = hi.slope - lo.slope + 2.0 * d2;
      if (denom != 0.0) t = b - (b - a) * (hi.slope + d2 - d1) / denom;
    }
    const double left = std::min(a, b), right = std::max(a, b), width = right - left;
    if (!std::isfinite(t)) t = 0.5 * (a + b);
    return std::clamp(t, left + 0.1 * width, right - 0.1 * width);
  }

  std::optional<Sample> zoom(Sample lo, Sample hi) {
    keep_best(lo);
    while (evaluations_ < opt_.max_line_search_evaluations) {
      if (std::abs(hi.alpha - lo.alpha) <= 1e-16 * std::max(1.0, std::abs(lo.alpha))) break;
      Sample cur = eval(interpolate(lo, hi));
      if (approximate_wolfe(cur)) return cur;
      if (!std::isfinite(cur.value) || cur.value > armijo(cur.alpha) || cur.value >= lo.value) {
        hi = std::move(cur);
        continue;
      }
      if (std::abs(cur.slope) <= -opt_.c2 * slope0_) return cur;
      keep_best(cur);
      if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
      lo = std::move(cur);
    }
    return best_;
  }

  const ValueAndGradient& f_;
  const RealVector& x_;
  const RealVector& dir_;
  double f0_;
  double slope0_;
  const BfgsOptions& opt_;
  std::size_t evaluations_ = 0;
  std::optional<Sample> best_;
};

}  // namespace

BfgsResult bfgs_minimize(const ValueAndGradient& f, RealVector x0, const BfgsOptions& opt) {
  const Eigen::Index n = x0.size();
  BfgsResult res;
  res.x = std::move(x0);
  res.value = f(res.x, res.gradient);
  res.evaluations = 1;
  res.trace.push_back(res.value);

  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  bool fresh = true;  // h is the unscaled identity

  for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
    const double gnorm = res.gradient.norm();
    if (gnorm <= opt.gradient_tolerance) {
      res.status = BfgsStatus::GradientConverged;
      return res;
    }

    RealVector dir = -(h * res.gradient);
    double slope = res.gradient.dot(dir);
    if (!(slope < 0.0)) {
      h.setIdentity();
      fresh = true;
      dir = -res.gradient;
      slope = -gnorm * gnorm;
    }

    LineSearch ls(f, res.x, dir, res.value, slope, opt);
    auto step = ls.run(fresh ? 1.0 / dir.norm() : 1.0);
    res.evaluations += ls.evaluations();
    if (!step) {
      res.status = BfgsStatus::LineSearchFailed;
      return res;
    }

    const RealVector s = step->x - res.x;
    const RealVector y = step->grad - res.gradient;
    const double previous = res.value;
    res.x = std::move(step->x);
    res.value = step->value;
    res.gradient = std::move(step->grad);
    res.trace.push_back(res.value);

    const double sy = s.dot(y);
    if (sy > std::numeric_limits<double>::epsilon() * s.norm() * y.norm()) {
      if (fresh) {
        h *= sy / y.squaredNorm();
        fresh = false;
      }
      const double rho = 1.0 / sy;
      const RealVector hy = h * y;
      h += rho * ((1.0 + rho * y.dot(hy)) * (s * s.transpose()) - (hy * s.transpose() + s * hy.transpose()));
    }

    if (opt.objective_tolerance > 0.0 && previous - res.value <= opt.objective_tolerance) {
      ++res.iterations;
      res.status = res.gradient.norm() <= opt.gradient_tolerance ? BfgsStatus::GradientConverged
                                                                 : BfgsStatus::ObjectiveConverged;
      return res;
    }
  }
  res.status = BfgsStatus::MaxIterations;
  return res;
}

}  // namespace mns
