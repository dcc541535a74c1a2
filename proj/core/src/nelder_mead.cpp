#include "mns/nelder_mead.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace mns {

NelderMeadResult nelder_mead(const std::function<double(const RealVector&)>& f, const RealVector& x0,
                             double step, const NelderMeadOptions& opt) {
  const Eigen::Index n = x0.size();
  std::vector<RealVector> pts(static_cast<std::size_t>(n + 1), x0);
  std::vector<double> vals(pts.size());
  for (Eigen::Index i = 0; i < n; ++i) pts[static_cast<std::size_t>(i + 1)](i) += step;

  NelderMeadResult res;
  for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = f(pts[i]);
  res.evaluations = pts.size();

  std::vector<std::size_t> order(pts.size());
  while (res.evaluations < opt.max_evaluations) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];

    double diameter = 0.0;
    for (const auto& p : pts) diameter = std::max(diameter, (p - pts[best]).norm());
    if (vals[worst] - vals[best] <= opt.value_tolerance && diameter <= opt.size_tolerance) break;
    if (diameter == 0.0) break;

    RealVector centroid = RealVector::Zero(n);
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (i != worst) centroid += pts[i];
    centroid /= static_cast<double>(n);

    const RealVector reflected = centroid + (centroid - pts[worst]);
    const double fr = f(reflected);
    ++res.evaluations;
    if (fr < vals[best]) {
      const RealVector expanded = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = f(expanded);
      ++res.evaluations;
      if (fe < fr) {
        pts[worst] = expanded;
        vals[worst] = fe;
      } else {
        pts[worst] = reflected;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = reflected;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    const RealVector contracted =
        outside ? RealVector(centroid + 0.5 * (reflected - centroid))
                : RealVector(centroid + 0.5 * (pts[worst] - centroid));
    const double fc = f(contracted);
    ++res.evaluations;
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = contracted;
      vals[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i == best) continue;
      pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
      vals[i] = f(pts[i]);
      ++res.evaluations;
    }
  }
  const auto it = std::min_element(vals.begin(), vals.end());
  res.value = *it;
  res.x = pts[static_cast<std::size_t>(it - vals.begin())];
  return res;
}

}  // namespace mns
