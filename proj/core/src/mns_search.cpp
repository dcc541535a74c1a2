#include "mns/mns_search.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>

#include "mns/error.hpp"
#include "mns/random.hpp"
#include "parallel.hpp"

namespace mns {

std::vector<std::pair<std::size_t, std::size_t>> default_candidate_dims(std::size_t total_dim) {
  std::vector<std::pair<std::size_t, std::size_t>> dims;
  for (std::size_t n2 = 1; 2 * n2 <= total_dim; ++n2) dims.emplace_back(2, n2);
  return dims;
}

std::vector<Dims> resolve_candidate_dims(const SearchConfig& config, std::size_t total_dim) {
  if (config.num_restarts == 0) throw InvalidParameter("search: num_restarts must be at least 1");
  if (!(config.gradient_tolerance >= 0.0) || !(config.objective_tolerance >= 0.0) ||
      !(config.dfs_threshold >= 0.0) || !(config.finite_difference_step > 0.0)) {
    throw InvalidParameter("search: tolerances must be non-negative and the step positive");
  }
  const auto pairs =
      config.candidate_dims.empty() ? default_candidate_dims(total_dim) : config.candidate_dims;
  std::vector<Dims> out;
  out.reserve(pairs.size());
  for (const auto& [n1, n2] : pairs) out.push_back(Dims::make(n1, n2, total_dim));
  return out;
}

MaximizeResult bfgs_maximize(const EncodingObjective& objective, const UnitaryParams& initial,
                             const SearchConfig& config) {
  const std::size_t dim = objective.dims().total();
  if (initial.dim != dim) throw InvalidDimension("bfgs_maximize: initial point has the wrong dimension");

  ValueAndGradient f;
  if (config.gradient == GradientMethod::Analytic) {
    f = [&](const RealVector& x, RealVector& g) {
      const double j = objective.value_and_gradient(UnitaryParams::from_flat(dim, x), g);
      g = -g;
      return -j;
    };
  } else {
    const bool central = config.gradient == GradientMethod::CentralDifference;
    f = [&, central](const RealVector& x, RealVector& g) {
      const auto p = UnitaryParams::from_flat(dim, x);
      g = -objective.finite_difference_gradient(p, config.finite_difference_step, central);
      return -objective.value(p);
    };
  }

  BfgsOptions opt;
  opt.max_iterations = config.max_iterations;
  opt.gradient_tolerance = config.gradient_tolerance;
  opt.objective_tolerance = config.objective_tolerance;
  const BfgsResult r = bfgs_minimize(f, initial.flatten(), opt);

  MaximizeResult out;
  out.j = -r.value;
  out.params = UnitaryParams::from_flat(dim, r.x);
  out.gradient_norm = r.gradient.norm();
  out.trace.reserve(r.trace.size());
  for (double v : r.trace) out.trace.push_back(-v);
  out.status = r.status;
  out.iterations = r.iterations;
  out.evaluations = r.evaluations;
  return out;
}

MaximizeResult bfgs_maximize(const KrausChannel& channel, Dims dims, const UnitaryParams& initial,
                             const SearchConfig& config) {
  return bfgs_maximize(EncodingObjective(channel, dims), initial, config);
}

SearchResult search_dims(const KrausChannel& channel, Dims dims, const SearchConfig& config) {
  const EncodingObjective objective(channel, dims);
  const std::uint64_t dims_seed = derive_seed(config.seed, dims.n1 * 1000 + dims.n2);

  SearchResult result;
  result.dims = dims;
  result.per_restart.resize(config.num_restarts);

  detail::parallel_for(config.num_restarts, config.threads, [&](std::size_t r) {
    RestartRecord& rec = result.per_restart[r];
    rec.index = r;
    rec.seed = derive_seed(dims_seed, r);
    try {
      Rng rng(rec.seed);
      const UnitaryParams start = random_initial_params(dims.total(), rng);
      rec.initial_j = objective.value(start);
      MaximizeResult m = bfgs_maximize(objective, start, config);
      rec.final_j = m.j;
      rec.iterations = m.iterations;
      rec.evaluations = m.evaluations;
      rec.gradient_norm = m.gradient_norm;
      rec.converged = m.converged();
      rec.status = std::string(to_string(m.status));
      rec.trace = std::move(m.trace);
      rec.params = std::move(m.params);
    } catch (const std::exception& e) {
      rec.final_j = std::numeric_limits<double>::quiet_NaN();
      rec.converged = false;
      rec.status = std::string("error: ") + e.what();
    }
  });

  double top = -std::numeric_limits<double>::infinity();
  for (const auto& rec : result.per_restart) {
    if (std::isfinite(rec.final_j)) top = std::max(top, rec.final_j);
  }
  result.best_j = top;
  if (std::isfinite(top)) {
    const RestartRecord* best = nullptr;
    for (const auto& rec : result.per_restart) {
      if (!std::isfinite(rec.final_j) || rec.final_j < top - kRestartTieTolerance) continue;
      if (best == nullptr || (rec.converged && !best->converged) ||
          (rec.converged == best->converged && rec.gradient_norm < best->gradient_norm)) {
        best = &rec;
      }
    }
    result.best_restart = best->index;
    result.best_j = best->final_j;
    result.best_params = result.per_restart[result.best_restart].params;
    std::size_t agree = 0;
    for (const auto& rec : result.per_restart) {
      if (std::isfinite(rec.final_j) && rec.final_j >= result.best_j - config.agreement_tolerance) ++agree;
    }
    result.agreement_fraction = static_cast<double>(agree) / static_cast<double>(config.num_restarts);
    result.is_dfs = result.best_j >= 1.0 - config.dfs_threshold;
  } else {
    result.best_params = UnitaryParams::zeros(dims.total());
  }
  return result;
}

std::map<Dims, SearchResult> find_mns(const KrausChannel& channel, const SearchConfig& config) {
  std::map<Dims, SearchResult> out;
  for (const Dims& dims : resolve_candidate_dims(config, channel.dim)) {
    out.emplace(dims, search_dims(channel, dims, config));
  }
  return out;
}

ComplexMatrix subspace_projector(const ComplexMatrix& u, const Dims& dims) {
  const auto d = static_cast<Eigen::Index>(dims.block());
  const ComplexMatrix top = u.topRows(d);
  return top.adjoint() * top;
}

ComplexMatrix subspace_projector(const SearchResult& result) {
  return subspace_projector(result.best_u(), result.dims);
}

ComplexMatrix basis_projector(std::size_t dim, const std::vector<std::size_t>& states) {
  const auto n = static_cast<Eigen::Index>(dim);
  ComplexMatrix p = ComplexMatrix::Zero(n, n);
  for (std::size_t s : states) {
    if (s >= dim) throw InvalidDimension("basis_projector: state index out of range");
    p(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) = 1.0;
  }
  return p;
}

}  // namespace mns
