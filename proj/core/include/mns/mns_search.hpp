#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mns/bfgs.hpp"
#include "mns/encoding_objective.hpp"

namespace mns {

struct SearchConfig {
  std::size_t max_iterations = 2000;
  double gradient_tolerance = 1e-8;
  double objective_tolerance = 1e-12;
  std::size_t num_restarts = 20;
  std::uint64_t seed = 1;
  /// (N1, N2) pairs to search. Empty means every (2, N2) with 2*N2 <= N.
  std::vector<std::pair<std::size_t, std::size_t>> candidate_dims;
  /// A result is flagged as a DFS when best_J >= 1 - dfs_threshold.
  double dfs_threshold = 1e-6;
  /// Restarts whose final J is within this of best_J count as agreeing.
  double agreement_tolerance = 1e-6;
  GradientMethod gradient = GradientMethod::Analytic;
  double finite_difference_step = kDefaultFiniteDifferenceStep;
  /// Worker threads for independent restarts; 0 means hardware concurrency.
  std::size_t threads = 1;

  friend bool operator==(const SearchConfig&, const SearchConfig&) = default;
};

std::vector<std::pair<std::size_t, std::size_t>> default_candidate_dims(std::size_t total_dim);

/// Resolved candidate list; throws InvalidDimension for an infeasible pair
/// and InvalidParameter for nonsensical settings.
std::vector<Dims> resolve_candidate_dims(const SearchConfig& config, std::size_t total_dim);

struct RestartRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double initial_j = 0.0;
  double final_j = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  /// ||grad J|| at the final point.
  double gradient_norm = 0.0;
  bool converged = false;
  std::string status;
  /// J after every accepted step, starting from the initial point.
  std::vector<double> trace;
  UnitaryParams params;
};

/// Restarts whose final J lie within this of the maximum are treated as tied;
/// ties go to converged restarts, then to the smaller final gradient norm,
/// then to the lower index.
inline constexpr double kRestartTieTolerance = 1e-12;

struct SearchResult {
  Dims dims;
  double best_j = 0.0;
  UnitaryParams best_params;
  std::size_t best_restart = 0;
  std::vector<RestartRecord> per_restart;
  bool is_dfs = false;
  /// Fraction of restarts that reached best_J within agreement_tolerance.
  double agreement_fraction = 0.0;

  ComplexMatrix best_u() const { return realize(best_params); }
};

struct MaximizeResult {
  double j = 0.0;
  UnitaryParams params;
  double gradient_norm = 0.0;
  std::vector<double> trace;
  BfgsStatus status = BfgsStatus::MaxIterations;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;

  bool converged() const {
    return status == BfgsStatus::GradientConverged || status == BfgsStatus::ObjectiveConverged;
  }
};

/// BFGS ascent of J from `initial` (runs as minimization of -J).
MaximizeResult bfgs_maximize(const EncodingObjective& objective, const UnitaryParams& initial,
                             const SearchConfig& config);
MaximizeResult bfgs_maximize(const KrausChannel& channel, Dims dims, const UnitaryParams& initial,
                             const SearchConfig& config);

/// Multi-start search for one decomposition. Restart r starts from a point
/// drawn with a seed derived from (config.seed, N1, N2, r), so results do not
/// depend on thread scheduling or on the order of candidate_dims.
SearchResult search_dims(const KrausChannel& channel, Dims dims, const SearchConfig& config);

/// Runs search_dims for every configured decomposition.
std::map<Dims, SearchResult> find_mns(const KrausChannel& channel, const SearchConfig& config);

/// U^dagger P U: projector onto the encoded block in the original basis.
ComplexMatrix subspace_projector(const ComplexMatrix& u, const Dims& dims);
ComplexMatrix subspace_projector(const SearchResult& result);

/// Projector onto the span of computational basis states.
ComplexMatrix basis_projector(std::size_t dim, const std::vector<std::size_t>& states);

}  // namespace mns
