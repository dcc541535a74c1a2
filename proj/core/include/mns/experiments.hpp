#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mns/error.hpp"
#include "mns/fidelity_eval.hpp"
#include "mns/mns_search.hpp"
#include "mns/noise_models.hpp"

namespace mns {

/// Malformed or inconsistent experiment configuration. Raised before any
/// computation starts.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Missing or unreadable input file.
class IoError : public Error {
 public:
  using Error::Error;
};

enum class ModelKind {
  CollectiveXz,
  CollectiveZLocalDephasing,
  PerturbedCollectiveGlobal,
  PerturbedCollectiveLocal,
};

std::string_view to_string(ModelKind kind);

struct ModelSpec {
  ModelKind kind = ModelKind::CollectiveXz;
  std::size_t n_qubits = 3;
  /// collective_xz rates.
  double gamma_x = 1.0;
  double gamma_z = 1.0;
  /// gamma_1 = gamma_2 of the perturbed collective models.
  double gamma = 1.0;
  /// Local dephasing rates gamma_k (one per qubit).
  std::vector<double> local_rates;
  double delta = 0.0;
  /// Seed of the random perturbation unitary.
  std::uint64_t seed = 1;
  /// Kraus time step; default_time_step when empty.
  std::optional<double> kraus_dt;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

enum class DfsReference { Analytic, Search };

struct EvaluationSpec {
  SweepKind sweep = SweepKind::Delta;
  std::vector<double> grid;
  double gamma_tf = 1.0;
  double delta = 0.0;
  /// Encoding dimensions (N1, N2) of the MNS and the reference DFS.
  std::size_t n1 = 2;
  std::size_t n2 = 2;
  DfsReference reference = DfsReference::Analytic;

  friend bool operator==(const EvaluationSpec&, const EvaluationSpec&) = default;
};

struct OutputSpec {
  std::string result = "result.json";
  std::string csv = "sweep.csv";

  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct ExperimentConfig {
  std::string name;
  ModelSpec model;
  SearchConfig search;
  std::optional<EvaluationSpec> evaluation;
  OutputSpec output;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses JSON text. Syntax errors report line and column; field errors
/// report the JSON pointer of the offending value. Unknown keys are errors.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);
/// Canonical text form (sorted keys, two-space indent, trailing newline).
std::string serialize_config(const ExperimentConfig& config);
/// Semantic checks that need no computation: dimensions, rates, grids and
/// reference availability. Throws ConfigError.
void validate(const ExperimentConfig& config);
/// FNV-1a 64 of the canonical serialization, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Model at perturbation amplitude delta (ignored by collective_xz).
LindbladModel build_model(const ModelSpec& spec, double delta);
LindbladModel build_model(const ModelSpec& spec);
/// Rate that turns gamma * t_f into t_f for sweeps.
double reference_rate(const ModelSpec& spec);

nlohmann::json to_json(const UnitaryParams& params);
UnitaryParams params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SearchResult& result);
nlohmann::json to_json(const FidelityPoint& point);

/// CSV with header param,fi_mns,fi_dfs,J_opt,converged; LF line endings,
/// values in %.16e.
std::string sweep_csv(const std::vector<FidelityPoint>& points);

/// Command-line overrides shared by every command.
struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::filesystem::path out_dir = ".";
};

void apply_overrides(ExperimentConfig& config, const RunOptions& options);

struct FindMnsOutcome {
  nlohmann::json record;
  std::filesystem::path result_path;
};

/// Searches every configured decomposition and writes the result record.
FindMnsOutcome cmd_find_mns(const ExperimentConfig& config, const RunOptions& options,
                            std::ostream& log);

struct KrausDefect {
  std::size_t index = 0;
  double defect = 0.0;
};

struct VerifyReport {
  Dims dims;
  std::vector<KrausDefect> per_kraus;
  double max_defect = 0.0;
  bool pass = false;
};

/// Commutation test of each encoding in `encoding_file` (either an
/// {"dims", "params"} object or a find-mns result record) against the
/// configured model. Prints per-operator defects and a verdict per encoding.
std::vector<VerifyReport> cmd_verify_dfs(const ExperimentConfig& config,
                                         const std::filesystem::path& encoding_file,
                                         std::ostream& out);

struct SweepOutcome {
  std::vector<FidelityPoint> points;
  std::filesystem::path csv_path;
  std::filesystem::path result_path;
};

SweepOutcome cmd_fidelity_sweep(const ExperimentConfig& config, const RunOptions& options,
                                std::ostream& log);

/// Human-readable summary of a result record.
void cmd_show_result(const std::filesystem::path& result_file, std::ostream& out);

}  // namespace mns
