#include "mns/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>

namespace mns {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxQubits = 6;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config: " + (path.empty() ? std::string("/") : path) + ": " + what);
}

std::string join(const std::string& path, std::string_view key) {
  return path + "/" + std::string(key);
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(join(path, key), "unknown field");
    }
  }
}

const json* field(const json& obj, std::string_view key) {
  const auto it = obj.find(std::string(key));
  return it == obj.end() ? nullptr : &*it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

std::uint64_t as_unsigned(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
  fail(path, "expected a non-negative integer");
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

std::vector<double> as_numbers(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], join(path, std::to_string(i))));
  return out;
}

std::pair<std::size_t, std::size_t> as_dims(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) fail(path, "expected [N1, N2]");
  return {as_unsigned(v[0], join(path, "0")), as_unsigned(v[1], join(path, "1"))};
}

template <typename T>
void read(const json& obj, const std::string& path, std::string_view key, T& out) {
  const json* v = field(obj, key);
  if (v == nullptr) return;
  const std::string p = join(path, key);
  if constexpr (std::is_same_v<T, double>) {
    out = as_number(*v, p);
  } else if constexpr (std::is_same_v<T, std::string>) {
    out = as_string(*v, p);
  } else {
    out = static_cast<T>(as_unsigned(*v, p));
  }
}

ModelKind parse_kind(const std::string& s, const std::string& path) {
  for (ModelKind k : {ModelKind::CollectiveXz, ModelKind::CollectiveZLocalDephasing,
                      ModelKind::PerturbedCollectiveGlobal, ModelKind::PerturbedCollectiveLocal}) {
    if (to_string(k) == s) return k;
  }
  fail(path, "unknown model kind '" + s + "'");
}

GradientMethod parse_gradient(const std::string& s, const std::string& path) {
  if (s == "analytic") return GradientMethod::Analytic;
  if (s == "central") return GradientMethod::CentralDifference;
  if (s == "forward") return GradientMethod::ForwardDifference;
  fail(path, "expected 'analytic', 'central' or 'forward'");
}

std::string_view to_string(GradientMethod m) {
  switch (m) {
    case GradientMethod::Analytic:
      return "analytic";
    case GradientMethod::CentralDifference:
      return "central";
    case GradientMethod::ForwardDifference:
      return "forward";
  }
  return "analytic";
}

ModelSpec parse_model(const json& j, const std::string& path) {
  check_keys(j, path, {"kind", "n_qubits", "rates", "delta", "seed", "kraus_dt"});
  ModelSpec m;
  const json* kind = field(j, "kind");
  if (kind == nullptr) fail(join(path, "kind"), "missing required field");
  m.kind = parse_kind(as_string(*kind, join(path, "kind")), join(path, "kind"));
  read(j, path, "n_qubits", m.n_qubits);
  if (const json* rates = field(j, "rates")) {
    const std::string rp = join(path, "rates");
    check_keys(*rates, rp, {"gamma_x", "gamma_z", "gamma", "local"});
    read(*rates, rp, "gamma_x", m.gamma_x);
    read(*rates, rp, "gamma_z", m.gamma_z);
    read(*rates, rp, "gamma", m.gamma);
    if (const json* local = field(*rates, "local")) m.local_rates = as_numbers(*local, join(rp, "local"));
  }
  read(j, path, "delta", m.delta);
  read(j, path, "seed", m.seed);
  if (const json* dt = field(j, "kraus_dt"); dt != nullptr && !dt->is_null()) {
    m.kraus_dt = as_number(*dt, join(path, "kraus_dt"));
  }
  return m;
}

SearchConfig parse_search(const json& j, const std::string& path) {
  check_keys(j, path,
             {"max_iterations", "gradient_tolerance", "objective_tolerance", "num_restarts", "seed",
              "candidate_dims", "dfs_threshold", "agreement_tolerance", "gradient",
              "finite_difference_step", "threads"});
  SearchConfig s;
  read(j, path, "max_iterations", s.max_iterations);
  read(j, path, "gradient_tolerance", s.gradient_tolerance);
  read(j, path, "objective_tolerance", s.objective_tolerance);
  read(j, path, "num_restarts", s.num_restarts);
  read(j, path, "seed", s.seed);
  if (const json* dims = field(j, "candidate_dims")) {
    const std::string dp = join(path, "candidate_dims");
    if (!dims->is_array()) fail(dp, "expected an array of [N1, N2] pairs");
    for (std::size_t i = 0; i < dims->size(); ++i) {
      s.candidate_dims.push_back(as_dims((*dims)[i], join(dp, std::to_string(i))));
    }
  }
  read(j, path, "dfs_threshold", s.dfs_threshold);
  read(j, path, "agreement_tolerance", s.agreement_tolerance);
  if (const json* g = field(j, "gradient")) {
    s.gradient = parse_gradient(as_string(*g, join(path, "gradient")), join(path, "gradient"));
  }
  read(j, path, "finite_difference_step", s.finite_difference_step);
  read(j, path, "threads", s.threads);
  return s;
}

std::vector<double> parse_grid(const json& g, const std::string& path) {
  if (g.is_array()) return as_numbers(g, path);
  check_keys(g, path, {"start", "stop", "points"});
  for (std::string_view k : {"start", "stop", "points"}) {
    if (field(g, k) == nullptr) fail(join(path, k), "missing required field");
  }
  const double start = as_number(g["start"], join(path, "start"));
  const double stop = as_number(g["stop"], join(path, "stop"));
  const std::uint64_t points = as_unsigned(g["points"], join(path, "points"));
  if (points == 0) fail(join(path, "points"), "must be at least 1");
  std::vector<double> grid;
  for (std::uint64_t i = 0; i < points; ++i) {
    grid.push_back(points == 1 ? start
                               : start + (stop - start) * static_cast<double>(i) /
                                             static_cast<double>(points - 1));
  }
  return grid;
}

EvaluationSpec parse_evaluation(const json& j, const std::string& path) {
  check_keys(j, path, {"sweep", "grid", "gamma_tf", "delta", "dims", "dfs_reference"});
  EvaluationSpec e;
  if (const json* s = field(j, "sweep")) {
    const std::string v = as_string(*s, join(path, "sweep"));
    if (v == "delta") {
      e.sweep = SweepKind::Delta;
    } else if (v == "time") {
      e.sweep = SweepKind::Time;
    } else {
      fail(join(path, "sweep"), "expected 'delta' or 'time'");
    }
  }
  const json* grid = field(j, "grid");
  if (grid == nullptr) fail(join(path, "grid"), "missing required field");
  e.grid = parse_grid(*grid, join(path, "grid"));
  read(j, path, "gamma_tf", e.gamma_tf);
  read(j, path, "delta", e.delta);
  if (const json* d = field(j, "dims")) std::tie(e.n1, e.n2) = as_dims(*d, join(path, "dims"));
  if (const json* r = field(j, "dfs_reference")) {
    const std::string v = as_string(*r, join(path, "dfs_reference"));
    if (v == "analytic") {
      e.reference = DfsReference::Analytic;
    } else if (v == "search") {
      e.reference = DfsReference::Search;
    } else {
      fail(join(path, "dfs_reference"), "expected 'analytic' or 'search'");
    }
  }
  return e;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json base_record(const ExperimentConfig& config, std::string_view command) {
  json r;
  r["tool"] = "mns";
  r["version"] = MNS_VERSION_STRING;
  r["command"] = std::string(command);
  r["config_hash"] = config_hash(config);
  r["seed"] = config.search.seed;
  r["config"] = to_json(config);
  r["started_at"] = utc_timestamp();
  return r;
}

json channel_info(const KrausChannel& ch) {
  return {{"dim", ch.dim},
          {"kraus_dt", ch.dt ? json(*ch.dt) : json(nullptr)},
          {"kraus_operators", ch.operators.size()},
          {"completeness_defect", ch.completeness_defect()}};
}

KrausChannel build_channel(const ModelSpec& spec, double delta) {
  const LindbladModel model = build_model(spec, delta);
  return lindblad_to_kraus(model, spec.kraus_dt.value_or(default_time_step(model)));
}

void check_dims_field(const json& dims, const std::string& what) {
  if (!dims.is_array() || dims.size() < 2 || dims.size() > 3) {
    throw IoError(what + ": 'dims' must be [N1, N2] or [N1, N2, N3]");
  }
  for (const auto& d : dims) {
    if (!d.is_number_unsigned()) throw IoError(what + ": 'dims' entries must be non-negative integers");
  }
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::CollectiveXz:
      return "collective_xz";
    case ModelKind::CollectiveZLocalDephasing:
      return "collective_z_local_dephasing";
    case ModelKind::PerturbedCollectiveGlobal:
      return "perturbed_collective_global";
    case ModelKind::PerturbedCollectiveLocal:
      return "perturbed_collective_local";
  }
  return "unknown";
}

ExperimentConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    std::string msg = e.what();
    if (const auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    throw ConfigError("config: line " + std::to_string(line) + ", column " + std::to_string(col) +
                      ": " + msg);
  }
  check_keys(j, "", {"name", "model", "search", "evaluation", "output"});
  ExperimentConfig c;
  read(j, "", "name", c.name);
  const json* model = field(j, "model");
  if (model == nullptr) fail("/model", "missing required field");
  c.model = parse_model(*model, "/model");
  if (const json* s = field(j, "search")) c.search = parse_search(*s, "/search");
  if (const json* e = field(j, "evaluation"); e != nullptr && !e->is_null()) {
    c.evaluation = parse_evaluation(*e, "/evaluation");
  }
  if (const json* o = field(j, "output")) {
    check_keys(*o, "/output", {"result", "csv"});
    read(*o, "/output", "result", c.output.result);
    read(*o, "/output", "csv", c.output.csv);
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

json to_json(const ExperimentConfig& c) {
  json model = {{"kind", std::string(to_string(c.model.kind))},
                {"n_qubits", c.model.n_qubits},
                {"rates",
                 {{"gamma_x", c.model.gamma_x},
                  {"gamma_z", c.model.gamma_z},
                  {"gamma", c.model.gamma},
                  {"local", c.model.local_rates}}},
                {"delta", c.model.delta},
                {"seed", c.model.seed},
                {"kraus_dt", c.model.kraus_dt ? json(*c.model.kraus_dt) : json(nullptr)}};
  json dims = json::array();
  for (const auto& [n1, n2] : c.search.candidate_dims) dims.push_back({n1, n2});
  json search = {{"max_iterations", c.search.max_iterations},
                 {"gradient_tolerance", c.search.gradient_tolerance},
                 {"objective_tolerance", c.search.objective_tolerance},
                 {"num_restarts", c.search.num_restarts},
                 {"seed", c.search.seed},
                 {"candidate_dims", dims},
                 {"dfs_threshold", c.search.dfs_threshold},
                 {"agreement_tolerance", c.search.agreement_tolerance},
                 {"gradient", std::string(to_string(c.search.gradient))},
                 {"finite_difference_step", c.search.finite_difference_step},
                 {"threads", c.search.threads}};
  json out = {{"name", c.name},
              {"model", model},
              {"search", search},
              {"output", {{"result", c.output.result}, {"csv", c.output.csv}}}};
  if (c.evaluation) {
    const EvaluationSpec& e = *c.evaluation;
    out["evaluation"] = {{"sweep", e.sweep == SweepKind::Delta ? "delta" : "time"},
                         {"grid", e.grid},
                         {"gamma_tf", e.gamma_tf},
                         {"delta", e.delta},
                         {"dims", {e.n1, e.n2}},
                         {"dfs_reference", e.reference == DfsReference::Analytic ? "analytic" : "search"}};
  }
  return out;
}

std::string serialize_config(const ExperimentConfig& config) { return to_json(config).dump(2) + "\n"; }

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = serialize_config(config);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void validate(const ExperimentConfig& c) {
  const ModelSpec& m = c.model;
  if (m.n_qubits < 1 || m.n_qubits > kMaxQubits) {
    fail("/model/n_qubits", "must be between 1 and " + std::to_string(kMaxQubits));
  }
  const auto check_rate = [](double v, const std::string& path) {
    if (!std::isfinite(v) || v < 0.0) fail(path, "must be a finite non-negative number");
  };
  check_rate(m.gamma_x, "/model/rates/gamma_x");
  check_rate(m.gamma_z, "/model/rates/gamma_z");
  check_rate(m.gamma, "/model/rates/gamma");
  for (std::size_t i = 0; i < m.local_rates.size(); ++i) {
    check_rate(m.local_rates[i], "/model/rates/local/" + std::to_string(i));
  }
  if (m.kind == ModelKind::CollectiveZLocalDephasing && m.local_rates.size() != m.n_qubits) {
    fail("/model/rates/local", "needs one rate per qubit (" + std::to_string(m.n_qubits) + ")");
  }
  check_rate(m.delta, "/model/delta");
  if (m.kraus_dt && !(*m.kraus_dt > 0.0 && std::isfinite(*m.kraus_dt))) {
    fail("/model/kraus_dt", "must be positive");
  }

  const std::size_t dim = std::size_t{1} << m.n_qubits;
  if (c.search.max_iterations == 0) fail("/search/max_iterations", "must be at least 1");
  try {
    resolve_candidate_dims(c.search, dim);
  } catch (const InvalidDimension& e) {
    fail("/search/candidate_dims", e.what());
  } catch (const Error& e) {
    fail("/search", e.what());
  }

  if (!c.evaluation) return;
  const EvaluationSpec& e = *c.evaluation;
  if (e.grid.empty()) fail("/evaluation/grid", "must not be empty");
  for (std::size_t i = 0; i < e.grid.size(); ++i) check_rate(e.grid[i], "/evaluation/grid/" + std::to_string(i));
  check_rate(e.gamma_tf, "/evaluation/gamma_tf");
  check_rate(e.delta, "/evaluation/delta");
  try {
    Dims::make(e.n1, e.n2, dim);
  } catch (const Error& err) {
    fail("/evaluation/dims", err.what());
  }
  if (e.reference == DfsReference::Analytic) {
    if (m.kind == ModelKind::CollectiveZLocalDephasing) {
      fail("/evaluation/dfs_reference", "no analytic reference for this model; use 'search'");
    }
    if (m.n_qubits < 3 || m.n_qubits % 2 == 0) {
      fail("/evaluation/dfs_reference", "the analytic reference needs an odd number of qubits >= 3");
    }
    const KnownEncoding k = collective_dfs_encoding(m.n_qubits);
    if (k.n1 != e.n1 || k.n2 != e.n2) {
      fail("/evaluation/dims", "the analytic reference has dims [" + std::to_string(k.n1) + ", " +
                                   std::to_string(k.n2) + "]");
    }
  }
}

LindbladModel build_model(const ModelSpec& spec, double delta) {
  const std::size_t dim = std::size_t{1} << spec.n_qubits;
  switch (spec.kind) {
    case ModelKind::CollectiveXz:
      return collective_xz(spec.n_qubits, spec.gamma_x, spec.gamma_z);
    case ModelKind::CollectiveZLocalDephasing:
      return collective_z_with_local_dephasing(spec.n_qubits, spec.gamma_z, delta, spec.local_rates);
    case ModelKind::PerturbedCollectiveGlobal:
      return perturbed_collective(spec.n_qubits, spec.gamma, spec.gamma,
                                  random_perturbation_unitary(dim, delta, PerturbationMode::Global, spec.seed));
    case ModelKind::PerturbedCollectiveLocal:
      return perturbed_collective(
          spec.n_qubits, spec.gamma, spec.gamma,
          random_perturbation_unitary(dim, delta, PerturbationMode::LocalTensor, spec.seed));
  }
  throw InvalidParameter("build_model: unknown model kind");
}

LindbladModel build_model(const ModelSpec& spec) { return build_model(spec, spec.delta); }

double reference_rate(const ModelSpec& spec) {
  double r = 0.0;
  switch (spec.kind) {
    case ModelKind::CollectiveXz:
      r = std::max(spec.gamma_x, spec.gamma_z);
      break;
    case ModelKind::CollectiveZLocalDephasing:
      r = spec.gamma_z;
      break;
    case ModelKind::PerturbedCollectiveGlobal:
    case ModelKind::PerturbedCollectiveLocal:
      r = spec.gamma;
      break;
  }
  return r > 0.0 ? r : 1.0;
}

json to_json(const UnitaryParams& p) {
  return {{"dim", p.dim},
          {"phases", std::vector<double>(p.phases.begin(), p.phases.end())},
          {"angles", std::vector<double>(p.angles.begin(), p.angles.end())}};
}

UnitaryParams params_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("phases") || !j.contains("angles")) {
    throw InvalidParameter("params: expected an object with dim, phases and angles");
  }
  UnitaryParams p;
  p.dim = j.at("dim").get<std::size_t>();
  const auto phases = j.at("phases").get<std::vector<double>>();
  const auto angles = j.at("angles").get<std::vector<double>>();
  p.phases = Eigen::Map<const RealVector>(phases.data(), static_cast<Eigen::Index>(phases.size()));
  p.angles = Eigen::Map<const RealVector>(angles.data(), static_cast<Eigen::Index>(angles.size()));
  p.validate();
  return p;
}

json to_json(const SearchResult& r) {
  json restarts = json::array();
  for (const auto& rec : r.per_restart) {
    restarts.push_back({{"index", rec.index},
                        {"seed", rec.seed},
                        {"initial_j", rec.initial_j},
                        {"final_j", std::isfinite(rec.final_j) ? json(rec.final_j) : json(nullptr)},
                        {"iterations", rec.iterations},
                        {"evaluations", rec.evaluations},
                        {"gradient_norm", rec.gradient_norm},
                        {"converged", rec.converged},
                        {"status", rec.status}});
  }
  return {{"dims", {r.dims.n1, r.dims.n2, r.dims.n3}},
          {"j_opt", std::isfinite(r.best_j) ? json(r.best_j) : json(nullptr)},
          {"is_dfs", r.is_dfs},
          {"agreement_fraction", r.agreement_fraction},
          {"best_restart", r.best_restart},
          {"params", to_json(r.best_params)},
          {"restarts", restarts}};
}

json to_json(const FidelityPoint& p) {
  const auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"param", p.param},
          {"fi_mns", num(p.fi_mns)},
          {"fi_dfs", num(p.fi_dfs)},
          {"j_opt", num(p.j_opt)},
          {"converged", p.converged}};
}

std::string sweep_csv(const std::vector<FidelityPoint>& points) {
  std::string out = "param,fi_mns,fi_dfs,J_opt,converged\n";
  for (const auto& p : points) {
    out += format_number(p.param) + ',' + format_number(p.fi_mns) + ',' + format_number(p.fi_dfs) +
           ',' + format_number(p.j_opt) + ',' + (p.converged ? "true" : "false") + '\n';
  }
  return out;
}

void apply_overrides(ExperimentConfig& config, const RunOptions& options) {
  if (options.seed) config.search.seed = *options.seed;
  if (options.threads) config.search.threads = *options.threads;
}

FindMnsOutcome cmd_find_mns(const ExperimentConfig& config, const RunOptions& options, std::ostream& log) {
  validate(config);
  const auto t0 = std::chrono::steady_clock::now();
  const KrausChannel channel = build_channel(config.model, config.model.delta);

  json record = base_record(config, "find-mns");
  record["model"] = channel_info(channel);
  json results = json::array();
  for (const auto& [dims, r] : find_mns(channel, config.search)) {
    char line[160];
    std::snprintf(line, sizeof line, "(%zu,%zu,%zu)  J_opt=%.12f  is_dfs=%s  agreement=%.2f\n", dims.n1,
                  dims.n2, dims.n3, r.best_j, r.is_dfs ? "true" : "false", r.agreement_fraction);
    log << line;
    results.push_back(to_json(r));
  }
  record["results"] = std::move(results);
  record["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  FindMnsOutcome out;
  out.result_path = options.out_dir / config.output.result;
  write_file(out.result_path, record.dump(2) + "\n");
  log << "wrote " << out.result_path.string() << '\n';
  out.record = std::move(record);
  return out;
}

std::vector<VerifyReport> cmd_verify_dfs(const ExperimentConfig& config,
                                         const std::filesystem::path& encoding_file, std::ostream& out) {
  validate(config);
  json doc;
  try {
    doc = json::parse(read_file(encoding_file));
  } catch (const json::parse_error& e) {
    throw IoError("corrupt encoding file " + encoding_file.string() + ": " + e.what());
  }

  std::vector<std::pair<json, json>> encodings;  // (dims, params)
  try {
    if (doc.is_object() && doc.contains("results")) {
      for (const auto& r : doc.at("results")) encodings.emplace_back(r.at("dims"), r.at("params"));
    } else {
      encodings.emplace_back(doc.at("dims"), doc.at("params"));
    }
  } catch (const json::exception&) {
    throw IoError("corrupt encoding file " + encoding_file.string() + ": expected dims and params");
  }
  if (encodings.empty()) throw IoError("encoding file " + encoding_file.string() + " holds no encodings");

  const KrausChannel channel = build_channel(config.model, config.model.delta);
  std::vector<VerifyReport> reports;
  for (const auto& [dims_json, params_json] : encodings) {
    check_dims_field(dims_json, encoding_file.string());
    UnitaryParams params;
    try {
      params = params_from_json(params_json);
    } catch (const std::exception& e) {
      throw IoError("corrupt encoding file " + encoding_file.string() + ": " + e.what());
    }
    if (params.dim != channel.dim) {
      throw IoError("encoding in " + encoding_file.string() + " has dimension " + std::to_string(params.dim) +
                    ", the model has " + std::to_string(channel.dim));
    }
    VerifyReport rep;
    try {
      rep.dims = Dims::make(dims_json[0].get<std::size_t>(), dims_json[1].get<std::size_t>(), channel.dim);
    } catch (const Error& e) {
      throw IoError("encoding in " + encoding_file.string() + ": " + e.what());
    }
    const ComplexMatrix u = realize(params);
    for (std::size_t k = 0; k < channel.operators.size(); ++k) {
      KrausChannel single;
      single.dim = channel.dim;
      single.operators = {channel.operators[k]};
      const DfsCheck c = dfs_check(single, u, rep.dims.n1, rep.dims.n2);
      rep.per_kraus.push_back({k, c.defect});
      rep.max_defect = std::max(rep.max_defect, c.defect);
    }
    rep.pass = rep.max_defect <= kDfsCommutatorTolerance;

    char line[160];
    std::snprintf(line, sizeof line, "encoding (%zu,%zu,%zu)\n", rep.dims.n1, rep.dims.n2, rep.dims.n3);
    out << line;
    for (const auto& d : rep.per_kraus) {
      std::snprintf(line, sizeof line, "  E_%zu  defect %.3e\n", d.index, d.defect);
      out << line;
    }
    std::snprintf(line, sizeof line, "  max defect %.3e (tolerance %.0e): %s\n", rep.max_defect,
                  kDfsCommutatorTolerance, rep.pass ? "pass" : "fail");
    out << line;
    reports.push_back(std::move(rep));
  }
  return reports;
}

SweepOutcome cmd_fidelity_sweep(const ExperimentConfig& config, const RunOptions& options, std::ostream& log) {
  validate(config);
  if (!config.evaluation) fail("/evaluation", "fidelity-sweep needs an evaluation section");
  const EvaluationSpec& e = *config.evaluation;
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t dim = std::size_t{1} << config.model.n_qubits;
  const Dims dims = Dims::make(e.n1, e.n2, dim);

  ReferenceEncoding reference;
  reference.dims = dims;
  if (e.reference == DfsReference::Analytic) {
    reference.u = collective_dfs_encoding(config.model.n_qubits).u;
  } else {
    reference.u = search_dims(build_channel(config.model, 0.0), dims, config.search).best_u();
  }

  const ModelSpec spec = config.model;
  const ModelFamily family = [spec](double delta) { return build_model(spec, delta); };
  SweepSpec sweep;
  sweep.kind = e.sweep;
  sweep.grid = e.grid;
  sweep.gamma_tf = e.gamma_tf;
  sweep.delta = e.delta;
  sweep.gamma = reference_rate(spec);

  SweepOutcome out;
  out.points = fidelity_sweep(family, config.search, dims, reference, sweep, spec.kraus_dt);
  for (const auto& p : out.points) {
    char line[160];
    std::snprintf(line, sizeof line, "%s=%.4f  fi_mns=%.10f  fi_dfs=%.10f  J_opt=%.12f%s\n",
                  e.sweep == SweepKind::Delta ? "delta" : "gamma_tf", p.param, p.fi_mns, p.fi_dfs, p.j_opt,
                  p.converged ? "" : "  (not converged)");
    log << line;
  }

  out.csv_path = options.out_dir / config.output.csv;
  write_file(out.csv_path, sweep_csv(out.points));
  log << "wrote " << out.csv_path.string() << '\n';

  json record = base_record(config, "fidelity-sweep");
  record["model"] = channel_info(build_channel(config.model, config.model.delta));
  record["reference"] = {{"kind", e.reference == DfsReference::Analytic ? "analytic" : "search"},
                         {"params", to_json(decompose(reference.u))}};
  json points = json::array();
  for (const auto& p : out.points) points.push_back(to_json(p));
  record["fidelity"] = std::move(points);
  record["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.result_path = options.out_dir / config.output.result;
  write_file(out.result_path, record.dump(2) + "\n");
  log << "wrote " << out.result_path.string() << '\n';
  return out;
}

void cmd_show_result(const std::filesystem::path& result_file, std::ostream& out) {
  json r;
  try {
    r = json::parse(read_file(result_file));
  } catch (const json::parse_error& e) {
    throw IoError("corrupt result file " + result_file.string() + ": " + e.what());
  }
  try {
    out << r.value("tool", "?") << ' ' << r.value("version", "?") << "  " << r.value("command", "?") << '\n';
    out << "config " << r.value("config_hash", "?") << "  seed " << r.at("seed").get<std::uint64_t>() << '\n';
    if (r.contains("model")) {
      const json& m = r["model"];
      out << "model dim " << m.at("dim").get<std::size_t>() << ", " << m.at("kraus_operators").get<std::size_t>()
          << " Kraus operators";
      if (!m.at("kraus_dt").is_null()) out << ", dt " << m["kraus_dt"].get<double>();
      out << '\n';
    }
    char line[200];
    if (r.contains("results")) {
      for (const auto& res : r["results"]) {
        const auto& d = res.at("dims");
        std::size_t converged = 0;
        for (const auto& rec : res.at("restarts")) converged += rec.at("converged").get<bool>() ? 1 : 0;
        const double j = res.at("j_opt").is_null() ? std::nan("") : res["j_opt"].get<double>();
        std::snprintf(line, sizeof line,
                      "(%zu,%zu,%zu)  J_opt=%.12f  is_dfs=%s  agreement=%.2f  converged %zu/%zu\n",
                      d[0].get<std::size_t>(), d[1].get<std::size_t>(), d[2].get<std::size_t>(), j,
                      res.at("is_dfs").get<bool>() ? "true" : "false",
                      res.at("agreement_fraction").get<double>(), converged, res["restarts"].size());
        out << line;
      }
    }
    if (r.contains("fidelity")) {
      out << "param, fi_mns, fi_dfs, J_opt, converged\n";
      for (const auto& p : r["fidelity"]) {
        const auto num = [&](const char* k) { return p.at(k).is_null() ? std::nan("") : p[k].get<double>(); };
        std::snprintf(line, sizeof line, "%.6g, %.10f, %.10f, %.12f, %s\n", num("param"), num("fi_mns"),
                      num("fi_dfs"), num("j_opt"), p.at("converged").get<bool>() ? "true" : "false");
        out << line;
      }
    }
    if (r.contains("wall_clock_seconds")) out << "wall clock " << r["wall_clock_seconds"].get<double>() << " s\n";
  } catch (const json::exception& e) {
    throw IoError("corrupt result file " + result_file.string() + ": " + e.what());
  }
}

}  // namespace mns
