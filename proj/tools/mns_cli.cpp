#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mns/experiments.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidationError = 1;
constexpr int kRuntimeError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Search for minimal-noise subsystems of Lindblad noise models"};
  app.set_version_flag("--version", std::string(MNS_VERSION_STRING));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string out_dir = ".";
  app.add_option("--config", config_path, "Experiment config (JSON)");
  app.add_option("--seed", seed, "Override the master search seed");
  app.add_option("--out-dir", out_dir, "Directory for result and CSV files");
  app.add_option("--threads", threads, "Worker threads (0 = all cores)");

  auto* find = app.add_subcommand("find-mns", "Search every configured (N1, N2) decomposition");
  auto* verify = app.add_subcommand("verify-dfs", "Check an encoding against the DFS commutation condition");
  std::string encoding_path;
  verify->add_option("encoding", encoding_path, "Encoding file or find-mns result")->required();
  auto* sweep = app.add_subcommand("fidelity-sweep", "Worst-case fidelity of MNS and DFS encodings over a grid");
  auto* show = app.add_subcommand("show-result", "Summarize a result file");
  std::string result_path;
  show->add_option("result", result_path, "Result file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidationError;
  }

  try {
    if (show->parsed()) {
      mns::cmd_show_result(result_path, std::cout);
      return kOk;
    }
    if (config_path.empty()) {
      std::cerr << "error: --config is required for " << app.get_subcommands().front()->get_name() << '\n';
      return kValidationError;
    }
    mns::ExperimentConfig config = mns::load_config(config_path);
    const mns::RunOptions options{seed, threads, std::filesystem::path(out_dir)};
    mns::apply_overrides(config, options);

    if (find->parsed()) {
      mns::cmd_find_mns(config, options, std::cout);
    } else if (verify->parsed()) {
      mns::cmd_verify_dfs(config, encoding_path, std::cout);
    } else if (sweep->parsed()) {
      mns::cmd_fidelity_sweep(config, options, std::cout);
    }
    return kOk;
  } catch (const mns::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
