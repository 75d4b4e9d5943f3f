// Copyright 2026 The vfl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// vflsim: command-line front end.
//
//   vflsim run --config <path> --seed <u64> --out <dir> [--format csv|json]
//   vflsim verify-chain --ledger <path>
//   vflsim sweep --config <path> --epsilons 4.03,1.18,0.522 --seeds 5 --out <dir>
//   vflsim netsim --out <dir> [--seed <u64>]
//   vflsim default-config
//
// Exit status of `run`: 0 target accuracy reached, 2 round limit reached,
// 1 error. `verify-chain` exits 0 iff the ledger is valid.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vfl/config.hpp"
#include "vfl/experiment.hpp"
#include "vfl/ledger.hpp"
#include "vfl/netsim.hpp"

namespace {

constexpr int kExitTargetReached = 0;
constexpr int kExitError = 1;
constexpr int kExitLimitReached = 2;

vfl::ExperimentConfig config_or_default(const std::string& path) {
  return path.empty() ? vfl::ExperimentConfig{} : vfl::load_config(path);
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& out, const std::string& format) {
  vfl::ExperimentConfig cfg = config_or_default(config_path);
  if (seed) cfg.master_seed = *seed;
  cfg.validate();
  const vfl::ExperimentResult res = vfl::run_experiment(cfg);
  vfl::write_artifacts(res, out,
                       format == "json" ? vfl::OutputFormat::kJson : vfl::OutputFormat::kCsv);
  const auto& last = res.reports.back();
  std::cout << "rounds " << last.round << ", accuracy " << last.accuracy << ", loss "
            << last.global_loss << ", gas " << last.gas_cum << " -> " << to_string(res.stop)
            << "\n";
  return res.stop == vfl::StopReason::kTargetReached ? kExitTargetReached : kExitLimitReached;
}

int cmd_verify(const std::string& ledger_path) {
  const std::string text = vfl::read_text_file(ledger_path);
  const vfl::ChainCheck check = vfl::validate_serialized_chain(text);
  if (check.ok) {
    std::cout << "ok\n";
    return 0;
  }
  std::cout << "invalid: block " << check.index << " (" << to_string(check.reason) << "): "
            << check.detail << "\n";
  return kExitError;
}

int cmd_sweep(const std::string& config_path, const std::vector<double>& epsilons,
              std::uint32_t seeds, const std::string& out) {
  const vfl::ExperimentConfig cfg = config_or_default(config_path);
  const auto rows = vfl::run_sweep(cfg, epsilons, seeds);
  const std::string csv = vfl::sweep_csv(rows);
  std::filesystem::create_directories(out);
  vfl::write_text_file((std::filesystem::path(out) / "sweep.csv").string(), csv);
  std::cout << csv;
  return 0;
}

int cmd_netsim(const std::string& out, std::uint64_t seed) {
  vfl::V2iScenario sc;
  sc.seed = seed;
  const vfl::NetMetrics m = vfl::run_v2i_scenario(sc);
  std::filesystem::create_directories(out);
  vfl::write_text_file((std::filesystem::path(out) / "netsim.csv").string(),
                       vfl::net_samples_csv(m));
  std::cout << "sent " << m.sent << ", delivered " << m.delivered << ", pdr " << m.pdr
            << ", overhead_ratio " << m.overhead_ratio << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blockchain-assisted federated learning simulator with local DP"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string format = "csv";
  std::string ledger_path;
  std::vector<double> epsilons;
  std::uint32_t seeds = 5;
  std::uint64_t seed_value = 0;

  auto* run = app.add_subcommand("run", "Run one experiment and write its artifacts");
  run->add_option("--config", config_path, "Experiment config (JSON); defaults if omitted");
  auto* seed_opt = run->add_option("--seed", seed_value, "Master seed (overrides the config)");
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--format", format, "Metrics format")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* verify = app.add_subcommand("verify-chain", "Validate a ledger file");
  verify->add_option("--ledger", ledger_path, "Ledger file (ndjson)")->required();

  auto* sweep = app.add_subcommand("sweep", "Accuracy per privacy budget over several seeds");
  sweep->add_option("--config", config_path, "Experiment config (JSON); defaults if omitted");
  sweep->add_option("--epsilons", epsilons, "Comma-separated epsilons")
      ->required()
      ->delimiter(',');
  sweep->add_option("--seeds", seeds, "Seeds per setting")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out_dir, "Output directory")->required();

  auto* netsim = app.add_subcommand("netsim", "Run the default V2I network scenario");
  std::uint64_t net_seed = 1;
  netsim->add_option("--out", out_dir, "Output directory")->required();
  netsim->add_option("--seed", net_seed, "Simulator seed");

  auto* defaults = app.add_subcommand("default-config", "Print the default config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      return cmd_run(config_path,
                     *seed_opt ? std::optional<std::uint64_t>(seed_value) : std::nullopt,
                     out_dir, format);
    }
    if (*verify) return cmd_verify(ledger_path);
    if (*sweep) return cmd_sweep(config_path, epsilons, seeds, out_dir);
    if (*netsim) return cmd_netsim(out_dir, net_seed);
    if (*defaults) {
      std::cout << vfl::config_to_json(vfl::ExperimentConfig{}).dump(2) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
