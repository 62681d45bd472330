// Copyright 2026 The dynmatch Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// dynmatch command line: instance generation, validation, replays, charts
// and the allocation service.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dynmatch/data.hpp"
#include "dynmatch/service.hpp"
#include "dynmatch/sim.hpp"
#include "dynmatch/svg.hpp"

namespace {

using namespace dynmatch;

struct PolicyFlags {
  std::string policy = "pot2";
  int k = 5;
  uint64_t seed = 0;
  double epsilon = -1.0;
  std::string arrival_mode = "capacity_fraction";
  double prediction = 0.0;
  bool serial = false;
  bool simplex = false;

  void add(CLI::App* app, bool allow_hindsight) {
    auto* opt = app->add_option("--policy", policy, "Allocation policy");
    if (allow_hindsight) {
      opt->check(CLI::IsMember({"greedy", "pot1", "pot2", "hindsight"}));
    } else {
      opt->check(CLI::IsMember({"greedy", "pot1", "pot2"}));
    }
    app->add_option("-k", k, "Trajectories per potential computation")
        ->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "Run seed for trajectory sampling");
    app->add_option("--epsilon", epsilon,
                    "Per-refugee bonus off the sink (default: per batch)");
    app->add_option("--arrival-mode", arrival_mode, "Arrival expectation")
        ->check(CLI::IsMember({"known_n", "capacity_fraction", "manual"}));
    app->add_option("--prediction", prediction,
                    "Predicted total refugees for --arrival-mode manual");
    app->add_flag("--serial", serial, "Run trajectories on one thread");
    app->add_flag("--simplex", simplex,
                  "Use the dense simplex for trajectory LPs");
  }

  policies::PolicyConfig config() const {
    policies::PolicyConfig c;
    if (policy == "pot1") c.method = potentials::Method::kPot1;
    if (policy == "pot2") c.method = potentials::Method::kPot2;
    c.k = k;
    c.seed = seed;
    if (epsilon >= 0.0) c.epsilon_matched = epsilon;
    if (arrival_mode == "known_n") {
      c.arrival_mode = policies::ArrivalMode::kKnownN;
    } else if (arrival_mode == "manual") {
      c.arrival_mode = policies::ArrivalMode::kManualOverride;
      c.predicted_total_refugees = prediction;
    }
    if (serial) c.execution = potentials::Execution::kSerial;
    if (simplex) c.backend = potentials::Backend::kSimplex;
    return c;
  }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw Error("io_error", "cannot write " + path);
}

int cmd_gen(const std::string& config_path, data::GeneratorConfig cfg,
            const std::string& out_path) {
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw Error("io_error", "cannot read " + config_path);
    const uint64_t seed = cfg.seed;
    cfg = data::generator_config_from_json(nlohmann::json::parse(in));
    if (seed != 0) cfg.seed = seed;
  }
  const Instance inst = data::generate(cfg);
  if (out_path.empty() || out_path == "-") {
    std::cout << data::write_instance_string(inst);
  } else {
    data::write_instance(inst, out_path);
    std::cerr << "wrote " << inst.cases.size() << " cases ("
              << inst.total_refugees() << " refugees) to " << out_path << '\n';
  }
  return 0;
}

int cmd_validate(const std::string& path) {
  const Instance inst = data::read_instance(path);
  const auto violations = validate(inst);
  for (const Violation& v : violations) {
    std::cout << v.entity << ": " << v.rule << '\n';
  }
  if (violations.empty()) {
    std::cout << "ok: " << inst.affiliates.size() << " affiliates, "
              << inst.cases.size() << " cases, " << inst.total_refugees()
              << " refugees, " << inst.batches().size() << " batches\n";
    return 0;
  }
  return 1;
}

sim::ReplayConfig replay_config(const PolicyFlags& flags,
                                const std::string& capacity_mode,
                                bool unbatched, bool revision_info_only) {
  sim::ReplayConfig rc;
  rc.policy = flags.config();
  rc.hindsight = flags.policy == "hindsight";
  rc.batched = !unbatched;
  rc.capacity_mode = sim::parse_capacity_mode(capacity_mode);
  rc.revision_info_only = revision_info_only;
  return rc;
}

int cmd_replay(const std::string& path, const sim::ReplayConfig& rc,
               const std::string& csv_path, const std::string& json_path) {
  const Instance inst = data::read_instance(path);
  const sim::ReplayResult r = sim::replay(inst, rc);
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    sim::write_metrics_csv(r, out);
    if (!out) throw Error("io_error", "cannot write " + csv_path);
  }
  const std::string summary = sim::summary_json(r).dump(2);
  if (!json_path.empty()) write_file(json_path, summary + "\n");
  std::cout << summary << '\n';
  return 0;
}

int cmd_plot(const std::string& path, std::vector<std::string> policies,
             PolicyFlags flags, const std::string& capacity_mode,
             const std::string& out_dir, int smooth) {
  const Instance inst = data::read_instance(path);
  std::vector<sim::ReplayResult> runs;
  std::optional<double> hindsight;
  for (const std::string& name : policies) {
    flags.policy = name;
    const sim::ReplayConfig rc = replay_config(flags, capacity_mode, false,
                                               false);
    runs.push_back(sim::replay(inst, rc, hindsight));
    hindsight = runs.back().hindsight_value;
    std::cerr << name << ": employment " << runs.back().total_employment
              << ", ratio " << runs.back().optimum_ratio << '\n';
  }
  std::filesystem::create_directories(out_dir);
  const svg::Figures f = svg::figures(runs, smooth);
  const std::filesystem::path dir(out_dir);
  write_file((dir / "employment.svg").string(), f.employment);
  write_file((dir / "match_score.svg").string(), f.match_score);
  write_file((dir / "priced_capacity.svg").string(), f.priced_capacity);
  write_file((dir / "cumulative.svg").string(), f.cumulative);
  std::cerr << "wrote 4 charts to " << out_dir << '\n';
  return 0;
}

service::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(const std::string& path, const PolicyFlags& flags,
              const std::string& host, int port,
              service::SessionOptions options, bool recover) {
  const Instance inst = data::read_instance(path);
  std::unique_ptr<service::Session> session;
  if (recover) {
    session = service::Session::recover(inst, flags.config(), options);
  } else {
    session = std::make_unique<service::Session>(inst, flags.config(),
                                                 std::move(options));
  }
  service::HttpServer server(*session);
  const int bound = server.bind(host, port);
  if (bound < 0) {
    std::cerr << "cannot bind " << host << ":" << port << '\n';
    return 1;
  }
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening on http://" << host << ":" << bound << std::endl;
  const bool ok = server.run();
  g_server = nullptr;
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic refugee matching with capacity potentials"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "Generate a synthetic instance");
  data::GeneratorConfig gcfg;
  gcfg.seed = 0;
  std::string gen_config;
  std::string gen_out;
  gen->add_option("--config", gen_config, "Generator settings (JSON)")
      ->check(CLI::ExistingFile);
  gen->add_option("--seed", gcfg.seed, "Generator seed");
  gen->add_option("--affiliates", gcfg.num_affiliates, "Real affiliates");
  gen->add_option("--refugees", gcfg.total_refugees, "Arrivals in the year");
  gen->add_option("--tightness", gcfg.tightness,
                  "Arrivals as a fraction of capacity");
  gen->add_flag("--revision", gcfg.revision, "Add a capacity revision");
  gen->add_option("-o,--out", gen_out, "Output path (default stdout)");

  auto* val = app.add_subcommand("validate", "Check an instance file");
  std::string val_path;
  val->add_option("instance", val_path)->required()->check(CLI::ExistingFile);

  auto* rep = app.add_subcommand("replay", "Replay a fiscal year");
  std::string rep_path, rep_csv, rep_json, rep_caps = "final";
  bool rep_unbatched = false;
  bool rep_info_only = false;
  PolicyFlags rep_flags;
  rep->add_option("instance", rep_path)->required()->check(CLI::ExistingFile);
  rep_flags.add(rep, true);
  rep->add_option("--capacity-mode", rep_caps, "final, initial or revised")
      ->check(CLI::IsMember({"final", "initial", "initial_with_revision"}));
  rep->add_flag("--unbatched", rep_unbatched, "Allocate cases one by one");
  rep->add_flag("--revision-info-only", rep_info_only,
                "Revisions update only the arrival expectation");
  rep->add_option("--csv", rep_csv, "Per-arrival metrics CSV");
  rep->add_option("--json", rep_json, "Summary JSON");

  auto* plot = app.add_subcommand("plot", "Replay several policies and chart");
  std::string plot_path, plot_dir = "figures", plot_caps = "final";
  std::vector<std::string> plot_policies = {"greedy", "pot1", "pot2",
                                            "hindsight"};
  int plot_smooth = 500;
  PolicyFlags plot_flags;
  plot->add_option("instance", plot_path)->required()->check(CLI::ExistingFile);
  plot->add_option("--policies", plot_policies, "Policies to compare")
      ->delimiter(',')
      ->check(CLI::IsMember({"greedy", "pot1", "pot2", "hindsight"}));
  plot->add_option("-k", plot_flags.k, "Trajectories")->check(CLI::PositiveNumber);
  plot->add_option("--seed", plot_flags.seed, "Run seed");
  plot->add_option("--capacity-mode", plot_caps, "final, initial or revised")
      ->check(CLI::IsMember({"final", "initial", "initial_with_revision"}));
  plot->add_option("--smooth", plot_smooth, "Smoothing half-width in refugees")
      ->check(CLI::NonNegativeNumber);
  plot->add_option("--out-dir", plot_dir, "Directory for the SVG files");

  auto* serve = app.add_subcommand("serve", "Run the allocation service");
  std::string serve_path, host = "127.0.0.1";
  int port = 8080;
  bool recover = false;
  service::SessionOptions sopt;
  PolicyFlags serve_flags;
  serve->add_option("instance", serve_path, "Instance with affiliates, "
                    "capacities and history")
      ->required()
      ->check(CLI::ExistingFile);
  serve_flags.add(serve, false);
  serve->add_option("--host", host, "Listen address");
  serve->add_option("--port", port, "Listen port (0 picks one)");
  serve->add_option("--event-log", sopt.event_log, "Append-only event log");
  serve->add_option("--snapshot", sopt.snapshot, "State snapshot file");
  serve->add_option("--snapshot-every", sopt.snapshot_every,
                    "Events between snapshots")
      ->check(CLI::PositiveNumber);
  serve->add_flag("--recover", recover,
                  "Resume from the snapshot and event log");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen(gen_config, gcfg, gen_out);
    if (*val) return cmd_validate(val_path);
    if (*rep) {
      return cmd_replay(rep_path,
                        replay_config(rep_flags, rep_caps, rep_unbatched,
                                      rep_info_only),
                        rep_csv, rep_json);
    }
    if (*plot) {
      return cmd_plot(plot_path, plot_policies, plot_flags, plot_caps,
                      plot_dir, plot_smooth);
    }
    if (*serve) {
      return cmd_serve(serve_path, serve_flags, host, port, std::move(sopt),
                       recover);
    }
  } catch (const Error& e) {
    std::cerr << "error [" << e.code() << "]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
