// noma-arena: run the allocation algorithms, sweep experiment grids, export
// the exact model, and serve the environment to external agents.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "noma/config.hpp"
#include "noma/env_service.hpp"
#include "noma/harness.hpp"
#include "noma/opt.hpp"
#include "noma/serialization.hpp"

namespace {

noma::ExperimentConfig config_or_default(const std::string& path) {
  return path.empty() ? noma::ExperimentConfig{} : noma::load_config(path);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) values.push_back(std::stoi(item));
  }
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NOMA uplink grouping and power allocation arena"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 1;
  std::string out_path;

  // run
  auto* run_cmd = app.add_subcommand("run", "Run one algorithm on one seeded deployment");
  std::string algo = "crl";
  std::string trace_path;
  run_cmd->add_option("--config", config_path, "TOML config file");
  run_cmd->add_option("--seed", seed, "Deployment seed");
  run_cmd->add_option("--algo", algo, "crl | tql | fm-max | opt");
  run_cmd->add_option("--out", out_path, "Write the result record as JSON");
  run_cmd->add_option("--trace", trace_path, "Write a JSON-lines round/episode trace");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep packet size or group size");
  std::string param = "max_kbits";
  std::string values = "200,300,400,500";
  std::string algos = "crl,tql,fm-max,opt";
  std::string summary_path;
  int reps = 20;
  int workers = 0;
  bool no_runtime = false;
  sweep_cmd->add_option("--config", config_path, "TOML config file");
  sweep_cmd->add_option("--seed", seed, "Base seed; replication r uses seed + r");
  sweep_cmd->add_option("--param", param, "max_kbits | group_cap");
  sweep_cmd->add_option("--values", values, "Comma-separated values");
  sweep_cmd->add_option("--algos", algos, "Comma-separated algorithms");
  sweep_cmd->add_option("--reps", reps, "Replications per value");
  sweep_cmd->add_option("--workers", workers, "Worker threads (0: all cores)");
  sweep_cmd->add_option("--out", out_path, "CSV output (default stdout)");
  sweep_cmd->add_option("--summary", summary_path, "Summary JSON with means and 95% CIs");
  sweep_cmd->add_flag("--no-runtime", no_runtime, "Leave out the runtime column");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Serve the environment over JSON lines");
  std::string transport = "stdio";
  int port = 5555;
  std::string host = "127.0.0.1";
  serve_cmd->add_option("--config", config_path, "TOML config file");
  serve_cmd->add_option("--seed", seed, "Seed used by a reset without one");
  serve_cmd->add_option("--transport", transport, "stdio | tcp")
      ->check(CLI::IsMember({"stdio", "tcp"}));
  serve_cmd->add_option("--port", port, "TCP port");
  serve_cmd->add_option("--host", host, "TCP listen address");

  // export-ilp
  auto* ilp_cmd = app.add_subcommand("export-ilp", "Write the set-packing model as an LP file");
  std::string scenario_path;
  ilp_cmd->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  ilp_cmd->add_option("--out", out_path, "LP file")->required();

  // scenario
  auto* scen_cmd = app.add_subcommand("scenario", "Generate a scenario JSON document");
  int realization = 0;
  scen_cmd->add_option("--config", config_path, "TOML config file");
  scen_cmd->add_option("--seed", seed, "Deployment seed");
  scen_cmd->add_option("--realization", realization, "Traffic and fading draw index");
  scen_cmd->add_option("--out", out_path, "Output path (default stdout)");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Exact optimum of a saved scenario");
  double time_limit = 60.0;
  solve_cmd->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  solve_cmd->add_option("--time-limit", time_limit, "Seconds before returning unproven");
  solve_cmd->add_option("--out", out_path, "Solution JSON (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const auto cfg = config_or_default(config_path);
      std::ofstream trace_out;
      noma::TraceSink sink;
      if (!trace_path.empty()) {
        trace_out = open_out(trace_path);
        sink = [&](const noma::Json& j) { trace_out << j.dump() << '\n'; };
      }
      const auto rec = noma::run(noma::parse_algo(algo), cfg, seed, sink);
      const noma::Json j{{"algo", rec.algo},
                         {"seed", rec.seed},
                         {"delivered", rec.delivered},
                         {"per_realization", rec.per_realization},
                         {"first_realization", rec.first_realization},
                         {"runtime_s", rec.runtime_s},
                         {"status", rec.status},
                         {"max_energy_spent", rec.max_energy_spent},
                         {"max_frame_delivered", rec.max_frame_delivered}};
      if (out_path.empty()) {
        std::cout << j.dump(2) << '\n';
      } else {
        open_out(out_path) << j.dump(2) << '\n';
      }
    } else if (*sweep_cmd) {
      noma::SweepSpec spec;
      spec.base = config_or_default(config_path);
      spec.param = noma::parse_sweep_param(param);
      spec.values = parse_int_list(values);
      spec.replications = reps;
      spec.base_seed = seed;
      spec.workers = workers;
      spec.algos.clear();
      std::stringstream names(algos);
      std::string name;
      while (std::getline(names, name, ',')) {
        if (!name.empty()) spec.algos.push_back(noma::parse_algo(name));
      }
      const auto rows = noma::sweep(spec, [](const noma::SweepRow& r) {
        std::cerr << r.param << '=' << r.value << ' ' << r.algo << " seed " << r.seed << ": "
                  << r.delivered << " (" << r.status << ")\n";
      });
      if (out_path.empty()) {
        noma::write_csv(std::cout, rows, !no_runtime);
      } else {
        auto out = open_out(out_path);
        noma::write_csv(out, rows, !no_runtime);
      }
      if (!summary_path.empty()) {
        open_out(summary_path) << noma::summary_json(spec, noma::summarize(rows)).dump(2) << '\n';
      }
    } else if (*serve_cmd) {
      noma::EnvSession session(config_or_default(config_path), seed);
      if (transport == "stdio") {
        noma::serve_stream(session, std::cin, std::cout);
      } else {
        noma::serve_tcp(session, port, host, [](int bound) {
          std::cerr << "listening on port " << bound << '\n';
        });
      }
    } else if (*ilp_cmd) {
      noma::export_ilp(noma::load_scenario(scenario_path), out_path);
    } else if (*scen_cmd) {
      const auto cfg = config_or_default(config_path);
      const noma::ScenarioStream stream(cfg.network, cfg.radio, cfg.traffic, seed);
      const auto scenario = stream.realization(realization);
      if (out_path.empty()) {
        std::cout << noma::to_json(scenario).dump(2) << '\n';
      } else {
        noma::save_scenario(scenario, out_path);
      }
    } else if (*solve_cmd) {
      const auto scenario = noma::load_scenario(scenario_path);
      noma::OptOptions options;
      options.time_limit_s = time_limit;
      const auto sol = noma::solve_offline(scenario, options);
      const auto j = noma::to_json(sol, scenario.config);
      if (out_path.empty()) {
        std::cout << j.dump(2) << '\n';
      } else {
        open_out(out_path) << j.dump(2) << '\n';
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
