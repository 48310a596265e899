// hyperop: runs one scenario per invocation.
//
//   hyperop <derive|taylor|response|zubarev|dissipative|verify-all> [--config file]
//           [--out dir] [--format json|csv] [--seed n] [--threads n]
//   hyperop schema
//
// Exit status: 0 success, 1 task failure, 2 configuration error.
// HYPEROP_LOG sets the log level (trace, debug, info, warn, error, off).

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "qanalysis/scenario.hpp"

namespace {

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("hyperop");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("HYPEROP_LOG")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"Quantum derivative and response toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = ".";
  std::string format;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  std::vector<CLI::App*> task_commands;
  for (const std::string& task : qa::scenario_tasks()) {
    CLI::App* sub = app.add_subcommand(task, "Run the " + task + " scenario");
    sub->add_option("--config", config_path, "Scenario JSON (defaults when omitted)")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--seed", seed, "Seed, overrides the document");
    sub->add_option("--threads", threads, "Worker threads for frequency grids")
        ->check(CLI::PositiveNumber);
    task_commands.push_back(sub);
  }
  CLI::App* schema = app.add_subcommand("schema", "Print the scenario JSON schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (schema->parsed()) {
    std::cout << qa::scenario_schema().dump(2) << '\n';
    return 0;
  }

  for (CLI::App* sub : task_commands) {
    if (!sub->parsed()) continue;
    qa::ScenarioOverrides o;
    o.task = sub->get_name();
    o.out_dir = out_dir;
    if (sub->count("--seed")) o.seed = seed;
    if (sub->count("--format")) o.format = format;
    if (sub->count("--threads")) o.threads = threads;
    try {
      const qa::ScenarioConfig cfg = config_path.empty()
                                         ? qa::parse_scenario(nlohmann::json::object(), o)
                                         : qa::load_scenario(config_path, o);
      spdlog::info("{}: model with {} sites, seed {}", cfg.task, cfg.model.sites, cfg.seed);
      const qa::ScenarioOutcome outcome = qa::run_scenario(cfg);
      for (const auto& f : outcome.files) spdlog::info("wrote {}", f.string());
      if (outcome.status == 0) {
        spdlog::info("{}", outcome.summary);
      } else {
        spdlog::error("{}", outcome.summary);
      }
      return outcome.status;
    } catch (const qa::ConfigError& e) {
      spdlog::error("configuration error: {}", e.what());
      return 2;
    } catch (const std::exception& e) {
      spdlog::error("{}", e.what());
      return 1;
    }
  }
  return 2;
}
