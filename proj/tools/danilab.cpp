// danilab <subcommand> --config <path> [--assert <baseline>] [--threads N]
//
// Exit status: 0 success, 2 parse/validation failure, 3 runtime failure,
// 4 baseline assertion failure.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "danilab/errors.hpp"
#include "danilab/experiment.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw danilab::ValidationError("config", "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments on Dirichlet improvability, lattice flows and their representations"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string assert_path;
  int threads = 1;
  for (const auto& name : danilab::subcommand_names()) {
    CLI::App* sub = app.add_subcommand(name, "run an experiment of kind " + name);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--assert", assert_path, "baseline file of checks against the records");
    sub->add_option("--threads", threads, "worker threads for sampling loops")
        ->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? danilab::exit_code::ok : danilab::exit_code::validation;
  }
  const std::string requested = app.get_subcommands().front()->get_name();

  danilab::ExperimentConfig config;
  try {
    config = danilab::parse_config(slurp(config_path));
    if (danilab::to_string(config.subcommand) != requested) {
      throw danilab::ValidationError("subcommand", "subcommand: config is for '" +
                                                       danilab::to_string(config.subcommand) +
                                                       "' but '" + requested + "' was requested");
    }
  } catch (const danilab::ParseError& e) {
    std::cerr << "danilab: " << e.what() << '\n';
    return danilab::exit_code::validation;
  } catch (const danilab::ValidationError& e) {
    std::cerr << "danilab: invalid config: " << e.what() << '\n';
    return danilab::exit_code::validation;
  }

  nlohmann::json baseline;
  if (!assert_path.empty()) {
    try {
      baseline = nlohmann::json::parse(slurp(assert_path));
    } catch (const std::exception& e) {
      std::cerr << "danilab: unreadable baseline: " << e.what() << '\n';
      return danilab::exit_code::validation;
    }
  }

  std::vector<danilab::RunRecord> records;
  try {
    records = danilab::run(config, threads);
  } catch (const std::exception& e) {
    std::cerr << "danilab: run failed: " << e.what() << '\n';
    return danilab::exit_code::runtime;
  }
  std::cout << "wrote " << records.size() << " records to " << config.output << ".jsonl\n";

  if (!assert_path.empty()) {
    danilab::AssertionReport report;
    try {
      report = danilab::check_baseline(baseline, records);
    } catch (const danilab::ValidationError& e) {
      std::cerr << "danilab: invalid baseline: " << e.what() << '\n';
      return danilab::exit_code::validation;
    }
    for (const auto& f : report.failures) std::cerr << "assertion failed: " << f << '\n';
    if (!report.passed) return danilab::exit_code::assertion;
    std::cout << "all baseline checks passed\n";
  }
  return danilab::exit_code::ok;
}
