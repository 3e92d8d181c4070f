///
/// Command-line front end.
///
///   parcone run <config>              dispatch a config file, write artifacts
///   parcone paper-suite               run the acceptance battery, print table
///   parcone check-embedding k=v ...   exact index admissibility verdict
///
/// Exit codes: 0 success, 2 validation error, 3 solver error; paper-suite
/// returns the number of failed criteria.
///

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "parcone/run_tasks.hpp"
#include "parcone/suite.hpp"

int main(int argc, char** argv) {
  CLI::App app{"parabolic identification toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* cmd_run = app.add_subcommand("run", "execute a config file");
  cmd_run->add_option("config", config_path, "path to the config")->required();

  CLI::App* cmd_suite =
      app.add_subcommand("paper-suite", "run the acceptance battery");

  std::vector<std::string> query;
  CLI::App* cmd_check = app.add_subcommand(
      "check-embedding", "exact admissibility check for an index tuple");
  cmd_check->add_option("query", query, "key=value pairs, rationals as a/b or inf")
      ->expected(-1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      const parcone::RunOutcome out = parcone::run_config_file(config_path);
      if (!out.printed.empty()) std::cout << out.printed << "\n";
      std::cerr << "wrote " << out.out_dir << "\n";
      return 0;
    }
    if (cmd_suite->parsed()) {
      const auto results = parcone::run_acceptance_suite();
      return parcone::print_suite_table(results, std::cout);
    }
    if (cmd_check->parsed()) {
      std::cout << parcone::check_embedding_tokens(query) << "\n";
      return 0;
    }
  } catch (const parcone::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const parcone::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
