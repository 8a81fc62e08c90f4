// bqm: run, check, green and reduce front end.
//
// Exit codes: 0 success, 1 invariant failure, 2 config error, 3 numerical failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bqm/checks.hpp"
#include "bqm/errors.hpp"
#include "bqm/runner.hpp"

namespace {

bqm::RunConfig load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw bqm::ConfigError("cannot read config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return bqm::parse_config(text.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bundle quantum mechanics on 1D lattices"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out;
  std::uint64_t seed = 1;
  double tolerance_scale = 1.0;
  app.add_option("--out", out, "Output directory (overrides [output] directory)");
  app.add_option("--seed", seed, "Seed for randomized property suites");
  app.add_option("--tolerance-scale", tolerance_scale, "Multiplier applied to every invariant tolerance")
      ->check(CLI::PositiveNumber);

  std::string config_path;
  std::string suite;
  auto* run = app.add_subcommand("run", "Evolve a configured state and write snapshots and a report");
  run->add_option("config", config_path, "Config file")->required();
  auto* check = app.add_subcommand("check", "Run an invariant suite");
  check->add_option("suite", suite, "algebra, reduction, evolution, bundle, green or all")->required();
  auto* green = app.add_subcommand("green", "Build the retarded kernel and check it against evolution");
  green->add_option("config", config_path, "Config file")->required();
  auto* reduce = app.add_subcommand("reduce", "Dump the first-order Hamiltonian of the configured equation");
  reduce->add_option("config", config_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (check->parsed()) {
      const auto results = bqm::run_suite(suite, seed, tolerance_scale);
      bool ok = true;
      for (const auto& r : results) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.suite << ' ' << r.name << " = " << bqm::format_number(r.value)
                  << " (" << r.condition << ")\n";
        ok = ok && r.passed;
      }
      return ok ? 0 : 1;
    }

    const bqm::RunConfig config = load(config_path);
    bqm::RunOptions options{out.empty() ? config.output.directory : out, tolerance_scale};

    if (run->parsed()) {
      const auto report = bqm::run(config, options);
      std::cout << "snapshots " << report.rows.size() << ", final norm " << bqm::format_number(report.rows.back().norm)
                << '\n';
      for (const auto& f : report.failures) std::cerr << "invariant failure: " << f << '\n';
      return report.failures.empty() ? 0 : 1;
    }
    if (green->parsed()) {
      const auto report = bqm::green(config, options);
      std::cout << "duality residual " << bqm::format_number(report.duality_residual) << " (<= "
                << bqm::format_number(report.tolerance) << ")\n";
      for (const auto& f : report.failures) std::cerr << "invariant failure: " << f << '\n';
      return report.failures.empty() ? 0 : 1;
    }
    bqm::reduce(config, options);
    return 0;
  } catch (const bqm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const bqm::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const bqm::DimensionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
}
