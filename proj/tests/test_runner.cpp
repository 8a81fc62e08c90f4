#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bqm/checks.hpp"
#include "bqm/errors.hpp"
#include "bqm/runner.hpp"

using namespace bqm;
namespace fs = std::filesystem;

namespace {

std::string out_dir(const std::string& name) { return (fs::temp_directory_path() / ("bqm_test_" + name)).string(); }

std::vector<std::string> lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

const char* grid_and_time = "[grid]\npoints = 16\nlength = 6.283185307179586\n[time]\nstop = 0.1\nstep = 0.01\n";

}  // namespace

TEST_CASE("dirac-free plane wave keeps its norm") {
  const RunConfig c = parse_config(std::string("equation = dirac-free\n") + grid_and_time +
                                   "[output]\nevery = 5\nobservables = energy\n");
  const RunReport r = run(c, RunOptions{out_dir("dirac"), 1.0});
  CHECK(r.rows.size() == 3);
  CHECK(r.failures.empty());
  CHECK(r.rows.back().residuals[0] <= 1e-8);
  // Positive-energy spinor for k = 1: E = sqrt(2).
  CHECK(r.rows.back().observables[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  const auto report = lines(out_dir("dirac") + "/report.csv");
  CHECK(report.front() == "t,norm,energy,norm-deviation");
  CHECK(report.size() == 4);
  const auto snaps = lines(out_dir("dirac") + "/snapshots.csv");
  CHECK(snaps.front() == "t,x,component,re,im");
  CHECK(snaps.size() == 1 + 3 * 4 * 16);
}

TEST_CASE("zero Hamiltonian snapshots repeat the initial state") {
  const RunConfig c = parse_config(std::string("[equation]\ntype = zero\ncomponents = 2\n") + grid_and_time +
                                   "[initial]\nkind = gaussian\ncenter = 2\ncomponent = 1\n[output]\nevery = 2\n");
  run(c, RunOptions{out_dir("zero"), 1.0});
  const auto snaps = lines(out_dir("zero") + "/snapshots.csv");
  const std::size_t per = 2 * 16;
  REQUIRE(snaps.size() == 1 + 6 * per);
  for (std::size_t s = 1; s < 6; ++s) {
    for (std::size_t i = 0; i < per; ++i) {
      const auto& a = snaps[1 + i];
      const auto& b = snaps[1 + s * per + i];
      CHECK(a.substr(a.find(',')) == b.substr(b.find(',')));
    }
  }
}

TEST_CASE("kg plane wave frequency and charge") {
  const RunConfig c = parse_config(
      "[equation]\ntype = kg-canonical\nmass = 1\n[grid]\npoints = 16\nlength = 6.283185307179586\n"
      "[time]\nstop = 1\nstep = 0.001\n[initial]\nmode = 2\n[output]\nevery = 500\nobservables = frequency, charge\n");
  const RunReport r = run(c, RunOptions{out_dir("kg"), 1.0});
  CHECK(r.failures.empty());
  const double omega = std::sqrt(4.0 + 1.0);
  CHECK(std::abs(r.rows.back().observables[0] - omega) / omega <= 1e-4);
  CHECK(r.residual_names == std::vector<std::string>{"norm-deviation", "charge-deviation"});
  CHECK(r.rows.back().residuals[1] <= 1e-8);
}

TEST_CASE("phase-field trivialization keeps the induced norm") {
  const RunConfig c = parse_config(std::string("equation = dirac\n[equation]\ncharge = 1\n") + grid_and_time +
                                   "[potential]\nkind = harmonic\nstrength = 0.5\ncenter = 3\n"
                                   "[trivialization]\nkind = phase-field\namplitude = 0.6\n"
                                   "[initial]\nkind = gaussian\ncenter = 3\nmomentum = 1\n");
  const RunReport r = run(c, RunOptions{out_dir("bundle"), 1.0});
  CHECK(r.failures.empty());
  CHECK(r.residual_names.back() == "bundle-norm-deviation");
  for (const auto& row : r.rows) {
    for (double v : row.residuals) CHECK(v >= 0.0);
  }
}

TEST_CASE("charge observable requires the canonical KG form") {
  const RunConfig c =
      parse_config(std::string("equation = dirac\n") + grid_and_time + "[output]\nobservables = charge\n");
  CHECK_THROWS_AS(run(c, RunOptions{out_dir("bad"), 1.0}), ConfigError);
}

TEST_CASE("off-lattice stop time is a config error") {
  const RunConfig c = parse_config(
      "equation = dirac\n[grid]\npoints = 16\nlength = 1\n[time]\nstop = 0.105\nstep = 0.01\n");
  CHECK_THROWS_AS(build_problem(c), ConfigError);
}

TEST_CASE("green subcommand checks duality and writes the kernel") {
  const RunConfig c = parse_config(
      "[equation]\ntype = schrodinger\ncharge = 1\n[grid]\npoints = 16\nlength = 6.283185307179586\n"
      "[time]\nstop = 0.5\nstep = 0.05\n[initial]\nkind = gaussian\ncenter = 3\n"
      "[potential]\nkind = harmonic\nstrength = 1\ncenter = 3\n");
  const GreenReport r = green(c, RunOptions{out_dir("green"), 1.0});
  CHECK(r.failures.empty());
  CHECK(r.duality_residual <= 1e-8);
  const auto k = lines(out_dir("green") + "/kernel.csv");
  CHECK(k.front() == "t_prime,t,row,col,re,im");
  CHECK(k.size() == 1 + 16 * 16);
}

TEST_CASE("reduce dumps the companion Hamiltonian") {
  const RunConfig c = parse_config(
      "[equation]\ntype = companion\ncoefficients = -4, 0.5\n[grid]\npoints = 8\nlength = 1\n[time]\nstop = 1\nstep = 0.1\n");
  reduce(c, RunOptions{out_dir("reduce"), 1.0});
  const auto csv = lines(out_dir("reduce") + "/hamiltonian.csv");
  CHECK(csv.front() == "row,col,re,im");
  // i*1 on (0,1), i*(-4) on (1,0), i*0.5 on (1,1): 3 * 8 nonzeros.
  CHECK(csv.size() == 1 + 24);
  CHECK(csv[1] == "0,8,0,1");
  const auto txt = lines(out_dir("reduce") + "/hamiltonian.txt");
  CHECK(txt.front().rfind("label ", 0) == 0);
}

TEST_CASE("check suites") {
  const auto algebra = run_suite("algebra");
  REQUIRE(!algebra.empty());
  CHECK(algebra.front().name == "dirac-anticommutator-defect");
  CHECK(algebra.front().value == 0.0);
  for (const auto& r : algebra) CHECK_MESSAGE(r.passed, r.name);
  for (const auto& r : run_suite("green", 3)) CHECK_MESSAGE(r.passed, r.name);
  try {
    run_suite("foo");
    FAIL("expected an error");
  } catch (const DomainError& e) {
    const std::string what = e.what();
    for (const auto& name : available_suites()) CHECK(what.find(name) != std::string::npos);
  }
}
