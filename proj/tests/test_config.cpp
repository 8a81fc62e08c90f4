#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bqm/config.hpp"
#include "bqm/errors.hpp"

using namespace bqm;

namespace {

const char* minimal = R"(equation = dirac-free
[grid]
points = 16
length = 2
[time]
stop = 1
step = 0.01
)";

}  // namespace

TEST_CASE("minimal config gets defaults") {
  const RunConfig c = parse_config(minimal);
  CHECK(c.equation.type == "dirac-free");
  CHECK(c.equation.mass == 1.0);
  CHECK(c.equation.hbar == 1.0);
  CHECK(c.grid.points == 16);
  CHECK(c.grid.boundary == Boundary::periodic);
  CHECK(c.time.start == 0.0);
  CHECK(c.time.scheme == "crank-nicolson");
  CHECK(c.initial.kind == "plane-wave");
  CHECK(c.potential.kind == "none");
  CHECK(c.trivialization.kind == "identity");
  CHECK(c.output.every == 100);
  CHECK(state_components(c) == 4);
}

TEST_CASE("misspelled key names the key and the line") {
  const std::string text = "equation = dirac-free\n[grid]\npoints = 16\nlength = 1\nboundry = periodic\n[time]\nstop = 1\nstep = 0.1\n";
  try {
    parse_config(text);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 5);
    CHECK(std::string(e.what()).find("boundry") != std::string::npos);
    CHECK(std::string(e.what()).find("line 5") != std::string::npos);
  }
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse_config("equation = dirac\n[grid]\npoints 16\n");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() >= 1);
  }
  try {
    parse_config("equation = dirac\n[grid]\npoints = 16\nlength = abc\n");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 4);
    CHECK(e.column() == 10);
  }
  CHECK_THROWS_AS(parse_config("[nowhere]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(std::string(minimal) + "[grid]\npoints = 32\n"), ConfigError);
}

TEST_CASE("missing and inconsistent settings are rejected") {
  CHECK_THROWS_AS(parse_config("equation = dirac\n[grid]\npoints = 16\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("equation = dirac\n[grid]\npoints = 12\nlength = 1\n[time]\nstop = 1\nstep = 0.1\n"),
                  ConfigError);
  CHECK_NOTHROW(parse_config("equation = dirac\n[grid]\npoints = 12\nlength = 1\nboundary = reflecting\n"
                             "[time]\nstop = 1\nstep = 0.1\n"));
  CHECK_THROWS_AS(parse_config(std::string(minimal) + "[initial]\nkind = samples\nsamples = 1, 2, 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(std::string(minimal) + "[potential]\nkind = samples\nphi-samples = 1, 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("equation = schrodinger\n[equation]\nmass = 0\n[grid]\npoints = 16\nlength = 1\n"
                               "[time]\nstop = 1\nstep = 0.1\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("equation = dirac\n[grid]\npoints = 16\nlength = 1\n[time]\nstop = 1\nstep = 0\n"),
                  ConfigError);
}

TEST_CASE("emit then parse is the identity") {
  const std::string text = R"(# everything set
[equation]
type = dirac
mass = 0.75
charge = -1.25
hbar = 1
c = 2.5
[grid]
points = 8
length = 3.141592653589793
boundary = periodic
[time]
start = 0.1
stop = 0.6
step = 0.005
scheme = midpoint-exponential
[initial]
kind = samples
samples = 1:0, 0:1, -0.5:0.25, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 2:-2, 0, 0, 0, 0, 0, 0, 0.1
[potential]
kind = samples
phi-samples = 0, 0.1, 0.2, 0.30000000000000004, 0.4, 0.5, 0.6, 0.7
a1-samples = 1, 1, 1, 1, 1, 1, 1, 1e-300
[trivialization]
kind = phase-field
amplitude = 0.3
wavenumber = 2
component = 3
[output]
every = 7
observables = energy, position
directory = out/run 1
)";
  const RunConfig c = parse_config(text);
  CHECK(c.initial.samples[2] == cplx(-0.5, 0.25));
  CHECK(c.output.directory == "out/run 1");
  const std::string emitted = emit_config(c);
  const RunConfig again = parse_config(emitted);
  CHECK(again == c);
  CHECK(emit_config(again) == emitted);
  CHECK(parse_config(emit_config(parse_config(minimal))) == parse_config(minimal));
}
