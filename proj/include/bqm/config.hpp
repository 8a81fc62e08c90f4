#pragma once

// Run configuration: a sectioned key = value text format.
//
//   [equation]   type, mass, charge, hbar, c, order, coefficients, components
//   [grid]       points, length, boundary
//   [time]       start, stop, step, scheme
//   [initial]    kind, mode, spinor, width, center, momentum, component, samples
//   [potential]  kind, phi, a1, strength, center, phi-samples, a1-samples
//   [trivialization] kind, angle, amplitude, wavenumber, component
//   [output]     every, observables, directory
//
// '#' starts a comment. Keys are lowercase with hyphens.

#include <string>
#include <vector>

#include "bqm/grid.hpp"

namespace bqm {

struct EquationSpec {
  std::string type;  // schrodinger, dirac, dirac-free, kg-canonical, kg-nonrel, kg-5d, maxwell, zero, companion
  double mass = 1.0;
  double charge = 0.0;
  double hbar = 1.0;
  double c = 1.0;
  /// companion: constant scalar coefficients f_0 .. f_{n-1} of d^n phi/dt^n = sum f_i d^i phi/dt^i.
  std::vector<double> coefficients;
  /// zero: component count.
  std::size_t components = 1;

  bool operator==(const EquationSpec&) const = default;
};

struct GridSpec {
  std::size_t points = 0;
  double length = 0.0;
  Boundary boundary = Boundary::periodic;

  bool operator==(const GridSpec&) const = default;
};

struct TimeSpec {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;
  std::string scheme = "crank-nicolson";

  bool operator==(const TimeSpec&) const = default;
};

struct InitialSpec {
  std::string kind = "plane-wave";  // plane-wave, gaussian, samples
  int mode = 1;
  std::string spinor = "positive";  // positive, negative
  double width = 0.5;
  double center = 0.0;
  double momentum = 0.0;
  std::size_t component = 0;
  std::vector<cplx> samples;

  bool operator==(const InitialSpec&) const = default;
};

struct PotentialSpec {
  std::string kind = "none";  // none, constant, harmonic, samples
  double phi = 0.0;
  double a1 = 0.0;
  double strength = 0.0;
  double center = 0.0;
  std::vector<double> phi_samples;
  std::vector<double> a1_samples;

  bool operator==(const PotentialSpec&) const = default;
};

struct TrivializationSpec {
  std::string kind = "identity";  // identity, constant-unitary, phase-field
  double angle = 0.0;
  double amplitude = 0.0;
  double wavenumber = 1.0;
  std::size_t component = 0;

  bool operator==(const TrivializationSpec&) const = default;
};

struct OutputSpec {
  std::size_t every = 100;
  std::vector<std::string> observables;  // energy, charge, frequency, position
  std::string directory = ".";

  bool operator==(const OutputSpec&) const = default;
};

struct RunConfig {
  EquationSpec equation;
  GridSpec grid;
  TimeSpec time;
  InitialSpec initial;
  PotentialSpec potential;
  TrivializationSpec trivialization;
  OutputSpec output;

  bool operator==(const RunConfig&) const = default;
};

/// Parses and validates; throws ConfigError with line/column where applicable.
RunConfig parse_config(const std::string& text);

/// Canonical text form; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

/// Component count of the state for the configured equation.
std::size_t state_components(const RunConfig& config);

}  // namespace bqm
