#pragma once

// Run orchestration behind the CLI subcommands: building Hamiltonians, states
// and trivializations from a RunConfig, evolving, and writing CSV artifacts.

#include <string>
#include <vector>

#include "bqm/config.hpp"
#include "bqm/green.hpp"

namespace bqm {

struct RunOptions {
  std::string out_dir = ".";
  double tolerance_scale = 1.0;
};

struct ReportRow {
  double t;
  double norm;
  std::vector<double> observables;
  std::vector<double> residuals;
};

struct RunReport {
  std::vector<std::string> observable_names;
  std::vector<std::string> residual_names;
  std::vector<ReportRow> rows;
  double wall_seconds = 0.0;
  /// Invariant violations (empty when every check passed).
  std::vector<std::string> failures;
};

SpatialGrid1D build_grid(const RunConfig& config);
PhysicalParameters build_parameters(const RunConfig& config);
Potentials build_potentials(const RunConfig& config, const SpatialGrid1D& grid);
HamiltonianFactory build_hamiltonian(const RunConfig& config, const SpatialGrid1D& grid);
GridFunction build_initial_state(const RunConfig& config, const SpatialGrid1D& grid);
/// Fibre trivialization (dimension = state component count).
Trivialization build_trivialization(const RunConfig& config);
EvolutionProblem build_problem(const RunConfig& config);

/// Evolves the configured state and writes snapshots.csv, report.csv and summary.txt.
RunReport run(const RunConfig& config, const RunOptions& options);

struct GreenReport {
  double duality_residual = 0.0;
  double tolerance = 0.0;
  std::vector<std::string> failures;
};

/// Builds the retarded kernel between time.start and time.stop, writes kernel.csv
/// and checks propagation against exact (midpoint-exponential) evolution.
GreenReport green(const RunConfig& config, const RunOptions& options);

/// Writes hamiltonian.txt (operator structure) and hamiltonian.csv (dense matrix at time.start).
void reduce(const RunConfig& config, const RunOptions& options);

/// Shortest round-trip decimal form, locale independent.
std::string format_number(double v);

}  // namespace bqm
