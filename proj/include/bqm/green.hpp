#pragma once

// Retarded Green kernels on the lattice: eigenfunction expansions for
// Schrodinger and Dirac, the two-component Klein-Gordon kernel, the Born
// series and Green morphisms.

#include <string>

#include "bqm/bundle.hpp"

namespace bqm {

enum class GreenEquation { schrodinger, dirac, kg };

std::string to_string(GreenEquation e);

/// Spectrum of a time-independent Hermitian Hamiltonian on a grid. Column a of
/// `states` holds psi_a on the flattened state space, normalized so that
/// h * sum |psi_a|^2 = 1.
struct EigenBasis {
  SpatialGrid1D grid;
  std::size_t components;
  double hbar;
  Eigen::VectorXd energies;
  ComplexDenseMatrix states;
  /// max |<psi_a|psi_b> - delta_ab|.
  double orthonormality_defect;
  /// max |sum_a psi_a psi_a^dagger - Id/h|.
  double completeness_defect;

  GridFunction state(std::size_t a) const;
};

EigenBasis eigenbasis(const HamiltonianFactory& h, const SpatialGrid1D& grid);

/// Kernel g(x', t'; x, t) between two time slices. Retarded: zero for t' <= t.
struct GreenKernel {
  double t_prime;
  double t;
  GreenEquation equation;
  SpatialGrid1D grid;
  std::size_t components;
  double hbar;
  ComplexDenseMatrix matrix;

  static constexpr const char* boundary = "retarded";
};

/// g = (1/(i hbar)) theta(t'-t) sum_a psi_a(x') psi_a(x)^* exp(-i E_a (t'-t)/hbar).
GreenKernel retarded_green_schrodinger(const EigenBasis& basis, double t_prime, double t);

/// Dirac kernel: the Schrodinger-type sum times gamma^0 on the right.
GreenKernel retarded_green_dirac(const EigenBasis& basis, double t_prime, double t);

/// Cross-check constructor: U(t', t) (times gamma^0 for Dirac) / (i hbar h) from time stepping.
GreenKernel retarded_green_from_evolution(const EvolutionProblem& problem, double t_prime, double t,
                                          GreenEquation equation);

/// schrodinger: i hbar h sum_x g psi; dirac: i hbar h sum_x g gamma^0 psi;
/// kg: h sum_x (g_phi phi + g_rate dphi/dt), returning the 1-component phi(t').
GridFunction propagate_via_green(const GreenKernel& g, const GridFunction& psi);

/// Kernel chaining: i hbar h g(t2, t1) [gamma^0] g(t1, t0).
GreenKernel compose_kernels(const GreenKernel& later, const GreenKernel& earlier);

/// Scalar KG kernel: the d(phi)/dt -> phi block of the canonical evolution
/// operator over t' - t, divided by h (exact matrix exponential).
GreenKernel kg_scalar_green(const HamiltonianFactory& kg_canonical, const SpatialGrid1D& grid, double t_prime,
                            double t);

/// Two-component KG kernel (-(d_t + b(x)) g, g) acting on (phi, dphi/dt), with
/// b = 2 e phi/(i hbar) and d_t the source-time derivative taken by a central
/// difference over the slices `before`, `at`, `after` (sources t-delta, t, t+delta).
GreenKernel kg_green_vector(const GreenKernel& before, const GreenKernel& at, const GreenKernel& after,
                            const ComplexVector& b);

/// Convenience: slices from kg_scalar_green with spacing delta, b read from H's (1,1) block.
GreenKernel kg_green_vector(const HamiltonianFactory& kg_canonical, const SpatialGrid1D& grid, double t_prime,
                            double t, double delta = 1e-5);

/// k-th partial sum of g = g0 + integral g0 (e/c) slashed-A g d^4y on a uniform
/// lattice of `intervals` steps between t and t' (trapezoid rule). The free
/// kernels come from the free Dirac eigenbasis; potentials must be static.
GreenKernel born_series_green(const EigenBasis& free_dirac, double charge, const Potentials& pot, double t_prime,
                              double t, int terms, std::size_t intervals);

/// Dense slashed A = gamma^0 phi - gamma^1 A^1 on the flattened 4-component state space.
ComplexDenseMatrix slashed_potential(const SpatialGrid1D& grid, const Potentials& pot, double t = 0.0);

/// G_gamma = l_{gamma(t')}^-1 g l_{gamma(t)} for the path samples `to`, `from`.
ComplexDenseMatrix green_morphism(const GreenKernel& g, const Trivialization& l, const PathSampling& path,
                                  std::size_t to, std::size_t from);

/// gamma^0 on the flattened 4-component state space.
ComplexDenseMatrix gamma0_on_grid(std::size_t points);

}  // namespace bqm
