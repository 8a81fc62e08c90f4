#pragma once

// Time stepping of i hbar dpsi/dt = H(t) psi, dense evolution operators and
// mean values of observables.

#include <cstddef>
#include <map>
#include <memory>
#include <vector>

#include "bqm/reduction.hpp"

namespace bqm {

enum class Scheme { crank_nicolson, midpoint_exponential };

/// Largest flattened state dimension m*N for which dense matrices are assembled.
inline constexpr std::size_t dense_limit = 1024;

struct EvolutionProblem {
  HamiltonianFactory factory;
  SpatialGrid1D grid;
  double t0 = 0.0;
  double t1 = 1.0;
  double dt = 1e-3;
  Scheme scheme = Scheme::crank_nicolson;

  std::size_t state_dimension() const noexcept { return factory.dimension() * grid.size(); }
  /// Number of steps from t0 to t (t must sit on the step lattice).
  std::size_t lattice_index(double t) const;
  double lattice_time(std::size_t i) const noexcept { return t0 + static_cast<double>(i) * dt; }
};

/// One-step propagator with a cache for time-independent Hamiltonians.
class Stepper {
 public:
  explicit Stepper(EvolutionProblem problem);

  const EvolutionProblem& problem() const noexcept { return problem_; }

  /// State after one step starting at time t.
  ComplexVector step(const ComplexVector& psi, double t);
  GridFunction step(const GridFunction& psi, double t);

  /// Dense one-step matrix for the step starting at t (m*N <= dense_limit).
  const ComplexDenseMatrix& step_matrix(double t);

 private:
  ComplexVector matrix_free_step(const ComplexVector& psi, double t) const;

  EvolutionProblem problem_;
  std::map<double, ComplexDenseMatrix> cache_;
};

GridFunction step(const EvolutionProblem& problem, const GridFunction& psi, double t);

/// Evolves psi from lattice time `from` to lattice time `to` (to >= from).
GridFunction evolve(const EvolutionProblem& problem, const GridFunction& psi, double from, double to);

struct EvolutionOperator {
  double t;
  double s;
  ComplexDenseMatrix matrix;
};

/// U(t, s) on the flattened state space; U(s, s) is exactly the identity.
/// For t < s the inverse of U(s, t) is returned.
EvolutionOperator evolution_operator(const EvolutionProblem& problem, double t, double s);

/// Step matrices over the whole lattice t0..t1, giving U(t_i, t_j) for any pair.
class EvolutionFamily {
 public:
  explicit EvolutionFamily(const EvolutionProblem& problem);

  std::size_t size() const noexcept { return steps_.size() + 1; }
  double time(std::size_t i) const noexcept { return times_[i]; }
  const std::vector<double>& times() const noexcept { return times_; }
  std::size_t dimension() const noexcept { return dimension_; }
  /// Index of lattice time t.
  std::size_t index(double t) const;

  /// U(t_i, t_j).
  ComplexDenseMatrix between(std::size_t i, std::size_t j) const;

 private:
  std::vector<double> times_;
  std::vector<ComplexDenseMatrix> steps_;
  std::vector<ComplexDenseMatrix> inverse_steps_;
  std::size_t dimension_;
};

struct Observable {
  MatrixOperator op;
  FibreProduct product;
  bool hermitian = false;
};

/// <psi|A psi> / <psi|psi>.
cplx expectation(const Observable& obs, const GridFunction& psi);

/// Conserved charge i * integral(conj(phi) dphi/dt - phi conj(dphi/dt)) of a
/// canonical KG state (phi, dphi/dt).
double kg_charge(const GridFunction& psi);

}  // namespace bqm
