#pragma once

// Hamiltonian factories: companion reduction of higher-order equations,
// gauge frames, Dirac, the three Klein-Gordon forms, Maxwell and
// block-diagonal composites.

#include <functional>
#include <string>
#include <vector>

#include "bqm/algebra.hpp"

namespace bqm {

struct PhysicalParameters {
  double mass = 1.0;
  double charge = 0.0;
  double hbar = 1.0;
  double c = 1.0;
};

/// Real potential field of (t, x).
using Potential = std::function<double(double, double)>;

/// Electromagnetic potentials in 1D: scalar phi and the x-component A^1 of
/// the vector potential. Empty callables mean zero.
struct Potentials {
  Potential phi;
  Potential a1;
  bool time_independent = true;

  bool vanish() const noexcept { return !phi && !a1; }
  double phi_at(double t, double x) const { return phi ? phi(t, x) : 0.0; }
  double a1_at(double t, double x) const { return a1 ? a1(t, x) : 0.0; }
};

/// Produces H(t) for a Schrodinger-type system i hbar dpsi/dt = H(t) psi.
class HamiltonianFactory {
 public:
  using Builder = std::function<MatrixOperator(double)>;

  HamiltonianFactory(std::string label, std::size_t dimension, double hbar, bool time_independent,
                     Builder builder);

  const std::string& label() const noexcept { return label_; }
  std::size_t dimension() const noexcept { return dimension_; }
  double hbar() const noexcept { return hbar_; }
  bool time_independent() const noexcept { return time_independent_; }

  MatrixOperator operator()(double t) const;
  ComplexDenseMatrix dense(const SpatialGrid1D& grid, double t) const { return (*this)(t).to_dense(grid); }

 private:
  std::string label_;
  std::size_t dimension_;
  double hbar_;
  bool time_independent_;
  Builder builder_;
};

/// d^n phi/dt^n = sum_i f_i(t) d^i phi/dt^i, with phi of base_components
/// components and each f_i a base_components-square matrix operator.
struct LinearTimeSystem {
  std::size_t order = 0;
  std::size_t base_components = 1;
  std::vector<std::function<MatrixOperator(double)>> coefficients;
  bool time_independent = true;
};

/// Invertible fibre matrix A(t) acting on the full state vector (constant in x).
struct GaugeFrame {
  std::function<ComplexDenseMatrix(double)> matrix;
  /// dA/dt; finite-differenced with step 1e-6 * time_scale when empty.
  std::function<ComplexDenseMatrix(double)> derivative;
  double time_scale = 1.0;
  bool constant = false;

  ComplexDenseMatrix derivative_at(double t) const;
  /// 2-norm condition number of A(t).
  double condition_number(double t) const;
};

/// H = i hbar [[0, 1, 0, ...], ..., [f_0, f_1, ..., f_{n-1}]].
HamiltonianFactory companion_hamiltonian(const LinearTimeSystem& sys, double hbar);

/// H~ = A H A^-1 + i hbar (dA/dt) A^-1, so that A psi solves the transformed equation.
HamiltonianFactory gauge_transform(const HamiltonianFactory& h, const GaugeFrame& frame);

/// H_D = e phi + c alpha^1 (p - (e/c) A^1) + m c^2 beta, p = -i hbar d/dx.
HamiltonianFactory dirac_hamiltonian(const PhysicalParameters& p, const Potentials& pot = {});

/// Plane-wave symbol c alpha^1 hbar k + m c^2 beta.
ComplexDenseMatrix dirac_symbol(const PhysicalParameters& p, double k);

/// The scalar map f_0(t) of the Klein-Gordon equation solved for d^2 phi/dt^2.
LinearGridOperator kg_f0(const PhysicalParameters& p, const Potentials& pot, double t);

/// i hbar [[0, 1], [f_0, (2e/(i hbar)) phi]] acting on (phi, dphi/dt).
HamiltonianFactory kg_canonical_hamiltonian(const PhysicalParameters& p, const Potentials& pot = {});

/// The non-relativistic split acting on (phi + (i hbar/mc^2) dphi/dt, phi - (i hbar/mc^2) dphi/dt).
HamiltonianFactory kg_nonrel_hamiltonian(const PhysicalParameters& p, const Potentials& pot = {});

/// Constant frame taking the canonical KG state to the non-relativistic one.
ComplexDenseMatrix kg_nonrel_frame(const PhysicalParameters& p);

/// Free 5-component form acting on (m c^2 phi, dphi/dt, dphi/dx, 0, 0).
HamiltonianFactory kg_5d_hamiltonian(const PhysicalParameters& p);

/// Norm of (i hbar Gamma^mu d_mu - m c) varphi for the scaled 5-component
/// field built from the middle of three consecutive kg_5d states spaced dt.
double kg_5d_residual(const PhysicalParameters& p, const GridFunction& prev, const GridFunction& mid,
                      const GridFunction& next, double dt);

/// Curl blocks of Maxwell's equations acting on (E_y, E_z, H_y, H_z).
HamiltonianFactory maxwell_hamiltonian(const PhysicalParameters& p);

HamiltonianFactory block_diag_hamiltonian(const std::vector<HamiltonianFactory>& parts);

/// -hbar^2/(2m) d^2/dx^2 + e phi.
HamiltonianFactory schrodinger_hamiltonian(const PhysicalParameters& p, const Potentials& pot = {});

HamiltonianFactory zero_hamiltonian(std::size_t dimension, double hbar = 1.0);

/// Constant fibre matrix as Hamiltonian.
HamiltonianFactory constant_hamiltonian(const ComplexDenseMatrix& c, double hbar = 1.0);

}  // namespace bqm
