#pragma once

// Fibre-bundle layer: trivializations, transports along paths and along the
// identity map, their coefficients and derivations, bundle Hamiltonians and
// the bundle Diracian.

#include <array>
#include <functional>
#include <vector>

#include "bqm/evolution.hpp"

namespace bqm {

/// Spacetime point with x0 = c t.
struct BasePoint {
  double x0 = 0.0;
  double x1 = 0.0;
};

/// Invertible maps l_x from the fibre over x to the standard fibre.
class Trivialization {
 public:
  using Field = std::function<ComplexDenseMatrix(const BasePoint&)>;

  /// `partials` are optional analytic d l / d x^mu for mu = 0, 1.
  Trivialization(std::size_t dimension, Field l, std::array<Field, 2> partials = {}, bool unitary = false);

  static Trivialization identity(std::size_t dimension);
  static Trivialization constant(const ComplexDenseMatrix& m);
  /// diag(..., e^{i theta(x)}, ...) on one component, identity elsewhere.
  static Trivialization phase_field(std::size_t dimension, std::size_t component,
                                    std::function<double(const BasePoint&)> theta,
                                    std::array<std::function<double(const BasePoint&)>, 2> dtheta = {});

  std::size_t dimension() const noexcept { return dimension_; }
  bool unitary() const noexcept { return unitary_; }
  bool has_analytic_partials() const noexcept { return partials_[0] && partials_[1]; }

  ComplexDenseMatrix operator()(const BasePoint& x) const;
  /// l_x^-1; throws SingularMatrixError naming x.
  ComplexDenseMatrix inverse(const BasePoint& x) const;
  /// d l / d x^mu, analytic when available, else central difference with step 1e-6.
  ComplexDenseMatrix partial(int mu, const BasePoint& x) const;

  /// Lift to the flattened state space of m-component fields on `grid`: at
  /// base point (x0, .) the block-diagonal map with l(x0, x_j) at point j.
  Trivialization on_grid(const SpatialGrid1D& grid) const;

 private:
  std::size_t dimension_;
  Field l_;
  std::array<Field, 2> partials_;
  bool unitary_;
};

/// Fibre product induced by l on a time slice: weight l^dagger l per grid point.
FibreProduct induced_product(const Trivialization& l, const SpatialGrid1D& grid, double x0);

/// Samples gamma(t_i) of a path, strictly increasing in t.
struct PathSampling {
  std::vector<double> times;
  std::vector<BasePoint> points;

  /// Observer at rest at x: gamma(t) = (c t, x).
  static PathSampling at_rest(const std::vector<double>& times, double x, double c = 1.0);
  void validate() const;
};

/// Two-point family K(to <- from) of fibre maps over sampled parameters.
class TransportAlongMap {
 public:
  using Pair = std::function<ComplexDenseMatrix(std::size_t, std::size_t)>;

  TransportAlongMap(std::vector<double> parameters, std::size_t dimension, Pair k);

  std::size_t samples() const noexcept { return parameters_.size(); }
  std::size_t dimension() const noexcept { return dimension_; }
  const std::vector<double>& parameters() const noexcept { return parameters_; }

  /// K from sample `from` to sample `to`.
  ComplexDenseMatrix operator()(std::size_t to, std::size_t from) const;

 private:
  std::vector<double> parameters_;
  std::size_t dimension_;
  Pair k_;
};

/// K(m <- l) = F_m^-1 F_l. Parameters default to 0, 1, 2, ...
TransportAlongMap transport_from_frames(const std::vector<ComplexDenseMatrix>& frames,
                                        std::vector<double> parameters = {});

/// U_gamma(t, s) = l_{gamma(t)}^-1 U(t, s) l_{gamma(s)} over the path samples.
/// The transport keeps a reference to `u`, which must outlive it.
TransportAlongMap evolution_transport(const EvolutionFamily& u, const Trivialization& l, const PathSampling& path);

/// L(y, x) = l_y^-1 l_x over the given points (parameters are the sample indices).
TransportAlongMap flat_transport(const Trivialization& l, const std::vector<BasePoint>& points);
ComplexDenseMatrix flat_transport(const Trivialization& l, const BasePoint& y, const BasePoint& x);

/// Gamma(s) = d K(s <- t) / dt at t = s.
enum class Stencil { central, forward, backward };

struct TransportCoefficients {
  std::vector<double> parameters;
  std::vector<ComplexDenseMatrix> gamma;
};

/// Coefficients by finite differences over the sample lattice (one-sided at the ends).
TransportCoefficients transport_coefficients(const TransportAlongMap& t, Stencil stencil = Stencil::central);

/// Gamma_mu(x) = l_x^-1 d_mu l_x, the coefficients of the flat transport.
ComplexDenseMatrix flat_coefficient(const Trivialization& l, const BasePoint& x, int mu);

/// Fibre values over sampled parameters.
struct Lifting {
  std::vector<double> parameters;
  std::vector<ComplexVector> values;
};

/// lambda(i) = K(i <- from) lambda0.
Lifting transported_lifting(const TransportAlongMap& t, const ComplexVector& value, std::size_t from);

enum class DerivationMode { limit, analytic };

/// limit: [K(s <- s+eps) lambda(s+eps) - lambda(s)] / eps (backward form at the last sample);
/// analytic: d lambda/ds + Gamma(s) lambda(s), with Gamma from `coefficients` if given.
ComplexVector derivation_along_path(const TransportAlongMap& t, const Lifting& lambda, std::size_t i,
                                    DerivationMode mode, const TransportCoefficients* coefficients = nullptr);

/// Psi(x) = l_x^-1 psi0 at each point; parameters are the sample indices.
Lifting transported_section(const ComplexVector& psi0, const Trivialization& l, const std::vector<BasePoint>& points);

/// D_mu Psi at sample i for a section sampled on points varying along x^mu only.
ComplexVector section_derivation(const Trivialization& l, const std::vector<BasePoint>& points,
                                 const Lifting& psi, std::size_t i, int mu);

/// l^-1 H(t) l at each path sample (state-space trivialization).
std::vector<ComplexDenseMatrix> bundle_hamiltonian(const HamiltonianFactory& h, const SpatialGrid1D& grid,
                                                   const Trivialization& l, const PathSampling& path);

/// Coefficients of the evolution transport implied by the bundle Hamiltonian:
/// (i/hbar) H_gamma + l^-1 dl/dt along the path.
std::vector<ComplexDenseMatrix> evolution_coefficients(const HamiltonianFactory& h, const SpatialGrid1D& grid,
                                                       const Trivialization& l, const PathSampling& path,
                                                       double c = 1.0);

/// G^mu(y) = l_y^-1 gamma^mu l_y.
std::array<ComplexDenseMatrix, 4> bundle_gammas(const Trivialization& l, const BasePoint& y);

/// D_x|_y = m c Id + (e/c) sum_mu G^mu(y) A_mu, with covariant A_mu = (phi, -A^1, 0, 0).
ComplexDenseMatrix bundle_diracian(const PhysicalParameters& p, const std::array<double, 4>& a_mu,
                                   const Trivialization& l, const BasePoint& y);

/// Norm of i hbar G^mu d_mu Psi - D Psi on the middle of three time slices of a
/// bundle section (fibre components w.r.t. l), slices spaced dt, middle at t.
double bundle_diracian_residual(const PhysicalParameters& p, const Potentials& pot, const Trivialization& l,
                                const GridFunction& prev, const GridFunction& mid, const GridFunction& next,
                                double t, double dt);

}  // namespace bqm
