#include "bqm/green.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "bqm/errors.hpp"

namespace bqm {

namespace {

const cplx I{0.0, 1.0};

ComplexDenseMatrix zero_kernel(const SpatialGrid1D& grid, std::size_t components) {
  const auto d = static_cast<Eigen::Index>(grid.size() * components);
  return ComplexDenseMatrix::Zero(d, d);
}

// sum_a psi_a(x') psi_a(x)^* exp(-i E_a tau / hbar)
ComplexDenseMatrix spectral_sum(const EigenBasis& basis, double tau) {
  ComplexVector phase(basis.energies.size());
  for (Eigen::Index a = 0; a < phase.size(); ++a) phase[a] = std::exp(-I * basis.energies[a] * tau / basis.hbar);
  return basis.states * phase.asDiagonal() * basis.states.adjoint();
}

}  // namespace

std::string to_string(GreenEquation e) {
  switch (e) {
    case GreenEquation::schrodinger:
      return "schrodinger";
    case GreenEquation::dirac:
      return "dirac";
    case GreenEquation::kg:
      return "kg";
  }
  return "unknown";
}

ComplexDenseMatrix gamma0_on_grid(std::size_t points) {
  const auto n = static_cast<Eigen::Index>(points);
  ComplexDenseMatrix g = ComplexDenseMatrix::Zero(4 * n, 4 * n);
  g.diagonal().head(2 * n).setOnes();
  g.diagonal().tail(2 * n).setConstant(-1.0);
  return g;
}

GridFunction EigenBasis::state(std::size_t a) const {
  if (a >= static_cast<std::size_t>(states.cols())) throw DomainError("eigenstate index out of range");
  return GridFunction(grid, components, states.col(static_cast<Eigen::Index>(a)));
}

EigenBasis eigenbasis(const HamiltonianFactory& h, const SpatialGrid1D& grid) {
  if (!h.time_independent()) throw DomainError("eigenbasis needs a time-independent Hamiltonian");
  const std::size_t dim = h.dimension() * grid.size();
  if (dim > dense_limit) throw DimensionError("eigenbasis needs m*N <= " + std::to_string(dense_limit));
  const ComplexDenseMatrix m = h.dense(grid, 0.0);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw DomainError("eigenbasis needs a Hermitian Hamiltonian ('" + h.label() + "' is not)");
  }
  Eigen::SelfAdjointEigenSolver<ComplexDenseMatrix> solver(0.5 * (m + m.adjoint()));
  if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigensolve failed");
  const double hs = grid.spacing();
  EigenBasis basis{grid, h.dimension(), h.hbar(), solver.eigenvalues(), solver.eigenvectors() / std::sqrt(hs), 0.0, 0.0};
  const auto d = static_cast<Eigen::Index>(dim);
  const ComplexDenseMatrix id = ComplexDenseMatrix::Identity(d, d);
  basis.orthonormality_defect = (hs * basis.states.adjoint() * basis.states - id).cwiseAbs().maxCoeff();
  basis.completeness_defect = (basis.states * basis.states.adjoint() - id / hs).cwiseAbs().maxCoeff();
  return basis;
}

GreenKernel retarded_green_schrodinger(const EigenBasis& basis, double t_prime, double t) {
  GreenKernel g{t_prime, t, GreenEquation::schrodinger, basis.grid, basis.components, basis.hbar,
                zero_kernel(basis.grid, basis.components)};
  if (t_prime > t) g.matrix = spectral_sum(basis, t_prime - t) / (I * basis.hbar);
  return g;
}

GreenKernel retarded_green_dirac(const EigenBasis& basis, double t_prime, double t) {
  if (basis.components != 4) throw DimensionError("Dirac kernel needs a 4-component basis");
  GreenKernel g{t_prime, t, GreenEquation::dirac, basis.grid, 4, basis.hbar, zero_kernel(basis.grid, 4)};
  if (t_prime > t) g.matrix = spectral_sum(basis, t_prime - t) * gamma0_on_grid(basis.grid.size()) / (I * basis.hbar);
  return g;
}

GreenKernel retarded_green_from_evolution(const EvolutionProblem& problem, double t_prime, double t,
                                          GreenEquation equation) {
  if (equation == GreenEquation::kg) throw DomainError("use kg_scalar_green for Klein-Gordon kernels");
  const std::size_t m = problem.factory.dimension();
  if (equation == GreenEquation::dirac && m != 4) throw DimensionError("Dirac kernel needs a 4-component problem");
  GreenKernel g{t_prime, t, equation, problem.grid, m, problem.factory.hbar(), zero_kernel(problem.grid, m)};
  if (!(t_prime > t)) return g;
  ComplexDenseMatrix u = evolution_operator(problem, t_prime, t).matrix;
  if (equation == GreenEquation::dirac) u = u * gamma0_on_grid(problem.grid.size());
  g.matrix = u / (I * problem.factory.hbar() * problem.grid.spacing());
  return g;
}

GridFunction propagate_via_green(const GreenKernel& g, const GridFunction& psi) {
  if (!(g.t_prime > g.t)) throw DomainError("propagation via a retarded kernel needs t' > t");
  if (!(psi.grid() == g.grid)) throw DimensionError("state and kernel live on different grids");
  const double h = g.grid.spacing();
  if (g.equation == GreenEquation::kg) {
    if (psi.components() != 2) throw DimensionError("KG propagation needs the state (phi, dphi/dt)");
    if (g.matrix.cols() != psi.values().size()) throw DimensionError("KG kernel is not a two-component kernel");
    return GridFunction(g.grid, 1, h * (g.matrix * psi.values()));
  }
  if (psi.components() != g.components) throw DimensionError("state and kernel differ in component count");
  ComplexVector v = psi.values();
  if (g.equation == GreenEquation::dirac) v = gamma0_on_grid(g.grid.size()) * v;
  return GridFunction(g.grid, g.components, (I * g.hbar * h) * (g.matrix * v));
}

GreenKernel compose_kernels(const GreenKernel& later, const GreenKernel& earlier) {
  if (later.equation != earlier.equation || later.equation == GreenEquation::kg) {
    throw DomainError("kernel chaining needs two Schrodinger or two Dirac kernels");
  }
  if (!(later.grid == earlier.grid) || later.components != earlier.components) {
    throw DimensionError("chained kernels live on different spaces");
  }
  ComplexDenseMatrix mid = earlier.matrix;
  if (later.equation == GreenEquation::dirac) mid = gamma0_on_grid(later.grid.size()) * mid;
  GreenKernel out{later.t_prime, earlier.t, later.equation, later.grid, later.components, later.hbar,
                  (I * later.hbar * later.grid.spacing()) * (later.matrix * mid)};
  return out;
}

GreenKernel kg_scalar_green(const HamiltonianFactory& kg_canonical, const SpatialGrid1D& grid, double t_prime,
                            double t) {
  if (kg_canonical.dimension() != 2) throw DimensionError("scalar KG kernel needs the canonical 2-component form");
  if (!kg_canonical.time_independent()) throw DomainError("scalar KG kernel needs a time-independent Hamiltonian");
  GreenKernel g{t_prime, t, GreenEquation::kg, grid, 1, kg_canonical.hbar(), zero_kernel(grid, 1)};
  if (!(t_prime > t)) return g;
  const auto n = static_cast<Eigen::Index>(grid.size());
  const ComplexDenseMatrix gen = kg_canonical.dense(grid, 0.0) / (I * kg_canonical.hbar());
  const ComplexDenseMatrix u = (gen * (t_prime - t)).exp();
  if (!u.allFinite()) throw NumericalError("KG evolution exponential produced non-finite entries");
  g.matrix = u.block(0, n, n, n) / grid.spacing();
  return g;
}

GreenKernel kg_green_vector(const GreenKernel& before, const GreenKernel& at, const GreenKernel& after,
                            const ComplexVector& b) {
  for (const auto* g : {&before, &at, &after}) {
    if (g->equation != GreenEquation::kg || g->components != 1 || !(g->grid == at.grid)) {
      throw DimensionError("KG kernel vector needs three scalar KG kernels on one grid");
    }
    if (g->t_prime != at.t_prime) throw DomainError("KG kernel slices must share t'");
  }
  const double d1 = at.t - before.t;
  const double d2 = after.t - at.t;
  if (!(d1 > 0.0) || !(d2 > 0.0) || std::abs(d1 - d2) > 1e-9 * std::max(d1, d2)) {
    throw DomainError("KG kernel vector needs adjacent source slices t - delta, t, t + delta");
  }
  const auto n = static_cast<Eigen::Index>(at.grid.size());
  if (b.size() != n) throw DimensionError("coefficient b must have one sample per grid point");
  GreenKernel out{at.t_prime, at.t, GreenEquation::kg, at.grid, 1, at.hbar, ComplexDenseMatrix::Zero(n, 2 * n)};
  if (!(at.t_prime > at.t)) return out;
  const ComplexDenseMatrix dt = (after.matrix - before.matrix) / (d1 + d2);
  out.matrix.leftCols(n) = -dt - at.matrix * b.asDiagonal();
  out.matrix.rightCols(n) = at.matrix;
  return out;
}

GreenKernel kg_green_vector(const HamiltonianFactory& kg_canonical, const SpatialGrid1D& grid, double t_prime,
                            double t, double delta) {
  if (!(delta > 0.0)) throw DomainError("KG kernel vector needs delta > 0");
  const auto n = static_cast<Eigen::Index>(grid.size());
  const ComplexDenseMatrix h = kg_canonical.dense(grid, 0.0);
  const ComplexVector b = h.block(n, n, n, n).diagonal() / (I * kg_canonical.hbar());
  return kg_green_vector(kg_scalar_green(kg_canonical, grid, t_prime, t - delta),
                         kg_scalar_green(kg_canonical, grid, t_prime, t),
                         kg_scalar_green(kg_canonical, grid, t_prime, t + delta), b);
}

ComplexDenseMatrix slashed_potential(const SpatialGrid1D& grid, const Potentials& pot, double t) {
  const auto g = dirac_gammas();
  const std::size_t n = grid.size();
  const auto d = static_cast<Eigen::Index>(4 * n);
  ComplexDenseMatrix out = ComplexDenseMatrix::Zero(d, d);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = grid.x(j);
    const ComplexDenseMatrix s = g.gamma[0] * pot.phi_at(t, x) - g.gamma[1] * pot.a1_at(t, x);
    for (Eigen::Index a = 0; a < 4; ++a) {
      for (Eigen::Index c = 0; c < 4; ++c) {
        out(a * static_cast<Eigen::Index>(n) + static_cast<Eigen::Index>(j),
            c * static_cast<Eigen::Index>(n) + static_cast<Eigen::Index>(j)) = s(a, c);
      }
    }
  }
  return out;
}

GreenKernel born_series_green(const EigenBasis& free_dirac, double charge, const Potentials& pot, double t_prime,
                              double t, int terms, std::size_t intervals) {
  if (terms < 0) throw DomainError("Born series needs k >= 0 terms");
  if (terms > 3) throw DomainError("Born series is limited to k <= 3 terms");
  if (free_dirac.components != 4) throw DimensionError("Born series needs a free Dirac basis");
  if (!pot.time_independent) throw DomainError("Born series needs static potentials");
  GreenKernel out = retarded_green_dirac(free_dirac, t_prime, t);
  if (terms == 0 || !(t_prime > t)) return out;
  if (intervals < 1) throw DomainError("Born series needs at least one time interval");
  const std::size_t m = intervals;
  const double delta = (t_prime - t) / static_cast<double>(m);
  const double h = free_dirac.grid.spacing();
  // g0 at lag k*delta; lag 0 uses the limit from above, gamma^0 / (i hbar h).
  std::vector<ComplexDenseMatrix> g0(m + 1);
  const ComplexDenseMatrix gamma0 = gamma0_on_grid(free_dirac.grid.size());
  g0[0] = gamma0 / (I * free_dirac.hbar * h);
  for (std::size_t k = 1; k <= m; ++k) {
    g0[k] = spectral_sum(free_dirac, static_cast<double>(k) * delta) * gamma0 / (I * free_dirac.hbar);
  }
  const ComplexDenseMatrix v = (charge * h) * slashed_potential(free_dirac.grid, pot);
  // s[i] approximates g(t + i*delta, t).
  std::vector<ComplexDenseMatrix> s(g0);
  for (int k = 0; k < terms; ++k) {
    std::vector<ComplexDenseMatrix> vs(m + 1);
    for (std::size_t j = 0; j <= m; ++j) vs[j] = v * s[j];
    std::vector<ComplexDenseMatrix> next(m + 1);
    next[0] = g0[0];
    for (std::size_t i = 1; i <= m; ++i) {
      ComplexDenseMatrix acc = 0.5 * (g0[i] * vs[0] + g0[0] * vs[i]);
      for (std::size_t j = 1; j < i; ++j) acc += g0[i - j] * vs[j];
      next[i] = g0[i] + delta * acc;
    }
    s = std::move(next);
  }
  out.matrix = s[m];
  return out;
}

ComplexDenseMatrix green_morphism(const GreenKernel& g, const Trivialization& l, const PathSampling& path,
                                  std::size_t to, std::size_t from) {
  path.validate();
  if (to >= path.times.size() || from >= path.times.size()) throw DomainError("path sample index out of range");
  const double tol = 1e-9 * std::max(1.0, std::abs(g.t_prime) + std::abs(g.t));
  if (std::abs(path.times[to] - g.t_prime) > tol || std::abs(path.times[from] - g.t) > tol) {
    throw DomainError("kernel time pair does not match the path samples");
  }
  if (static_cast<Eigen::Index>(l.dimension()) != g.matrix.rows() || g.matrix.rows() != g.matrix.cols()) {
    throw DimensionError("trivialization does not act on the kernel's state space");
  }
  return l.inverse(path.points[to]) * g.matrix * l(path.points[from]);
}

}  // namespace bqm
