#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bqm/errors.hpp"
#include "bqm/evolution.hpp"

using namespace bqm;
constexpr double pi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};

namespace {

double max_abs(const ComplexDenseMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("Crank-Nicolson phase of a constant Hamiltonian") {
  // Scalar H = E: one step multiplies by (1 - i E dt/2)/(1 + i E dt/2).
  const SpatialGrid1D grid(8, 1.0, Boundary::periodic);
  const double e = 2.5;
  const double dt = 0.1;
  EvolutionProblem problem{constant_hamiltonian(ComplexDenseMatrix::Constant(1, 1, e)), grid, 0.0, 1.0, dt};
  GridFunction psi(grid, 1);
  psi.values().setOnes();
  const GridFunction out = step(problem, psi, 0.0);
  const cplx factor = (1.0 - I * e * dt / 2.0) / (1.0 + I * e * dt / 2.0);
  CHECK(std::abs(out(0, 3) - factor) < 1e-14);

  problem.scheme = Scheme::midpoint_exponential;
  CHECK(std::abs(step(problem, psi, 0.0)(0, 3) - std::exp(-I * e * dt)) < 1e-14);
}

TEST_CASE("scalar phase converges at second order") {
  const SpatialGrid1D grid(8, 1.0, Boundary::periodic);
  const double e = 3.0;
  GridFunction psi(grid, 1);
  psi.values().setOnes();
  double prev = 0.0;
  for (double dt : {0.1, 0.05, 0.025}) {
    EvolutionProblem problem{constant_hamiltonian(ComplexDenseMatrix::Constant(1, 1, e)), grid, 0.0, 1.0, dt};
    const double err = std::abs(evolve(problem, psi, 0.0, 1.0)(0, 0) - std::exp(-I * e));
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("zero Hamiltonian leaves states unchanged") {
  const SpatialGrid1D grid(16, 1.0, Boundary::periodic);
  EvolutionProblem problem{zero_hamiltonian(3), grid, 0.0, 1.0, 0.1};
  auto psi = GridFunction::from_function(grid, 3, [](std::size_t a, double x) { return cplx(a + x, x * x); });
  CHECK(evolve(problem, psi, 0.0, 1.0).values() == psi.values());
}

TEST_CASE("evolution operators compose and invert") {
  PhysicalParameters p;
  p.charge = 1.0;
  Potentials pot;
  pot.phi = [](double t, double x) { return std::cos(x + t); };
  pot.time_independent = false;
  const SpatialGrid1D grid(16, 2 * pi, Boundary::periodic);
  EvolutionProblem problem{dirac_hamiltonian(p, pot), grid, 0.0, 0.4, 0.02};
  const auto u40 = evolution_operator(problem, 0.4, 0.0).matrix;
  const auto u41 = evolution_operator(problem, 0.4, 0.1).matrix;
  const auto u10 = evolution_operator(problem, 0.1, 0.0).matrix;
  CHECK(max_abs(u40 - u41 * u10) < 1e-12);
  CHECK(max_abs(evolution_operator(problem, 0.2, 0.2).matrix - ComplexDenseMatrix::Identity(64, 64)) == 0.0);
  CHECK(max_abs(evolution_operator(problem, 0.0, 0.4).matrix * u40 - ComplexDenseMatrix::Identity(64, 64)) < 1e-12);
  CHECK(max_abs(u40.adjoint() * u40 - ComplexDenseMatrix::Identity(64, 64)) < 1e-12);

  const EvolutionFamily family(problem);
  CHECK(family.size() == 21);
  CHECK(max_abs(family.between(family.index(0.4), family.index(0.1)) - u41) < 1e-12);
  CHECK_THROWS_AS(problem.lattice_index(0.013), DomainError);
}

TEST_CASE("time-independent operator by repeated squaring matches stepping") {
  const SpatialGrid1D grid(16, 2 * pi, Boundary::periodic);
  EvolutionProblem problem{schrodinger_hamiltonian({}), grid, 0.0, 1.0, 0.01};
  const auto u = evolution_operator(problem, 0.37, 0.0).matrix;
  GridFunction psi(grid, 1, ComplexVector::LinSpaced(16, 0.0, 1.0));
  const GridFunction stepped = evolve(problem, psi, 0.0, 0.37);
  CHECK((u * psi.values() - stepped.values()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("matrix-free stepping agrees with the dense step") {
  const SpatialGrid1D grid(1024, 2 * pi, Boundary::periodic);
  PhysicalParameters p;
  EvolutionProblem problem{kg_canonical_hamiltonian(p), grid, 0.0, 1.0, 1e-3};
  REQUIRE(problem.state_dimension() > dense_limit);
  auto psi = GridFunction::from_function(grid, 2, [](std::size_t a, double x) {
    return std::exp(-(x - pi) * (x - pi)) * cplx(a == 0 ? 1.0 : 0.0, a == 0 ? 0.0 : -1.0);
  });
  const double q0 = kg_charge(psi);
  const GridFunction out = evolve(problem, psi, 0.0, 0.01);
  CHECK(std::abs(kg_charge(out) - q0) < 1e-9 * std::abs(q0));

  const SpatialGrid1D small(64, 2 * pi, Boundary::periodic);
  EvolutionProblem dense_problem{kg_canonical_hamiltonian(p), small, 0.0, 1.0, 1e-3};
  auto chi = GridFunction::from_function(small, 2, [](std::size_t a, double x) { return cplx(std::sin(x + a)); });
  Stepper stepper(dense_problem);
  const ComplexVector dense = stepper.step_matrix(0.0) * chi.values();
  CHECK((dense - stepper.step(chi, 0.0).values()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("Dirac norm is conserved") {
  const SpatialGrid1D grid(32, 2 * pi, Boundary::periodic);
  EvolutionProblem problem{dirac_hamiltonian({}), grid, 0.0, 1.0, 0.01};
  auto psi = GridFunction::from_function(grid, 4, [](std::size_t a, double x) { return cplx(std::cos(x), a); });
  const double n0 = norm(psi);
  CHECK(std::abs(norm(evolve(problem, psi, 0.0, 1.0)) - n0) < 1e-11);
}

TEST_CASE("expectation values") {
  const SpatialGrid1D grid(32, 2 * pi, Boundary::periodic);
  PhysicalParameters p;
  p.mass = 0.5;
  const auto psi = GridFunction::from_function(grid, 1, [](std::size_t, double x) { return std::exp(I * 2.0 * x); });
  Observable energy{schrodinger_hamiltonian(p)(0.0), FibreProduct(1), true};
  CHECK(std::abs(expectation(energy, psi) - 4.0) < 1e-10);
}

TEST_CASE("KG charge of a plane wave") {
  // Q = i h sum (conj(phi) dphi - phi conj(dphi)) with dphi = -i w phi gives 2 w L.
  const SpatialGrid1D grid(16, 2.0, Boundary::periodic);
  const double w = 1.7;
  auto psi = GridFunction::from_function(grid, 2, [w](std::size_t a, double x) {
    const cplx f = std::exp(I * pi * x);
    return a == 0 ? f : -I * w * f;
  });
  CHECK(kg_charge(psi) == doctest::Approx(2.0 * w * 2.0));
}
