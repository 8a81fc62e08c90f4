#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bqm/errors.hpp"
#include "bqm/green.hpp"

using namespace bqm;
constexpr double pi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};

namespace {

double max_abs(const ComplexDenseMatrix& m) { return m.cwiseAbs().maxCoeff(); }

const SpatialGrid1D ring(16, 2 * pi, Boundary::periodic);

}  // namespace

TEST_CASE("free Schrodinger kernel on a ring is the plane-wave sum") {
  PhysicalParameters p;
  const EigenBasis basis = eigenbasis(schrodinger_hamiltonian(p), ring);
  CHECK(basis.orthonormality_defect < 1e-12);
  CHECK(basis.completeness_defect * ring.spacing() < 1e-12);
  const GreenKernel g = retarded_green_schrodinger(basis, 0.3, 0.1);
  // Oracle: (1/(i L)) sum_q e^{i k_q (x' - x)} e^{-i k_q^2 tau / 2}, spectral kinetic energy k^2/2
  // with the Nyquist mode at (N/2)^2 / 2.
  const double tau = 0.2;
  for (int r : {0, 3, 9}) {
    for (int c : {0, 5, 15}) {
      cplx sum = 0.0;
      for (std::size_t q = 0; q < 16; ++q) {
        const double k = ring.wavenumber(q);
        sum += std::exp(I * k * (ring.x(r) - ring.x(c)) - I * 0.5 * k * k * tau);
      }
      CHECK(std::abs(g.matrix(r, c) - sum / (I * 2.0 * pi)) < 1e-12);
    }
  }
  CHECK(std::string(GreenKernel::boundary) == "retarded");
  CHECK(max_abs(retarded_green_schrodinger(basis, 0.1, 0.3).matrix) == 0.0);
  CHECK(max_abs(retarded_green_schrodinger(basis, 0.1, 0.1).matrix) == 0.0);
}

TEST_CASE("kernel propagation matches exact evolution and evolution-built kernels") {
  PhysicalParameters p;
  p.charge = 1.0;
  Potentials pot;
  pot.phi = [](double, double x) { return std::cos(x); };
  const auto h = schrodinger_hamiltonian(p, pot);
  const EigenBasis basis = eigenbasis(h, ring);
  const GreenKernel g = retarded_green_schrodinger(basis, 0.4, 0.0);
  auto psi = GridFunction::from_function(ring, 1, [](std::size_t, double x) { return std::exp(-(x - 3) * (x - 3)); });
  EvolutionProblem exact{h, ring, 0.0, 0.4, 0.1, Scheme::midpoint_exponential};
  CHECK(norm(propagate_via_green(g, psi) - evolve(exact, psi, 0.0, 0.4)) < 1e-11);
  const GreenKernel ge = retarded_green_from_evolution(exact, 0.4, 0.0, GreenEquation::schrodinger);
  CHECK(max_abs(ge.matrix - g.matrix) < 1e-10);
}

TEST_CASE("kernels compose through the intermediate slice") {
  PhysicalParameters p;
  const EigenBasis basis = eigenbasis(dirac_hamiltonian(p), ring);
  const GreenKernel g20 = retarded_green_dirac(basis, 0.5, 0.0);
  const GreenKernel g21 = retarded_green_dirac(basis, 0.5, 0.2);
  const GreenKernel g10 = retarded_green_dirac(basis, 0.2, 0.0);
  CHECK(max_abs(compose_kernels(g21, g10).matrix - g20.matrix) < 1e-10);
  CHECK(to_string(g20.equation) == "dirac");
}

TEST_CASE("Dirac kernel carries gamma^0") {
  PhysicalParameters p;
  const auto h = dirac_hamiltonian(p);
  const EigenBasis basis = eigenbasis(h, ring);
  const GreenKernel g = retarded_green_dirac(basis, 0.3, 0.0);
  EvolutionProblem exact{h, ring, 0.0, 0.3, 0.1, Scheme::midpoint_exponential};
  const ComplexDenseMatrix u = evolution_operator(exact, 0.3, 0.0).matrix;
  const double h_x = ring.spacing();
  CHECK(max_abs(g.matrix - u * gamma0_on_grid(16) / (I * h_x)) < 1e-10);
}

TEST_CASE("non-Hermitian Hamiltonians are rejected by the eigenbasis") {
  CHECK_THROWS(eigenbasis(kg_canonical_hamiltonian({}), ring));
}

TEST_CASE("KG kernel vector propagates phi from (phi, dphi/dt)") {
  PhysicalParameters p;
  p.charge = 0.5;
  Potentials pot;
  pot.phi = [](double, double x) { return 0.3 * std::sin(x); };
  const auto h = kg_canonical_hamiltonian(p, pot);
  const GreenKernel gv = kg_green_vector(h, ring, 0.6, 0.1);
  CHECK(gv.matrix.rows() == 16);
  CHECK(gv.matrix.cols() == 32);
  auto state = GridFunction::from_function(ring, 2, [](std::size_t a, double x) {
    return a == 0 ? cplx(std::cos(x)) : cplx(0.0, std::sin(2 * x));
  });
  EvolutionProblem exact{h, ring, 0.1, 0.6, 0.1, Scheme::midpoint_exponential};
  const GridFunction evolved = evolve(exact, state, 0.1, 0.6);
  const GridFunction phi = propagate_via_green(gv, state);
  CHECK(phi.components() == 1);
  CHECK((phi.component(0) - evolved.component(0)).cwiseAbs().maxCoeff() < 1e-7);

  // The scalar kernel solves the KG equation in t' with g(t' = t+) = 0, d_t' g = delta.
  const GreenKernel g0 = kg_scalar_green(h, ring, 0.1 + 1e-7, 0.1);
  CHECK(max_abs(g0.matrix) < 1e-5 / ring.spacing());
}

TEST_CASE("Born series converges to the exact kernel") {
  const SpatialGrid1D grid(8, 2 * pi, Boundary::periodic);
  PhysicalParameters p;
  p.charge = 1.0;
  Potentials pot;
  pot.phi = [](double, double x) { return 0.2 * std::cos(x); };
  const EigenBasis free_basis = eigenbasis(dirac_hamiltonian(p), grid);
  const GreenKernel exact = retarded_green_dirac(eigenbasis(dirac_hamiltonian(p, pot), grid), 0.4, 0.0);
  double prev = 1e300;
  for (int k = 0; k <= 3; ++k) {
    const double d = max_abs(born_series_green(free_basis, 1.0, pot, 0.4, 0.0, k, 100).matrix - exact.matrix);
    CHECK(d < prev);
    prev = d;
  }
  CHECK(max_abs(born_series_green(free_basis, 1.0, pot, 0.4, 0.0, 0, 100).matrix -
                retarded_green_dirac(free_basis, 0.4, 0.0).matrix) == 0.0);
  CHECK_THROWS_AS(born_series_green(free_basis, 1.0, pot, 0.4, 0.0, 4, 100), DomainError);
}

TEST_CASE("slashed potential and Green morphisms") {
  Potentials pot;
  pot.phi = [](double, double) { return 2.0; };
  pot.a1 = [](double, double) { return 0.5; };
  const SpatialGrid1D grid(8, 1.0, Boundary::periodic);
  const ComplexDenseMatrix a = slashed_potential(grid, pot);
  const auto g = dirac_gammas();
  const ComplexDenseMatrix point = 2.0 * g.gamma[0] - 0.5 * g.gamma[1];
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) CHECK(a(r * 8 + 3, c * 8 + 3) == point(r, c));
  }

  PhysicalParameters p;
  const EigenBasis basis = eigenbasis(dirac_hamiltonian(p), ring);
  const GreenKernel gk = retarded_green_dirac(basis, 0.2, 0.0);
  const auto l = Trivialization::identity(4).on_grid(ring);
  const auto path = PathSampling::at_rest({0.0, 0.1, 0.2}, 0.0);
  CHECK(max_abs(green_morphism(gk, l, path, 2, 0) - gk.matrix) < 1e-15);
}
