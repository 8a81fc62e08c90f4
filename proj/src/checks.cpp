#include "bqm/checks.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "bqm/errors.hpp"
#include "bqm/green.hpp"
#include "bqm/runner.hpp"

namespace bqm {

namespace {

constexpr cplx I{0.0, 1.0};

class Suite {
 public:
  Suite(std::string name, std::uint64_t seed, double scale, std::vector<CheckResult>& out)
      : name_(std::move(name)), rng_(seed), scale_(scale), out_(out) {}

  void at_most(const std::string& check, double value, double tol) {
    const double bound = tol * scale_;
    out_.push_back({name_, check, value, "<= " + format_number(bound), value <= bound});
  }
  void exactly_zero(const std::string& check, double value) {
    out_.push_back({name_, check, value, "== 0", value == 0.0});
  }
  void positive(const std::string& check, double value) {
    out_.push_back({name_, check, value, "> 0", value > 0.0});
  }
  void at_least(const std::string& check, double value, double bound) {
    out_.push_back({name_, check, value, ">= " + format_number(bound), value >= bound});
  }

  ComplexDenseMatrix random_matrix(Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> d;
    ComplexDenseMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cplx(d(rng_), d(rng_));
    }
    return m;
  }
  ComplexVector random_vector(Eigen::Index n) { return random_matrix(n, 1).col(0); }
  std::size_t random_index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }

 private:
  std::string name_;
  std::mt19937_64 rng_;
  double scale_;
  std::vector<CheckResult>& out_;
};

double max_abs(const ComplexDenseMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

void algebra_suite(Suite& s) {
  s.exactly_zero("dirac-anticommutator-defect", anticommutator_defect(dirac_gammas()));
  s.positive("kg-gamma-anticommutator-defect", anticommutator_defect(kg_gammas()));

  const SpatialGrid1D grid(8, 2.0 * std::numbers::pi, Boundary::periodic);
  const MatrixOperator a = MatrixOperator::kron(s.random_matrix(3, 3), LinearGridOperator::derivative(1)) +
                           MatrixOperator::from_constant(s.random_matrix(3, 3));
  const MatrixOperator b = MatrixOperator::kron(s.random_matrix(3, 3), LinearGridOperator::laplacian()) +
                           MatrixOperator::diagonal(3, LinearGridOperator::scale([](double x) { return cplx(std::sin(x)); }));
  s.at_most("odot-vs-dense-product", max_abs(odot(a, b).to_dense(grid) - a.to_dense(grid) * b.to_dense(grid)), 1e-10);

  PointFrame frame{grid, {}};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    frame.matrices.push_back(s.random_matrix(3, 3) + 3.0 * ComplexDenseMatrix::Identity(3, 3));
  }
  const ComplexDenseMatrix f = MatrixOperator::from_point_matrices(frame.matrices).to_dense(grid);
  const ComplexDenseMatrix expected = f.inverse() * b.to_dense(grid) * f;
  s.at_most("matrix-in-basis-similarity", max_abs(matrix_in_basis(b, frame).to_dense(grid) - expected),
            1e-9 * std::max(1.0, max_abs(expected)));
}

void reduction_suite(Suite& s) {
  PhysicalParameters p;
  p.charge = 0.7;
  Potentials pot;
  pot.phi = [](double, double x) { return 0.3 * std::cos(x); };
  pot.a1 = [](double, double x) { return 0.2 * std::sin(x); };
  const SpatialGrid1D grid(16, 2.0 * std::numbers::pi, Boundary::periodic);

  const ComplexDenseMatrix hd = dirac_hamiltonian(p, pot).dense(grid, 0.0);
  s.at_most("dirac-hermiticity", max_abs(hd - hd.adjoint()), 1e-12);

  double dispersion = 0.0;
  for (double k : {0.0, 1.0, -2.5, 7.0}) {
    Eigen::SelfAdjointEigenSolver<ComplexDenseMatrix> es(dirac_symbol(p, k));
    const double e = std::hypot(p.hbar * k * p.c, p.mass * p.c * p.c);
    const Eigen::Vector4d want(-e, -e, e, e);
    dispersion = std::max(dispersion, (es.eigenvalues() - want).cwiseAbs().maxCoeff());
  }
  s.at_most("dirac-symbol-dispersion", dispersion, 1e-10);

  const ComplexDenseMatrix a = kg_nonrel_frame(p);
  const ComplexDenseMatrix a_big = MatrixOperator::from_constant(a).to_dense(grid);
  const ComplexDenseMatrix hc = kg_canonical_hamiltonian(p, pot).dense(grid, 0.0);
  const ComplexDenseMatrix hn = kg_nonrel_hamiltonian(p, pot).dense(grid, 0.0);
  s.at_most("kg-nonrel-gauge-equivalence", max_abs(hn - a_big * hc * a_big.inverse()), 1e-10 * max_abs(hn));

  // phi'' = -omega^2 phi against cos(omega t).
  const double omega = 2.0;
  LinearTimeSystem sys;
  sys.order = 2;
  sys.coefficients = {[omega](double) { return MatrixOperator::diagonal(1, LinearGridOperator::constant(-omega * omega)); },
                      [](double) { return MatrixOperator::zero(1); }};
  const SpatialGrid1D small(8, 1.0, Boundary::periodic);
  EvolutionProblem problem{companion_hamiltonian(sys, 1.0), small, 0.0, 1.0, 1e-4};
  GridFunction y(small, 2);
  y.component(0).setOnes();
  const GridFunction y1 = evolve(problem, y, 0.0, 1.0);
  s.at_most("companion-oscillator-relative-error", std::abs(y1(0, 0) - std::cos(omega)) / std::abs(std::cos(omega)),
            1e-6);
}

void evolution_suite(Suite& s) {
  const PhysicalParameters p;
  const SpatialGrid1D grid(64, 2.0 * std::numbers::pi, Boundary::periodic);
  EvolutionProblem problem{dirac_hamiltonian(p), grid, 0.0, 1.0, 1e-3};
  GridFunction psi(grid, 4, s.random_vector(256));
  psi *= cplx(1.0 / norm(psi));
  const GridFunction out = evolve(problem, psi, 0.0, 1.0);
  s.at_most("dirac-unitarity-1000-steps", std::abs(norm(out) - 1.0), 1e-8);

  PhysicalParameters q;
  q.charge = 1.0;
  Potentials pot;
  pot.phi = [](double t, double x) { return 0.4 * std::cos(x) * std::cos(t); };
  pot.time_independent = false;
  const SpatialGrid1D small(16, 2.0 * std::numbers::pi, Boundary::periodic);
  EvolutionProblem td{dirac_hamiltonian(q, pot), small, 0.0, 0.5, 0.01};
  const auto u20 = evolution_operator(td, 0.5, 0.0).matrix;
  const auto u21 = evolution_operator(td, 0.5, 0.2).matrix;
  const auto u10 = evolution_operator(td, 0.2, 0.0).matrix;
  s.at_most("composition-law", max_abs(u20 - u21 * u10), 1e-10);

  const SpatialGrid1D kg_grid(32, 2.0 * std::numbers::pi, Boundary::periodic);
  EvolutionProblem kg{kg_canonical_hamiltonian(p), kg_grid, 0.0, 1.0, 1e-3};
  GridFunction phi(kg_grid, 2, s.random_vector(64));
  const double q0 = kg_charge(phi);
  const double q1 = kg_charge(evolve(kg, phi, 0.0, 1.0));
  s.at_most("kg-charge-conservation", std::abs(q1 - q0), 1e-8 * std::max(1.0, std::abs(q0)));
}

void bundle_suite(Suite& s) {
  std::vector<ComplexDenseMatrix> frames;
  for (int k = 0; k < 12; ++k) frames.push_back(s.random_matrix(3, 3) + 3.0 * ComplexDenseMatrix::Identity(3, 3));
  const ComplexDenseMatrix d = s.random_matrix(3, 3) + 3.0 * ComplexDenseMatrix::Identity(3, 3);
  std::vector<ComplexDenseMatrix> gauged;
  for (const auto& f : frames) gauged.push_back(d * f);
  const auto k = transport_from_frames(frames);
  const auto kg = transport_from_frames(gauged);
  double composition = 0.0;
  double identity = 0.0;
  double gauge = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t l = s.random_index(frames.size());
    const std::size_t m = s.random_index(frames.size());
    const std::size_t n = s.random_index(frames.size());
    composition = std::max(composition, max_abs(k(n, m) * k(m, l) - k(n, l)));
    identity = std::max(identity, max_abs(k(l, l) - ComplexDenseMatrix::Identity(3, 3)));
    gauge = std::max(gauge, max_abs(kg(n, l) - k(n, l)));
  }
  s.at_most("transport-composition", composition, 1e-12);
  s.at_most("transport-identity", identity, 1e-12);
  s.at_most("frame-gauge-invariance", gauge, 1e-12);

  const Trivialization twist(
      2, [](const BasePoint& x) {
        ComplexDenseMatrix m(2, 2);
        m << std::exp(I * x.x0), 0.3 * std::sin(x.x1), 0.1 * x.x0, 2.0 + std::cos(x.x1);
        return m;
      });
  const BasePoint x{s.uniform(-1, 1), s.uniform(-1, 1)};
  const BasePoint y{s.uniform(-1, 1), s.uniform(-1, 1)};
  ComplexDenseMatrix chained = ComplexDenseMatrix::Identity(2, 2);
  BasePoint at = x;
  for (int hop = 0; hop < 5; ++hop) {
    const BasePoint next{s.uniform(-1, 1), s.uniform(-1, 1)};
    chained = flat_transport(twist, next, at) * chained;
    at = next;
  }
  chained = flat_transport(twist, y, at) * chained;
  s.at_most("flat-path-independence", max_abs(chained - flat_transport(twist, y, x)), 1e-12);

  const PhysicalParameters p;
  const SpatialGrid1D grid(8, 2.0 * std::numbers::pi, Boundary::periodic);
  const auto h = dirac_hamiltonian(p);
  const auto l = Trivialization::phase_field(4, 0, [](const BasePoint& b) { return std::sin(b.x1); }).on_grid(grid);
  {
    const double dt = 1e-5;
    EvolutionFamily family(EvolutionProblem{h, grid, 0.0, 4 * dt, dt});
    const auto path = PathSampling::at_rest(family.times(), 0.0);
    const auto transport = evolution_transport(family, l, path);
    const auto measured = transport_coefficients(transport);
    const auto expected = evolution_coefficients(h, grid, l, path);
    s.at_most("gamma-hamiltonian-relation", max_abs(measured.gamma[2] - expected[2]), 1e-8);
  }
  std::vector<double> residuals;
  const ComplexVector v = s.random_vector(32);
  for (double dt : {0.05, 0.025, 0.0125}) {
    EvolutionProblem problem{h, grid, 0.0, 1.0, dt};
    EvolutionFamily family(problem);
    const auto path = PathSampling::at_rest(family.times(), 0.0);
    const auto transport = evolution_transport(family, l, path);
    const auto lambda = transported_lifting(transport, v, 0);
    const TransportCoefficients co{family.times(), evolution_coefficients(h, grid, l, path)};
    residuals.push_back(
        derivation_along_path(transport, lambda, problem.lattice_index(0.5), DerivationMode::analytic, &co).norm());
  }
  s.at_least("derivation-convergence-order", std::log2(residuals[1] / residuals[2]), 0.9);
}

void green_suite(Suite& s) {
  const SpatialGrid1D grid(32, 2.0 * std::numbers::pi, Boundary::periodic);
  PhysicalParameters p;
  p.charge = 1.0;
  Potentials pot;
  pot.phi = [](double, double x) { return 0.5 * std::cos(x); };

  auto duality = [&](const HamiltonianFactory& h, std::size_t m, bool dirac) {
    const EigenBasis basis = eigenbasis(h, grid);
    const GreenKernel g = dirac ? retarded_green_dirac(basis, 0.5, 0.0) : retarded_green_schrodinger(basis, 0.5, 0.0);
    EvolutionProblem problem{h, grid, 0.0, 0.5, 0.05, Scheme::midpoint_exponential};
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      GridFunction psi(grid, m, s.random_vector(static_cast<Eigen::Index>(m * grid.size())));
      psi *= cplx(1.0 / norm(psi));
      worst = std::max(worst, norm(propagate_via_green(g, psi) - evolve(problem, psi, 0.0, 0.5)));
    }
    return std::pair{worst, basis};
  };

  const auto [schrodinger, sb] = duality(schrodinger_hamiltonian(p, pot), 1, false);
  s.at_most("schrodinger-duality-residual", schrodinger, 1e-8);
  s.at_most("schrodinger-completeness", sb.completeness_defect * grid.spacing(), 1e-10);
  const auto [dirac, db] = duality(dirac_hamiltonian(p, pot), 4, true);
  s.at_most("dirac-duality-residual", dirac, 1e-8);
  s.at_most("dirac-orthonormality", db.orthonormality_defect, 1e-10);

  const GreenKernel early = retarded_green_schrodinger(sb, 0.0, 0.5);
  s.exactly_zero("retarded-before-source", max_abs(early.matrix));
}

using SuiteFn = std::function<void(Suite&)>;

const std::vector<std::pair<std::string, SuiteFn>>& suites() {
  static const std::vector<std::pair<std::string, SuiteFn>> table{
      {"algebra", algebra_suite}, {"reduction", reduction_suite}, {"evolution", evolution_suite},
      {"bundle", bundle_suite},   {"green", green_suite}};
  return table;
}

}  // namespace

std::vector<std::string> available_suites() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : suites()) names.push_back(name);
  return names;
}

std::vector<CheckResult> run_suite(const std::string& name, std::uint64_t seed, double tolerance_scale) {
  std::vector<CheckResult> results;
  bool found = false;
  for (const auto& [suite_name, fn] : suites()) {
    if (name != "all" && name != suite_name) continue;
    found = true;
    Suite s(suite_name, seed, tolerance_scale, results);
    fn(s);
  }
  if (!found) {
    std::string list = "all";
    for (const auto& n : available_suites()) list += ", " + n;
    throw DomainError("unknown suite '" + name + "'; available suites: " + list);
  }
  return results;
}

}  // namespace bqm
