#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bqm/bundle.hpp"
#include "bqm/errors.hpp"

using namespace bqm;
constexpr double pi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};

namespace {

double max_abs(const ComplexDenseMatrix& m) { return m.cwiseAbs().maxCoeff(); }

Trivialization twisted() {
  return Trivialization(2, [](const BasePoint& x) {
    ComplexDenseMatrix m(2, 2);
    m << 2.0 + std::sin(x.x0 + x.x1), 0.5 * x.x1, I * std::cos(x.x0), std::exp(I * x.x1);
    return m;
  });
}

}  // namespace

TEST_CASE("finite-difference partials agree with analytic ones") {
  const auto theta = [](const BasePoint& x) { return std::sin(x.x1) + 0.3 * x.x0; };
  const auto analytic = Trivialization::phase_field(3, 1, theta,
                                                    {[](const BasePoint&) { return 0.3; },
                                                     [](const BasePoint& x) { return std::cos(x.x1); }});
  const auto numeric = Trivialization::phase_field(3, 1, theta);
  const BasePoint x{0.4, 1.1};
  for (int mu = 0; mu < 2; ++mu) CHECK(max_abs(analytic.partial(mu, x) - numeric.partial(mu, x)) < 1e-8);
  // l^-1 d_1 l = diag(0, i cos x1, 0).
  const ComplexDenseMatrix g = flat_coefficient(analytic, x, 1);
  CHECK(std::abs(g(1, 1) - I * std::cos(1.1)) < 1e-14);
  CHECK(std::abs(g(0, 0)) == 0.0);
}

TEST_CASE("unitary trivializations invert by the adjoint") {
  const auto l = Trivialization::phase_field(2, 0, [](const BasePoint& x) { return x.x1; });
  CHECK(l.unitary());
  const BasePoint x{0.0, 0.7};
  CHECK(max_abs(l.inverse(x) * l(x) - ComplexDenseMatrix::Identity(2, 2)) < 1e-15);
  const Trivialization singular(2, [](const BasePoint&) { return ComplexDenseMatrix::Zero(2, 2); });
  CHECK_THROWS_AS(singular.inverse(x), SingularMatrixError);
}

TEST_CASE("induced product preserves norms of lifted sections") {
  const SpatialGrid1D grid(16, 2 * pi, Boundary::periodic);
  const auto l = twisted();
  auto psi = GridFunction::from_function(grid, 2, [](std::size_t a, double x) { return cplx(std::cos(x), a * x); });
  GridFunction fibre(grid, 2);
  for (std::size_t j = 0; j < 16; ++j) {
    const ComplexVector v = l.inverse(BasePoint{0.3, grid.x(j)}) * psi.at_point(j);
    fibre(0, j) = v[0];
    fibre(1, j) = v[1];
  }
  CHECK(norm(fibre, induced_product(l, grid, 0.3)) == doctest::Approx(norm(psi)).epsilon(1e-12));
}

TEST_CASE("flat transport coefficients are l^-1 dl") {
  const auto l = twisted();
  std::vector<ComplexDenseMatrix> frames;
  std::vector<double> xs;
  for (int k = 0; k <= 20; ++k) {
    xs.push_back(0.5 + 1e-3 * k);
    frames.push_back(l(BasePoint{0.2, xs.back()}));
  }
  const auto t = transport_from_frames(frames, xs);
  const auto co = transport_coefficients(t);
  CHECK(max_abs(co.gamma[10] - flat_coefficient(l, BasePoint{0.2, xs[10]}, 1)) < 1e-5);
  const auto forward = transport_coefficients(t, Stencil::forward);
  CHECK(max_abs(forward.gamma[10] - flat_coefficient(l, BasePoint{0.2, xs[10]}, 1)) < 1e-2);
}

TEST_CASE("transported liftings lie in the kernel of the derivation") {
  std::vector<ComplexDenseMatrix> frames;
  std::vector<double> s;
  for (int k = 0; k < 8; ++k) {
    ComplexDenseMatrix f(2, 2);
    f << 1.0 + 0.1 * k, std::sin(k), 0.0, std::exp(I * (0.3 * k));
    frames.push_back(f);
    s.push_back(0.1 * k * k);
  }
  const auto t = transport_from_frames(frames, s);
  const auto lambda = transported_lifting(t, Eigen::Vector2cd(1.0, I), 2);
  CHECK(lambda.values[2] == Eigen::Vector2cd(1.0, I));
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(derivation_along_path(t, lambda, i, DerivationMode::limit).norm() < 1e-12);
  }
}

TEST_CASE("analytic-mode derivation converges on smooth transports") {
  auto residual = [](double h) {
    std::vector<ComplexDenseMatrix> frames;
    std::vector<double> s;
    for (int k = 0; k < 5; ++k) {
      const double sk = 0.5 + h * k;
      ComplexDenseMatrix f(2, 2);
      f << 1.0 + sk, std::sin(sk), 0.0, std::exp(I * (0.3 * sk));
      frames.push_back(f);
      s.push_back(sk);
    }
    const auto t = transport_from_frames(frames, s);
    const auto lambda = transported_lifting(t, Eigen::Vector2cd(1.0, I), 0);
    return derivation_along_path(t, lambda, 2, DerivationMode::analytic).norm();
  };
  const double r1 = residual(1e-2);
  const double r2 = residual(5e-3);
  CHECK(r1 < 1e-3);
  CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("section derivation of a transported section is small and second order") {
  const auto l = twisted();
  const ComplexVector psi0 = Eigen::Vector2cd(0.5, -I);
  auto residual = [&](double h) {
    std::vector<BasePoint> pts;
    for (int k = -1; k <= 1; ++k) pts.push_back(BasePoint{0.1, 0.8 + h * k});
    const auto sec = transported_section(psi0, l, pts);
    return section_derivation(l, pts, sec, 1, 1).norm();
  };
  const double r1 = residual(1e-2);
  const double r2 = residual(5e-3);
  CHECK(r1 < 1e-3);
  CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("evolution transport reproduces the evolution operator") {
  const SpatialGrid1D grid(8, 2 * pi, Boundary::periodic);
  const auto h = dirac_hamiltonian({});
  EvolutionProblem problem{h, grid, 0.0, 0.2, 0.05};
  const EvolutionFamily family(problem);
  const auto l = Trivialization::identity(4).on_grid(grid);
  const auto path = PathSampling::at_rest(family.times(), 1.0);
  const auto t = evolution_transport(family, l, path);
  CHECK(max_abs(t(4, 1) - evolution_operator(problem, 0.2, 0.05).matrix) < 1e-12);
  CHECK(max_abs(t(2, 2) - ComplexDenseMatrix::Identity(32, 32)) == 0.0);
}

TEST_CASE("bundle Diracian in the identity trivialization") {
  PhysicalParameters p;
  p.mass = 2.0;
  p.c = 3.0;
  p.charge = 0.5;
  const auto l = Trivialization::identity(4);
  const ComplexDenseMatrix d = bundle_diracian(p, {1.0, -0.4, 0.0, 0.0}, l, BasePoint{});
  const auto g = dirac_gammas();
  const ComplexDenseMatrix expected =
      6.0 * ComplexDenseMatrix::Identity(4, 4) + (0.5 / 3.0) * (1.0 * g.gamma[0] - 0.4 * g.gamma[1]);
  CHECK(max_abs(d - expected) < 1e-15);
  CHECK(max_abs(bundle_gammas(l, BasePoint{})[2] - g.gamma[2]) == 0.0);
}

TEST_CASE("Diracian residual vanishes on exact solutions in any trivialization") {
  PhysicalParameters p;
  const SpatialGrid1D grid(16, 2 * pi, Boundary::periodic);
  const double k = 2.0;
  Eigen::SelfAdjointEigenSolver<ComplexDenseMatrix> es(dirac_symbol(p, k));
  const ComplexVector u = es.eigenvectors().col(3);
  const double e = es.eigenvalues()[3];
  const auto l = Trivialization::phase_field(4, 2, [](const BasePoint& x) { return 0.7 * std::sin(x.x1); });
  auto slice = [&](double t) {
    GridFunction s(grid, 4);
    for (std::size_t j = 0; j < 16; ++j) {
      const ComplexVector v = l.inverse(BasePoint{t, grid.x(j)}) * (u * std::exp(I * (k * grid.x(j) - e * t)));
      for (std::size_t a = 0; a < 4; ++a) s(a, j) = v[a];
    }
    return s;
  };
  const double r1 = bundle_diracian_residual(p, {}, l, slice(0.49), slice(0.5), slice(0.51), 0.5, 0.01);
  const double r2 = bundle_diracian_residual(p, {}, l, slice(0.495), slice(0.5), slice(0.505), 0.5, 0.005);
  CHECK(r1 < 1e-3);
  CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("path validation") {
  PathSampling bad{{0.0, 0.0}, {BasePoint{}, BasePoint{}}};
  CHECK_THROWS(bad.validate());
  const auto ok = PathSampling::at_rest({0.0, 1.0, 2.0}, 0.5, 2.0);
  CHECK(ok.points[2].x0 == 4.0);
  CHECK(ok.points[1].x1 == 0.5);
}
