#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bqm/algebra.hpp"
#include "bqm/errors.hpp"

using namespace bqm;
constexpr double pi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};

namespace {

const SpatialGrid1D grid(16, 2 * pi, Boundary::periodic);

double max_abs(const ComplexDenseMatrix& m) { return m.cwiseAbs().maxCoeff(); }

ComplexVector samples(double (*f)(double)) {
  ComplexVector v(16);
  for (int j = 0; j < 16; ++j) v[j] = f(grid.x(j));
  return v;
}

}  // namespace

TEST_CASE("grid operators act as their symbols") {
  const ComplexVector s = samples([](double x) { return std::sin(2 * x); });
  const auto d2 = LinearGridOperator::derivative(2);
  CHECK((d2.apply(grid, s) + 4.0 * s).cwiseAbs().maxCoeff() < 1e-11);
  CHECK((LinearGridOperator::laplacian().apply(grid, s) - d2.apply(grid, s)).cwiseAbs().maxCoeff() < 1e-12);

  const auto scaled = LinearGridOperator::scale([](double x) { return cplx(x); }, "x");
  const ComplexVector xs = scaled.apply(grid, ComplexVector::Ones(16));
  CHECK(std::abs(xs[3] - grid.x(3)) < 1e-15);
  CHECK_THROWS_AS(LinearGridOperator::derivative(3), DomainError);
}

TEST_CASE("composition and sums fold constants") {
  const auto c = compose(LinearGridOperator::constant(2.0), LinearGridOperator::constant(3.0));
  REQUIRE(c.constant_value().has_value());
  CHECK(*c.constant_value() == cplx(6.0));
  CHECK((LinearGridOperator::zero() + LinearGridOperator::identity()).constant_value() == cplx(1.0));
  CHECK(compose(LinearGridOperator::zero(), LinearGridOperator::derivative(1)).is_zero());

  // x d/dx applied to sin x is x cos x.
  const auto xd = compose(LinearGridOperator::scale([](double x) { return cplx(x); }), LinearGridOperator::derivative(1));
  const ComplexVector out = xd.apply(grid, samples([](double x) { return std::sin(x); }));
  for (int j = 0; j < 16; ++j) CHECK(std::abs(out[j] - grid.x(j) * std::cos(grid.x(j))) < 1e-12);
}

TEST_CASE("odot is the product of dense matrices") {
  ComplexDenseMatrix c1(2, 2), c2(2, 2);
  c1 << 1.0, I, 2.0, -1.0;
  c2 << 0.5, 0.0, -I, 3.0;
  const auto a = MatrixOperator::kron(c1, LinearGridOperator::derivative(1));
  const auto b = MatrixOperator::kron(c2, LinearGridOperator::scale([](double x) { return cplx(std::cos(x)); })) +
                 MatrixOperator::identity(2);
  CHECK(max_abs(odot(a, b).to_dense(grid) - a.to_dense(grid) * b.to_dense(grid)) < 1e-11);
  CHECK(max_abs(odot(MatrixOperator::identity(2), b).to_dense(grid) - b.to_dense(grid)) < 1e-14);
}

TEST_CASE("apply sums entries over columns") {
  ComplexDenseMatrix c(2, 2);
  c << 0.0, 1.0, 1.0, 0.0;
  const auto swap = MatrixOperator::from_constant(c);
  auto psi = GridFunction::from_function(grid, 2, [](std::size_t a, double x) { return cplx(a == 0 ? x : 1.0); });
  const GridFunction out = apply(swap, psi);
  CHECK(out(0, 4) == cplx(1.0));
  CHECK(std::abs(out(1, 4) - grid.x(4)) < 1e-15);
}

TEST_CASE("matrix in a point-dependent basis") {
  PointFrame frame{grid, {}};
  for (std::size_t j = 0; j < 16; ++j) {
    ComplexDenseMatrix f(2, 2);
    f << 1.0, std::sin(grid.x(j)), 0.0, std::exp(I * grid.x(j));
    frame.matrices.push_back(f);
  }
  const auto op = MatrixOperator::kron(ComplexDenseMatrix::Identity(2, 2), LinearGridOperator::derivative(1));
  const ComplexDenseMatrix f = MatrixOperator::from_point_matrices(frame.matrices).to_dense(grid);
  CHECK(max_abs(matrix_in_basis(op, frame).to_dense(grid) - f.inverse() * op.to_dense(grid) * f) < 1e-10);

  frame.matrices[7] = ComplexDenseMatrix::Zero(2, 2);
  CHECK_THROWS_WITH_AS(matrix_in_basis(op, frame), doctest::Contains("7"), SingularMatrixError);
}

TEST_CASE("Dirac gammas satisfy the Clifford relations exactly") {
  const GammaSet g = dirac_gammas();
  CHECK(anticommutator_defect(g) == 0.0);
  const auto sigma = pauli_matrices();
  CHECK(g.gamma[0] == ComplexDenseMatrix(Eigen::Vector4cd(1, 1, -1, -1).asDiagonal()));
  CHECK(g.gamma[2].block(0, 2, 2, 2) == sigma[1]);
  CHECK(g.gamma[2].block(2, 0, 2, 2) == ComplexDenseMatrix(-sigma[1]));
}

TEST_CASE("5x5 Gamma matrices are not a Clifford set") {
  const GammaSet g = kg_gammas();
  CHECK(g.dimension == 5);
  CHECK(anticommutator_defect(g) > 0.0);
  CHECK(g.gamma[1](1, 4) == cplx(1.0));
  CHECK(g.gamma[1](4, 1) == cplx(-1.0));
  CHECK(g.gamma[0](4, 0) == cplx(1.0));
}

TEST_CASE("slashed contraction") {
  const GammaSet g = dirac_gammas();
  const std::array<ComplexDenseMatrix, 4> a{ComplexDenseMatrix::Identity(4, 4) * 2.0, ComplexDenseMatrix::Identity(4, 4) * -1.0,
                                            ComplexDenseMatrix::Zero(4, 4), ComplexDenseMatrix::Zero(4, 4)};
  const ComplexDenseMatrix s = slashed_contract(g, a);
  CHECK(max_abs(s - (2.0 * g.gamma[0] - g.gamma[1])) == 0.0);
  // (slashed a)^2 = a.a with covariant a = (2, -1): 4 - 1.
  CHECK(max_abs(s * s - 3.0 * ComplexDenseMatrix::Identity(4, 4)) < 1e-15);
}
