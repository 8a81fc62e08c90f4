#pragma once

// Matrix operators: square arrays of linear maps acting on multi-component
// grid functions, their odot product, matrices of matrix operators in
// point-dependent frames, and the Dirac / 5x5 Klein-Gordon Clifford sets.

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bqm/grid.hpp"

namespace bqm {

/// Function of the spatial coordinate used by scale-by-function entries.
using ScalarField = std::function<cplx(double)>;

/// Linear map from one scalar grid component to another. Derivative kinds
/// stay symbolic until applied on a grid, where the grid's scheme is used.
class LinearGridOperator {
 public:
  enum class Kind { zero, identity, scale, derivative, laplacian, composition, sum };

  /// The zero map.
  LinearGridOperator();

  static LinearGridOperator zero();
  static LinearGridOperator identity();
  static LinearGridOperator constant(cplx value);
  static LinearGridOperator scale(ScalarField field, std::string name = "f(x)");
  /// Multiplication by fixed samples; only applicable on grids with samples.size() points.
  static LinearGridOperator scale_samples(ComplexVector samples, std::string name = "f_j");
  static LinearGridOperator derivative(int order);
  static LinearGridOperator laplacian();

  Kind kind() const noexcept;
  bool is_zero() const noexcept { return kind() == Kind::zero; }
  /// Value c when this operator is c * identity (identity, zero or constant scale).
  std::optional<cplx> constant_value() const noexcept;

  ComplexVector apply(const SpatialGrid1D& grid, const ComplexVector& samples) const;
  ComplexDenseMatrix to_dense(const SpatialGrid1D& grid) const;
  std::string describe() const;

  /// a o b (b applied first).
  friend LinearGridOperator compose(const LinearGridOperator& a, const LinearGridOperator& b);
  friend LinearGridOperator operator+(const LinearGridOperator& a, const LinearGridOperator& b);
  friend LinearGridOperator operator*(cplx s, const LinearGridOperator& a);

 private:
  struct Node;
  explicit LinearGridOperator(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

/// n x n array of LinearGridOperator entries.
class MatrixOperator {
 public:
  explicit MatrixOperator(std::size_t n);
  MatrixOperator(std::size_t n, std::vector<LinearGridOperator> entries);

  static MatrixOperator zero(std::size_t n) { return MatrixOperator(n); }
  static MatrixOperator identity(std::size_t n);
  /// Constant matrix C identified with the matrix operator [c_ab * id].
  static MatrixOperator from_constant(const ComplexDenseMatrix& c);
  /// op placed on every diagonal entry.
  static MatrixOperator diagonal(std::size_t n, const LinearGridOperator& op);
  /// Entry (a,b) = c_ab * op.
  static MatrixOperator kron(const ComplexDenseMatrix& c, const LinearGridOperator& op);
  /// Entry (a,b) = multiplication by field(x)(a,b), sampled per grid point.
  static MatrixOperator from_point_matrices(const std::vector<ComplexDenseMatrix>& samples);

  std::size_t size() const noexcept { return n_; }
  const LinearGridOperator& operator()(std::size_t row, std::size_t col) const {
    return entries_.at(row * n_ + col);
  }
  LinearGridOperator& operator()(std::size_t row, std::size_t col) { return entries_.at(row * n_ + col); }

  /// Dense (n*N) x (n*N) matrix in the flattened component-major ordering.
  ComplexDenseMatrix to_dense(const SpatialGrid1D& grid) const;
  std::string describe() const;

  MatrixOperator& operator+=(const MatrixOperator& other);
  friend MatrixOperator operator+(MatrixOperator a, const MatrixOperator& b) { return a += b; }
  friend MatrixOperator operator-(MatrixOperator a, const MatrixOperator& b);
  friend MatrixOperator operator*(cplx s, const MatrixOperator& a);

 private:
  std::size_t n_;
  std::vector<LinearGridOperator> entries_;
};

/// result^a = sum_b B^a_b(psi^b).
GridFunction apply(const MatrixOperator& op, const GridFunction& psi);

/// Entry (a,b) of the product is sum_m A^a_m o B^m_b.
MatrixOperator odot(const MatrixOperator& a, const MatrixOperator& b);

/// Block-diagonal composite of several matrix operators.
MatrixOperator block_diagonal(const std::vector<MatrixOperator>& blocks);

/// Point-dependent basis f(x_j) of the fibre, one invertible n x n matrix per grid point.
struct PointFrame {
  SpatialGrid1D grid;
  std::vector<ComplexDenseMatrix> matrices;
};

/// Matrix of a matrix operator in a point-dependent frame: f^-1 (.) B (.) f.
/// Throws SingularMatrixError naming the first point where f is singular.
MatrixOperator matrix_in_basis(const MatrixOperator& op, const PointFrame& frame);

/// Components of psi in the frame: psi^a(x) with psi(x) = psi^a(x) f_a(x).
GridFunction components_in_frame(const GridFunction& psi, const PointFrame& frame);

/// The frame term E_mu of the spatial derivative, f^-1 d_x f, sampled per point.
std::vector<ComplexDenseMatrix> frame_derivative_term(const PointFrame& frame);

/// Minkowski metric diag(1,-1,-1,-1).
constexpr std::array<double, 4> minkowski_metric{1.0, -1.0, -1.0, -1.0};

struct GammaSet {
  std::size_t dimension;
  std::array<ComplexDenseMatrix, 4> gamma;
};

/// Dirac (standard) representation: gamma^0 = diag(1,1,-1,-1),
/// gamma^i = [[0, sigma_i], [-sigma_i, 0]].
GammaSet dirac_gammas();

/// 5x5 Gamma matrices: (Gamma^mu)_{mu,4} = 1, (Gamma^mu)_{4,mu} = eta_{mu mu}.
GammaSet kg_gammas();

/// max over mu, nu of max|gamma^mu gamma^nu + gamma^nu gamma^mu - 2 eta^{mu nu} Id|.
double anticommutator_defect(const GammaSet& set);

/// sum_mu gamma^mu (.) a_mu.
MatrixOperator slashed_contract(const GammaSet& set, const std::array<MatrixOperator, 4>& components);
ComplexDenseMatrix slashed_contract(const GammaSet& set, const std::array<ComplexDenseMatrix, 4>& components);

/// Pauli matrices sigma_1..3 (index 0..2).
std::array<ComplexDenseMatrix, 3> pauli_matrices();

}  // namespace bqm
