#pragma once

// One-dimensional spatial grids, multi-component grid functions and the
// fibre-weighted L2 inner product.

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace bqm {

using cplx = std::complex<double>;
using ComplexDenseMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

enum class Boundary { periodic, reflecting };

/// Uniform grid on [0, L). Periodic grids use h = L/N and spectral
/// differentiation; reflecting grids use h = L/(N-1), second-order central
/// differences and zero values outside the end points.
class SpatialGrid1D {
 public:
  SpatialGrid1D(std::size_t points, double length, Boundary boundary);

  std::size_t size() const noexcept { return points_; }
  double length() const noexcept { return length_; }
  Boundary boundary() const noexcept { return boundary_; }
  double spacing() const noexcept { return spacing_; }
  double x(std::size_t j) const noexcept { return static_cast<double>(j) * spacing_; }
  std::vector<double> coordinates() const;

  /// Angular wavenumber of FFT bin q on a periodic grid (Nyquist bin reported as +N/2).
  double wavenumber(std::size_t q) const noexcept;

  std::size_t nearest_index(double x) const;

  friend bool operator==(const SpatialGrid1D& a, const SpatialGrid1D& b) noexcept {
    return a.points_ == b.points_ && a.length_ == b.length_ && a.boundary_ == b.boundary_;
  }

 private:
  std::size_t points_;
  double length_;
  Boundary boundary_;
  double spacing_;
};

/// m-component complex field on a grid. Samples are stored flat with
/// component alpha of point j at index alpha*N + j.
class GridFunction {
 public:
  GridFunction(SpatialGrid1D grid, std::size_t components);
  GridFunction(SpatialGrid1D grid, std::size_t components, ComplexVector values);

  static GridFunction from_function(const SpatialGrid1D& grid, std::size_t components,
                                    const std::function<cplx(std::size_t, double)>& f);

  const SpatialGrid1D& grid() const noexcept { return grid_; }
  std::size_t components() const noexcept { return components_; }
  std::size_t points() const noexcept { return grid_.size(); }

  const ComplexVector& values() const noexcept { return values_; }
  ComplexVector& values() noexcept { return values_; }

  auto component(std::size_t alpha) const { return values_.segment(alpha * points(), points()); }
  auto component(std::size_t alpha) { return values_.segment(alpha * points(), points()); }

  cplx operator()(std::size_t alpha, std::size_t j) const { return values_[alpha * points() + j]; }
  cplx& operator()(std::size_t alpha, std::size_t j) { return values_[alpha * points() + j]; }

  /// Fibre vector (all components) at grid point j.
  ComplexVector at_point(std::size_t j) const;

  bool is_finite() const;

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(cplx s);
  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(cplx s, GridFunction a) { return a *= s; }

 private:
  void check_compatible(const GridFunction& other) const;

  SpatialGrid1D grid_;
  std::size_t components_;
  ComplexVector values_;
};

/// Per-point Hermitian positive-definite weight of the fibre scalar product.
class FibreProduct {
 public:
  /// Identity weight for m components.
  explicit FibreProduct(std::size_t components);
  /// One weight matrix per grid point; validated for Hermiticity and positivity.
  explicit FibreProduct(std::vector<ComplexDenseMatrix> weights);

  std::size_t components() const noexcept { return components_; }
  bool is_identity() const noexcept { return weights_.empty(); }
  std::size_t points() const noexcept { return weights_.size(); }
  const ComplexDenseMatrix& weight(std::size_t j) const { return weights_.at(j); }

 private:
  std::size_t components_;
  std::vector<ComplexDenseMatrix> weights_;
};

/// Componentwise spatial derivative of order 1 or 2 with the grid's scheme.
GridFunction derivative(const GridFunction& psi, int order);

/// Derivative of a single scalar component (length N).
ComplexVector derivative(const SpatialGrid1D& grid, const ComplexVector& samples, int order);

/// Dense N x N matrix of the order-k derivative on this grid.
ComplexDenseMatrix derivative_matrix(const SpatialGrid1D& grid, int order);

/// sum_j h * psi(x_j)^dagger W(x_j) chi(x_j); conjugate-linear in psi.
cplx inner(const GridFunction& psi, const GridFunction& chi, const FibreProduct& fp);
cplx inner(const GridFunction& psi, const GridFunction& chi);

double norm(const GridFunction& psi, const FibreProduct& fp);
double norm(const GridFunction& psi);

/// Discrete delta(x - x0): 1/h at the grid point nearest x0, zero elsewhere.
ComplexVector discrete_delta(const SpatialGrid1D& grid, double x0);

}  // namespace bqm
