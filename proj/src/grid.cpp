#include "bqm/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <unsupported/Eigen/FFT>

#include "bqm/errors.hpp"

namespace bqm {

SpatialGrid1D::SpatialGrid1D(std::size_t points, double length, Boundary boundary)
    : points_(points), length_(length), boundary_(boundary) {
  if (points < 8) {
    throw DomainError("grid needs at least 8 points, got " + std::to_string(points));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw DomainError("grid length must be positive and finite");
  }
  spacing_ = boundary == Boundary::periodic ? length / static_cast<double>(points)
                                            : length / static_cast<double>(points - 1);
}

std::vector<double> SpatialGrid1D::coordinates() const {
  std::vector<double> xs(points_);
  for (std::size_t j = 0; j < points_; ++j) xs[j] = x(j);
  return xs;
}

double SpatialGrid1D::wavenumber(std::size_t q) const noexcept {
  const auto n = static_cast<long>(points_);
  long signed_q = static_cast<long>(q);
  if (2 * signed_q > n) signed_q -= n;
  return 2.0 * std::numbers::pi * static_cast<double>(signed_q) / length_;
}

std::size_t SpatialGrid1D::nearest_index(double x0) const {
  double s = x0 / spacing_;
  if (boundary_ == Boundary::periodic) {
    const double n = static_cast<double>(points_);
    s = std::fmod(std::fmod(s, n) + n, n);
    auto j = static_cast<std::size_t>(std::llround(s));
    return j % points_;
  }
  if (s <= 0.0) return 0;
  auto j = static_cast<std::size_t>(std::llround(s));
  return j >= points_ ? points_ - 1 : j;
}

GridFunction::GridFunction(SpatialGrid1D grid, std::size_t components)
    : grid_(grid), components_(components), values_(ComplexVector::Zero(components * grid.size())) {
  if (components == 0) throw DimensionError("grid function needs at least one component");
}

GridFunction::GridFunction(SpatialGrid1D grid, std::size_t components, ComplexVector values)
    : grid_(grid), components_(components), values_(std::move(values)) {
  if (components == 0) throw DimensionError("grid function needs at least one component");
  if (static_cast<std::size_t>(values_.size()) != components * grid.size()) {
    throw DimensionError("grid function expects " + std::to_string(components * grid.size()) +
                         " samples, got " + std::to_string(values_.size()));
  }
}

GridFunction GridFunction::from_function(const SpatialGrid1D& grid, std::size_t components,
                                         const std::function<cplx(std::size_t, double)>& f) {
  GridFunction out(grid, components);
  for (std::size_t a = 0; a < components; ++a) {
    for (std::size_t j = 0; j < grid.size(); ++j) out(a, j) = f(a, grid.x(j));
  }
  return out;
}

ComplexVector GridFunction::at_point(std::size_t j) const {
  ComplexVector v(components_);
  for (std::size_t a = 0; a < components_; ++a) v[a] = (*this)(a, j);
  return v;
}

bool GridFunction::is_finite() const { return values_.allFinite(); }

void GridFunction::check_compatible(const GridFunction& other) const {
  if (!(grid_ == other.grid_) || components_ != other.components_) {
    throw DimensionError("grid functions live on different grids or have different component counts");
  }
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  check_compatible(other);
  values_ += other.values_;
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  check_compatible(other);
  values_ -= other.values_;
  return *this;
}

GridFunction& GridFunction::operator*=(cplx s) {
  values_ *= s;
  return *this;
}

FibreProduct::FibreProduct(std::size_t components) : components_(components) {}

FibreProduct::FibreProduct(std::vector<ComplexDenseMatrix> weights)
    : components_(weights.empty() ? 0 : static_cast<std::size_t>(weights.front().rows())),
      weights_(std::move(weights)) {
  if (weights_.empty()) throw DimensionError("fibre product needs at least one weight matrix");
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    const auto& w = weights_[j];
    if (static_cast<std::size_t>(w.rows()) != components_ || w.cols() != w.rows()) {
      throw DimensionError("fibre product weight at point " + std::to_string(j) + " has wrong shape");
    }
    const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
    if ((w - w.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw DomainError("fibre product weight at point " + std::to_string(j) + " is not Hermitian");
    }
    Eigen::LLT<ComplexDenseMatrix> llt(w);
    if (llt.info() != Eigen::Success) {
      throw DomainError("fibre product weight at point " + std::to_string(j) +
                        " is not positive definite");
    }
  }
}

namespace {

ComplexVector spectral_derivative(const SpatialGrid1D& grid, const ComplexVector& f, int order) {
  const std::size_t n = grid.size();
  Eigen::FFT<double> fft;
  std::vector<cplx> in(f.data(), f.data() + n);
  std::vector<cplx> spec;
  fft.fwd(spec, in);
  const bool even = n % 2 == 0;
  for (std::size_t q = 0; q < n; ++q) {
    const double k = grid.wavenumber(q);
    if (even && 2 * q == n) {
      // The Nyquist mode has no odd derivative on the grid.
      spec[q] = order == 1 ? cplx{0.0, 0.0} : spec[q] * (-k * k);
      continue;
    }
    spec[q] *= order == 1 ? cplx{0.0, k} : cplx{-k * k, 0.0};
  }
  std::vector<cplx> out;
  fft.inv(out, spec);
  return Eigen::Map<ComplexVector>(out.data(), static_cast<Eigen::Index>(n));
}

ComplexVector central_difference(const SpatialGrid1D& grid, const ComplexVector& f, int order) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double h = grid.spacing();
  ComplexVector out(n);
  auto at = [&](Eigen::Index j) -> cplx { return (j < 0 || j >= n) ? cplx{} : f[j]; };
  for (Eigen::Index j = 0; j < n; ++j) {
    if (order == 1) {
      out[j] = (at(j + 1) - at(j - 1)) / (2.0 * h);
    } else {
      out[j] = (at(j + 1) - 2.0 * f[j] + at(j - 1)) / (h * h);
    }
  }
  return out;
}

}  // namespace

ComplexVector derivative(const SpatialGrid1D& grid, const ComplexVector& samples, int order) {
  if (order != 1 && order != 2) {
    throw DomainError("unsupported derivative order " + std::to_string(order) + " (only 1 and 2)");
  }
  if (static_cast<std::size_t>(samples.size()) != grid.size()) {
    throw DimensionError("derivative input has " + std::to_string(samples.size()) +
                         " samples, grid has " + std::to_string(grid.size()));
  }
  return grid.boundary() == Boundary::periodic ? spectral_derivative(grid, samples, order)
                                                : central_difference(grid, samples, order);
}

GridFunction derivative(const GridFunction& psi, int order) {
  GridFunction out(psi.grid(), psi.components());
  for (std::size_t a = 0; a < psi.components(); ++a) {
    out.component(a) = derivative(psi.grid(), ComplexVector(psi.component(a)), order);
  }
  return out;
}

ComplexDenseMatrix derivative_matrix(const SpatialGrid1D& grid, int order) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  ComplexDenseMatrix d(n, n);
  ComplexVector unit = ComplexVector::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    unit[j] = 1.0;
    d.col(j) = derivative(grid, unit, order);
    unit[j] = 0.0;
  }
  return d;
}

cplx inner(const GridFunction& psi, const GridFunction& chi, const FibreProduct& fp) {
  if (!(psi.grid() == chi.grid())) throw DimensionError("inner product of functions on different grids");
  if (psi.components() != chi.components()) {
    throw DimensionError("inner product of functions with " + std::to_string(psi.components()) +
                         " and " + std::to_string(chi.components()) + " components");
  }
  if (fp.components() != psi.components()) {
    throw DimensionError("fibre product dimension does not match component count");
  }
  if (!fp.is_identity() && fp.points() != psi.points()) {
    throw DimensionError("fibre product is sampled on a different number of points");
  }
  const double h = psi.grid().spacing();
  if (fp.is_identity()) return h * psi.values().dot(chi.values());
  cplx sum{};
  for (std::size_t j = 0; j < psi.points(); ++j) {
    sum += psi.at_point(j).dot(fp.weight(j) * chi.at_point(j));
  }
  return h * sum;
}

cplx inner(const GridFunction& psi, const GridFunction& chi) {
  return inner(psi, chi, FibreProduct(psi.components()));
}

double norm(const GridFunction& psi, const FibreProduct& fp) {
  return std::sqrt(std::max(0.0, inner(psi, psi, fp).real()));
}

double norm(const GridFunction& psi) { return norm(psi, FibreProduct(psi.components())); }

ComplexVector discrete_delta(const SpatialGrid1D& grid, double x0) {
  ComplexVector d = ComplexVector::Zero(static_cast<Eigen::Index>(grid.size()));
  d[static_cast<Eigen::Index>(grid.nearest_index(x0))] = 1.0 / grid.spacing();
  return d;
}

}  // namespace bqm
