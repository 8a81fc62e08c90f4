#include "bqm/bundle.hpp"

#include <cmath>
#include <sstream>

#include "bqm/errors.hpp"

namespace bqm {

namespace {

const cplx I{0.0, 1.0};

std::string describe(const BasePoint& x) {
  std::ostringstream os;
  os << "(x0 = " << x.x0 << ", x1 = " << x.x1 << ")";
  return os.str();
}

ComplexDenseMatrix identity_of(std::size_t n) {
  const auto d = static_cast<Eigen::Index>(n);
  return ComplexDenseMatrix::Identity(d, d);
}

ComplexDenseMatrix checked_inverse(const ComplexDenseMatrix& m, const std::string& where) {
  Eigen::FullPivLU<ComplexDenseMatrix> lu(m);
  if (!lu.isInvertible()) throw SingularMatrixError("matrix is singular at " + where);
  return lu.inverse();
}

BasePoint shifted(BasePoint x, int mu, double h) {
  (mu == 0 ? x.x0 : x.x1) += h;
  return x;
}

// Derivative at p[i] of samples f[i-1], f[i], f[i+1] on a non-uniform lattice.
template <typename T>
T three_point(const std::vector<double>& p, const T& fm, const T& f0, const T& fp, std::size_t i) {
  const double hm = p[i] - p[i - 1];
  const double hp = p[i + 1] - p[i];
  return (hm * hm * fp - hp * hp * fm + (hp * hp - hm * hm) * f0) / (hp * hm * (hp + hm));
}

}  // namespace

Trivialization::Trivialization(std::size_t dimension, Field l, std::array<Field, 2> partials, bool unitary)
    : dimension_(dimension), l_(std::move(l)), partials_(std::move(partials)), unitary_(unitary) {
  if (dimension == 0) throw DimensionError("trivialization dimension must be positive");
  if (!l_) throw DomainError("trivialization needs a matrix field");
}

Trivialization Trivialization::identity(std::size_t dimension) {
  const ComplexDenseMatrix id = identity_of(dimension);
  const ComplexDenseMatrix zero = ComplexDenseMatrix::Zero(id.rows(), id.cols());
  auto z = [zero](const BasePoint&) { return zero; };
  return Trivialization(dimension, [id](const BasePoint&) { return id; }, {z, z}, true);
}

Trivialization Trivialization::constant(const ComplexDenseMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("constant trivialization must be square");
  checked_inverse(m, "every point (constant trivialization)");
  const ComplexDenseMatrix zero = ComplexDenseMatrix::Zero(m.rows(), m.cols());
  auto z = [zero](const BasePoint&) { return zero; };
  const bool unitary = (m.adjoint() * m - identity_of(static_cast<std::size_t>(m.rows()))).cwiseAbs().maxCoeff() < 1e-12;
  return Trivialization(static_cast<std::size_t>(m.rows()), [m](const BasePoint&) { return m; }, {z, z}, unitary);
}

Trivialization Trivialization::phase_field(std::size_t dimension, std::size_t component,
                                           std::function<double(const BasePoint&)> theta,
                                           std::array<std::function<double(const BasePoint&)>, 2> dtheta) {
  if (component >= dimension) throw DimensionError("phase component outside the fibre");
  const auto k = static_cast<Eigen::Index>(component);
  auto l = [dimension, k, theta](const BasePoint& x) {
    ComplexDenseMatrix m = identity_of(dimension);
    m(k, k) = std::exp(I * theta(x));
    return m;
  };
  std::array<Field, 2> partials{};
  for (std::size_t mu = 0; mu < 2; ++mu) {
    if (!dtheta[mu]) continue;
    partials[mu] = [dimension, k, theta, d = dtheta[mu]](const BasePoint& x) {
      ComplexDenseMatrix m = ComplexDenseMatrix::Zero(static_cast<Eigen::Index>(dimension),
                                                      static_cast<Eigen::Index>(dimension));
      m(k, k) = I * d(x) * std::exp(I * theta(x));
      return m;
    };
  }
  return Trivialization(dimension, l, partials, true);
}

ComplexDenseMatrix Trivialization::operator()(const BasePoint& x) const {
  ComplexDenseMatrix m = l_(x);
  if (static_cast<std::size_t>(m.rows()) != dimension_ || m.rows() != m.cols()) {
    throw DimensionError("trivialization returned a " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                         " matrix at " + describe(x) + ", expected dimension " + std::to_string(dimension_));
  }
  if (!m.allFinite()) throw DomainError("trivialization is not finite at " + describe(x));
  if (unitary_ && (m.adjoint() * m - identity_of(dimension_)).cwiseAbs().maxCoeff() > 1e-12) {
    throw DomainError("trivialization flagged unitary is not unitary at " + describe(x));
  }
  return m;
}

ComplexDenseMatrix Trivialization::inverse(const BasePoint& x) const {
  const ComplexDenseMatrix m = (*this)(x);
  if (unitary_) return m.adjoint();
  return checked_inverse(m, describe(x));
}

ComplexDenseMatrix Trivialization::partial(int mu, const BasePoint& x) const {
  if (mu != 0 && mu != 1) throw DomainError("trivialization partials exist for mu = 0, 1 only");
  if (partials_[static_cast<std::size_t>(mu)]) return partials_[static_cast<std::size_t>(mu)](x);
  const double h = 1e-6 * std::max(1.0, std::abs(mu == 0 ? x.x0 : x.x1));
  return ((*this)(shifted(x, mu, h)) - (*this)(shifted(x, mu, -h))) / (2.0 * h);
}

Trivialization Trivialization::on_grid(const SpatialGrid1D& grid) const {
  const std::size_t n = grid.size();
  const std::size_t m = dimension_;
  auto lift = [grid, n, m](const Field& f) -> Field {
    return [grid, n, m, f](const BasePoint& x) {
      const auto d = static_cast<Eigen::Index>(n * m);
      ComplexDenseMatrix out = ComplexDenseMatrix::Zero(d, d);
      for (std::size_t j = 0; j < n; ++j) {
        const ComplexDenseMatrix b = f(BasePoint{x.x0, grid.x(j)});
        for (std::size_t a = 0; a < m; ++a) {
          for (std::size_t c = 0; c < m; ++c) {
            out(static_cast<Eigen::Index>(a * n + j), static_cast<Eigen::Index>(c * n + j)) =
                b(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c));
          }
        }
      }
      return out;
    };
  };
  const Trivialization self = *this;
  Field base = [self](const BasePoint& x) { return self(x); };
  std::array<Field, 2> partials{};
  partials[0] = lift([self](const BasePoint& x) { return self.partial(0, x); });
  const auto d = static_cast<Eigen::Index>(n * m);
  partials[1] = [d](const BasePoint&) { return ComplexDenseMatrix::Zero(d, d); };
  return Trivialization(n * m, lift(base), partials, unitary_);
}

FibreProduct induced_product(const Trivialization& l, const SpatialGrid1D& grid, double x0) {
  std::vector<ComplexDenseMatrix> weights;
  weights.reserve(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const ComplexDenseMatrix m = l(BasePoint{x0, grid.x(j)});
    weights.push_back(m.adjoint() * m);
  }
  if (l.unitary()) return FibreProduct(l.dimension());
  return FibreProduct(std::move(weights));
}

PathSampling PathSampling::at_rest(const std::vector<double>& times, double x, double c) {
  PathSampling p;
  p.times = times;
  for (double t : times) p.points.push_back(BasePoint{c * t, x});
  p.validate();
  return p;
}

void PathSampling::validate() const {
  if (times.size() < 2) throw DomainError("path sampling needs at least 2 samples");
  if (points.size() != times.size()) throw DimensionError("path sampling has mismatched times and points");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw DomainError("path sample times must be strictly increasing");
  }
}

TransportAlongMap::TransportAlongMap(std::vector<double> parameters, std::size_t dimension, Pair k)
    : parameters_(std::move(parameters)), dimension_(dimension), k_(std::move(k)) {
  if (parameters_.empty()) throw DomainError("transport needs at least one sample");
  if (!k_) throw DomainError("transport needs a pair map");
}

ComplexDenseMatrix TransportAlongMap::operator()(std::size_t to, std::size_t from) const {
  if (to >= samples() || from >= samples()) throw DomainError("transport sample index out of range");
  if (to == from) return identity_of(dimension_);
  return k_(to, from);
}

TransportAlongMap transport_from_frames(const std::vector<ComplexDenseMatrix>& frames, std::vector<double> parameters) {
  if (frames.empty()) throw DomainError("transport from frames needs at least one frame");
  const auto n = static_cast<std::size_t>(frames.front().rows());
  if (parameters.empty()) {
    for (std::size_t i = 0; i < frames.size(); ++i) parameters.push_back(static_cast<double>(i));
  }
  if (parameters.size() != frames.size()) throw DimensionError("frames and parameters differ in length");
  std::vector<ComplexDenseMatrix> inv;
  inv.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (static_cast<std::size_t>(frames[i].rows()) != n || frames[i].cols() != frames[i].rows()) {
      throw DimensionError("frame " + std::to_string(i) + " has the wrong shape");
    }
    inv.push_back(checked_inverse(frames[i], "frame " + std::to_string(i)));
  }
  auto k = [frames, inv](std::size_t to, std::size_t from) -> ComplexDenseMatrix { return inv[to] * frames[from]; };
  return TransportAlongMap(std::move(parameters), n, k);
}

TransportAlongMap evolution_transport(const EvolutionFamily& u, const Trivialization& l, const PathSampling& path) {
  path.validate();
  if (l.dimension() != u.dimension()) {
    throw DimensionError("trivialization dimension " + std::to_string(l.dimension()) +
                         " does not match the state dimension " + std::to_string(u.dimension()));
  }
  std::vector<std::size_t> index;
  std::vector<ComplexDenseMatrix> frames;
  std::vector<ComplexDenseMatrix> inv;
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    index.push_back(u.index(path.times[i]));
    frames.push_back(l(path.points[i]));
    inv.push_back(l.inverse(path.points[i]));
  }
  auto k = [&u, index, frames, inv](std::size_t to, std::size_t from) -> ComplexDenseMatrix {
    return inv[to] * u.between(index[to], index[from]) * frames[from];
  };
  return TransportAlongMap(path.times, u.dimension(), k);
}

TransportAlongMap flat_transport(const Trivialization& l, const std::vector<BasePoint>& points) {
  std::vector<ComplexDenseMatrix> frames;
  std::vector<double> params;
  for (std::size_t i = 0; i < points.size(); ++i) {
    frames.push_back(l(points[i]));
    params.push_back(static_cast<double>(i));
  }
  return transport_from_frames(frames, params);
}

ComplexDenseMatrix flat_transport(const Trivialization& l, const BasePoint& y, const BasePoint& x) {
  return l.inverse(y) * l(x);
}

TransportCoefficients transport_coefficients(const TransportAlongMap& t, Stencil stencil) {
  const std::size_t n = t.samples();
  if (n < 3) throw DomainError("transport coefficients need at least 3 samples, got " + std::to_string(n));
  const auto& p = t.parameters();
  const ComplexDenseMatrix id = identity_of(t.dimension());
  TransportCoefficients out{p, {}};
  out.gamma.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool fwd = stencil == Stencil::forward || (stencil == Stencil::central && i == 0);
    const bool bwd = stencil == Stencil::backward || (stencil == Stencil::central && i + 1 == n);
    if (fwd && i + 1 < n) {
      out.gamma.push_back((t(i, i + 1) - id) / (p[i + 1] - p[i]));
    } else if ((bwd || fwd) && i > 0) {
      out.gamma.push_back((id - t(i, i - 1)) / (p[i] - p[i - 1]));
    } else if (bwd) {
      out.gamma.push_back((t(i, i + 1) - id) / (p[i + 1] - p[i]));
    } else {
      out.gamma.push_back(three_point<ComplexDenseMatrix>(p, t(i, i - 1), id, t(i, i + 1), i));
    }
  }
  return out;
}

ComplexDenseMatrix flat_coefficient(const Trivialization& l, const BasePoint& x, int mu) {
  return l.inverse(x) * l.partial(mu, x);
}

Lifting transported_lifting(const TransportAlongMap& t, const ComplexVector& value, std::size_t from) {
  if (static_cast<std::size_t>(value.size()) != t.dimension()) {
    throw DimensionError("lifting value does not match the transport dimension");
  }
  Lifting out{t.parameters(), {}};
  for (std::size_t i = 0; i < t.samples(); ++i) out.values.push_back(t(i, from) * value);
  return out;
}

ComplexVector derivation_along_path(const TransportAlongMap& t, const Lifting& lambda, std::size_t i,
                                    DerivationMode mode, const TransportCoefficients* coefficients) {
  const std::size_t n = t.samples();
  if (lambda.values.size() != n) throw DimensionError("lifting and transport have different sample counts");
  if (i >= n) throw DomainError("derivation index out of range");
  if (n < 2) throw DomainError("derivation needs at least 2 samples");
  const auto& p = t.parameters();
  const auto& v = lambda.values;
  if (mode == DerivationMode::limit) {
    if (i + 1 < n) return (t(i, i + 1) * v[i + 1] - v[i]) / (p[i + 1] - p[i]);
    return (v[i] - t(i, i - 1) * v[i - 1]) / (p[i] - p[i - 1]);
  }
  ComplexVector dv;
  if (i == 0) {
    dv = (v[1] - v[0]) / (p[1] - p[0]);
  } else if (i + 1 == n) {
    dv = (v[i] - v[i - 1]) / (p[i] - p[i - 1]);
  } else {
    dv = three_point<ComplexVector>(p, v[i - 1], v[i], v[i + 1], i);
  }
  ComplexDenseMatrix gamma;
  if (coefficients != nullptr) {
    if (coefficients->gamma.size() != n) throw DimensionError("coefficients and transport differ in length");
    gamma = coefficients->gamma[i];
  } else {
    if (n < 3) throw DomainError("analytic derivation needs at least 3 samples");
    const ComplexDenseMatrix id = identity_of(t.dimension());
    if (i == 0) {
      gamma = (t(0, 1) - id) / (p[1] - p[0]);
    } else if (i + 1 == n) {
      gamma = (id - t(i, i - 1)) / (p[i] - p[i - 1]);
    } else {
      gamma = three_point<ComplexDenseMatrix>(p, t(i, i - 1), id, t(i, i + 1), i);
    }
  }
  return dv + gamma * v[i];
}

Lifting transported_section(const ComplexVector& psi0, const Trivialization& l, const std::vector<BasePoint>& points) {
  if (static_cast<std::size_t>(psi0.size()) != l.dimension()) {
    throw DimensionError("section value does not match the trivialization dimension");
  }
  Lifting out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    out.parameters.push_back(static_cast<double>(i));
    out.values.push_back(l.inverse(points[i]) * psi0);
  }
  return out;
}

ComplexVector section_derivation(const Trivialization& l, const std::vector<BasePoint>& points, const Lifting& psi,
                                 std::size_t i, int mu) {
  if (mu != 0 && mu != 1) throw DomainError("section derivation along mu = 0, 1 only");
  const std::size_t n = points.size();
  if (psi.values.size() != n) throw DimensionError("section and points differ in length");
  if (n < 3) throw DomainError("section derivation needs at least 3 points");
  if (i >= n) throw DomainError("section index out of range");
  std::vector<double> s(n);
  for (std::size_t k = 0; k < n; ++k) s[k] = mu == 0 ? points[k].x0 : points[k].x1;
  const auto& v = psi.values;
  ComplexVector dv;
  if (i == 0) {
    dv = (v[1] - v[0]) / (s[1] - s[0]);
  } else if (i + 1 == n) {
    dv = (v[i] - v[i - 1]) / (s[i] - s[i - 1]);
  } else {
    dv = three_point<ComplexVector>(s, v[i - 1], v[i], v[i + 1], i);
  }
  return dv + flat_coefficient(l, points[i], mu) * v[i];
}

std::vector<ComplexDenseMatrix> bundle_hamiltonian(const HamiltonianFactory& h, const SpatialGrid1D& grid,
                                                   const Trivialization& l, const PathSampling& path) {
  path.validate();
  if (l.dimension() != h.dimension() * grid.size()) {
    throw DimensionError("trivialization does not act on the Hamiltonian's state space");
  }
  std::vector<ComplexDenseMatrix> out;
  out.reserve(path.times.size());
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    out.push_back(l.inverse(path.points[i]) * h.dense(grid, path.times[i]) * l(path.points[i]));
  }
  return out;
}

std::vector<ComplexDenseMatrix> evolution_coefficients(const HamiltonianFactory& h, const SpatialGrid1D& grid,
                                                       const Trivialization& l, const PathSampling& path, double c) {
  auto hb = bundle_hamiltonian(h, grid, l, path);
  const std::size_t n = path.times.size();
  const cplx factor = I / h.hbar();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1;
    const std::size_t b = i + 1 == n ? i : i + 1;
    const double v = (path.points[b].x1 - path.points[a].x1) / (path.times[b] - path.times[a]);
    const auto& x = path.points[i];
    ComplexDenseMatrix dl = c * l.partial(0, x);
    if (v != 0.0) dl += v * l.partial(1, x);
    hb[i] = factor * hb[i] + l.inverse(x) * dl;
  }
  return hb;
}

std::array<ComplexDenseMatrix, 4> bundle_gammas(const Trivialization& l, const BasePoint& y) {
  if (l.dimension() != 4) throw DimensionError("bundle gammas need a 4-dimensional fibre");
  const auto g = dirac_gammas();
  const ComplexDenseMatrix m = l(y);
  const ComplexDenseMatrix inv = l.inverse(y);
  std::array<ComplexDenseMatrix, 4> out;
  for (std::size_t mu = 0; mu < 4; ++mu) out[mu] = inv * g.gamma[mu] * m;
  return out;
}

ComplexDenseMatrix bundle_diracian(const PhysicalParameters& p, const std::array<double, 4>& a_mu,
                                   const Trivialization& l, const BasePoint& y) {
  const auto g = bundle_gammas(l, y);
  ComplexDenseMatrix d = p.mass * p.c * identity_of(4);
  for (std::size_t mu = 0; mu < 4; ++mu) d += (p.charge / p.c) * a_mu[mu] * g[mu];
  return d;
}

double bundle_diracian_residual(const PhysicalParameters& p, const Potentials& pot, const Trivialization& l,
                                const GridFunction& prev, const GridFunction& mid, const GridFunction& next,
                                double t, double dt) {
  if (l.dimension() != 4) throw DimensionError("Diracian residual needs a 4-dimensional trivialization");
  for (const auto* s : {&prev, &mid, &next}) {
    if (s->components() != 4) throw DimensionError("Diracian residual needs 4-component sections");
    if (!(s->grid() == mid.grid())) throw DimensionError("Diracian residual slices live on different grids");
  }
  if (!(dt > 0.0)) throw DomainError("Diracian residual needs dt > 0");
  const SpatialGrid1D& grid = mid.grid();
  const std::size_t n = grid.size();
  auto standard = [&](const GridFunction& psi, double time) {
    GridFunction out(grid, 4);
    for (std::size_t j = 0; j < n; ++j) {
      const ComplexVector v = l(BasePoint{p.c * time, grid.x(j)}) * psi.at_point(j);
      for (std::size_t a = 0; a < 4; ++a) out(a, j) = v[static_cast<Eigen::Index>(a)];
    }
    return out;
  };
  const GridFunction a = standard(prev, t - dt);
  const GridFunction b = standard(mid, t);
  const GridFunction z = standard(next, t + dt);
  GridFunction d0 = z;
  d0 -= a;
  d0 *= cplx{1.0 / (2.0 * dt * p.c), 0.0};
  const GridFunction d1 = derivative(b, 1);
  const auto g = dirac_gammas();
  const cplx ih = I * p.hbar;
  GridFunction r(grid, 4);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = grid.x(j);
    const ComplexDenseMatrix slash_a = g.gamma[0] * pot.phi_at(t, x) - g.gamma[1] * pot.a1_at(t, x);
    const ComplexDenseMatrix diracian = p.mass * p.c * identity_of(4) + (p.charge / p.c) * slash_a;
    const ComplexVector v =
        ih * (g.gamma[0] * d0.at_point(j) + g.gamma[1] * d1.at_point(j)) - diracian * b.at_point(j);
    const ComplexVector w = l.inverse(BasePoint{p.c * t, x}) * v;
    for (std::size_t k = 0; k < 4; ++k) r(k, j) = w[static_cast<Eigen::Index>(k)];
  }
  return norm(r);
}

}  // namespace bqm
