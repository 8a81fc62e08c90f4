#include "bqm/reduction.hpp"

#include <cmath>
#include <sstream>

#include "bqm/errors.hpp"

namespace bqm {

namespace {

const cplx I{0.0, 1.0};

using LGO = LinearGridOperator;

LGO field_at(const Potential& f, double t, std::string name) {
  return LGO::scale([f, t](double x) { return cplx{f(t, x), 0.0}; }, std::move(name));
}

// d phi/dt by central difference; zero for static potentials.
double phi_rate(const Potentials& pot, double t, double x) {
  if (!pot.phi || pot.time_independent) return 0.0;
  const double eps = 1e-6;
  return (pot.phi(t + eps, x) - pot.phi(t - eps, x)) / (2.0 * eps);
}

void check_units(const PhysicalParameters& p) {
  if (!(p.hbar > 0.0) || !(p.c > 0.0)) throw DomainError("hbar and c must be positive");
  if (!std::isfinite(p.mass) || !std::isfinite(p.charge)) throw DomainError("mass and charge must be finite");
}

}  // namespace

HamiltonianFactory::HamiltonianFactory(std::string label, std::size_t dimension, double hbar,
                                       bool time_independent, Builder builder)
    : label_(std::move(label)),
      dimension_(dimension),
      hbar_(hbar),
      time_independent_(time_independent),
      builder_(std::move(builder)) {
  if (dimension == 0) throw DimensionError("Hamiltonian dimension must be positive");
  if (!(hbar > 0.0)) throw DomainError("hbar must be positive");
  if (!builder_) throw DomainError("Hamiltonian factory needs a builder");
}

MatrixOperator HamiltonianFactory::operator()(double t) const {
  MatrixOperator h = builder_(t);
  if (h.size() != dimension_) {
    throw DimensionError("factory '" + label_ + "' produced a " + std::to_string(h.size()) +
                         "-component operator, declared " + std::to_string(dimension_));
  }
  return h;
}

ComplexDenseMatrix GaugeFrame::derivative_at(double t) const {
  if (derivative) return derivative(t);
  if (constant) {
    const auto a = matrix(t);
    return ComplexDenseMatrix::Zero(a.rows(), a.cols());
  }
  const double eps = 1e-6 * time_scale;
  return (matrix(t + eps) - matrix(t - eps)) / (2.0 * eps);
}

double GaugeFrame::condition_number(double t) const {
  Eigen::JacobiSVD<ComplexDenseMatrix> svd(matrix(t));
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[s.size() - 1] == 0.0) return std::numeric_limits<double>::infinity();
  return s[0] / s[s.size() - 1];
}

HamiltonianFactory companion_hamiltonian(const LinearTimeSystem& sys, double hbar) {
  if (sys.order == 0) throw DomainError("companion reduction needs time order n >= 1");
  if (sys.coefficients.size() != sys.order) {
    throw DimensionError("time order " + std::to_string(sys.order) + " needs " + std::to_string(sys.order) +
                         " coefficient maps, got " + std::to_string(sys.coefficients.size()));
  }
  for (const auto& f : sys.coefficients) {
    if (!f) throw DomainError("companion coefficient map is empty");
  }
  const std::size_t n = sys.order;
  const std::size_t k = sys.base_components;
  return HamiltonianFactory("companion", n * k, hbar, sys.time_independent, [sys, hbar, n, k](double t) {
    MatrixOperator h(n * k);
    const cplx ih = I * hbar;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t a = 0; a < k; ++a) h(i * k + a, (i + 1) * k + a) = LGO::constant(ih);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const MatrixOperator f = sys.coefficients[i](t);
      if (f.size() != k) {
        throw DimensionError("coefficient f_" + std::to_string(i) + " has size " + std::to_string(f.size()) +
                             ", expected " + std::to_string(k));
      }
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) h((n - 1) * k + a, i * k + b) = ih * f(a, b);
      }
    }
    return h;
  });
}

HamiltonianFactory gauge_transform(const HamiltonianFactory& h, const GaugeFrame& frame) {
  if (!frame.matrix) throw DomainError("gauge frame needs a matrix function");
  const auto a0 = frame.matrix(0.0);
  if (static_cast<std::size_t>(a0.rows()) != h.dimension() || a0.rows() != a0.cols()) {
    throw DimensionError("gauge frame is " + std::to_string(a0.rows()) + "x" + std::to_string(a0.cols()) +
                         ", Hamiltonian has dimension " + std::to_string(h.dimension()));
  }
  const double hbar = h.hbar();
  const bool ti = h.time_independent() && frame.constant;
  return HamiltonianFactory(h.label() + "+gauge", h.dimension(), hbar, ti, [h, frame, hbar](double t) {
    const ComplexDenseMatrix a = frame.matrix(t);
    const double cond = frame.condition_number(t);
    if (!(cond < 1e12)) {
      std::ostringstream os;
      os << "gauge frame is singular at t = " << t << " (condition number " << cond << ")";
      throw SingularMatrixError(os.str());
    }
    const ComplexDenseMatrix ainv = a.inverse();
    MatrixOperator out = odot(odot(MatrixOperator::from_constant(a), h(t)), MatrixOperator::from_constant(ainv));
    const ComplexDenseMatrix extra = (I * hbar) * frame.derivative_at(t) * ainv;
    if (extra.cwiseAbs().maxCoeff() > 0.0) out += MatrixOperator::from_constant(extra);
    return out;
  });
}

ComplexDenseMatrix dirac_symbol(const PhysicalParameters& p, double k) {
  const auto g = dirac_gammas();
  const ComplexDenseMatrix alpha1 = g.gamma[0] * g.gamma[1];
  return p.c * p.hbar * k * alpha1 + p.mass * p.c * p.c * g.gamma[0];
}

HamiltonianFactory dirac_hamiltonian(const PhysicalParameters& p, const Potentials& pot) {
  check_units(p);
  const auto g = dirac_gammas();
  const ComplexDenseMatrix alpha1 = g.gamma[0] * g.gamma[1];
  const ComplexDenseMatrix beta = g.gamma[0];
  MatrixOperator base = MatrixOperator::kron(alpha1, cplx{0.0, -p.c * p.hbar} * LGO::derivative(1));
  base += MatrixOperator::from_constant(p.mass * p.c * p.c * beta);
  const std::string label = pot.vanish() ? "dirac-free" : "dirac";
  if (pot.vanish()) {
    return HamiltonianFactory(label, 4, p.hbar, true, [base](double) { return base; });
  }
  return HamiltonianFactory(label, 4, p.hbar, pot.time_independent, [base, alpha1, p, pot](double t) {
    MatrixOperator h = base;
    if (pot.phi) h += MatrixOperator::diagonal(4, p.charge * field_at(pot.phi, t, "phi"));
    if (pot.a1) h += MatrixOperator::kron(alpha1, -p.charge * field_at(pot.a1, t, "A1"));
    return h;
  });
}

LinearGridOperator kg_f0(const PhysicalParameters& p, const Potentials& pot, double t) {
  const double c2 = p.c * p.c;
  const double h2 = p.hbar * p.hbar;
  const double mass_term = p.mass * p.mass * c2 * c2 / h2;
  LGO f0 = c2 * LGO::laplacian() + LGO::constant(-mass_term);
  if (pot.vanish() || p.charge == 0.0) return f0;
  const double e = p.charge;
  if (pot.a1) {
    const LGO a = field_at(pot.a1, t, "A1");
    const LGO d = LGO::derivative(1);
    f0 = f0 + cplx{0.0, -p.c * e / p.hbar} * (compose(d, a) + compose(a, d));
  }
  f0 = f0 + LGO::scale(
                [pot, t, e, h2, hbar = p.hbar](double x) {
                  const double a = pot.a1_at(t, x);
                  const double phi = pot.phi_at(t, x);
                  return cplx{e * e * (phi * phi - a * a) / h2, 0.0} + cplx{0.0, -2.0 * e / hbar} * phi_rate(pot, t, x);
                },
                "f0-potential");
  return f0;
}

HamiltonianFactory kg_canonical_hamiltonian(const PhysicalParameters& p, const Potentials& pot) {
  check_units(p);
  const cplx ih = I * p.hbar;
  auto build = [p, pot, ih](double t) {
    MatrixOperator h(2);
    h(0, 1) = LGO::constant(ih);
    h(1, 0) = ih * kg_f0(p, pot, t);
    if (pot.phi && p.charge != 0.0) h(1, 1) = 2.0 * p.charge * field_at(pot.phi, t, "phi");
    return h;
  };
  return HamiltonianFactory(pot.vanish() ? "kg-canonical-free" : "kg-canonical", 2, p.hbar,
                            pot.vanish() || pot.time_independent, build);
}

ComplexDenseMatrix kg_nonrel_frame(const PhysicalParameters& p) {
  if (p.mass == 0.0) throw DomainError("non-relativistic KG split divides by m c^2; mass must be nonzero");
  const cplx kappa = I * p.hbar / (p.mass * p.c * p.c);
  ComplexDenseMatrix a(2, 2);
  a << 1.0, kappa, 1.0, -kappa;
  return a;
}

HamiltonianFactory kg_nonrel_hamiltonian(const PhysicalParameters& p, const Potentials& pot) {
  check_units(p);
  if (p.mass == 0.0) throw DomainError("non-relativistic KG split divides by m c^2; mass must be nonzero");
  const double mc2 = p.mass * p.c * p.c;
  auto build = [p, pot, mc2](double t) {
    const LGO f = (p.hbar * p.hbar / mc2) * kg_f0(p, pot, t);
    const LGO e2 =
        pot.phi && p.charge != 0.0 ? 2.0 * p.charge * field_at(pot.phi, t, "phi") : LGO::zero();
    const LGO m = LGO::constant(mc2);
    MatrixOperator h(2);
    h(0, 0) = 0.5 * (m + e2 + -1.0 * f);
    h(0, 1) = 0.5 * (-1.0 * m + -1.0 * e2 + -1.0 * f);
    h(1, 0) = 0.5 * (m + -1.0 * e2 + f);
    h(1, 1) = 0.5 * (-1.0 * m + e2 + f);
    return h;
  };
  return HamiltonianFactory(pot.vanish() ? "kg-nonrel-free" : "kg-nonrel", 2, p.hbar,
                            pot.vanish() || pot.time_independent, build);
}

HamiltonianFactory kg_5d_hamiltonian(const PhysicalParameters& p) {
  check_units(p);
  if (!(p.mass > 0.0)) throw DomainError("5-component KG form needs m > 0");
  const double mc2 = p.mass * p.c * p.c;
  const cplx ih = I * p.hbar;
  MatrixOperator h(5);
  h(0, 1) = LGO::constant(ih * mc2);
  h(1, 0) = LGO::constant(-ih * mc2 / (p.hbar * p.hbar));
  h(1, 2) = (ih * p.c * p.c) * LGO::derivative(1);
  h(2, 1) = ih * LGO::derivative(1);
  return HamiltonianFactory("kg-5d", 5, p.hbar, true, [h](double) { return h; });
}

double kg_5d_residual(const PhysicalParameters& p, const GridFunction& prev, const GridFunction& mid,
                      const GridFunction& next, double dt) {
  for (const auto* s : {&prev, &mid, &next}) {
    if (s->components() != 5) throw DimensionError("5-component KG residual needs 5-component states");
    if (!(s->grid() == mid.grid())) throw DimensionError("KG residual slices live on different grids");
  }
  if (!(dt > 0.0)) throw DomainError("KG residual needs dt > 0");
  const cplx ih = I * p.hbar;
  auto scaled = [&](const GridFunction& psi) {
    GridFunction v(psi.grid(), 5);
    for (std::size_t mu = 0; mu < 4; ++mu) v.component(mu) = ih * psi.component(mu + 1) / (mu == 0 ? p.c : 1.0);
    v.component(4) = psi.component(0) / p.c;
    return v;
  };
  const GridFunction a = scaled(prev);
  const GridFunction b = scaled(mid);
  const GridFunction z = scaled(next);
  GridFunction d0 = z;
  d0 -= a;
  d0 *= cplx{1.0 / (2.0 * dt * p.c), 0.0};
  const GridFunction d1 = derivative(b, 1);
  const auto gam = kg_gammas();
  GridFunction r(mid.grid(), 5);
  r.values() = -p.mass * p.c * b.values();
  const std::size_t n = mid.points();
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      const cplx g0 = gam.gamma[0](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      const cplx g1 = gam.gamma[1](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (g0 == cplx{} && g1 == cplx{}) continue;
      for (std::size_t x = 0; x < n; ++x) r(i, x) += ih * (g0 * d0(j, x) + g1 * d1(j, x));
    }
  }
  return norm(r);
}

HamiltonianFactory maxwell_hamiltonian(const PhysicalParameters& p) {
  check_units(p);
  const cplx ihc = I * p.hbar * p.c;
  const LGO d = LGO::derivative(1);
  MatrixOperator h(4);
  h(0, 3) = -ihc * d;
  h(1, 2) = ihc * d;
  h(2, 1) = ihc * d;
  h(3, 0) = -ihc * d;
  return HamiltonianFactory("maxwell", 4, p.hbar, true, [h](double) { return h; });
}

HamiltonianFactory block_diag_hamiltonian(const std::vector<HamiltonianFactory>& parts) {
  if (parts.empty()) throw DomainError("block-diagonal Hamiltonian needs at least one block");
  std::size_t dim = 0;
  bool ti = true;
  for (const auto& part : parts) {
    dim += part.dimension();
    ti = ti && part.time_independent();
    if (part.hbar() != parts.front().hbar()) throw DomainError("blocks use different hbar");
  }
  if (parts.size() == 1) return parts.front();
  return HamiltonianFactory("block-diag", dim, parts.front().hbar(), ti, [parts](double t) {
    std::vector<MatrixOperator> blocks;
    blocks.reserve(parts.size());
    for (const auto& part : parts) blocks.push_back(part(t));
    return block_diagonal(blocks);
  });
}

HamiltonianFactory schrodinger_hamiltonian(const PhysicalParameters& p, const Potentials& pot) {
  check_units(p);
  if (!(p.mass > 0.0)) throw DomainError("Schrodinger Hamiltonian needs m > 0");
  const LGO kinetic = (-p.hbar * p.hbar / (2.0 * p.mass)) * LGO::laplacian();
  if (!pot.phi || p.charge == 0.0) {
    MatrixOperator h = MatrixOperator::diagonal(1, kinetic);
    return HamiltonianFactory("schrodinger-free", 1, p.hbar, true, [h](double) { return h; });
  }
  return HamiltonianFactory("schrodinger", 1, p.hbar, pot.time_independent, [kinetic, p, pot](double t) {
    return MatrixOperator::diagonal(1, kinetic + p.charge * field_at(pot.phi, t, "phi"));
  });
}

HamiltonianFactory zero_hamiltonian(std::size_t dimension, double hbar) {
  return HamiltonianFactory("zero", dimension, hbar, true, [dimension](double) { return MatrixOperator(dimension); });
}

HamiltonianFactory constant_hamiltonian(const ComplexDenseMatrix& c, double hbar) {
  if (c.rows() != c.cols()) throw DimensionError("constant Hamiltonian must be square");
  const MatrixOperator h = MatrixOperator::from_constant(c);
  return HamiltonianFactory("constant", h.size(), hbar, true, [h](double) { return h; });
}

}  // namespace bqm
