#include "bqm/evolution.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/IterativeSolvers>
#include <unsupported/Eigen/MatrixFunctions>

#include "bqm/errors.hpp"

namespace bqm {
class CrankNicolsonOperator;
}

namespace Eigen::internal {
template <>
struct traits<bqm::CrankNicolsonOperator> : public traits<Eigen::SparseMatrix<std::complex<double>>> {};
}  // namespace Eigen::internal

namespace bqm {

// Matrix-free (Id + a H) for the iterative Crank-Nicolson solve.
class CrankNicolsonOperator : public Eigen::EigenBase<CrankNicolsonOperator> {
 public:
  using Scalar = cplx;
  using RealScalar = double;
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic, IsRowMajor = false };

  CrankNicolsonOperator(const MatrixOperator& h, const SpatialGrid1D& grid, cplx a)
      : h_(&h), grid_(&grid), a_(a), dim_(static_cast<Eigen::Index>(h.size() * grid.size())) {}

  Eigen::Index rows() const { return dim_; }
  Eigen::Index cols() const { return dim_; }

  template <typename Rhs>
  Eigen::Product<CrankNicolsonOperator, Rhs, Eigen::AliasFreeProduct> operator*(const Eigen::MatrixBase<Rhs>& x) const {
    return Eigen::Product<CrankNicolsonOperator, Rhs, Eigen::AliasFreeProduct>(*this, x.derived());
  }

  ComplexVector apply(const ComplexVector& v) const {
    const GridFunction f(*grid_, h_->size(), v);
    return v + a_ * bqm::apply(*h_, f).values();
  }

 private:
  const MatrixOperator* h_;
  const SpatialGrid1D* grid_;
  cplx a_;
  Eigen::Index dim_;
};

}  // namespace bqm

namespace Eigen::internal {
template <typename Rhs>
struct generic_product_impl<bqm::CrankNicolsonOperator, Rhs, SparseShape, DenseShape, GemvProduct>
    : generic_product_impl_base<bqm::CrankNicolsonOperator, Rhs,
                                generic_product_impl<bqm::CrankNicolsonOperator, Rhs>> {
  using Scalar = typename Product<bqm::CrankNicolsonOperator, Rhs>::Scalar;
  template <typename Dest>
  static void scaleAndAddTo(Dest& dst, const bqm::CrankNicolsonOperator& lhs, const Rhs& rhs, const Scalar& alpha) {
    dst.noalias() += alpha * lhs.apply(rhs);
  }
};
}  // namespace Eigen::internal

namespace bqm {

namespace {

const cplx I{0.0, 1.0};

void check_problem(const EvolutionProblem& p) {
  if (!(p.dt > 0.0) || !std::isfinite(p.dt)) throw DomainError("time step dt must be positive");
  if (!(p.t1 >= p.t0)) throw DomainError("time interval must satisfy t1 >= t0");
}

ComplexDenseMatrix build_step_matrix(const EvolutionProblem& p, double t) {
  const std::size_t dim = p.state_dimension();
  if (dim > dense_limit) {
    throw DimensionError("dense step matrix needs m*N <= " + std::to_string(dense_limit) + ", got " +
                         std::to_string(dim));
  }
  const auto d = static_cast<Eigen::Index>(dim);
  const ComplexDenseMatrix h = p.factory.dense(p.grid, t + 0.5 * p.dt);
  if (p.scheme == Scheme::midpoint_exponential) {
    const ComplexDenseMatrix arg = (-I * p.dt / p.factory.hbar()) * h;
    ComplexDenseMatrix out = arg.exp();
    if (!out.allFinite()) throw NumericalError("matrix exponential produced non-finite entries");
    return out;
  }
  const cplx a = I * p.dt / (2.0 * p.factory.hbar());
  const ComplexDenseMatrix id = ComplexDenseMatrix::Identity(d, d);
  Eigen::PartialPivLU<ComplexDenseMatrix> lu(id + a * h);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) {
    std::ostringstream os;
    os << "Crank-Nicolson system is singular at t = " << t << " (reciprocal condition estimate " << rcond << ")";
    throw NumericalError(os.str());
  }
  return lu.solve(id - a * h);
}

ComplexDenseMatrix identity_of(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return ComplexDenseMatrix::Identity(d, d);
}

ComplexDenseMatrix power(ComplexDenseMatrix base, std::size_t n) {
  ComplexDenseMatrix out = identity_of(static_cast<std::size_t>(base.rows()));
  while (n > 0) {
    if (n & 1U) out = base * out;
    n >>= 1U;
    if (n > 0) base = base * base;
  }
  return out;
}

}  // namespace

std::size_t EvolutionProblem::lattice_index(double t) const {
  const double r = (t - t0) / dt;
  const double n = std::round(r);
  if (!std::isfinite(r) || n < 0.0 || std::abs(r - n) > 1e-9 * std::max(1.0, std::abs(r))) {
    std::ostringstream os;
    os << "time " << t << " is not on the step lattice t0 + k*dt (t0 = " << t0 << ", dt = " << dt << ")";
    throw DomainError(os.str());
  }
  return static_cast<std::size_t>(n);
}

Stepper::Stepper(EvolutionProblem problem) : problem_(std::move(problem)) { check_problem(problem_); }

const ComplexDenseMatrix& Stepper::step_matrix(double t) {
  const double key = problem_.factory.time_independent() ? 0.0 : t;
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  if (!problem_.factory.time_independent()) cache_.clear();
  return cache_.emplace(key, build_step_matrix(problem_, t)).first->second;
}

ComplexVector Stepper::matrix_free_step(const ComplexVector& psi, double t) const {
  if (problem_.scheme != Scheme::crank_nicolson) {
    throw DimensionError("midpoint-exponential stepping needs m*N <= " + std::to_string(dense_limit));
  }
  const MatrixOperator h = problem_.factory(t + 0.5 * problem_.dt);
  const cplx a = I * problem_.dt / (2.0 * problem_.factory.hbar());
  const CrankNicolsonOperator lhs(h, problem_.grid, a);
  const ComplexVector rhs = CrankNicolsonOperator(h, problem_.grid, -a).apply(psi);
  Eigen::GMRES<CrankNicolsonOperator, Eigen::IdentityPreconditioner> solver;
  solver.setTolerance(1e-14);
  solver.setMaxIterations(2000);
  solver.compute(lhs);
  ComplexVector out = solver.solveWithGuess(rhs, psi);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "iterative Crank-Nicolson solve did not converge at t = " << t << " (residual " << solver.error() << ")";
    throw NumericalError(os.str());
  }
  return out;
}

ComplexVector Stepper::step(const ComplexVector& psi, double t) {
  if (static_cast<std::size_t>(psi.size()) != problem_.state_dimension()) {
    throw DimensionError("state has " + std::to_string(psi.size()) + " samples, problem expects " +
                         std::to_string(problem_.state_dimension()));
  }
  ComplexVector out = problem_.state_dimension() > dense_limit ? matrix_free_step(psi, t) : step_matrix(t) * psi;
  if (!out.allFinite()) throw NumericalError("state became non-finite at t = " + std::to_string(t));
  return out;
}

GridFunction Stepper::step(const GridFunction& psi, double t) {
  if (psi.components() != problem_.factory.dimension() || !(psi.grid() == problem_.grid)) {
    throw DimensionError("state does not match the problem's component count or grid");
  }
  return GridFunction(psi.grid(), psi.components(), step(psi.values(), t));
}

GridFunction step(const EvolutionProblem& problem, const GridFunction& psi, double t) {
  Stepper s(problem);
  return s.step(psi, t);
}

GridFunction evolve(const EvolutionProblem& problem, const GridFunction& psi, double from, double to) {
  const std::size_t i = problem.lattice_index(from);
  const std::size_t j = problem.lattice_index(to);
  if (j < i) throw DomainError("evolve runs forward only (to >= from)");
  Stepper s(problem);
  GridFunction out = psi;
  for (std::size_t k = i; k < j; ++k) out = s.step(out, problem.lattice_time(k));
  return out;
}

EvolutionOperator evolution_operator(const EvolutionProblem& problem, double t, double s) {
  check_problem(problem);
  const std::size_t it = problem.lattice_index(t);
  const std::size_t is = problem.lattice_index(s);
  const std::size_t dim = problem.state_dimension();
  if (dim > dense_limit) {
    throw DimensionError("dense evolution operator needs m*N <= " + std::to_string(dense_limit));
  }
  if (it == is) return {t, s, identity_of(dim)};
  if (it < is) {
    const auto forward = evolution_operator(problem, s, t);
    return {t, s, forward.matrix.partialPivLu().inverse()};
  }
  Stepper stepper(problem);
  if (problem.factory.time_independent()) return {t, s, power(stepper.step_matrix(s), it - is)};
  ComplexDenseMatrix u = identity_of(dim);
  for (std::size_t k = is; k < it; ++k) u = stepper.step_matrix(problem.lattice_time(k)) * u;
  return {t, s, u};
}

EvolutionFamily::EvolutionFamily(const EvolutionProblem& problem) : dimension_(problem.state_dimension()) {
  check_problem(problem);
  const std::size_t n = problem.lattice_index(problem.t1);
  Stepper stepper(problem);
  for (std::size_t k = 0; k <= n; ++k) times_.push_back(problem.lattice_time(k));
  for (std::size_t k = 0; k < n; ++k) {
    const ComplexDenseMatrix& p = stepper.step_matrix(problem.lattice_time(k));
    steps_.push_back(p);
    inverse_steps_.push_back(p.partialPivLu().inverse());
  }
}

std::size_t EvolutionFamily::index(double t) const {
  for (std::size_t i = 0; i < times_.size(); ++i) {
    const double scale = std::max(1.0, std::abs(t));
    if (std::abs(times_[i] - t) <= 1e-9 * scale) return i;
  }
  throw DomainError("time " + std::to_string(t) + " is not on the evolution family's lattice");
}

ComplexDenseMatrix EvolutionFamily::between(std::size_t i, std::size_t j) const {
  if (i >= size() || j >= size()) throw DomainError("lattice index out of range");
  ComplexDenseMatrix u = identity_of(dimension_);
  if (i > j) {
    for (std::size_t k = j; k < i; ++k) u = steps_[k] * u;
  } else {
    for (std::size_t k = j; k > i; --k) u = inverse_steps_[k - 1] * u;
  }
  return u;
}

cplx expectation(const Observable& obs, const GridFunction& psi) {
  const cplx nn = inner(psi, psi, obs.product);
  if (!(nn.real() > 0.0)) throw DomainError("expectation value of a zero-norm state");
  return inner(psi, apply(obs.op, psi), obs.product) / nn;
}

double kg_charge(const GridFunction& psi) {
  if (psi.components() != 2) throw DimensionError("KG charge needs a 2-component canonical state");
  const auto phi = psi.component(0);
  const auto rate = psi.component(1);
  return -2.0 * psi.grid().spacing() * phi.dot(rate).imag();
}

}  // namespace bqm
