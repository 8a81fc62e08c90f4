#include "bqm/algebra.hpp"

#include <algorithm>
#include <sstream>

#include "bqm/errors.hpp"

namespace bqm {

struct LinearGridOperator::Node {
  Kind kind = Kind::zero;
  cplx value{1.0, 0.0};
  ScalarField field;
  ComplexVector samples;
  std::string name;
  int order = 0;
  // composition: children[0] o children[1] o ... ; sum: children[0] + children[1] + ...
  std::vector<LinearGridOperator> children;
};

namespace {

std::string format_cplx(cplx v) {
  std::ostringstream os;
  if (v.imag() == 0.0) {
    os << v.real();
  } else if (v.real() == 0.0) {
    os << v.imag() << "i";
  } else {
    os << "(" << v.real() << (v.imag() < 0 ? "-" : "+") << std::abs(v.imag()) << "i)";
  }
  return os.str();
}

}  // namespace

LinearGridOperator::LinearGridOperator() : LinearGridOperator(zero()) {}

LinearGridOperator::LinearGridOperator(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

LinearGridOperator LinearGridOperator::zero() {
  static const auto node = std::make_shared<const Node>(Node{Kind::zero, {0.0, 0.0}, {}, {}, "0", 0, {}});
  return LinearGridOperator(node);
}

LinearGridOperator LinearGridOperator::identity() {
  static const auto node = std::make_shared<const Node>(Node{Kind::identity, {1.0, 0.0}, {}, {}, "1", 0, {}});
  return LinearGridOperator(node);
}

LinearGridOperator LinearGridOperator::constant(cplx value) {
  if (value == cplx{0.0, 0.0}) return zero();
  if (value == cplx{1.0, 0.0}) return identity();
  return LinearGridOperator(std::make_shared<const Node>(Node{Kind::scale, value, {}, {}, format_cplx(value), 0, {}}));
}

LinearGridOperator LinearGridOperator::scale(ScalarField field, std::string name) {
  if (!field) throw DomainError("scale-by-function operator needs a callable field");
  return LinearGridOperator(
      std::make_shared<const Node>(Node{Kind::scale, {1.0, 0.0}, std::move(field), {}, std::move(name), 0, {}}));
}

LinearGridOperator LinearGridOperator::scale_samples(ComplexVector samples, std::string name) {
  if (!samples.allFinite()) throw DomainError("scale-by-samples operator needs finite samples");
  return LinearGridOperator(
      std::make_shared<const Node>(Node{Kind::scale, {1.0, 0.0}, {}, std::move(samples), std::move(name), 0, {}}));
}

LinearGridOperator LinearGridOperator::derivative(int order) {
  if (order != 1 && order != 2) {
    throw DomainError("unsupported derivative order " + std::to_string(order) + " (only 1 and 2)");
  }
  return LinearGridOperator(std::make_shared<const Node>(
      Node{Kind::derivative, {1.0, 0.0}, {}, {}, order == 1 ? "d/dx" : "d2/dx2", order, {}}));
}

LinearGridOperator LinearGridOperator::laplacian() {
  return LinearGridOperator(std::make_shared<const Node>(Node{Kind::laplacian, {1.0, 0.0}, {}, {}, "lap", 2, {}}));
}

LinearGridOperator::Kind LinearGridOperator::kind() const noexcept { return node_->kind; }

std::optional<cplx> LinearGridOperator::constant_value() const noexcept {
  switch (node_->kind) {
    case Kind::zero:
      return cplx{0.0, 0.0};
    case Kind::identity:
      return cplx{1.0, 0.0};
    case Kind::scale:
      if (!node_->field && node_->samples.size() == 0) return node_->value;
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

ComplexVector LinearGridOperator::apply(const SpatialGrid1D& grid, const ComplexVector& v) const {
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (v.size() != n) {
    throw DimensionError("operator input has " + std::to_string(v.size()) + " samples, grid has " +
                         std::to_string(n));
  }
  const Node& node = *node_;
  switch (node.kind) {
    case Kind::zero:
      return ComplexVector::Zero(n);
    case Kind::identity:
      return v;
    case Kind::scale: {
      if (node.field) {
        ComplexVector out(n);
        for (Eigen::Index j = 0; j < n; ++j) out[j] = node.field(grid.x(static_cast<std::size_t>(j))) * v[j];
        return out;
      }
      if (node.samples.size() != 0) {
        if (node.samples.size() != n) {
          throw DimensionError("sampled field '" + node.name + "' has " + std::to_string(node.samples.size()) +
                               " samples, grid has " + std::to_string(n));
        }
        return node.samples.cwiseProduct(v);
      }
      return node.value * v;
    }
    case Kind::derivative:
    case Kind::laplacian:
      return bqm::derivative(grid, v, node.order);
    case Kind::composition: {
      ComplexVector out = v;
      for (auto it = node.children.rbegin(); it != node.children.rend(); ++it) out = it->apply(grid, out);
      return out;
    }
    case Kind::sum: {
      ComplexVector out = ComplexVector::Zero(n);
      for (const auto& c : node.children) out += c.apply(grid, v);
      return out;
    }
  }
  return ComplexVector::Zero(n);
}

ComplexDenseMatrix LinearGridOperator::to_dense(const SpatialGrid1D& grid) const {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const Node& node = *node_;
  switch (node.kind) {
    case Kind::zero:
      return ComplexDenseMatrix::Zero(n, n);
    case Kind::identity:
      return ComplexDenseMatrix::Identity(n, n);
    case Kind::scale:
      return apply(grid, ComplexVector::Ones(n)).asDiagonal();
    case Kind::derivative:
    case Kind::laplacian:
      return derivative_matrix(grid, node.order);
    case Kind::composition: {
      ComplexDenseMatrix out = node.children.front().to_dense(grid);
      for (std::size_t i = 1; i < node.children.size(); ++i) out = out * node.children[i].to_dense(grid);
      return out;
    }
    case Kind::sum: {
      ComplexDenseMatrix out = ComplexDenseMatrix::Zero(n, n);
      for (const auto& c : node.children) out += c.to_dense(grid);
      return out;
    }
  }
  return ComplexDenseMatrix::Zero(n, n);
}

std::string LinearGridOperator::describe() const {
  const Node& node = *node_;
  switch (node.kind) {
    case Kind::composition:
    case Kind::sum: {
      std::string out = "(";
      const char* sep = node.kind == Kind::sum ? " + " : " o ";
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (i) out += sep;
        out += node.children[i].describe();
      }
      return out + ")";
    }
    default:
      return node.name;
  }
}

LinearGridOperator compose(const LinearGridOperator& a, const LinearGridOperator& b) {
  using Kind = LinearGridOperator::Kind;
  if (a.is_zero() || b.is_zero()) return LinearGridOperator::zero();
  if (a.kind() == Kind::identity) return b;
  if (b.kind() == Kind::identity) return a;
  const auto ca = a.constant_value();
  const auto cb = b.constant_value();
  if (ca && cb) return LinearGridOperator::constant(*ca * *cb);

  std::vector<LinearGridOperator> children;
  auto append = [&children](const LinearGridOperator& op) {
    if (op.kind() == Kind::composition) {
      for (const auto& c : op.node_->children) children.push_back(c);
    } else {
      children.push_back(op);
    }
  };
  append(a);
  append(b);
  // Constants commute with everything; fold them into one leading factor.
  cplx factor{1.0, 0.0};
  std::vector<LinearGridOperator> rest;
  for (const auto& c : children) {
    if (auto v = c.constant_value()) {
      factor *= *v;
    } else {
      rest.push_back(c);
    }
  }
  if (factor == cplx{0.0, 0.0}) return LinearGridOperator::zero();
  if (factor != cplx{1.0, 0.0}) rest.insert(rest.begin(), LinearGridOperator::constant(factor));
  if (rest.size() == 1) return rest.front();
  return LinearGridOperator(std::make_shared<const LinearGridOperator::Node>(
      LinearGridOperator::Node{Kind::composition, {1.0, 0.0}, {}, {}, "", 0, std::move(rest)}));
}

LinearGridOperator operator+(const LinearGridOperator& a, const LinearGridOperator& b) {
  using Kind = LinearGridOperator::Kind;
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const auto ca = a.constant_value();
  const auto cb = b.constant_value();
  if (ca && cb) return LinearGridOperator::constant(*ca + *cb);
  std::vector<LinearGridOperator> children;
  for (const auto* op : {&a, &b}) {
    if (op->kind() == Kind::sum) {
      for (const auto& c : op->node_->children) children.push_back(c);
    } else {
      children.push_back(*op);
    }
  }
  return LinearGridOperator(std::make_shared<const LinearGridOperator::Node>(
      LinearGridOperator::Node{Kind::sum, {1.0, 0.0}, {}, {}, "", 0, std::move(children)}));
}

LinearGridOperator operator*(cplx s, const LinearGridOperator& a) {
  return compose(LinearGridOperator::constant(s), a);
}

MatrixOperator::MatrixOperator(std::size_t n) : n_(n), entries_(n * n, LinearGridOperator::zero()) {
  if (n == 0) throw DimensionError("matrix operator needs at least one component");
}

MatrixOperator::MatrixOperator(std::size_t n, std::vector<LinearGridOperator> entries)
    : n_(n), entries_(std::move(entries)) {
  if (n == 0) throw DimensionError("matrix operator needs at least one component");
  if (entries_.size() != n * n) {
    throw DimensionError("matrix operator of size " + std::to_string(n) + " needs " + std::to_string(n * n) +
                         " entries, got " + std::to_string(entries_.size()));
  }
}

MatrixOperator MatrixOperator::identity(std::size_t n) {
  return diagonal(n, LinearGridOperator::identity());
}

MatrixOperator MatrixOperator::diagonal(std::size_t n, const LinearGridOperator& op) {
  MatrixOperator out(n);
  for (std::size_t a = 0; a < n; ++a) out(a, a) = op;
  return out;
}

MatrixOperator MatrixOperator::from_constant(const ComplexDenseMatrix& c) {
  return kron(c, LinearGridOperator::identity());
}

MatrixOperator MatrixOperator::kron(const ComplexDenseMatrix& c, const LinearGridOperator& op) {
  if (c.rows() != c.cols()) throw DimensionError("matrix operators are square");
  if (!c.allFinite()) throw DomainError("constant matrix has non-finite entries");
  const auto n = static_cast<std::size_t>(c.rows());
  MatrixOperator out(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      out(a, b) = c(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) * op;
    }
  }
  return out;
}

MatrixOperator MatrixOperator::from_point_matrices(const std::vector<ComplexDenseMatrix>& samples) {
  if (samples.empty()) throw DimensionError("point matrices need at least one sample");
  const auto n = static_cast<std::size_t>(samples.front().rows());
  const auto points = static_cast<Eigen::Index>(samples.size());
  MatrixOperator out(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      ComplexVector s(points);
      bool all_zero = true;
      for (Eigen::Index j = 0; j < points; ++j) {
        const auto& m = samples[static_cast<std::size_t>(j)];
        if (static_cast<std::size_t>(m.rows()) != n || m.cols() != m.rows()) {
          throw DimensionError("point matrix " + std::to_string(j) + " has the wrong shape");
        }
        s[j] = m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        all_zero = all_zero && s[j] == cplx{};
      }
      if (!all_zero) out(a, b) = LinearGridOperator::scale_samples(std::move(s));
    }
  }
  return out;
}

ComplexDenseMatrix MatrixOperator::to_dense(const SpatialGrid1D& grid) const {
  const auto np = static_cast<Eigen::Index>(grid.size());
  const auto dim = static_cast<Eigen::Index>(n_) * np;
  ComplexDenseMatrix out = ComplexDenseMatrix::Zero(dim, dim);
  for (std::size_t a = 0; a < n_; ++a) {
    for (std::size_t b = 0; b < n_; ++b) {
      const auto& e = (*this)(a, b);
      if (e.is_zero()) continue;
      out.block(static_cast<Eigen::Index>(a) * np, static_cast<Eigen::Index>(b) * np, np, np) = e.to_dense(grid);
    }
  }
  return out;
}

std::string MatrixOperator::describe() const {
  std::ostringstream os;
  for (std::size_t a = 0; a < n_; ++a) {
    os << "[";
    for (std::size_t b = 0; b < n_; ++b) {
      if (b) os << ", ";
      os << (*this)(a, b).describe();
    }
    os << "]\n";
  }
  return os.str();
}

MatrixOperator& MatrixOperator::operator+=(const MatrixOperator& other) {
  if (other.n_ != n_) throw DimensionError("adding matrix operators of different sizes");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] = entries_[i] + other.entries_[i];
  return *this;
}

MatrixOperator operator-(MatrixOperator a, const MatrixOperator& b) { return a += cplx{-1.0, 0.0} * b; }

MatrixOperator operator*(cplx s, const MatrixOperator& a) {
  MatrixOperator out(a.n_);
  for (std::size_t i = 0; i < a.entries_.size(); ++i) out.entries_[i] = s * a.entries_[i];
  return out;
}

GridFunction apply(const MatrixOperator& op, const GridFunction& psi) {
  if (op.size() != psi.components()) {
    throw DimensionError("matrix operator has " + std::to_string(op.size()) + " components, state has " +
                         std::to_string(psi.components()));
  }
  GridFunction out(psi.grid(), psi.components());
  for (std::size_t b = 0; b < op.size(); ++b) {
    const ComplexVector col = psi.component(b);
    for (std::size_t a = 0; a < op.size(); ++a) {
      const auto& e = op(a, b);
      if (e.is_zero()) continue;
      out.component(a) += e.apply(psi.grid(), col);
    }
  }
  return out;
}

MatrixOperator odot(const MatrixOperator& a, const MatrixOperator& b) {
  if (a.size() != b.size()) {
    throw DimensionError("odot of matrix operators of sizes " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  }
  const std::size_t n = a.size();
  MatrixOperator out(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      LinearGridOperator sum = LinearGridOperator::zero();
      for (std::size_t m = 0; m < n; ++m) sum = sum + compose(a(r, m), b(m, c));
      out(r, c) = sum;
    }
  }
  return out;
}

MatrixOperator block_diagonal(const std::vector<MatrixOperator>& blocks) {
  if (blocks.empty()) throw DimensionError("block-diagonal composite needs at least one block");
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.size();
  MatrixOperator out(n);
  std::size_t offset = 0;
  for (const auto& b : blocks) {
    for (std::size_t r = 0; r < b.size(); ++r) {
      for (std::size_t c = 0; c < b.size(); ++c) out(offset + r, offset + c) = b(r, c);
    }
    offset += b.size();
  }
  return out;
}

namespace {

std::vector<ComplexDenseMatrix> checked_inverses(const PointFrame& frame) {
  if (frame.matrices.size() != frame.grid.size()) {
    throw DimensionError("frame has " + std::to_string(frame.matrices.size()) + " matrices, grid has " +
                         std::to_string(frame.grid.size()) + " points");
  }
  std::vector<ComplexDenseMatrix> inv;
  inv.reserve(frame.matrices.size());
  for (std::size_t j = 0; j < frame.matrices.size(); ++j) {
    Eigen::FullPivLU<ComplexDenseMatrix> lu(frame.matrices[j]);
    if (!lu.isInvertible()) {
      throw SingularMatrixError("frame matrix is singular at grid point " + std::to_string(j) +
                                " (x = " + std::to_string(frame.grid.x(j)) + ")");
    }
    inv.push_back(lu.inverse());
  }
  return inv;
}

}  // namespace

MatrixOperator matrix_in_basis(const MatrixOperator& op, const PointFrame& frame) {
  const auto inv = checked_inverses(frame);
  if (static_cast<std::size_t>(frame.matrices.front().rows()) != op.size()) {
    throw DimensionError("frame dimension does not match the matrix operator");
  }
  return odot(odot(MatrixOperator::from_point_matrices(inv), op), MatrixOperator::from_point_matrices(frame.matrices));
}

GridFunction components_in_frame(const GridFunction& psi, const PointFrame& frame) {
  const auto inv = checked_inverses(frame);
  if (!(frame.grid == psi.grid()) || static_cast<std::size_t>(inv.front().rows()) != psi.components()) {
    throw DimensionError("frame does not match the grid function");
  }
  GridFunction out(psi.grid(), psi.components());
  for (std::size_t j = 0; j < psi.points(); ++j) {
    const ComplexVector v = inv[j] * psi.at_point(j);
    for (std::size_t a = 0; a < psi.components(); ++a) out(a, j) = v[static_cast<Eigen::Index>(a)];
  }
  return out;
}

std::vector<ComplexDenseMatrix> frame_derivative_term(const PointFrame& frame) {
  const auto inv = checked_inverses(frame);
  const auto n = frame.matrices.front().rows();
  const auto points = static_cast<Eigen::Index>(frame.grid.size());
  std::vector<ComplexDenseMatrix> df(frame.matrices.size(), ComplexDenseMatrix(n, n));
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      ComplexVector s(points);
      for (Eigen::Index j = 0; j < points; ++j) s[j] = frame.matrices[static_cast<std::size_t>(j)](a, b);
      const ComplexVector ds = derivative(frame.grid, s, 1);
      for (Eigen::Index j = 0; j < points; ++j) df[static_cast<std::size_t>(j)](a, b) = ds[j];
    }
  }
  for (std::size_t j = 0; j < df.size(); ++j) df[j] = inv[j] * df[j];
  return df;
}

std::array<ComplexDenseMatrix, 3> pauli_matrices() {
  const cplx i{0.0, 1.0};
  std::array<ComplexDenseMatrix, 3> s{ComplexDenseMatrix::Zero(2, 2), ComplexDenseMatrix::Zero(2, 2),
                                      ComplexDenseMatrix::Zero(2, 2)};
  s[0](0, 1) = 1.0;
  s[0](1, 0) = 1.0;
  s[1](0, 1) = -i;
  s[1](1, 0) = i;
  s[2](0, 0) = 1.0;
  s[2](1, 1) = -1.0;
  return s;
}

GammaSet dirac_gammas() {
  GammaSet set{4, {}};
  set.gamma[0] = ComplexDenseMatrix::Zero(4, 4);
  set.gamma[0].diagonal() << 1.0, 1.0, -1.0, -1.0;
  const auto sigma = pauli_matrices();
  for (int k = 0; k < 3; ++k) {
    ComplexDenseMatrix g = ComplexDenseMatrix::Zero(4, 4);
    g.block(0, 2, 2, 2) = sigma[static_cast<std::size_t>(k)];
    g.block(2, 0, 2, 2) = -sigma[static_cast<std::size_t>(k)];
    set.gamma[static_cast<std::size_t>(k + 1)] = g;
  }
  return set;
}

GammaSet kg_gammas() {
  GammaSet set{5, {}};
  for (int mu = 0; mu < 4; ++mu) {
    ComplexDenseMatrix g = ComplexDenseMatrix::Zero(5, 5);
    g(mu, 4) = 1.0;
    g(4, mu) = minkowski_metric[static_cast<std::size_t>(mu)];
    set.gamma[static_cast<std::size_t>(mu)] = g;
  }
  return set;
}

double anticommutator_defect(const GammaSet& set) {
  const auto d = static_cast<Eigen::Index>(set.dimension);
  const ComplexDenseMatrix id = ComplexDenseMatrix::Identity(d, d);
  double defect = 0.0;
  for (std::size_t mu = 0; mu < 4; ++mu) {
    for (std::size_t nu = 0; nu < 4; ++nu) {
      const double eta = mu == nu ? minkowski_metric[mu] : 0.0;
      const ComplexDenseMatrix r =
          set.gamma[mu] * set.gamma[nu] + set.gamma[nu] * set.gamma[mu] - 2.0 * eta * id;
      defect = std::max(defect, r.cwiseAbs().maxCoeff());
    }
  }
  return defect;
}

MatrixOperator slashed_contract(const GammaSet& set, const std::array<MatrixOperator, 4>& components) {
  MatrixOperator out(set.dimension);
  for (std::size_t mu = 0; mu < 4; ++mu) {
    if (components[mu].size() != set.dimension) {
      throw DimensionError("slashed contraction: component " + std::to_string(mu) + " has size " +
                           std::to_string(components[mu].size()) + ", gamma set has dimension " +
                           std::to_string(set.dimension));
    }
    out += odot(MatrixOperator::from_constant(set.gamma[mu]), components[mu]);
  }
  return out;
}

ComplexDenseMatrix slashed_contract(const GammaSet& set, const std::array<ComplexDenseMatrix, 4>& components) {
  const auto d = static_cast<Eigen::Index>(set.dimension);
  ComplexDenseMatrix out = ComplexDenseMatrix::Zero(d, d);
  for (std::size_t mu = 0; mu < 4; ++mu) {
    if (components[mu].rows() != d || components[mu].cols() != d) {
      throw DimensionError("slashed contraction: component " + std::to_string(mu) + " has the wrong shape");
    }
    out += set.gamma[mu] * components[mu];
  }
  return out;
}

}  // namespace bqm
