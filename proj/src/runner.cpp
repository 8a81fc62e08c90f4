#include "bqm/runner.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "bqm/errors.hpp"

namespace bqm {

namespace {

constexpr cplx I{0.0, 1.0};

bool is_hermitian_equation(const std::string& type) {
  return type == "schrodinger" || type == "dirac" || type == "dirac-free" || type == "maxwell" || type == "zero";
}

Potential sampled(const SpatialGrid1D& grid, std::vector<double> samples) {
  return [grid, samples = std::move(samples)](double, double x) { return samples[grid.nearest_index(x)]; };
}

std::ofstream open_output(const RunOptions& options, const std::string& name) {
  std::filesystem::create_directories(options.out_dir);
  const auto path = std::filesystem::path(options.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file " + path.string());
  return out;
}

double plane_wave_k(const RunConfig& c) {
  return 2.0 * std::numbers::pi * static_cast<double>(c.initial.mode) / c.grid.length;
}

// Fibre components of the section psi w.r.t. l on the slice x0.
GridFunction in_trivialization(const Trivialization& l, const GridFunction& psi, double x0) {
  GridFunction out(psi.grid(), psi.components());
  for (std::size_t j = 0; j < psi.points(); ++j) {
    const ComplexVector v = l.inverse(BasePoint{x0, psi.grid().x(j)}) * psi.at_point(j);
    for (std::size_t a = 0; a < psi.components(); ++a) out(a, j) = v[static_cast<Eigen::Index>(a)];
  }
  return out;
}

void write_snapshot(std::ostream& out, double t, const GridFunction& psi) {
  for (std::size_t a = 0; a < psi.components(); ++a) {
    for (std::size_t j = 0; j < psi.points(); ++j) {
      const cplx v = psi(a, j);
      out << format_number(t) << ',' << format_number(psi.grid().x(j)) << ',' << a << ',' << format_number(v.real())
          << ',' << format_number(v.imag()) << '\n';
    }
  }
}

}  // namespace

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

SpatialGrid1D build_grid(const RunConfig& c) { return SpatialGrid1D(c.grid.points, c.grid.length, c.grid.boundary); }

PhysicalParameters build_parameters(const RunConfig& c) {
  return PhysicalParameters{c.equation.mass, c.equation.charge, c.equation.hbar, c.equation.c};
}

Potentials build_potentials(const RunConfig& c, const SpatialGrid1D& grid) {
  const auto& p = c.potential;
  Potentials pot;
  if (p.kind == "constant") {
    if (p.phi != 0.0) pot.phi = [v = p.phi](double, double) { return v; };
    if (p.a1 != 0.0) pot.a1 = [v = p.a1](double, double) { return v; };
  } else if (p.kind == "harmonic") {
    pot.phi = [k = p.strength, x0 = p.center](double, double x) { return 0.5 * k * (x - x0) * (x - x0); };
  } else if (p.kind == "samples") {
    pot.phi = sampled(grid, p.phi_samples);
    if (!p.a1_samples.empty()) pot.a1 = sampled(grid, p.a1_samples);
  }
  return pot;
}

HamiltonianFactory build_hamiltonian(const RunConfig& c, const SpatialGrid1D& grid) {
  const auto p = build_parameters(c);
  const auto pot = build_potentials(c, grid);
  const auto& type = c.equation.type;
  if (type == "schrodinger") return schrodinger_hamiltonian(p, pot);
  if (type == "dirac") return dirac_hamiltonian(p, pot);
  if (type == "dirac-free") return dirac_hamiltonian(p);
  if (type == "kg-canonical") return kg_canonical_hamiltonian(p, pot);
  if (type == "kg-nonrel") return kg_nonrel_hamiltonian(p, pot);
  if (type == "kg-5d" || type == "maxwell") {
    if (!pot.vanish()) throw ConfigError(type + " takes no external potential");
    return type == "kg-5d" ? kg_5d_hamiltonian(p) : maxwell_hamiltonian(p);
  }
  if (type == "zero") return zero_hamiltonian(c.equation.components, p.hbar);
  if (type == "companion") {
    LinearTimeSystem sys;
    sys.order = c.equation.coefficients.size();
    for (double f : c.equation.coefficients) {
      const MatrixOperator op = MatrixOperator::diagonal(1, LinearGridOperator::constant(f));
      sys.coefficients.push_back([op](double) { return op; });
    }
    return companion_hamiltonian(sys, p.hbar);
  }
  throw ConfigError("unknown equation type '" + type + "'");
}

GridFunction build_initial_state(const RunConfig& c, const SpatialGrid1D& grid) {
  const std::size_t m = state_components(c);
  const auto& init = c.initial;
  const auto& type = c.equation.type;
  GridFunction psi(grid, m);

  if (init.kind == "samples") {
    for (std::size_t i = 0; i < init.samples.size(); ++i) psi.values()[static_cast<Eigen::Index>(i)] = init.samples[i];
    return psi;
  }

  const auto p = build_parameters(c);
  ComplexVector f(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid.x(j);
    if (init.kind == "gaussian") {
      const double d = x - init.center;
      f[static_cast<Eigen::Index>(j)] = std::exp(-d * d / (4.0 * init.width * init.width) + I * init.momentum * x);
    } else {
      f[static_cast<Eigen::Index>(j)] = std::exp(I * plane_wave_k(c) * x);
    }
  }

  if (init.kind == "gaussian") {
    psi.component(init.component) = f;
  } else {
    const double k = plane_wave_k(c);
    const double sign = init.spinor == "negative" ? -1.0 : 1.0;
    const double omega = std::sqrt(p.c * p.c * k * k + std::pow(p.mass * p.c * p.c / p.hbar, 2));
    if (type == "dirac" || type == "dirac-free") {
      Eigen::SelfAdjointEigenSolver<ComplexDenseMatrix> es(dirac_symbol(p, k));
      const ComplexVector u = es.eigenvectors().col(sign > 0 ? 3 : 0);
      for (std::size_t a = 0; a < 4; ++a) psi.component(a) = u[static_cast<Eigen::Index>(a)] * f;
    } else if (type == "kg-canonical" || type == "kg-nonrel") {
      psi.component(0) = f;
      psi.component(1) = -I * sign * omega * f;
      if (type == "kg-nonrel") {
        GridFunction canonical = psi;
        const ComplexDenseMatrix a = kg_nonrel_frame(p);
        psi.component(0) = a(0, 0) * canonical.component(0) + a(0, 1) * canonical.component(1);
        psi.component(1) = a(1, 0) * canonical.component(0) + a(1, 1) * canonical.component(1);
      }
    } else if (type == "kg-5d") {
      psi.component(0) = p.mass * p.c * p.c * f;
      psi.component(1) = -I * sign * omega * f;
      psi.component(2) = I * k * f;
    } else if (type == "maxwell") {
      psi.component(0) = f;
      psi.component(1) = I * f;
      psi.component(2) = -I * f;
      psi.component(3) = f;
    } else {
      psi.component(0) = f;
    }
  }
  const double n = norm(psi);
  if (!(n > 0.0)) throw ConfigError("initial state has zero norm");
  psi *= cplx(1.0 / n);
  return psi;
}

Trivialization build_trivialization(const RunConfig& c) {
  const std::size_t m = state_components(c);
  const auto& t = c.trivialization;
  if (t.kind == "constant-unitary") {
    ComplexDenseMatrix r = ComplexDenseMatrix::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    r(0, 0) = std::cos(t.angle);
    r(0, 1) = -std::sin(t.angle);
    r(1, 0) = std::sin(t.angle);
    r(1, 1) = std::cos(t.angle);
    return Trivialization::constant(r);
  }
  if (t.kind == "phase-field") {
    const double a = t.amplitude;
    const double q = t.wavenumber;
    return Trivialization::phase_field(
        m, t.component, [a, q](const BasePoint& x) { return a * std::sin(q * x.x1); },
        {[](const BasePoint&) { return 0.0; }, [a, q](const BasePoint& x) { return a * q * std::cos(q * x.x1); }});
  }
  return Trivialization::identity(m);
}

EvolutionProblem build_problem(const RunConfig& c) {
  const SpatialGrid1D grid = build_grid(c);
  EvolutionProblem problem{build_hamiltonian(c, grid), grid, c.time.start, c.time.stop, c.time.step,
                           c.time.scheme == "midpoint-exponential" ? Scheme::midpoint_exponential
                                                                  : Scheme::crank_nicolson};
  try {
    problem.lattice_index(c.time.stop);
  } catch (const DomainError&) {
    throw ConfigError("time.stop is not reached by whole steps of time.step from time.start");
  }
  return problem;
}

RunReport run(const RunConfig& c, const RunOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  const EvolutionProblem problem = build_problem(c);
  const SpatialGrid1D& grid = problem.grid;
  const Trivialization l = build_trivialization(c);
  const double light = c.equation.c;
  const bool lifted = c.trivialization.kind != "identity";

  RunReport report;
  report.observable_names = c.output.observables;
  report.residual_names.push_back("norm-deviation");
  const bool kg = c.equation.type == "kg-canonical";
  for (const auto& name : c.output.observables) {
    if (name == "charge" && !kg) throw ConfigError("the charge observable needs equation type kg-canonical");
  }
  if (kg) report.residual_names.push_back("charge-deviation");
  if (lifted) report.residual_names.push_back("bundle-norm-deviation");

  GridFunction psi = build_initial_state(c, grid);
  const GridFunction psi0 = psi;
  const double norm0 = norm(psi0);
  const double charge0 = kg ? kg_charge(psi0) : 0.0;
  const std::size_t steps = problem.lattice_index(problem.t1);

  Eigen::VectorXd xs(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t j = 0; j < grid.size(); ++j) xs[static_cast<Eigen::Index>(j)] = grid.x(j);

  // Unwrapped phase of <psi0|psi(t)>, tracked every step.
  double phase = 0.0;
  double last_arg = 0.0;

  auto snapshot_row = [&](double t) {
    ReportRow row{t, norm(psi), {}, {}};
    for (const auto& name : c.output.observables) {
      if (name == "energy") {
        const GridFunction hpsi = apply(problem.factory(t), psi);
        row.observables.push_back((inner(psi, hpsi) / inner(psi, psi)).real());
      } else if (name == "charge") {
        row.observables.push_back(kg_charge(psi));
      } else if (name == "frequency") {
        row.observables.push_back(t > problem.t0 ? -phase / (t - problem.t0) : 0.0);
      } else if (name == "position") {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t a = 0; a < psi.components(); ++a) {
          const Eigen::VectorXd w = psi.component(a).cwiseAbs2();
          num += w.dot(xs);
          den += w.sum();
        }
        row.observables.push_back(den > 0.0 ? num / den : 0.0);
      }
    }
    row.residuals.push_back(std::abs(row.norm - norm0));
    if (kg) row.residuals.push_back(std::abs(kg_charge(psi) - charge0));
    if (lifted) {
      const double x0 = light * t;
      const GridFunction fibre = in_trivialization(l, psi, x0);
      row.residuals.push_back(std::abs(norm(fibre, induced_product(l, grid, x0)) - row.norm));
    }
    report.rows.push_back(std::move(row));
  };

  auto snapshots = open_output(options, "snapshots.csv");
  snapshots << "t,x,component,re,im\n";
  auto emit = [&](double t) {
    write_snapshot(snapshots, t, lifted ? in_trivialization(l, psi, light * t) : psi);
    snapshot_row(t);
  };

  emit(problem.t0);
  Stepper stepper(problem);
  for (std::size_t i = 0; i < steps; ++i) {
    psi = stepper.step(psi, problem.lattice_time(i));
    if (!psi.is_finite()) throw NumericalError("state became non-finite at step " + std::to_string(i + 1));
    const double arg = std::arg(inner(psi0, psi));
    double d = arg - last_arg;
    d -= 2.0 * std::numbers::pi * std::round(d / (2.0 * std::numbers::pi));
    phase += d;
    last_arg = arg;
    if ((i + 1) % c.output.every == 0 || i + 1 == steps) emit(problem.lattice_time(i + 1));
  }
  snapshots.close();

  auto out = open_output(options, "report.csv");
  out << "t,norm";
  for (const auto& n : report.observable_names) out << ',' << n;
  for (const auto& n : report.residual_names) out << ',' << n;
  out << '\n';
  for (const auto& row : report.rows) {
    out << format_number(row.t) << ',' << format_number(row.norm);
    for (double v : row.observables) out << ',' << format_number(v);
    for (double v : row.residuals) out << ',' << format_number(v);
    out << '\n';
  }
  out.close();

  const double tol = 1e-8 * options.tolerance_scale;
  const ReportRow& final = report.rows.back();
  if (is_hermitian_equation(c.equation.type) && final.residuals[0] > tol * std::max(1.0, norm0)) {
    report.failures.push_back("norm deviation " + format_number(final.residuals[0]) + " exceeds " + format_number(tol));
  }
  if (kg && c.potential.kind == "none" && final.residuals[1] > tol * std::max(1.0, std::abs(charge0))) {
    report.failures.push_back("charge deviation " + format_number(final.residuals[1]) + " exceeds " +
                              format_number(tol));
  }
  if (lifted && final.residuals.back() > tol * std::max(1.0, final.norm)) {
    report.failures.push_back("bundle norm deviation " + format_number(final.residuals.back()) + " exceeds " +
                              format_number(tol));
  }

  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  auto summary = open_output(options, "summary.txt");
  summary << "equation " << c.equation.type << '\n'
          << "hamiltonian " << problem.factory.label() << '\n'
          << "steps " << steps << '\n'
          << "snapshots " << report.rows.size() << '\n'
          << "wall-seconds " << report.wall_seconds << '\n'
          << "status " << (report.failures.empty() ? "ok" : "invariant-failure") << '\n';
  for (const auto& f : report.failures) summary << "failure " << f << '\n';
  return report;
}

GreenReport green(const RunConfig& c, const RunOptions& options) {
  EvolutionProblem problem = build_problem(c);
  problem.scheme = Scheme::midpoint_exponential;
  const SpatialGrid1D& grid = problem.grid;
  const GridFunction psi = build_initial_state(c, grid);
  const auto& type = c.equation.type;
  const double t_prime = problem.t1;
  const double t = problem.t0;
  if (!(t_prime > t)) throw ConfigError("green needs time.stop > time.start");

  GreenReport report;
  GreenKernel kernel = [&] {
    if (type == "schrodinger") return retarded_green_schrodinger(eigenbasis(problem.factory, grid), t_prime, t);
    if (type == "dirac" || type == "dirac-free") {
      return retarded_green_dirac(eigenbasis(problem.factory, grid), t_prime, t);
    }
    if (type == "kg-canonical") return kg_green_vector(problem.factory, grid, t_prime, t);
    throw ConfigError("green supports schrodinger, dirac, dirac-free and kg-canonical, not '" + type + "'");
  }();

  const GridFunction via_green = propagate_via_green(kernel, psi);
  const GridFunction evolved = evolve(problem, psi, t, t_prime);
  if (type == "kg-canonical") {
    GridFunction phi(grid, 1);
    phi.component(0) = evolved.component(0);
    report.duality_residual = norm(via_green - phi) / std::max(norm(phi), 1e-300);
    report.tolerance = 1e-6 * options.tolerance_scale;
  } else {
    report.duality_residual = norm(via_green - evolved) / norm(psi);
    report.tolerance = 1e-8 * options.tolerance_scale;
  }
  if (!(report.duality_residual <= report.tolerance)) {
    report.failures.push_back("green-evolution duality residual " + format_number(report.duality_residual) +
                              " exceeds " + format_number(report.tolerance));
  }

  auto out = open_output(options, "kernel.csv");
  out << "t_prime,t,row,col,re,im\n";
  for (Eigen::Index r = 0; r < kernel.matrix.rows(); ++r) {
    for (Eigen::Index k = 0; k < kernel.matrix.cols(); ++k) {
      const cplx v = kernel.matrix(r, k);
      out << format_number(t_prime) << ',' << format_number(t) << ',' << r << ',' << k << ','
          << format_number(v.real()) << ',' << format_number(v.imag()) << '\n';
    }
  }
  auto res = open_output(options, "green.csv");
  res << "t_prime,t,duality_residual\n"
      << format_number(t_prime) << ',' << format_number(t) << ',' << format_number(report.duality_residual) << '\n';
  return report;
}

void reduce(const RunConfig& c, const RunOptions& options) {
  const SpatialGrid1D grid = build_grid(c);
  const HamiltonianFactory h = build_hamiltonian(c, grid);
  const MatrixOperator op = h(c.time.start);
  {
    auto out = open_output(options, "hamiltonian.txt");
    out << "label " << h.label() << '\n'
        << "components " << h.dimension() << '\n'
        << "time-independent " << (h.time_independent() ? "yes" : "no") << '\n'
        << op.describe() << '\n';
  }
  const ComplexDenseMatrix dense = op.to_dense(grid);
  auto out = open_output(options, "hamiltonian.csv");
  out << "row,col,re,im\n";
  for (Eigen::Index r = 0; r < dense.rows(); ++r) {
    for (Eigen::Index k = 0; k < dense.cols(); ++k) {
      const cplx v = dense(r, k);
      if (v == cplx(0.0, 0.0)) continue;
      out << r << ',' << k << ',' << format_number(v.real()) << ',' << format_number(v.imag()) << '\n';
    }
  }
}

}  // namespace bqm
