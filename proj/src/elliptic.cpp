#include "lakevort/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>

#include "lakevort/error.hpp"

namespace lakevort {

namespace {

constexpr double kMinCrossing = 1e-3;

double harmonic_mean(double a, double b) {
  a = std::max(a, kDepthFloor);
  b = std::max(b, kDepthFloor);
  return 2.0 * a * b / (a + b);
}

constexpr Face kFaces[] = {Face::East, Face::North, Face::West, Face::South};

}  // namespace

struct WeightedOperator::Factorization {
  std::once_flag once;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool ok = false;
};

WeightedOperator::WeightedOperator(const Lake& lake) : lake_(lake), factor_(std::make_shared<Factorization>()) {
  const GridSpec& g = lake_.grid();
  unknown_.assign(g.size(), -1);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (!lake_.interior(idx)) continue;
    unknown_[idx] = static_cast<long>(cells_.size());
    cells_.push_back(idx);
  }
  if (cells_.empty()) throw Error(ErrorKind::EmptyDomain, "lake has no interior cells");

  const std::size_t n = cells_.size();
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t idx = cells_[k];
    const double bp = lake_.depth(idx);
    for (Face f : kFaces) {
      const long nb = lake_.neighbour(idx, f);
      if (nb < 0 || !lake_.face_open(idx, f)) continue;
      const auto q = static_cast<std::size_t>(nb);
      if (lake_.interior(q)) {
        // Each interior face once, from its west/south cell.
        if (f == Face::East || f == Face::North) {
          const double w = 1.0 / harmonic_mean(bp, lake_.depth(q));
          interior_faces_.push_back({k, static_cast<std::size_t>(unknown_[q]), w});
        }
        continue;
      }
      const Point pc = g.center(idx);
      const Point qc = g.center(q);
      double theta = 1.0;
      Point shore = qc;
      if (!lake_.shape().contains(qc)) {
        theta = std::max(lake_.shape().crossing(pc, qc), kMinCrossing);
        shore = pc + theta * (qc - pc);
      }
      // 1 / mean(b) over the segment P -> shore stays finite on dry shores.
      const double bs = lake_.depth_at(shore);
      const double w = 2.0 / (theta * std::max(bp + bs, kDepthFloor));
      const int label = lake_.component(q);
      if (label < 0) throw Error(ErrorKind::Geometry, "boundary cell without a component label");
      boundary_faces_.push_back({k, label, w});
    }
  }

  const double inv_h2 = 1.0 / (g.h * g.h);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(n + 4 * interior_faces_.size());
  for (const auto& f : interior_faces_) {
    const auto a = static_cast<Eigen::Index>(f.k1);
    const auto b = static_cast<Eigen::Index>(f.k2);
    const double w = f.w * inv_h2;
    trips.emplace_back(a, b, -w);
    trips.emplace_back(b, a, -w);
    diag[a] += w;
    diag[b] += w;
  }
  for (const auto& f : boundary_faces_) diag[static_cast<Eigen::Index>(f.k)] += f.w * inv_h2;
  for (std::size_t k = 0; k < n; ++k) {
    const auto a = static_cast<Eigen::Index>(k);
    trips.emplace_back(a, a, diag[a]);
  }
  matrix_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  matrix_.setFromTriplets(trips.begin(), trips.end());
  matrix_.makeCompressed();
  inv_diagonal_ = diag.cwiseInverse();
}

Eigen::VectorXd WeightedOperator::solve(const Eigen::VectorXd& rhs, const SolveOptions& opts,
                                        SolveReport* report) const {
  if (rhs.size() != matrix_.rows()) throw Error(ErrorKind::Shape, "right-hand side has the wrong length");
  if (!(opts.tol > 0.0)) throw Error(ErrorKind::Parameter, "solver tolerance must be positive");
  const double rhs_norm = rhs.norm();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(rhs.size());
  SolveReport rep;
  if (rhs_norm == 0.0) {
    if (report) *report = rep;
    return x;
  }

  if (opts.method == SolverMethod::Direct) {
    std::call_once(factor_->once, [this] {
      factor_->ldlt.compute(matrix_);
      factor_->ok = factor_->ldlt.info() == Eigen::Success;
    });
    if (!factor_->ok) throw Error(ErrorKind::Solver, "sparse factorization failed");
    x = factor_->ldlt.solve(rhs);
    rep.iterations = 1;
    rep.relative_residual = (rhs - matrix_ * x).norm() / rhs_norm;
    if (report) *report = rep;
    return x;
  }

  // Jacobi-preconditioned conjugate gradients.
  const GridSpec& g = lake_.grid();
  const int max_iter = opts.max_iter > 0 ? opts.max_iter : 20 * (g.nx + g.ny);
  Eigen::VectorXd r = rhs;
  Eigen::VectorXd z = inv_diagonal_.cwiseProduct(r);
  Eigen::VectorXd p = z;
  Eigen::VectorXd ap(rhs.size());
  double rz = r.dot(z);
  double res = 1.0;
  int it = 0;
  while (it < max_iter) {
    ap.noalias() = matrix_ * p;
    const double alpha = rz / p.dot(ap);
    x.noalias() += alpha * p;
    r.noalias() -= alpha * ap;
    ++it;
    res = r.norm() / rhs_norm;
    if (res <= opts.tol) break;
    z = inv_diagonal_.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  rep.iterations = it;
  rep.relative_residual = res;
  if (report) *report = rep;
  if (res > opts.tol) {
    std::ostringstream msg;
    msg << "conjugate gradients stopped after " << it << " iterations with relative residual " << res;
    throw Error(ErrorKind::Solver, msg.str());
  }
  return x;
}

double WeightedOperator::dirichlet_form(const Eigen::VectorXd& u, std::span<const double> u_boundary,
                                        const Eigen::VectorXd& v, std::span<const double> v_boundary) const {
  double s = 0.0;
  for (const auto& f : interior_faces_) {
    const auto a = static_cast<Eigen::Index>(f.k1);
    const auto b = static_cast<Eigen::Index>(f.k2);
    s += f.w * (u[a] - u[b]) * (v[a] - v[b]);
  }
  for (const auto& f : boundary_faces_) {
    const auto a = static_cast<Eigen::Index>(f.k);
    const auto l = static_cast<std::size_t>(f.label);
    const double ub = l < u_boundary.size() ? u_boundary[l] : 0.0;
    const double vb = l < v_boundary.size() ? v_boundary[l] : 0.0;
    s += f.w * (u[a] - ub) * (v[a] - vb);
  }
  return s;
}

Eigen::VectorXd WeightedOperator::restrict(const ScalarField& f) const {
  require_aligned(lake_.grid(), f, "field");
  Eigen::VectorXd u(static_cast<Eigen::Index>(cells_.size()));
  for (std::size_t k = 0; k < cells_.size(); ++k) u[static_cast<Eigen::Index>(k)] = f[cells_[k]];
  return u;
}

ScalarField WeightedOperator::extend(const Eigen::VectorXd& u) const {
  ScalarField f(lake_.grid());
  for (std::size_t k = 0; k < cells_.size(); ++k) f[cells_[k]] = u[static_cast<Eigen::Index>(k)];
  return f;
}

WeightedOperator assemble(const Lake& lake) { return WeightedOperator(lake); }

ScalarField solve_k(const WeightedOperator& op, const ScalarField& zeta, const SolveOptions& opts,
                    SolveReport* report) {
  Eigen::VectorXd rhs = op.restrict(zeta);
  for (std::size_t k = 0; k < op.unknowns(); ++k) rhs[static_cast<Eigen::Index>(k)] *= op.lake().depth(op.cell_of(k));
  return op.extend(op.solve(rhs, opts, report));
}

HarmonicBasis harmonic_basis(const WeightedOperator& op, const SolveOptions& opts) {
  const int m1 = op.lake().component_count();
  std::vector<char> seen(static_cast<std::size_t>(m1), 0);
  for (const auto& f : op.boundary_faces()) seen[static_cast<std::size_t>(f.label)] = 1;
  for (int i = 0; i < m1; ++i) {
    if (!seen[static_cast<std::size_t>(i)]) {
      throw Error(ErrorKind::Geometry, "exterior component " + std::to_string(i) + " touches no interior cell");
    }
  }

  const double inv_h2 = 1.0 / (op.lake().grid().h * op.lake().grid().h);
  HarmonicBasis basis;
  std::vector<Eigen::VectorXd> u(static_cast<std::size_t>(m1));
  std::vector<std::vector<double>> data(static_cast<std::size_t>(m1), std::vector<double>(static_cast<std::size_t>(m1), 0.0));
  for (int i = 0; i < m1; ++i) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(op.unknowns()));
    for (const auto& f : op.boundary_faces()) {
      if (f.label == i) rhs[static_cast<Eigen::Index>(f.k)] += f.w * inv_h2;
    }
    u[static_cast<std::size_t>(i)] = op.solve(rhs, opts);
    data[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
    basis.psi.push_back(op.extend(u[static_cast<std::size_t>(i)]));
  }
  basis.circulation.resize(m1, m1);
  for (int i = 0; i < m1; ++i) {
    for (int j = i; j < m1; ++j) {
      const double a = op.dirichlet_form(u[static_cast<std::size_t>(i)], data[static_cast<std::size_t>(i)],
                                         u[static_cast<std::size_t>(j)], data[static_cast<std::size_t>(j)]);
      basis.circulation(i, j) = a;
      basis.circulation(j, i) = a;
    }
  }
  return basis;
}

double CirculationSpec::total() const { return std::accumulate(c.begin(), c.end(), 0.0); }

std::vector<double> harmonic_coefficients(const WeightedOperator& op, const HarmonicBasis& basis,
                                          const ScalarField& zeta, const CirculationSpec& circ,
                                          double consistency_tol) {
  const Lake& lake = op.lake();
  require_aligned(lake.grid(), zeta, "vorticity");
  const int m1 = basis.components();
  if (static_cast<int>(circ.c.size()) != m1) {
    throw Error(ErrorKind::Shape, "expected " + std::to_string(m1) + " circulations, got " +
                                      std::to_string(circ.c.size()));
  }
  const double mass = mu_integral(lake, zeta);
  double scale = std::max(1.0, std::fabs(mass));
  for (double c : circ.c) scale = std::max(scale, std::fabs(c));
  const double defect = std::fabs(circ.total() - mass);
  if (defect > consistency_tol * scale) {
    std::ostringstream msg;
    msg << "circulations sum to " << circ.total() << " but the vorticity integrates to " << mass
        << " (defect " << defect << ")";
    throw Error(ErrorKind::Consistency, msg.str());
  }
  std::vector<double> alpha(static_cast<std::size_t>(m1), 0.0);
  const int m = m1 - 1;
  if (m == 0) return alpha;
  Eigen::MatrixXd a = basis.circulation.bottomRightCorner(m, m);
  Eigen::VectorXd rhs(m);
  for (int j = 1; j <= m; ++j) {
    ScalarField prod(lake.grid());
    const ScalarField& pj = basis.psi[static_cast<std::size_t>(j)];
    for (std::size_t idx = 0; idx < prod.size(); ++idx) prod[idx] = pj[idx] * zeta[idx];
    rhs[j - 1] = -circ.c[static_cast<std::size_t>(j)] + mu_integral(lake, prod);
  }
  Eigen::VectorXd sol = a.ldlt().solve(rhs);
  for (int j = 1; j <= m; ++j) alpha[static_cast<std::size_t>(j)] = sol[j - 1];
  return alpha;
}

ScalarField solve_h(const WeightedOperator& op, const HarmonicBasis& basis, const ScalarField& zeta,
                    const CirculationSpec& circ, double consistency_tol) {
  const std::vector<double> alpha = harmonic_coefficients(op, basis, zeta, circ, consistency_tol);
  ScalarField out(op.lake().grid());
  for (std::size_t i = 1; i < alpha.size(); ++i) {
    if (alpha[i] == 0.0) continue;
    for (std::size_t idx = 0; idx < out.size(); ++idx) out[idx] += alpha[i] * basis.psi[i][idx];
  }
  return out;
}

VectorField gradient(const Lake& lake, const ScalarField& psi) {
  require_aligned(lake.grid(), psi, "stream function");
  const GridSpec& g = lake.grid();
  VectorField out(g);
  auto usable = [&](std::size_t idx, Face f) -> long {
    const long nb = lake.neighbour(idx, f);
    if (nb < 0 || !lake.interior(static_cast<std::size_t>(nb)) || !lake.face_open(idx, f)) return -1;
    return nb;
  };
  auto derivative = [&](std::size_t idx, Face plus, Face minus) {
    const long p = usable(idx, plus);
    const long m = usable(idx, minus);
    if (p >= 0 && m >= 0) return (psi[static_cast<std::size_t>(p)] - psi[static_cast<std::size_t>(m)]) / (2.0 * g.h);
    if (p >= 0) return (psi[static_cast<std::size_t>(p)] - psi[idx]) / g.h;
    if (m >= 0) return (psi[idx] - psi[static_cast<std::size_t>(m)]) / g.h;
    return 0.0;
  };
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (!lake.interior(idx)) continue;
    out.values[idx] = {derivative(idx, Face::East, Face::West), derivative(idx, Face::North, Face::South)};
  }
  return out;
}

VectorField velocity(const Lake& lake, const ScalarField& psi) {
  VectorField v = gradient(lake, psi);
  for (std::size_t idx = 0; idx < v.values.size(); ++idx) {
    if (!lake.interior(idx)) continue;
    const double b = std::max(lake.depth(idx), kDepthFloor);
    const auto [gx, gy] = v.values[idx];
    v.values[idx] = {-gy / b, gx / b};
  }
  return v;
}

}  // namespace lakevort
