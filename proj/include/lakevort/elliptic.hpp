#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <span>
#include <vector>

#include "lakevort/lake.hpp"

namespace lakevort {

enum class SolverMethod { Pcg, Direct };

struct SolveOptions {
  SolverMethod method = SolverMethod::Pcg;
  double tol = 1e-10;
  int max_iter = 0;  // 0 -> 20 (nx + ny)
};

struct SolveReport {
  int iterations = 0;
  double relative_residual = 0.0;
};

// Discrete -div(b^{-1} grad .) on the interior cells of a lake, in strong
// form: (A u)_P = sum_f w_f (u_P - u_f) / h^2 with w = 1 / harmonic_mean(b).
// Faces toward the exterior are Dirichlet faces placed at the analytic shore
// crossing (symmetric cut-cell rule, only the diagonal changes).
class WeightedOperator {
 public:
  struct InteriorFace {
    std::size_t k1, k2;
    double w;
  };
  struct BoundaryFace {
    std::size_t k;
    int label;
    double w;
  };

  explicit WeightedOperator(const Lake& lake);

  const Lake& lake() const { return lake_; }
  std::size_t unknowns() const { return cells_.size(); }
  std::size_t cell_of(std::size_t k) const { return cells_[k]; }
  // Unknown index of a grid cell, -1 on exterior cells.
  long unknown_of(std::size_t idx) const { return unknown_[idx]; }
  const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }
  const std::vector<InteriorFace>& interior_faces() const { return interior_faces_; }
  const std::vector<BoundaryFace>& boundary_faces() const { return boundary_faces_; }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs, const SolveOptions& opts = {},
                        SolveReport* report = nullptr) const;

  // sum_faces w (du)(dv): the weighted Dirichlet form of two fields with
  // constant boundary values per exterior label (h^2 A in strong-form units).
  double dirichlet_form(const Eigen::VectorXd& u, std::span<const double> u_boundary,
                        const Eigen::VectorXd& v, std::span<const double> v_boundary) const;

  Eigen::VectorXd restrict(const ScalarField& f) const;
  ScalarField extend(const Eigen::VectorXd& u) const;

 private:
  struct Factorization;

  Lake lake_;
  std::vector<std::size_t> cells_;
  std::vector<long> unknown_;
  std::vector<InteriorFace> interior_faces_;
  std::vector<BoundaryFace> boundary_faces_;
  Eigen::SparseMatrix<double> matrix_;
  Eigen::VectorXd inv_diagonal_;
  std::shared_ptr<Factorization> factor_;
};

WeightedOperator assemble(const Lake& lake);

// psi = K(zeta): A psi = b zeta with homogeneous Dirichlet data.
ScalarField solve_k(const WeightedOperator& op, const ScalarField& zeta, const SolveOptions& opts = {},
                    SolveReport* report = nullptr);

struct HarmonicBasis {
  std::vector<ScalarField> psi;  // psi_0..psi_m
  Eigen::MatrixXd circulation;   // A_ij = a(psi_i, psi_j)

  int components() const { return static_cast<int>(psi.size()); }
};

HarmonicBasis harmonic_basis(const WeightedOperator& op, const SolveOptions& opts = {});

struct CirculationSpec {
  std::vector<double> c;

  double total() const;
};

// H(zeta) = sum_{i>=1} alpha_i psi_i with alpha_0 = 0.
ScalarField solve_h(const WeightedOperator& op, const HarmonicBasis& basis, const ScalarField& zeta,
                    const CirculationSpec& circ, double consistency_tol = 1e-8);

// Coefficients alpha_0..alpha_m behind solve_h.
std::vector<double> harmonic_coefficients(const WeightedOperator& op, const HarmonicBasis& basis,
                                          const ScalarField& zeta, const CirculationSpec& circ,
                                          double consistency_tol = 1e-8);

// grad psi by centered differences (one-sided next to exterior or severed faces).
VectorField gradient(const Lake& lake, const ScalarField& psi);
// b^{-1} grad^perp psi.
VectorField velocity(const Lake& lake, const ScalarField& psi);

}  // namespace lakevort
