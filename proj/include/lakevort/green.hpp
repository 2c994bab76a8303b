#pragma once

#include <span>
#include <vector>

#include "lakevort/elliptic.hpp"

namespace lakevort {

// Equivalent distance of the cell-averaged log kernel: the mean of log|x - y|
// over a square cell of side h equals log(kSelfDistance h).
inline constexpr double kSelfDistance = 0.34605;

// Dirichlet Green's function of -Laplace on the unit disk (method of images).
double disk_green(Point x, Point y);
// Dirichlet Green's function on the annulus r_inner < |x| < 1 (Fourier series).
double annulus_green(Point x, Point y, double r_inner);
// Regular part H with g = (1/2pi) log(1/|x-y|) - H.
double green_regular_part(const Lake& lake, Point x, Point y);
// g with |x - y| clamped below at min_distance (disk or annulus lakes).
double green_regularized(const Lake& lake, Point x, Point y, double min_distance);

// R(., y): a(R, phi) = -int <g(., y) grad b, grad phi> dm / b with R = 0 on the shore.
ScalarField remainder_solve(const WeightedOperator& op, Point y, const SolveOptions& opts = {SolverMethod::Direct});

struct GreenDecomposition {
  std::vector<Point> probes;
  std::vector<double> masses;  // int zeta dmu over each probe box
  std::vector<ScalarField> remainder;
  std::vector<double> sup_remainder;
};

struct ExpansionProbe {
  Point y;
  double sup_r = 0.0;
  double rel_err = 0.0;
  double mass = 0.0;
};

struct ExpansionReport {
  double max_rel_error = 0.0;
  std::vector<ExpansionProbe> probes;
  std::size_t support_cells = 0;
};

struct ExpansionOptions {
  int probe_res = 32;
  double interior_margin = 0.1;
  int threads = 1;
};

// Compares K zeta + H zeta against b int g zeta dmu + sum_j R(., y_j) m_j on
// cells farther than interior_margin from the shore.
ExpansionReport verify_expansion(const WeightedOperator& op, const HarmonicBasis& basis, const ScalarField& zeta,
                                 const CirculationSpec& circ, const ExpansionOptions& opts = {},
                                 GreenDecomposition* decomposition = nullptr);

}  // namespace lakevort
