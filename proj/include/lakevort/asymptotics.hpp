#pragma once

#include <array>
#include <cstddef>

#include "lakevort/lake.hpp"

namespace lakevort {

enum class Part { Positive, Negative };
enum class SignConvention { Plus, Minus };

// Grid argmax of tau b / 4pi + Psi (positive) or (1 - tau) b / 4pi - Psi (negative).
Point concentration_point(const Lake& lake, double tau, const ScalarField& big_psi, Part part);

// min(tau, 1 - tau) / 4pi.
double nu_bound(double tau);

// int_0^t P(s) ds by composite midpoint on [0, 1].
class ProfileIntegral {
 public:
  explicit ProfileIntegral(const DepthProfile& profile, int panels = 10000);
  double operator()(double t) const;

 private:
  DepthProfile profile_;
  int panels_;
  std::vector<double> cumulative_;
};

// argmax over r in [0, 1] of weight P(r^2)/4pi + drift B(r^2): a 1-D scan with
// grid_m samples refined by golden section.
double radial_argmax(const DepthProfile& profile, double weight, double drift, int grid_m = 10000);

struct PairPrediction {
  double r_plus = 0.0;
  double r_minus = 0.0;
  double f_plus = 0.0;
  double f_minus = 0.0;
  SignConvention convention = SignConvention::Plus;
};

// Radial maximizers of F+(r) = tau P(r^2)/4pi + s (nu/2) B(r^2) and
// F-(r) = (1 - tau) P(r^2)/4pi - s (nu/2) B(r^2), B = int_0 P, s = +1 (plus) or -1.
PairPrediction rotating_radii(const DepthProfile& profile, double tau, double nu,
                              SignConvention convention = SignConvention::Plus, int grid_m = 10000);

// Psi(x) = s (nu/2) int_0^{|x|^2} P on interior cells.
ScalarField rotating_stream(const Lake& lake, const DepthProfile& profile, double nu,
                            SignConvention convention = SignConvention::Plus);

// Leading vortex drift (1/2pi) grad^perp b(z) log(1/eps) S.
std::array<double, 2> richardson_drift(const Lake& lake, Point z, double eps, double strength);

// (b(x)/4pi) int log(diam / |x - y|) zeta^{+/-}(y) dmu(y) +/- lambda Psi(x).
ScalarField leading_partial_flow(const Lake& lake, const ScalarField& zeta, const ScalarField& big_psi, double lambda,
                                 Part part);

struct PartReport {
  bool present = false;
  Point centroid;
  double diameter = 0.0;
  double mass = 0.0;
  double fraction_2eps = 0.0;
  double fraction_4eps = 0.0;
  std::size_t cells = 0;
};

struct ConcentrationReport {
  double eps = 0.0;
  PartReport positive;
  PartReport negative;
};

ConcentrationReport concentration_diagnostics(const Lake& lake, const ScalarField& zeta, double eps);

}  // namespace lakevort
