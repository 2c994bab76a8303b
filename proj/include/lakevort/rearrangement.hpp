#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lakevort/elliptic.hpp"

namespace lakevort {

enum class DistributionFamily { Uniform, Exponential, Linear, Step };

// Non-increasing D >= 0 on [0, inf) with int D = 1 and sup D = D(0) = delta.
class DistributionFunction {
 public:
  // D = delta on [0, 1/delta).
  static DistributionFunction uniform(double delta = 1.0);
  // D = delta exp(-delta t).
  static DistributionFunction exponential(double delta = 1.0);
  // D = delta (1 - delta t / 2)_+.
  static DistributionFunction linear(double delta = 1.0);
  // D = values[k] on [breaks[k], breaks[k+1]); breaks[0] = 0, one more break than values.
  static DistributionFunction step(std::vector<double> breaks, std::vector<double> values);
  // `uniform`, `exponential`, `linear` or `step:t1,t2,...;d0,d1,...` (breaks after 0).
  static DistributionFunction from_name(const std::string& spec);

  DistributionFamily family() const { return family_; }
  double sup() const { return delta_; }
  double operator()(double t) const;
  double integral() const;
  // int_0^inf t^p D(t) dt
  double moment(double p) const;
  // int_{u0}^{u1} D^{-1}(u) du with D^{-1}(u) = sup{t : D(t) >= u}, 0 <= u0 <= u1 <= delta.
  double inverse_integral(double u0, double u1) const;
  std::string name() const;

 private:
  DistributionFamily family_ = DistributionFamily::Uniform;
  double delta_ = 1.0;
  std::vector<double> breaks_;
  std::vector<double> values_;
};

struct VortexProfile {
  DistributionFunction distribution = DistributionFunction::uniform();
  double tau = 0.5;
  double eps = 0.1;
  double p = 2.0;
  int levels = 1;

  double log_inv_eps() const;
  // int zeta^+ dmu and int zeta^- dmu demanded by the class.
  double positive_strength() const;
  double negative_strength() const;
};

struct Level {
  double value = 0.0;  // > 0, decreasing along the list
  double quota = 0.0;  // mu-measure carried at this value
};

struct LevelQuota {
  std::vector<Level> positive;
  std::vector<Level> negative;
  double eps = 0.0;
  double tau = 0.0;

  static double strength(const std::vector<Level>& levels);
  static double measure(const std::vector<Level>& levels);
};

LevelQuota build_quotas(const VortexProfile& profile, const Lake& lake);

// Places the decreasing step function `levels` along `order`: each cell takes
// the mean of the step function over its own mu-interval, so at most one cell
// per level boundary mixes two values. Cells flagged in `used` are skipped and
// every filled cell is flagged.
void fill_levels(const Lake& lake, const std::vector<std::size_t>& order, const std::vector<Level>& levels, double sign,
                 ScalarField& out, std::vector<std::uint8_t>& used);

// Decreasing mu-distribution of a non-negative field as levels.
std::vector<Level> distribution_of(const Lake& lake, const ScalarField& field);

// Rearrangement of a non-negative field whose superlevel sets are discrete
// balls centred at x (clipped by the lake).
ScalarField symmetrize_at(const Lake& lake, const ScalarField& field, Point x);

// mu({f >= lambda}).
double superlevel_measure(const Lake& lake, const ScalarField& f, double lambda);

struct EnergyEvaluation {
  double value = 0.0;
  ScalarField psi_k;
  ScalarField psi_h;
};

// E = 1/2 int zeta (K zeta + H zeta) dmu + lambda int Psi zeta dmu.
EnergyEvaluation energy(const WeightedOperator& op, const HarmonicBasis& basis, const ScalarField& zeta,
                        const ScalarField& big_psi, double lambda, const CirculationSpec& circ,
                        const SolveOptions& opts = {SolverMethod::Direct});

// Best response: maximizes int zeta psi dmu over the class.
ScalarField bathtub_step(const Lake& lake, const LevelQuota& quotas, const ScalarField& psi);

enum class InitKind { Predicted, Random, Given };

struct MaximizeOptions {
  int max_iter = 200;
  double rel_tol = 1e-10;
  InitKind init = InitKind::Predicted;
  std::uint64_t seed = 1;
  std::optional<ScalarField> initial;
  SolveOptions solve{SolverMethod::Direct};
  // Extra ascents from random placements (seeds seed+1, seed+2, ...); the
  // converged state of highest energy is returned.
  int restarts = 0;
};

struct AscentState {
  ScalarField zeta;
  ScalarField psi_total;
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;

  double energy() const { return trace.empty() ? 0.0 : trace.back(); }
};

// Circulations c_i = cbar_i (2 tau - 1) / log(1/eps).
CirculationSpec scaled_circulations(const std::vector<double>& cbar, const VortexProfile& profile);

ScalarField initial_state(const Lake& lake, const LevelQuota& quotas, const ScalarField& big_psi, double lambda,
                          const MaximizeOptions& opts);

AscentState maximize(const WeightedOperator& op, const HarmonicBasis& basis, const LevelQuota& quotas,
                     const ScalarField& big_psi, double lambda, const CirculationSpec& circ,
                     const MaximizeOptions& opts = {});

// max over test fields phi of |int zeta <grad^perp psi, grad phi> dm| / int |zeta| |grad psi| |grad phi| dm.
double steadiness_residual(const Lake& lake, const ScalarField& zeta, const ScalarField& psi_total, int n_tests,
                           std::uint64_t seed = 7);

}  // namespace lakevort
