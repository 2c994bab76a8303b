#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lakevort/config.hpp"
#include "lakevort/green.hpp"

namespace lakevort {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

// Symmetry, linearity and positivity of K; maximum principle and partition of
// unity of the harmonic basis; symmetry, spectrum and kernel of A.
std::vector<CheckResult> operator_checks(const WeightedOperator& op, const HarmonicBasis& basis, int random_fields,
                                         std::uint64_t seed, const SolveOptions& opts = {});

// Strength identities and layer-cake measures of the class after a bathtub
// step on a random stream function.
std::vector<CheckResult> class_checks(const Lake& lake, const VortexProfile& profile, std::uint64_t seed);

// Lake, operator, basis and forcing assembled from a config.
struct Problem {
  Lake lake;
  WeightedOperator op;
  HarmonicBasis basis;
  ScalarField big_psi;
  double lambda = 1.0;
  std::vector<double> cbar;
};

Problem make_problem(const ExperimentConfig& cfg);

struct MaximizeRun {
  LevelQuota quotas;
  AscentState state;
  ConcentrationReport concentration;
};

MaximizeRun run_maximizer(const Problem& problem, const VortexProfile& profile, const MaximizeOptions& opts);

struct RunContext {
  std::string out_dir;
  int threads = 1;
  std::ostream* log = nullptr;
};

// Each command writes its tables under out_dir and returns the exit code.
int cmd_maximize(const ExperimentConfig& cfg, const RunContext& ctx);
int cmd_figure1(const ExperimentConfig& cfg, const RunContext& ctx);
int cmd_epsilon_sweep(const ExperimentConfig& cfg, const RunContext& ctx);
int cmd_invariants(const ExperimentConfig& cfg, const RunContext& ctx);
int cmd_green_check(const ExperimentConfig& cfg, const RunContext& ctx);

// Smooth bump (1 - |x - c|^2 / rho^2)^2_+ on interior cells.
ScalarField bump_field(const Lake& lake, Point center, double radius);

}  // namespace lakevort
