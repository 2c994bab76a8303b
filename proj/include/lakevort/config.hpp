#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lakevort/asymptotics.hpp"
#include "lakevort/rearrangement.hpp"

namespace lakevort {

// Flat `[section]` / `key = value` experiment description. `#` starts a comment.
struct ExperimentConfig {
  struct LakeBlock {
    std::string geometry = "disk";
    int n = 64;
    double r_inner = 0.4;
    std::string profile = "parabolic";
  } lake;

  struct ProfileBlock {
    double tau = 0.7;
    double eps = 0.1;
    std::vector<double> eps_list = {0.2, 0.1, 0.05};
    std::string distribution = "uniform";
    int levels = 1;
    double p = 2.0;
  } profile;

  struct PhysicsBlock {
    double nu = 0.0;
    std::string psi = "rotating";  // rotating | zero
    std::vector<double> circulations;  // cbar_i; empty -> (1, 0, ..., 0)
    double lambda = 1.0;
    std::string convention = "plus";
  } physics;

  struct SolverBlock {
    double tol = 1e-10;
    int max_iter = 200;
    std::string method = "direct";
  } solver;

  struct ExperimentBlock {
    int nu_points = 20;
    int radial_samples = 201;
    int grid_m = 10000;
    int probe_res = 32;
    double green_bound = 0.05;
    std::vector<double> zeta_center = {0.5, 0.0};
    double zeta_radius = 0.2;
    int steadiness_tests = 20;
    int random_fields = 20;
    std::uint64_t seed = 1;
    std::string init = "predicted";
    int restarts = 0;
  } experiment;

  struct OutputBlock {
    std::string dir = "out";
  } output;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

Lake make_lake(const ExperimentConfig& cfg);
VortexProfile make_profile(const ExperimentConfig& cfg, double eps);
SignConvention make_convention(const ExperimentConfig& cfg);
InitKind make_init(const ExperimentConfig& cfg);
SolverMethod make_method(const ExperimentConfig& cfg);

}  // namespace lakevort
