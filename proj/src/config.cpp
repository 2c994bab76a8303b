#include "lakevort/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "lakevort/error.hpp"

namespace lakevort {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& v) {
  std::size_t used = 0;
  const double x = std::stod(v, &used);
  if (used != v.size()) throw std::invalid_argument(v);
  return x;
}

long long to_int(const std::string& v) {
  std::size_t used = 0;
  const long long x = std::stoll(v, &used);
  if (used != v.size()) throw std::invalid_argument(v);
  return x;
}

std::vector<double> to_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  using Setter = std::function<void(const std::string&)>;
  auto dbl = [](double& t) -> Setter { return [&t](const std::string& v) { t = to_double(v); }; };
  auto integer = [](int& t) -> Setter { return [&t](const std::string& v) { t = static_cast<int>(to_int(v)); }; };
  auto str = [](std::string& t) -> Setter { return [&t](const std::string& v) { t = v; }; };
  auto list = [](std::vector<double>& t) -> Setter { return [&t](const std::string& v) { t = to_list(v); }; };

  const std::map<std::string, Setter> setters = {
      {"lake.geometry", str(cfg.lake.geometry)},
      {"lake.n", integer(cfg.lake.n)},
      {"lake.r_inner", dbl(cfg.lake.r_inner)},
      {"lake.profile", str(cfg.lake.profile)},
      {"profile.tau", dbl(cfg.profile.tau)},
      {"profile.eps", dbl(cfg.profile.eps)},
      {"profile.eps_list", list(cfg.profile.eps_list)},
      {"profile.distribution", str(cfg.profile.distribution)},
      {"profile.levels", integer(cfg.profile.levels)},
      {"profile.p", dbl(cfg.profile.p)},
      {"physics.nu", dbl(cfg.physics.nu)},
      {"physics.psi", str(cfg.physics.psi)},
      {"physics.circulations", list(cfg.physics.circulations)},
      {"physics.lambda", dbl(cfg.physics.lambda)},
      {"physics.convention", str(cfg.physics.convention)},
      {"solver.tol", dbl(cfg.solver.tol)},
      {"solver.max_iter", integer(cfg.solver.max_iter)},
      {"solver.method", str(cfg.solver.method)},
      {"experiment.nu_points", integer(cfg.experiment.nu_points)},
      {"experiment.radial_samples", integer(cfg.experiment.radial_samples)},
      {"experiment.grid_m", integer(cfg.experiment.grid_m)},
      {"experiment.probe_res", integer(cfg.experiment.probe_res)},
      {"experiment.green_bound", dbl(cfg.experiment.green_bound)},
      {"experiment.zeta_center", list(cfg.experiment.zeta_center)},
      {"experiment.zeta_radius", dbl(cfg.experiment.zeta_radius)},
      {"experiment.steadiness_tests", integer(cfg.experiment.steadiness_tests)},
      {"experiment.random_fields", integer(cfg.experiment.random_fields)},
      {"experiment.seed", [&cfg](const std::string& v) { cfg.experiment.seed = static_cast<std::uint64_t>(to_int(v)); }},
      {"experiment.init", str(cfg.experiment.init)},
      {"experiment.restarts", integer(cfg.experiment.restarts)},
      {"output.dir", str(cfg.output.dir)},
  };

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const std::string where = " at line " + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(ErrorKind::Config, "malformed section header" + where);
      section = trim(line.substr(1, line.size() - 2));
      static const char* known[] = {"lake", "profile", "physics", "solver", "experiment", "output"};
      if (std::find(std::begin(known), std::end(known), section) == std::end(known)) {
        throw Error(ErrorKind::Config, "unknown section '" + section + "'" + where);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Config, "expected 'key = value'" + where);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw Error(ErrorKind::Config, "key '" + key + "' outside any section" + where);
    const auto it = setters.find(section + "." + key);
    if (it == setters.end()) throw Error(ErrorKind::Config, "unknown key '" + key + "' in [" + section + "]" + where);
    try {
      it->second(value);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Config, "bad value '" + value + "' for key '" + key + "'" + where);
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Lake make_lake(const ExperimentConfig& cfg) {
  const auto& l = cfg.lake;
  if (l.geometry == "disk") return build_disk_lake(l.n, profile_from_name(l.profile));
  if (l.geometry == "annulus") return build_annulus_lake(l.n, l.r_inner, profile_from_name(l.profile));
  if (l.geometry == "slit_square") return build_slit_square_lake(l.n);
  throw Error(ErrorKind::Config, "unknown geometry '" + l.geometry + "'");
}

VortexProfile make_profile(const ExperimentConfig& cfg, double eps) {
  VortexProfile p;
  p.distribution = DistributionFunction::from_name(cfg.profile.distribution);
  p.tau = cfg.profile.tau;
  p.eps = eps;
  p.p = cfg.profile.p;
  p.levels = cfg.profile.levels;
  return p;
}

SignConvention make_convention(const ExperimentConfig& cfg) {
  if (cfg.physics.convention == "plus") return SignConvention::Plus;
  if (cfg.physics.convention == "minus") return SignConvention::Minus;
  throw Error(ErrorKind::Config, "convention must be plus or minus");
}

InitKind make_init(const ExperimentConfig& cfg) {
  if (cfg.experiment.init == "predicted") return InitKind::Predicted;
  if (cfg.experiment.init == "random") return InitKind::Random;
  throw Error(ErrorKind::Config, "init must be predicted or random");
}

SolverMethod make_method(const ExperimentConfig& cfg) {
  if (cfg.solver.method == "direct") return SolverMethod::Direct;
  if (cfg.solver.method == "pcg") return SolverMethod::Pcg;
  throw Error(ErrorKind::Config, "solver method must be direct or pcg");
}

}  // namespace lakevort
