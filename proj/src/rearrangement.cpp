#include "lakevort/rearrangement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "lakevort/error.hpp"

namespace lakevort {

namespace {

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
    } catch (const std::exception&) {
      throw Error(ErrorKind::Config, "bad number '" + item + "' in distribution");
    }
  }
  return out;
}

std::vector<std::size_t> interior_cells(const Lake& lake) {
  std::vector<std::size_t> cells;
  for (std::size_t idx = 0; idx < lake.grid().size(); ++idx) {
    if (lake.interior(idx)) cells.push_back(idx);
  }
  return cells;
}

// Cells by distance to x, ties by index.
std::vector<std::size_t> by_distance(const Lake& lake, Point x) {
  std::vector<std::size_t> cells = interior_cells(lake);
  std::vector<double> d(lake.grid().size(), 0.0);
  for (std::size_t idx : cells) d[idx] = distance(lake.grid().center(idx), x);
  std::sort(cells.begin(), cells.end(), [&](std::size_t a, std::size_t b) {
    return d[a] < d[b] || (d[a] == d[b] && a < b);
  });
  return cells;
}

std::size_t argmax_cell(const Lake& lake, const std::vector<double>& f) {
  std::size_t best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < lake.grid().size(); ++idx) {
    if (lake.interior(idx) && f[idx] > best_v) {
      best_v = f[idx];
      best = idx;
    }
  }
  return best;
}

}  // namespace

DistributionFunction DistributionFunction::uniform(double delta) {
  if (!(delta > 0.0)) throw Error(ErrorKind::Parameter, "distribution scale must be positive");
  DistributionFunction d;
  d.family_ = DistributionFamily::Uniform;
  d.delta_ = delta;
  return d;
}

DistributionFunction DistributionFunction::exponential(double delta) {
  DistributionFunction d = uniform(delta);
  d.family_ = DistributionFamily::Exponential;
  return d;
}

DistributionFunction DistributionFunction::linear(double delta) {
  DistributionFunction d = uniform(delta);
  d.family_ = DistributionFamily::Linear;
  return d;
}

DistributionFunction DistributionFunction::step(std::vector<double> breaks, std::vector<double> values) {
  if (values.empty() || breaks.size() != values.size() + 1 || breaks.front() != 0.0) {
    throw Error(ErrorKind::Parameter, "step distribution needs breaks 0 = t0 < ... < tn and n values");
  }
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(breaks[k + 1] > breaks[k])) throw Error(ErrorKind::Parameter, "step breaks must increase");
    if (!(values[k] > 0.0)) throw Error(ErrorKind::Parameter, "step values must be positive");
    if (k > 0 && values[k] > values[k - 1]) throw Error(ErrorKind::Parameter, "step values must not increase");
  }
  DistributionFunction d;
  d.family_ = DistributionFamily::Step;
  d.delta_ = values.front();
  d.breaks_ = std::move(breaks);
  d.values_ = std::move(values);
  if (std::fabs(d.integral() - 1.0) > 1e-9) {
    throw Error(ErrorKind::Parameter, "step distribution must integrate to 1, got " + std::to_string(d.integral()));
  }
  return d;
}

DistributionFunction DistributionFunction::from_name(const std::string& spec) {
  if (spec == "uniform") return uniform();
  if (spec == "exponential") return exponential();
  if (spec == "linear") return linear();
  if (spec.rfind("step:", 0) == 0) {
    const std::string body = spec.substr(5);
    const auto semi = body.find(';');
    if (semi == std::string::npos) throw Error(ErrorKind::Config, "step distribution needs 'breaks;values'");
    std::vector<double> breaks = parse_list(body.substr(0, semi));
    breaks.insert(breaks.begin(), 0.0);
    return step(std::move(breaks), parse_list(body.substr(semi + 1)));
  }
  throw Error(ErrorKind::Config, "unknown distribution '" + spec + "'");
}

double DistributionFunction::operator()(double t) const {
  if (t < 0.0) return 0.0;
  switch (family_) {
    case DistributionFamily::Uniform: return t < 1.0 / delta_ ? delta_ : 0.0;
    case DistributionFamily::Exponential: return delta_ * std::exp(-delta_ * t);
    case DistributionFamily::Linear: return std::max(delta_ * (1.0 - 0.5 * delta_ * t), 0.0);
    case DistributionFamily::Step:
      for (std::size_t k = 0; k < values_.size(); ++k) {
        if (t < breaks_[k + 1]) return values_[k];
      }
      return 0.0;
  }
  return 0.0;
}

double DistributionFunction::integral() const {
  if (family_ != DistributionFamily::Step) return 1.0;
  double s = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) s += values_[k] * (breaks_[k + 1] - breaks_[k]);
  return s;
}

double DistributionFunction::moment(double p) const {
  switch (family_) {
    case DistributionFamily::Uniform: return std::pow(delta_, -p) / (p + 1.0);
    case DistributionFamily::Exponential: return std::tgamma(p + 1.0) * std::pow(delta_, -p);
    case DistributionFamily::Linear: {
      const double t = 2.0 / delta_;
      return delta_ * std::pow(t, p + 1.0) / ((p + 1.0) * (p + 2.0));
    }
    case DistributionFamily::Step: {
      double s = 0.0;
      for (std::size_t k = 0; k < values_.size(); ++k) {
        s += values_[k] * (std::pow(breaks_[k + 1], p + 1.0) - std::pow(breaks_[k], p + 1.0)) / (p + 1.0);
      }
      return s;
    }
  }
  return 0.0;
}

double DistributionFunction::inverse_integral(double u0, double u1) const {
  u0 = std::clamp(u0, 0.0, delta_);
  u1 = std::clamp(u1, 0.0, delta_);
  if (u1 <= u0) return 0.0;
  const double d = delta_;
  switch (family_) {
    case DistributionFamily::Uniform: return (u1 - u0) / d;
    case DistributionFamily::Exponential: {
      auto f = [d](double u) { return u > 0.0 ? (u * std::log(d / u) + u) / d : 0.0; };
      return f(u1) - f(u0);
    }
    case DistributionFamily::Linear: {
      auto f = [d](double u) { return 2.0 / d * (u - u * u / (2.0 * d)); };
      return f(u1) - f(u0);
    }
    case DistributionFamily::Step: {
      // D^{-1} = breaks[k+1] on (values[k+1], values[k]].
      double s = 0.0;
      for (std::size_t k = 0; k < values_.size(); ++k) {
        const double hi = values_[k];
        const double lo = k + 1 < values_.size() ? values_[k + 1] : 0.0;
        const double overlap = std::max(0.0, std::min(u1, hi) - std::max(u0, lo));
        s += breaks_[k + 1] * overlap;
      }
      return s;
    }
  }
  return 0.0;
}

std::string DistributionFunction::name() const {
  switch (family_) {
    case DistributionFamily::Uniform: return "uniform";
    case DistributionFamily::Exponential: return "exponential";
    case DistributionFamily::Linear: return "linear";
    case DistributionFamily::Step: return "step";
  }
  return "";
}

double VortexProfile::log_inv_eps() const { return std::log(1.0 / eps); }
double VortexProfile::positive_strength() const { return tau / log_inv_eps(); }
double VortexProfile::negative_strength() const { return (1.0 - tau) / log_inv_eps(); }

double LevelQuota::strength(const std::vector<Level>& levels) {
  double s = 0.0;
  for (const auto& l : levels) s += l.value * l.quota;
  return s;
}

double LevelQuota::measure(const std::vector<Level>& levels) {
  double s = 0.0;
  for (const auto& l : levels) s += l.quota;
  return s;
}

LevelQuota build_quotas(const VortexProfile& profile, const Lake& lake) {
  const double eps = profile.eps;
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::Parameter, "eps must lie in (0, 1)");
  if (!(profile.tau >= 0.0 && profile.tau <= 1.0)) throw Error(ErrorKind::Parameter, "tau must lie in [0, 1]");
  if (!(profile.p > 1.0)) throw Error(ErrorKind::Parameter, "p must exceed 1");
  if (profile.levels < 1) throw Error(ErrorKind::Parameter, "at least one level is required");
  const DistributionFunction& dist = profile.distribution;
  if (std::fabs(dist.integral() - 1.0) > 1e-9) throw Error(ErrorKind::Parameter, "distribution must integrate to 1");
  if (!std::isfinite(dist.moment(profile.p))) throw Error(ErrorKind::Parameter, "distribution has no finite p-moment");

  const double e2 = eps * eps;
  const double total = lake.total_measure();
  if (e2 >= total / 4.0) {
    throw Error(ErrorKind::Parameter, "eps^2 = " + std::to_string(e2) + " must be below mu(lake)/4 = " +
                                          std::to_string(total / 4.0));
  }
  double min_cell = std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < lake.grid().size(); ++idx) {
    if (lake.interior(idx)) min_cell = std::min(min_cell, lake.cell_measure(idx));
  }
  if (e2 < min_cell) {
    throw Error(ErrorKind::Resolution, "eps^2 = " + std::to_string(e2) + " is below the smallest cell measure " +
                                           std::to_string(min_cell));
  }

  const double delta = dist.sup();
  const double li = profile.log_inv_eps();
  auto side = [&](double w) {
    std::vector<Level> levels;
    if (w <= 0.0) return levels;
    // zeta*(m) = D^{-1}(delta m / eps^2) / kappa on m in [0, eps^2].
    const double kappa = e2 * li / (delta * w);
    const int L = profile.levels;
    const double du = delta / L;
    for (int k = 0; k < L; ++k) {
      const double v = dist.inverse_integral(k * du, (k + 1) * du) / du / kappa;
      levels.push_back({v, e2 / L});
    }
    const double factor = (w / li) / LevelQuota::strength(levels);
    for (auto& l : levels) l.value *= factor;
    return levels;
  };
  LevelQuota q;
  q.eps = eps;
  q.tau = profile.tau;
  q.positive = side(profile.tau);
  q.negative = side(1.0 - profile.tau);
  return q;
}

void fill_levels(const Lake& lake, const std::vector<std::size_t>& order, const std::vector<Level>& levels, double sign,
                 ScalarField& out, std::vector<std::uint8_t>& used) {
  if (levels.empty()) return;
  std::vector<double> cum(levels.size() + 1, 0.0);
  for (std::size_t k = 0; k < levels.size(); ++k) cum[k + 1] = cum[k] + levels[k].quota;
  const double total = cum.back();
  double pos = 0.0;
  std::size_t k = 0;
  for (std::size_t idx : order) {
    if (pos >= total * (1.0 - 1e-14)) break;
    if (used[idx] || !lake.interior(idx)) continue;
    const double mu = lake.cell_measure(idx);
    if (mu <= 0.0) continue;
    const double end = std::min(pos + mu, total);
    double acc = 0.0;
    while (k < levels.size()) {
      const double lo = std::max(pos, cum[k]);
      const double hi = std::min(end, cum[k + 1]);
      if (hi > lo) acc += levels[k].value * (hi - lo);
      if (cum[k + 1] <= end) {
        ++k;
      } else {
        break;
      }
    }
    out[idx] = sign * acc / mu;
    used[idx] = 1;
    pos = end;
  }
}

std::vector<Level> distribution_of(const Lake& lake, const ScalarField& field) {
  require_aligned(lake.grid(), field, "field");
  std::vector<std::size_t> cells;
  for (std::size_t idx = 0; idx < field.size(); ++idx) {
    if (!lake.interior(idx)) continue;
    if (field[idx] < 0.0) throw Error(ErrorKind::Parameter, "rearranged field must be non-negative");
    if (field[idx] > 0.0) cells.push_back(idx);
  }
  std::sort(cells.begin(), cells.end(), [&](std::size_t a, std::size_t b) {
    return field[a] > field[b] || (field[a] == field[b] && a < b);
  });
  std::vector<Level> levels;
  for (std::size_t idx : cells) {
    const double mu = lake.cell_measure(idx);
    if (!levels.empty() && levels.back().value == field[idx]) {
      levels.back().quota += mu;
    } else {
      levels.push_back({field[idx], mu});
    }
  }
  return levels;
}

ScalarField symmetrize_at(const Lake& lake, const ScalarField& field, Point x) {
  const std::vector<Level> levels = distribution_of(lake, field);
  if (LevelQuota::measure(levels) > lake.total_measure() * (1.0 + 1e-12)) {
    throw Error(ErrorKind::Parameter, "field support exceeds the lake measure");
  }
  ScalarField out(lake.grid());
  std::vector<std::uint8_t> used(lake.grid().size(), 0);
  fill_levels(lake, by_distance(lake, x), levels, 1.0, out, used);
  return out;
}

double superlevel_measure(const Lake& lake, const ScalarField& f, double lambda) {
  double s = 0.0;
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    if (lake.interior(idx) && f[idx] >= lambda) s += lake.cell_measure(idx);
  }
  return s;
}

EnergyEvaluation energy(const WeightedOperator& op, const HarmonicBasis& basis, const ScalarField& zeta,
                        const ScalarField& big_psi, double lambda, const CirculationSpec& circ,
                        const SolveOptions& opts) {
  const Lake& lake = op.lake();
  require_aligned(lake.grid(), big_psi, "external stream function");
  EnergyEvaluation ev;
  ev.psi_k = solve_k(op, zeta, opts);
  ev.psi_h = solve_h(op, basis, zeta, circ);
  ScalarField integrand(lake.grid());
  for (std::size_t idx = 0; idx < integrand.size(); ++idx) {
    integrand[idx] = zeta[idx] * (0.5 * (ev.psi_k[idx] + ev.psi_h[idx]) + lambda * big_psi[idx]);
  }
  ev.value = mu_integral(lake, integrand);
  return ev;
}

ScalarField bathtub_step(const Lake& lake, const LevelQuota& quotas, const ScalarField& psi) {
  require_aligned(lake.grid(), psi, "stream function");
  std::vector<std::size_t> cells = interior_cells(lake);
  ScalarField out(lake.grid());
  std::vector<std::uint8_t> used(lake.grid().size(), 0);
  std::sort(cells.begin(), cells.end(), [&](std::size_t a, std::size_t b) {
    return psi[a] > psi[b] || (psi[a] == psi[b] && a < b);
  });
  fill_levels(lake, cells, quotas.positive, 1.0, out, used);
  std::sort(cells.begin(), cells.end(), [&](std::size_t a, std::size_t b) {
    return psi[a] < psi[b] || (psi[a] == psi[b] && a < b);
  });
  fill_levels(lake, cells, quotas.negative, -1.0, out, used);
  return out;
}

CirculationSpec scaled_circulations(const std::vector<double>& cbar, const VortexProfile& profile) {
  CirculationSpec c;
  const double s = (2.0 * profile.tau - 1.0) / profile.log_inv_eps();
  for (double v : cbar) c.c.push_back(v * s);
  return c;
}

ScalarField initial_state(const Lake& lake, const LevelQuota& quotas, const ScalarField& big_psi, double lambda,
                          const MaximizeOptions& opts) {
  const GridSpec& g = lake.grid();
  ScalarField zeta(g);
  std::vector<std::uint8_t> used(g.size(), 0);
  switch (opts.init) {
    case InitKind::Given:
      if (!opts.initial) throw Error(ErrorKind::Parameter, "given initialization without an initial field");
      require_aligned(g, *opts.initial, "initial vorticity");
      return *opts.initial;
    case InitKind::Random: {
      std::vector<std::size_t> cells = interior_cells(lake);
      std::mt19937_64 rng(opts.seed);
      std::shuffle(cells.begin(), cells.end(), rng);
      fill_levels(lake, cells, quotas.positive, 1.0, zeta, used);
      std::reverse(cells.begin(), cells.end());
      fill_levels(lake, cells, quotas.negative, -1.0, zeta, used);
      return zeta;
    }
    case InitKind::Predicted: break;
  }
  const double four_pi = 4.0 * std::numbers::pi;
  std::vector<double> fp(g.size(), 0.0), fm(g.size(), 0.0);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (!lake.interior(idx)) continue;
    fp[idx] = quotas.tau * lake.depth(idx) / four_pi + lambda * big_psi[idx];
    fm[idx] = (1.0 - quotas.tau) * lake.depth(idx) / four_pi - lambda * big_psi[idx];
  }
  Point xp = g.center(argmax_cell(lake, fp));
  Point xm = g.center(argmax_cell(lake, fm));
  if (!quotas.positive.empty()) {
    // Negative centre: the near-maximal cell of its functional farthest from x+.
    double hi = -std::numeric_limits<double>::infinity(), lo = std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      if (!lake.interior(idx)) continue;
      hi = std::max(hi, fm[idx]);
      lo = std::min(lo, fm[idx]);
    }
    const double cut = hi - 1e-2 * (hi - lo);
    double best = -1.0;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      if (!lake.interior(idx) || fm[idx] < cut) continue;
      const double d = distance(g.center(idx), xp);
      if (d > best) {
        best = d;
        xm = g.center(idx);
      }
    }
  }
  fill_levels(lake, by_distance(lake, xp), quotas.positive, 1.0, zeta, used);
  fill_levels(lake, by_distance(lake, xm), quotas.negative, -1.0, zeta, used);
  return zeta;
}

namespace {

AscentState ascend(const WeightedOperator& op, const HarmonicBasis& basis, const LevelQuota& quotas,
                   const ScalarField& big_psi, double lambda, const CirculationSpec& circ,
                   const MaximizeOptions& opts) {
  const Lake& lake = op.lake();
  AscentState state;
  state.zeta = initial_state(lake, quotas, big_psi, lambda, opts);

  auto total_stream = [&](const EnergyEvaluation& ev) {
    ScalarField psi(lake.grid());
    for (std::size_t idx = 0; idx < psi.size(); ++idx) {
      if (lake.interior(idx)) psi[idx] = ev.psi_k[idx] + ev.psi_h[idx] + lambda * big_psi[idx];
    }
    return psi;
  };

  EnergyEvaluation ev = energy(op, basis, state.zeta, big_psi, lambda, circ, opts.solve);
  state.psi_total = total_stream(ev);
  state.trace.push_back(ev.value);
  std::optional<ScalarField> previous;
  state.stop_reason = "iteration limit";

  for (int it = 0; it < opts.max_iter; ++it) {
    ScalarField next = bathtub_step(lake, quotas, state.psi_total);
    if (next.values == state.zeta.values) {
      state.converged = true;
      state.stop_reason = "fixed point";
      break;
    }
    if (previous && next.values == previous->values) {
      // Two-cycle: the current iterate carries the higher energy.
      state.converged = true;
      state.stop_reason = "two-cycle";
      break;
    }
    EnergyEvaluation nev = energy(op, basis, next, big_psi, lambda, circ, opts.solve);
    const double e_cur = state.trace.back();
    const double scale = std::max(std::fabs(nev.value), std::numeric_limits<double>::min());
    if (nev.value <= e_cur) {
      state.converged = e_cur - nev.value <= opts.rel_tol * scale;
      state.stop_reason = state.converged ? "energy gain below tolerance" : "energy decrease";
      break;
    }
    previous = std::move(state.zeta);
    state.zeta = std::move(next);
    state.psi_total = total_stream(nev);
    state.trace.push_back(nev.value);
    state.iterations = it + 1;
    if (nev.value - e_cur <= opts.rel_tol * scale) {
      state.converged = true;
      state.stop_reason = "energy gain below tolerance";
      break;
    }
  }
  return state;
}

}  // namespace

AscentState maximize(const WeightedOperator& op, const HarmonicBasis& basis, const LevelQuota& quotas,
                     const ScalarField& big_psi, double lambda, const CirculationSpec& circ,
                     const MaximizeOptions& opts) {
  require_aligned(op.lake().grid(), big_psi, "external stream function");
  if (opts.restarts < 0) throw Error(ErrorKind::Parameter, "restarts must be non-negative");
  AscentState best = ascend(op, basis, quotas, big_psi, lambda, circ, opts);
  for (int r = 1; r <= opts.restarts; ++r) {
    MaximizeOptions again = opts;
    again.init = InitKind::Random;
    again.seed = opts.seed + static_cast<std::uint64_t>(r);
    AscentState s = ascend(op, basis, quotas, big_psi, lambda, circ, again);
    // Only converged runs compete; ties keep the earlier run.
    if (s.converged && (!best.converged || s.energy() > best.energy())) best = std::move(s);
  }
  return best;
}

double steadiness_residual(const Lake& lake, const ScalarField& zeta, const ScalarField& psi_total, int n_tests,
                           std::uint64_t seed) {
  require_aligned(lake.grid(), zeta, "vorticity");
  require_aligned(lake.grid(), psi_total, "stream function");
  const GridSpec& g = lake.grid();
  std::vector<std::size_t> support;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (lake.interior(idx) && std::fabs(zeta[idx]) > 1e-14) support.push_back(idx);
  }
  if (support.empty() || n_tests <= 0) return 0.0;

  const double sigma = 0.08;
  const double reach = 3.0 * sigma;
  const VectorField grad = gradient(lake, psi_total);

  // Test centres near the support whose bump stays inside the lake.
  auto clear_of_shore = [&](Point c) {
    for (int k = 0; k < 32; ++k) {
      const double a = 2.0 * std::numbers::pi * k / 32.0;
      for (double r : {0.0, 0.5 * reach, reach + g.h}) {
        const Point p{c.x + r * std::cos(a), c.y + r * std::sin(a)};
        const auto cell = g.locate(p);
        if (!cell || !lake.interior(*cell)) return false;
      }
    }
    return true;
  };
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, support.size() - 1);
  std::uniform_real_distribution<double> jitter(-sigma, sigma);
  std::vector<Point> centres;
  for (int attempt = 0; attempt < 200 * n_tests && static_cast<int>(centres.size()) < n_tests; ++attempt) {
    const Point base = g.center(support[pick(rng)]);
    const Point c{base.x + jitter(rng), base.y + jitter(rng)};
    if (clear_of_shore(c)) centres.push_back(c);
  }
  if (centres.empty()) {
    for (std::size_t idx : support) {
      if (clear_of_shore(g.center(idx))) {
        centres.push_back(g.center(idx));
        break;
      }
    }
  }

  double worst = 0.0;
  for (const Point& c : centres) {
    double num = 0.0, den = 0.0;
    for (std::size_t idx : support) {
      const Point r = g.center(idx) - c;
      const double d2 = dot(r, r);
      if (d2 >= reach * reach) continue;
      const double gauss = std::exp(-d2 / (2.0 * sigma * sigma));
      const double cut_base = 1.0 - d2 / (reach * reach);
      const double cut = cut_base * cut_base * cut_base;
      const double dcut = -6.0 * cut_base * cut_base / (reach * reach);
      // grad phi = gauss (dcut - cut / sigma^2) r
      const double s = gauss * (dcut - cut / (sigma * sigma));
      const Point gphi{s * r.x, s * r.y};
      const Point gpsi{grad.values[idx][0], grad.values[idx][1]};
      num += zeta[idx] * dot(perp(gpsi), gphi);
      den += std::fabs(zeta[idx]) * norm(gpsi) * norm(gphi);
    }
    if (den > 0.0) worst = std::max(worst, std::fabs(num) / den);
  }
  return worst;
}

}  // namespace lakevort
