#include "exos/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace exos {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t k, std::uint64_t i,
                            std::uint64_t j, std::uint64_t m) {
  std::uint64_t state = seed;
  std::uint64_t h = splitmix64(state);
  state ^= k;
  h ^= splitmix64(state);
  state ^= i;
  h ^= splitmix64(state);
  state ^= j;
  h ^= splitmix64(state);
  state ^= m;
  h ^= splitmix64(state);
  return h;
}

std::vector<double> make_unit_path(const ModelParams& params, const PathConfig& cfg,
                                   std::uint64_t stream, double sign) {
  if (!(cfg.dt > 0.0) || !(cfg.horizon > 0.0))
    throw std::invalid_argument("make_unit_path: dt and horizon must be positive");
  const auto n = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt));
  const double drift = (params.mu - 0.5 * params.sigma * params.sigma) * cfg.dt;
  const double vol = params.sigma * std::sqrt(cfg.dt);
  std::mt19937_64 rng(stream);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> path(n + 1);
  path[0] = 1.0;
  for (std::size_t i = 1; i <= n; ++i)
    path[i] = path[i - 1] * std::exp(drift + sign * vol * normal(rng));
  return path;
}

UnitPathWithMin make_unit_path_with_min(const ModelParams& params,
                                        const PathConfig& cfg,
                                        std::uint64_t stream) {
  if (!(cfg.dt > 0.0) || !(cfg.horizon > 0.0))
    throw std::invalid_argument("make_unit_path_with_min: dt and horizon must be positive");
  const auto n = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt));
  const double drift = (params.mu - 0.5 * params.sigma * params.sigma) * cfg.dt;
  const double vol = params.sigma * std::sqrt(cfg.dt);
  std::mt19937_64 rng(stream);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  UnitPathWithMin out;
  out.levels.resize(n + 1);
  out.running_min.resize(n + 1);
  out.levels[0] = 1.0;
  out.running_min[0] = 1.0;
  double log_level = 0.0;
  double log_min = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double a = log_level;
    log_level += drift + vol * normal(rng);
    out.levels[i] = std::exp(log_level);
    // Minimum of the log-price bridge over (t_{i-1}, t_i): for a Brownian
    // segment from a to b with variance vol^2,
    //   min = (a + b - sqrt((b - a)^2 - 2 vol^2 log U)) / 2,  U ~ U(0,1).
    const double b = log_level;
    double u = uniform(rng);
    if (u <= 0.0) u = std::numeric_limits<double>::min();
    const double seg_min =
        0.5 * (a + b - std::sqrt((b - a) * (b - a) - 2.0 * vol * vol * std::log(u)));
    log_min = std::min(log_min, seg_min);
    out.running_min[i] = std::exp(log_min);
  }
  return out;
}

UnitPathEnsemble make_ensemble(const ModelParams& params, const PathConfig& cfg,
                               std::size_t M, std::uint64_t k) {
  UnitPathEnsemble ens;
  ens.dt = cfg.dt;
  ens.paths.reserve(M);
  // Antithetic pairs: path 2q+1 reuses path 2q's Gaussian increments with the
  // sign flipped.  The reward functional is monotone in the path, so each
  // pair's errors largely cancel and the ensemble mean is far tighter than M
  // independent draws at the same cost.
  for (std::size_t m = 0; m < M; ++m)
    ens.paths.push_back(make_unit_path(
        params, cfg, derive_stream(cfg.seed, k, 0, 0, m / 2), m % 2 ? -1.0 : 1.0));
  return ens;
}

Simulator::Simulator(const ModelParams& params, const ProfitModel& profit,
                     PathConfig cfg)
    : params_(params), profit_(profit), cfg_(cfg) {
  if (!profit.is_power())
    throw std::invalid_argument("Simulator: power profit required (pi itself is sampled)");
  const auto report = validate(params, profit);
  if (!report.ok())
    throw std::invalid_argument("Simulator: invalid parameters: " +
                                report.violations.front());
  const auto n = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt));
  if (n < 1) throw std::invalid_argument("Simulator: horizon shorter than one step");
  times_.resize(n + 1);
  discount_.resize(n + 1);
  weights_.assign(n + 1, cfg.dt);
  for (std::size_t i = 0; i <= n; ++i) {
    times_[i] = static_cast<double>(i) * cfg.dt;
    discount_[i] = std::exp(-params.rho * times_[i]);
  }
  weights_.front() = 0.5 * cfg.dt;
  weights_.back() = 0.5 * cfg.dt;
}

double Simulator::simulate_reward(double x, double y, const GridBoundary& g,
                                  const std::vector<double>& unit_path) const {
  if (x < 0.0) throw std::invalid_argument("simulate_reward: x must be nonnegative");
  if (y < 0.0 || y > 1.0) throw std::invalid_argument("simulate_reward: y in [0,1]");
  if (unit_path.size() != times_.size())
    throw std::invalid_argument("simulate_reward: path length does not match config");
  const double rk = params_.rho * params_.kappa;
  double running_min = 1.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < unit_path.size(); ++i) {
    const double X = x * unit_path[i];
    running_min = std::min(running_min, g.eval(X));
    const double Y = std::min(y, running_min);
    const double ent = (Y > 0.0) ? Y * std::log(Y) : 0.0;
    acc += weights_[i] * discount_[i] *
           ((profit_.profit(X) - rk) * Y - params_.lambda * ent);
  }
  return acc;
}

double Simulator::simulate_reward(double x, double y, const GridBoundary& g,
                                  const UnitPathWithMin& unit_path) const {
  if (x < 0.0) throw std::invalid_argument("simulate_reward: x must be nonnegative");
  if (y < 0.0 || y > 1.0) throw std::invalid_argument("simulate_reward: y in [0,1]");
  if (unit_path.levels.size() != times_.size())
    throw std::invalid_argument("simulate_reward: path length does not match config");
  const double rk = params_.rho * params_.kappa;
  double acc = 0.0;
  for (std::size_t i = 0; i < unit_path.levels.size(); ++i) {
    const double X = x * unit_path.levels[i];
    // g nondecreasing: min over time of g(X) is g at the running minimum of X.
    const double Y = std::min(y, g.eval(x * unit_path.running_min[i]));
    const double ent = (Y > 0.0) ? Y * std::log(Y) : 0.0;
    acc += weights_[i] * discount_[i] *
           ((profit_.profit(X) - rk) * Y - params_.lambda * ent);
  }
  return acc;
}

McResult Simulator::mc_value(double x, double y, const GridBoundary& g,
                             std::size_t M, std::uint64_t k, std::uint64_t i,
                             std::uint64_t j) const {
  if (M < 2) throw std::invalid_argument("mc_value: M must be at least 2");
  std::vector<double> rewards(M);
  for (std::size_t m = 0; m < M; ++m) {
    const std::uint64_t stream = derive_stream(cfg_.seed, k, i, j, m);
    if (cfg_.bridge_minimum) {
      rewards[m] =
          simulate_reward(x, y, g, make_unit_path_with_min(params_, cfg_, stream));
    } else {
      rewards[m] = simulate_reward(x, y, g, make_unit_path(params_, cfg_, stream));
    }
  }
  McResult res;
  for (double r : rewards) res.mean += r;
  res.mean /= static_cast<double>(M);
  double ss = 0.0;
  for (double r : rewards) ss += (r - res.mean) * (r - res.mean);
  res.stderr_ = std::sqrt(ss / (static_cast<double>(M) * static_cast<double>(M - 1)));
  return res;
}

void Simulator::column_rewards(double x, const std::vector<double>& ys,
                               const GridBoundary& g, const UnitPathEnsemble& ens,
                               std::vector<double>& mean,
                               std::vector<double>& stderr_out,
                               std::vector<std::vector<double>>* per_path) const {
  const std::size_t M = ens.paths.size();
  const std::size_t ny = ys.size();
  if (M < 1) throw std::invalid_argument("column_rewards: empty ensemble");
  mean.assign(ny, 0.0);
  stderr_out.assign(ny, 0.0);
  if (per_path) per_path->assign(M, std::vector<double>(ny, 0.0));
  std::vector<std::vector<double>> local;
  auto& rows = per_path ? *per_path : local;
  if (!per_path) rows.assign(M, std::vector<double>(ny, 0.0));

  const double theta = profit_.power_spec().theta;
  const double c = profit_.power_spec().c;
  const double xt = (x > 0.0) ? c * std::pow(x, theta) : 0.0;
  const double rk = params_.rho * params_.kappa;
  const std::size_t n = times_.size();

  std::vector<double> mins(n), pw(n), pref_u(n + 1), pref_v(n + 1), suf_a(n + 1),
      suf_l(n + 1);
  for (std::size_t m = 0; m < M; ++m) {
    const auto& p = ens.paths[m];
    if (p.size() != n)
      throw std::invalid_argument("column_rewards: path length does not match config");
    double running_min = 1.0;
    pref_u[0] = pref_v[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      running_min = std::min(running_min, g.eval(x * p[i]));
      mins[i] = running_min;
      pw[i] = std::pow(p[i], theta);
      const double wd = weights_[i] * discount_[i];
      pref_u[i + 1] = pref_u[i] + wd * pw[i];  // profit part
      pref_v[i + 1] = pref_v[i] + wd;          // plain discount
    }
    suf_a[n] = suf_l[n] = 0.0;
    for (std::size_t i = n; i-- > 0;) {
      const double wd = weights_[i] * discount_[i];
      suf_a[i] = suf_a[i + 1] + (xt * wd * pw[i] - rk * wd) * mins[i];
      suf_l[i] = suf_l[i + 1] + wd * mins[i] * std::log(mins[i]);
    }
    for (std::size_t q = 0; q < ny; ++q) {
      const double y = ys[q];
      double r;
      if (y <= 0.0) {
        r = 0.0;
      } else {
        // First index where the running boundary minimum dips below y; before
        // it Y = y, after it Y = running minimum (nonincreasing sequence).
        const auto it = std::partition_point(mins.begin(), mins.end(),
                                             [y](double v) { return v >= y; });
        const auto cidx = static_cast<std::size_t>(it - mins.begin());
        const double ent = y * std::log(y);
        r = y * (xt * pref_u[cidx] - rk * pref_v[cidx]) -
            params_.lambda * ent * pref_v[cidx] + suf_a[cidx] -
            params_.lambda * suf_l[cidx];
      }
      rows[m][q] = r;
      mean[q] += r;
    }
  }
  for (std::size_t q = 0; q < ny; ++q) mean[q] /= static_cast<double>(M);
  if (M >= 2) {
    for (std::size_t q = 0; q < ny; ++q) {
      double ss = 0.0;
      for (std::size_t m = 0; m < M; ++m)
        ss += (rows[m][q] - mean[q]) * (rows[m][q] - mean[q]);
      stderr_out[q] =
          std::sqrt(ss / (static_cast<double>(M) * static_cast<double>(M - 1)));
    }
  }
}

}  // namespace exos
