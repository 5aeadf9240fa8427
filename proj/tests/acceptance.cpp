// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure.  All runs use the reference parameter set mu=0.2, sigma=0.2,
// rho=0.5, kappa=5, theta=0.5, c=1 and are fully seeded.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "exos/boundary.hpp"
#include "exos/closed_form.hpp"
#include "exos/model.hpp"
#include "exos/model_free.hpp"
#include "exos/policy_eval.hpp"
#include "exos/policy_iter.hpp"
#include "exos/simulator.hpp"

using namespace exos;

namespace {

ModelParams base_params(double lambda = 0.5) {
  return ModelParams{0.2, 0.2, 0.5, 5.0, lambda};
}

const ProfitModel& power_profit() {
  static ProfitModel p = ProfitModel::power(1.0, 0.5);
  return p;
}

GridBoundary truth_boundary(const ClosedFormSolution& cf, const GridSpec& grid) {
  std::vector<double> knots = grid.knots();
  std::vector<double> vals;
  vals.reserve(knots.size());
  for (double x : knots) vals.push_back(cf.g_lambda(x));
  return GridBoundary(std::move(knots), std::move(vals));
}

std::vector<double> y_grid(double delta_y) {
  const auto n = static_cast<std::size_t>(std::llround(1.0 / delta_y));
  std::vector<double> ys(n + 1);
  for (std::size_t j = 0; j <= n; ++j)
    ys[j] = std::min(1.0, static_cast<double>(j) * delta_y);
  return ys;
}

ValueTable oracle_table(const GridBoundary& g, const ModelParams& p,
                        double delta_y) {
  const SemiAnalyticValue v(g, p, power_profit());
  ValueTable t;
  t.xs = g.knots();
  t.ys = y_grid(delta_y);
  t.mean.assign(t.xs.size(), std::vector<double>(t.ys.size(), 0.0));
  t.stderr_ = t.mean;
  for (std::size_t i = 1; i < t.xs.size(); ++i)
    for (std::size_t j = 0; j < t.ys.size(); ++j)
      t.mean[i][j] = v.value_of(t.xs[i], t.ys[j]);
  return t;
}

double max_slope(const GridBoundary& g) {
  double s = 0.0;
  for (std::size_t i = 1; i < g.size(); ++i)
    s = std::max(s, (g.values()[i] - g.values()[i - 1]) /
                        (g.knots()[i] - g.knots()[i - 1]));
  return s;
}

// Centered 3-point moving average, clamped at the ends.
std::vector<double> smooth3(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    const std::size_t lo = (k == 0) ? 0 : k - 1;
    const std::size_t hi = (k + 1 < v.size()) ? k + 1 : k;
    double acc = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) acc += v[j];
    out[k] = acc / static_cast<double>(hi - lo + 1);
  }
  return out;
}

// Smallest index k such that every step from k on is below `tol`.
std::size_t stabilization_index(const std::vector<double>& steps, double tol) {
  std::size_t k = 0;
  for (std::size_t j = 0; j < steps.size(); ++j)
    if (steps[j] >= tol) k = j + 1;
  return k;
}

struct Gate {
  int failures = 0;
  std::string reasons;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      ++failures;
      if (!reasons.empty()) reasons += "; ";
      reasons += what;
    }
  }
};

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

int report(int id, const char* name, const Gate& gate, double secs,
           double budget) {
  const bool ok = gate.failures == 0 && secs < budget;
  std::printf("%s [%d] %s (%.1f s / budget %.0f s)%s%s\n",
              ok ? "PASS" : "FAIL", id, name, secs, budget,
              gate.reasons.empty() ? "" : ": ", gate.reasons.c_str());
  if (gate.failures == 0 && secs >= budget)
    std::printf("     [%d] over time budget\n", id);
  std::fflush(stdout);
  return ok ? 0 : 1;
}

int criterion1() {
  Timer timer;
  Gate gate;
  const ModelParams p = base_params();
  const CharacteristicRoots r = characteristic_roots(p);
  const double alpha_ref = (-9.0 - std::sqrt(181.0)) / 2.0;
  gate.require(std::abs(r.alpha_minus - alpha_ref) <= 1e-10, "alpha_- mismatch");

  const double b = classical_boundary(p, power_profit());
  // Power closed form: H'(b) b / (-alpha_-) + H(b) = kappa means
  // P b^theta (1 + theta/(-alpha_-)) = kappa.
  const double P = power_resolvent_scale(p, PowerProfit{1.0, 0.5});
  const double root = p.kappa / (P * (1.0 + 0.5 / (-r.alpha_minus)));
  const double b_ref = root * root;
  gate.require(std::abs(b - b_ref) <= 1e-8, "b* vs closed form");

  // Independent bisection on the free-boundary equation at y = 1/e.
  auto f = [&](double x) {
    return resolvent_derivative(power_profit(), p, x) * x / (-r.alpha_minus) +
           resolvent(power_profit(), p, x) - p.kappa;
  };
  double lo = 0.1, hi = 50.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  gate.require(std::abs(b - 0.5 * (lo + hi)) <= 1e-8, "b* vs bisection");
  return report(1, "characteristic roots & classical boundary", gate,
                timer.seconds(), 1.0);
}

int criterion2() {
  Timer timer;
  Gate gate;
  const ModelParams p = base_params();
  const ClosedFormSolution cf(p, power_profit());
  auto u = [&](double x, double y) { return cf.value(x, y); };
  auto b = [&](double x) { return cf.g_lambda(x); };

  std::vector<double> xs(200), ys(100);
  for (int i = 0; i < 200; ++i) xs[i] = 0.05 + 4.95 * (i + 1) / 200.0;
  for (int j = 0; j < 100; ++j) ys[j] = static_cast<double>(j) / 99.0;

  const double h = 1e-3;
  const HjbResidualStats stats =
      hjb_residual(u, p, power_profit(), b, xs, ys, h, 2.0 * h);
  gate.require(stats.n_continuation > 0 && stats.n_stopping > 0,
               "grid classification degenerate");
  gate.require(stats.max_abs_continuation <= 1e-3,
               "continuation residual " + std::to_string(stats.max_abs_continuation));
  gate.require(stats.max_stopping <= 1e-3,
               "stopping residual " + std::to_string(stats.max_stopping));

  // Gradient constraint dV/dy >= -1e-8 everywhere (one-sided step 1e-5).
  double min_dy = 1e300;
  const double hy = 1e-5;
  for (double x : xs)
    for (double y : ys) {
      const double yl = std::min(y, 1.0 - hy);
      min_dy = std::min(min_dy, (cf.value(x, yl + hy) - cf.value(x, yl)) / hy);
    }
  gate.require(min_dy >= -1e-8, "dV/dy fell to " + std::to_string(min_dy));

  // Smooth fit at the boundary: |dV/dy| and |d2V/dxdy| <= 1e-4, one-sided
  // differences from inside the continuation region.
  double worst_dy = 0.0, worst_dxy = 0.0;
  // Backward stencil in x anchored at the boundary level of the left column,
  // so all four corners stay inside the continuation region.  Steps scale
  // with x and g(x) (V_yyy blows up like 1/y^2 near the floor via the entropy
  // term) and the remaining O(h) bias is removed by Richardson extrapolation.
  const auto cross_at = [&cf](double x, double rel) {
    const double sx = rel * x;
    const double sy = rel * cf.g_lambda(x);
    const double y1 = cf.g_lambda(x - sx);
    return ((cf.value(x, y1) - cf.value(x, y1 - sy)) -
            (cf.value(x - sx, y1) - cf.value(x - sx, y1 - sy))) /
           (sx * sy);
  };
  for (int i = 0; i < 50; ++i) {
    const double x = 0.1 + (std::min(5.0, cf.x_hat()) - 0.2) * i / 49.0;
    const double gy = cf.g_lambda(x);
    worst_dy = std::max(worst_dy,
                        std::abs((cf.value(x, gy) - cf.value(x, gy - hy)) / hy));
    const double cross = 2.0 * cross_at(x, 1e-4) - cross_at(x, 2e-4);
    worst_dxy = std::max(worst_dxy, std::abs(cross));
  }
  gate.require(worst_dy <= 1e-4, "boundary dV/dy " + std::to_string(worst_dy));
  gate.require(worst_dxy <= 1e-4, "boundary d2V/dxdy " + std::to_string(worst_dxy));
  return report(2, "closed-form HJB verification", gate, timer.seconds(), 10.0);
}

int criterion3() {
  Timer timer;
  Gate gate;
  const std::vector<double> lambdas{2.5, 1.0, 0.5, 0.1, 0.01};

  const SweepResult at_one =
      vanishing_sweep(base_params(), power_profit(), lambdas, 1.0);
  double prev_gap = 1e300;
  for (const SweepRow& row : at_one.rows) {
    gate.require(row.b_lambda_y >= at_one.b_star - 1e-12, "b_lambda(1) < b*");
    gate.require(std::abs(row.gap) < prev_gap, "gap at y=1 not strictly decreasing");
    prev_gap = std::abs(row.gap);
  }

  const SweepResult at_tenth =
      vanishing_sweep(base_params(), power_profit(), lambdas, 0.1);
  prev_gap = 1e300;
  for (const SweepRow& row : at_tenth.rows) {
    gate.require(row.b_lambda_y <= at_tenth.b_star + 1e-12, "b_lambda(0.1) > b*");
    gate.require(std::abs(row.gap) <= prev_gap, "gap at y=0.1 not decreasing");
    prev_gap = std::abs(row.gap);
  }

  for (double lambda : lambdas) {
    const ClosedFormSolution cf(base_params(lambda), power_profit());
    gate.require(std::abs(cf.b_lambda(std::exp(-1.0)) - cf.b_star()) <= 1e-8,
                 "b_lambda(1/e) != b* at lambda " + std::to_string(lambda));
  }
  return report(3, "vanishing-entropy convergence", gate, timer.seconds(), 5.0);
}

int criterion4() {
  Timer timer;
  Gate gate;
  const ModelParams p = base_params();
  const GridSpec grid{0.02, 5.0};
  const ClosedFormSolution cf(p, power_profit());
  const GridBoundary truth = truth_boundary(cf, grid);

  PiOptions opts;
  opts.max_iters = 30;
  for (int which = 0; which < 2; ++which) {
    const std::string tag = which == 0 ? "exp init: " : "linear init: ";
    const GridBoundary g0 =
        which == 0 ? init_exponential(p, power_profit(), 0.75, grid)
                   : init_linear(p, power_profit(), grid);
    const IterationTrace tr = run_pi(g0, p, power_profit(), opts, truth);
    for (std::size_t k = 0; k + 1 < tr.iterates.size(); ++k) {
      const auto& a = tr.iterates[k].values();
      const auto& b = tr.iterates[k + 1].values();
      for (std::size_t i = 0; i < a.size(); ++i)
        if (b[i] > a[i] + 1e-12) {
          gate.require(false, tag + "iterates not pointwise decreasing");
          break;
        }
    }
    for (const ConditionRecord& rec : tr.conditions)
      if (!rec.abcd()) {
        gate.require(false, tag + "induction conditions violated");
        break;
      }
    for (bool ok : tr.improvement_ok)
      if (!ok) {
        gate.require(false, tag + "value improvement violated");
        break;
      }
    gate.require(tr.l1_to_truth.back() < 1e-3,
                 tag + "final L1 " + std::to_string(tr.l1_to_truth.back()));
    gate.require(tr.iterates.size() <= 31, tag + "did not converge within K=30");
  }
  return report(4, "model-based policy iteration", gate, timer.seconds(), 120.0);
}

int criterion5() {
  Timer timer;
  Gate gate;
  const ModelParams p = base_params();
  const GridSpec grid{0.02, 5.0};
  const ClosedFormSolution cf(p, power_profit());
  PathConfig pc;
  pc.dt = 0.01;
  pc.horizon = 30.0;
  pc.seed = 2024;
  // Exact continuous running minima: the plain sampled minimum carries an
  // O(sqrt(dt)) monitoring bias that the tightest configurations (standard
  // error ~5e-5) would expose.
  pc.bridge_minimum = true;
  const Simulator sim(p, power_profit(), pc);

  std::vector<GridBoundary> gs;
  gs.push_back(init_exponential(p, power_profit(), 0.6, grid));
  gs.push_back(init_exponential(p, power_profit(), 0.75, grid));
  gs.push_back(init_exponential(p, power_profit(), 0.9, grid));
  gs.push_back(init_linear(p, power_profit(), grid));
  gs.push_back(truth_boundary(cf, grid));

  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> ux(0.3, 4.5), uy(0.05, 1.0);
  for (int t = 0; t < 10; ++t) {
    const double x = ux(rng);
    const double y = uy(rng);
    const GridBoundary& g = gs[t % gs.size()];
    const SemiAnalyticValue v(g, p, power_profit());
    const McResult mc =
        sim.mc_value(x, y, g, 10000, 0, static_cast<std::uint64_t>(t), 0);
    const double gap = std::abs(mc.mean - v.value_of(x, y));
    if (gap > 3.0 * mc.stderr_)
      gate.require(false, "config " + std::to_string(t) + " off by " +
                              std::to_string(gap / mc.stderr_) + " se");
  }

  // Under the optimal boundary the sampled boundary-row mixed difference is
  // consistent with its exact counterpart: on a finite grid the row itself
  // carries a deterministic offset, so the t-statistic compares the sample
  // mean against the same finite difference of the semi-analytic value.
  SpiConfig cfg;
  cfg.M = 40;
  cfg.path_cfg = pc;
  cfg.path_cfg.bridge_minimum = false;  // ensemble path mode
  cfg.path_cfg.mode = SimMode::common_random_numbers;
  const Simulator sim_crn(p, power_profit(), cfg.path_cfg);
  const GridBoundary& truth = gs.back();
  const SemiAnalyticValue exact(truth, p, power_profit());
  const ValueTable table = estimate_value_grid(truth, cfg, sim_crn, 0);
  for (double xq : {1.0, 2.0, 3.0, 4.0}) {
    const auto i = static_cast<std::size_t>(std::llround(xq / cfg.delta_x));
    const auto jb = static_cast<std::size_t>(
        std::floor(truth.values()[i] / cfg.delta_y + 1e-9));
    const std::size_t P = cfg.M / 2;
    std::vector<double> md(P);
    const double dx = table.xs[i + 1] - table.xs[i - 1];
    const double dy = table.ys[jb] - table.ys[jb - 1];
    auto ref = [&](std::size_t ii, std::size_t jj) {
      return exact.value_of(table.xs[ii], table.ys[jj]);
    };
    const double md_exact =
        ((ref(i + 1, jb) - ref(i - 1, jb)) -
         (ref(i + 1, jb - 1) - ref(i - 1, jb - 1))) /
        (dx * dy);
    for (std::size_t q = 0; q < P; ++q) {
      double acc = 0.0;
      for (std::size_t m = 2 * q; m <= 2 * q + 1; ++m)
        acc += ((table.per_path[i + 1][m][jb] - table.per_path[i - 1][m][jb]) -
                (table.per_path[i + 1][m][jb - 1] -
                 table.per_path[i - 1][m][jb - 1])) /
               (dx * dy);
      md[q] = 0.5 * acc;
    }
    double mean = 0.0;
    for (double v : md) mean += v;
    mean /= static_cast<double>(P);
    double ss = 0.0;
    for (double v : md) ss += (v - mean) * (v - mean);
    const double se =
        std::sqrt(ss / (static_cast<double>(P) * static_cast<double>(P - 1)));
    if (std::abs(mean - md_exact) > 3.0 * se)
      gate.require(false, "boundary-row t-stat " +
                              std::to_string((mean - md_exact) / se) + " at x " +
                              std::to_string(xq));
  }
  return report(5, "Monte Carlo consistency", gate, timer.seconds(), 300.0);
}

int criterion6() {
  Timer timer;
  Gate gate;
  const ModelParams p = base_params();
  const GridSpec grid{0.02, 5.0};
  const ClosedFormSolution cf(p, power_profit());
  const GridBoundary truth = truth_boundary(cf, grid);
  const double y_pin = std::exp(-(1.0 + p.kappa * p.rho / p.lambda));

  SpiConfig cfg;
  cfg.path_cfg.dt = 0.01;
  cfg.path_cfg.horizon = 30.0;
  cfg.path_cfg.seed = 42;
  cfg.path_cfg.mode = SimMode::common_random_numbers;
  const Simulator sim(p, power_profit(), cfg.path_cfg);

  struct Case {
    const char* tag;
    GridBoundary g0;
    std::size_t stab_budget;
    double frozen_final;
  };
  const Case cases[] = {
      {"exp init: ", init_exponential(p, power_profit(), 0.75, grid), 20,
       0.098761707471640522},
      {"linear init: ", init_linear(p, power_profit(), grid), 28,
       0.11264071247331202},
  };
  for (const Case& c : cases) {
    const SpiTrace tr = run_spi(c.g0, cfg, &sim, y_pin, truth);
    const std::vector<double> sm = smooth3(tr.l1_to_truth);
    double worst_up = 0.0;
    for (std::size_t k = 0; k + 1 < sm.size(); ++k)
      worst_up = std::max(worst_up, sm[k + 1] - sm[k]);
    gate.require(worst_up <= 1e-3,
                 std::string(c.tag) + "smoothed trace rises by " +
                     std::to_string(worst_up));
    const std::size_t stab = stabilization_index(tr.l1_steps, 0.01);
    gate.require(stab <= c.stab_budget,
                 std::string(c.tag) + "stabilized at " + std::to_string(stab));
    gate.require(std::abs(tr.l1_to_truth.back() - c.frozen_final) <= 1e-6,
                 std::string(c.tag) + "frozen regression value drifted to " +
                     std::to_string(tr.l1_to_truth.back()));
  }
  return report(6, "sample-based policy iteration", gate, timer.seconds(), 900.0);
}

int criterion7() {
  Timer timer;
  Gate gate;
  const ModelParams p = base_params();
  const GridSpec grid{0.02, 5.0};
  const ClosedFormSolution cf(p, power_profit());
  const GridBoundary truth = truth_boundary(cf, grid);
  const GridBoundary g0 = init_exponential(p, power_profit(), 0.75, grid);
  const double y_pin = std::exp(-(1.0 + p.kappa * p.rho / p.lambda));

  PiOptions opts;
  opts.max_iters = 30;
  const IterationTrace pi = run_pi(g0, p, power_profit(), opts, truth);

  SpiConfig cfg;
  cfg.K = static_cast<int>(pi.iterates.size()) - 1;
  TableSource source = [&](const GridBoundary& g, int) {
    return oracle_table(g, p, cfg.delta_y);
  };
  const SpiTrace spi = run_spi(g0, cfg, nullptr, y_pin, truth, source);

  for (std::size_t k = 0; k < pi.iterates.size(); ++k) {
    const double tol = cfg.delta_y + cfg.delta_x * max_slope(pi.iterates[k]);
    const double gap = sup_distance(spi.iterates[k], pi.iterates[k]);
    if (gap > tol) {
      gate.require(false, "iteration " + std::to_string(k) + " sup gap " +
                              std::to_string(gap) + " > " + std::to_string(tol));
      break;
    }
  }
  return report(7, "oracle equivalence of sample-based iteration", gate,
                timer.seconds(), 120.0);
}

int criterion8() {
  Timer timer;
  Gate gate;
  const ModelParams p = base_params(2.5);
  const double target = std::exp(-2.0);

  // Noiseless mode: exact never-stop objective at x = 0.
  ZeroOrderConfig cfg;
  const FloorResult clean = learn_y_floor(cfg, [&](double y) {
    return -p.kappa * y - (p.lambda / p.rho) * y * std::log(y);
  });
  gate.require(!clean.aborted, "noiseless run aborted");
  gate.require(std::abs(clean.y_final - target) <= 1e-3,
               "noiseless floor " + std::to_string(clean.y_final));
  double prev = 1e300;
  for (std::size_t i = 20; i < clean.trace.size(); i += 60) {
    const double err =
        (clean.trace[i].y - target) * (clean.trace[i].y - target);
    gate.require(err < 0.7 * prev + 1e-16, "squared error not geometric");
    prev = err;
  }

  // Simulated mode under the stated budget.
  PathConfig pc;
  pc.dt = 0.01;
  pc.horizon = 30.0;
  pc.seed = 7;
  const Simulator sim(p, power_profit(), pc);
  const FloorResult run = learn_y_floor(cfg, sim);
  gate.require(!run.aborted, "simulated run aborted");
  gate.require(std::abs(run.y_final - target) <= 1e-3,
               "learned floor " + std::to_string(run.y_final));
  return report(8, "zeroth-order floor learning", gate, timer.seconds(), 60.0);
}

}  // namespace

int main() {
  int failures = 0;
  failures += criterion1();
  failures += criterion2();
  failures += criterion3();
  failures += criterion4();
  failures += criterion5();
  failures += criterion6();
  failures += criterion7();
  failures += criterion8();
  if (failures == 0)
    std::printf("ALL ACCEPTANCE CRITERIA PASSED\n");
  else
    std::printf("%d ACCEPTANCE CRITERIA FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
