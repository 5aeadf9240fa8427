#include "exos/policy_iter.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace exos {

namespace {

// Largest y below y_start where dxy(x, .) crosses zero.  dxy is negative at
// y_start; it turns positive as y decreases toward the floor (where A' -> 0
// and dxy -> H'(x) > 0), so the first sign change found while scanning down
// brackets the maximal root.
double descend_to_root(const SemiAnalyticValue& v, double x, double y_start,
                       double floor, const PiOptions& opts, bool& clamped_knot) {
  double hi = y_start;        // dxy(hi) < 0
  double lo = hi - opts.scan_step;
  while (lo > floor && v.dxy(x, lo) < 0.0) {
    hi = lo;
    lo -= opts.scan_step;
  }
  if (lo <= floor) {
    lo = floor;
    if (v.dxy(x, lo) < 0.0) {
      clamped_knot = true;
      return floor;
    }
  }
  // Invariant: dxy(lo) >= 0 > dxy(hi); the root is the sign change.
  while (hi - lo > opts.root_tol) {
    const double mid = 0.5 * (lo + hi);
    if (v.dxy(x, mid) < 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

GridBoundary update_boundary(const SemiAnalyticValue& v, const GridBoundary& g,
                             const PiOptions& opts, bool* clamped) {
  const auto& params = v.params();
  const double y_pin = std::exp(-(1.0 + params.kappa * params.rho / params.lambda));
  const double floor = g.floor_value();
  bool clamped_any = false;
  std::vector<double> out(g.size());
  out[0] = y_pin;
  for (std::size_t i = 1; i < g.size(); ++i) {
    const double x = g.knots()[i];
    const double gx = g.values()[i];
    const double d = v.dxy(x, gx);
    if (d < 0.0) {
      bool clamped_knot = false;
      out[i] = descend_to_root(v, x, gx, floor, opts, clamped_knot);
      clamped_any |= clamped_knot;
    } else {
      out[i] = gx;
    }
  }
  if (clamped) *clamped = clamped_any;
  return g.with_values(std::move(out));
}

ConditionRecord check_iteration_conditions(const GridBoundary& g,
                                           const SemiAnalyticValue& v,
                                           const ModelParams& params,
                                           const ProfitModel& profit,
                                           double cond_tol) {
  ConditionRecord rec;
  const double lr = params.lambda / params.rho;
  const auto roots = characteristic_roots(params);
  const double am = roots.alpha_minus;
  const double y_pin = std::exp(-(1.0 + params.kappa * params.rho / params.lambda));
  rec.b = std::abs(g.floor_value() - y_pin) <= 1e-10;
  const double x_hat = g.x_hat();
  const auto& xs = g.knots();
  const auto& vs = g.values();
  rec.a = rec.c = rec.d = true;
  double prev_slope = 0.0;
  bool have_slope = false;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double x = xs[i];
    if (x > x_hat) break;
    if (!(vs[i] > vs[i - 1])) rec.a = false;
    const double h = resolvent(profit, params, x);
    const double hp = resolvent_derivative(profit, params, x);
    // (c) as log g >= log g_lambda, with the optimal boundary capped at 1.
    const double log_glam =
        std::min((hp * x / (-am) + h - params.kappa - lr) / lr, 0.0);
    if (std::log(vs[i]) < log_glam - cond_tol) rec.c = false;
    if (v.dxy(x, vs[i]) > cond_tol * std::max(1.0, std::abs(hp))) rec.d = false;
    const double slope = (vs[i] - vs[i - 1]) / (xs[i] - xs[i - 1]);
    if (have_slope)
      rec.slope_variation = std::max(rec.slope_variation, std::abs(slope - prev_slope));
    prev_slope = slope;
    have_slope = true;
  }
  return rec;
}

IterationTrace run_pi(const GridBoundary& g0, const ModelParams& params,
                      const ProfitModel& profit, const PiOptions& opts,
                      const std::optional<GridBoundary>& ground_truth) {
  const auto init_report = validate_initial(g0, params, profit);
  if (!init_report.ok())
    throw std::invalid_argument("run_pi: initial boundary rejected: " +
                                init_report.violations.front());
  IterationTrace trace;
  trace.iterates.push_back(g0);
  if (ground_truth) trace.l1_to_truth.push_back(l1_distance(g0, *ground_truth));

  // Sample grid for the policy-improvement check.
  const double x_bar = g0.knots().back();
  std::vector<std::pair<double, double>> sample;
  for (int i = 1; i <= 20; ++i)
    for (int j = 1; j <= 10; ++j)
      sample.emplace_back(x_bar * i / 20.0, j / 10.0);
  std::vector<double> prev_values;

  for (int k = 0; k < opts.max_iters; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    const GridBoundary& g = trace.iterates.back();
    SemiAnalyticValue v(g, params, profit);
    trace.conditions.push_back(
        check_iteration_conditions(g, v, params, profit, opts.cond_tol));

    std::vector<double> values(sample.size());
    for (std::size_t s = 0; s < sample.size(); ++s)
      values[s] = v.value_of(sample[s].first, sample[s].second);
    if (!prev_values.empty()) {
      bool ok = true;
      for (std::size_t s = 0; s < sample.size(); ++s)
        if (values[s] < prev_values[s] - 1e-8) ok = false;
      trace.improvement_ok.push_back(ok);
    }
    prev_values = std::move(values);

    bool clamped = false;
    GridBoundary g_next = update_boundary(v, g, opts, &clamped);
    trace.clamped.push_back(clamped);
    trace.l1_steps.push_back(l1_distance(g, g_next));
    trace.sup_steps.push_back(sup_distance(g, g_next));
    trace.iterates.push_back(std::move(g_next));
    if (ground_truth)
      trace.l1_to_truth.push_back(l1_distance(trace.iterates.back(), *ground_truth));
    trace.seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    if (trace.l1_steps.back() < opts.tol) break;
  }
  return trace;
}

void write_trace_csv(std::ostream& os, const IterationTrace& trace) {
  os << "iter,l1_to_truth,l1_step,sup_step,improvement_ok,seconds\n"
     << std::setprecision(17);
  for (std::size_t k = 0; k < trace.l1_steps.size(); ++k) {
    os << k << ',';
    if (k < trace.l1_to_truth.size()) os << trace.l1_to_truth[k];
    os << ',' << trace.l1_steps[k] << ',' << trace.sup_steps[k] << ',';
    if (k < trace.improvement_ok.size()) os << (trace.improvement_ok[k] ? 1 : 0);
    os << ',';
    if (k < trace.seconds.size()) os << trace.seconds[k];
    os << '\n';
  }
}

}  // namespace exos
