#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "exos/boundary.hpp"
#include "exos/model.hpp"
#include "exos/policy_eval.hpp"

namespace exos {

/// Per-iteration record of the induction conditions on [0, x_hat]:
/// (a) strictly increasing, (b) floor value pinned, (c) boundary dominates the
/// optimal one, (d) nonpositive mixed derivative at the boundary, plus a
/// slope-variation statistic standing in for the C^1 property (not pass/fail
/// on a grid).
struct ConditionRecord {
  bool a = false;
  bool b = false;
  bool c = false;
  bool d = false;
  double slope_variation = 0.0;  // max |Delta slope| between adjacent cells
  bool abcd() const { return a && b && c && d; }
};

struct PiOptions {
  int max_iters = 30;
  double tol = 1e-6;        // stop when the L1 step falls below this
  double scan_step = 0.002;  // y sub-step for the sign-change scan
  double root_tol = 1e-10;   // bisection tolerance on the dxy zero
  // Numerical slack for conditions (c) (in log-boundary units) and (d).
  double cond_tol = 1e-6;
};

struct IterationTrace {
  std::vector<GridBoundary> iterates;            // g_0, ..., g_K
  std::vector<double> l1_to_truth;               // per iterate, if truth given
  std::vector<double> l1_steps;                  // |g_{k+1} - g_k|_1
  std::vector<double> sup_steps;
  std::vector<bool> improvement_ok;              // value improvement k -> k+1
  std::vector<ConditionRecord> conditions;       // per iterate
  std::vector<bool> clamped;                     // root scan hit the floor
  std::vector<double> seconds;                   // wall time per iteration
};

/// One boundary-update step: at each knot with dxy(x, g(x)) < 0, moves g(x)
/// down to the largest zero of y -> dxy(x, y); the x = 0 knot is pinned to
/// e^{-(1 + kappa rho / lambda)}.  `clamped`, when given, reports whether any
/// knot ran out of sign changes and was clamped at the floor.
GridBoundary update_boundary(const SemiAnalyticValue& v, const GridBoundary& g,
                             const PiOptions& opts = {}, bool* clamped = nullptr);

ConditionRecord check_iteration_conditions(const GridBoundary& g,
                                           const SemiAnalyticValue& v,
                                           const ModelParams& params,
                                           const ProfitModel& profit,
                                           double cond_tol = 1e-6);

/// Model-based policy iteration: alternates evaluate_policy / update_boundary
/// until the L1 step drops below opts.tol or opts.max_iters is reached.
IterationTrace run_pi(const GridBoundary& g0, const ModelParams& params,
                      const ProfitModel& profit, const PiOptions& opts = {},
                      const std::optional<GridBoundary>& ground_truth = std::nullopt);

/// Trace CSV: header `iter,l1_to_truth,l1_step,sup_step,improvement_ok,seconds`
/// (empty l1_to_truth column when no ground truth was supplied).
void write_trace_csv(std::ostream& os, const IterationTrace& trace);

}  // namespace exos
