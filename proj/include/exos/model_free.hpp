#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "exos/boundary.hpp"
#include "exos/simulator.hpp"

namespace exos {

struct SpiConfig {
  double delta_x = 0.02;
  double delta_y = 0.02;
  double x_bar = 5.0;
  std::size_t M = 20;  // paths per grid estimate
  int K = 30;          // outer iterations
  // Robust target selection: the column moves to the row CLOSEST to its
  // current boundary among those whose x-difference is within select_tstat
  // standard errors of the column argmax (standard errors taken across
  // per-path differences, which respects the common-random-numbers
  // correlation).  With clear evidence this is the argmax itself; near the
  // fixed point nearby rows are statistically indistinguishable and the
  // column holds, so marginal noise does not move settled columns.  Without
  // per-path data the rule degenerates to the exact argmax.
  double select_tstat = 2.5;
  // When the boundary-row mixed difference is below -aggressive_margin the
  // column is far above the fixed point (the analytic signal dwarfs the
  // Monte Carlo noise) and the argmax is taken as-is, keeping early descent
  // fast; weaker signals go through the robust selection above.
  double aggressive_margin = 0.6;
  // Hysteresis: a column that holds its level is marked settled, and a settled
  // column re-opens only when the boundary-row mixed difference exceeds
  // reopen_margin in magnitude (the arriving descent wave dwarfs that, slow
  // noise-driven drift does not), so the iterate stops creeping once each
  // column has locked on.
  double reopen_margin = 1.25;
  // Moving-average half-width (in columns) applied to the per-column targets
  // before the monotone projection; the boundary is smooth in x, so nearby
  // columns are independent votes for the same level and averaging them cuts
  // the per-column noise without biasing the signal.  0 disables smoothing.
  int smooth_radius = 0;
  PathConfig path_cfg;
};

/// Monte Carlo value surface on the (x, y) product grid.
struct ValueTable {
  std::vector<double> xs, ys;
  std::vector<std::vector<double>> mean;     // [i][j]
  std::vector<std::vector<double>> stderr_;  // [i][j]
  // Per-path rewards [i][m][j]; filled only in common-random-numbers mode,
  // where cross-node noise correlation makes node-level standard errors
  // useless for judging differences.
  std::vector<std::vector<std::vector<double>>> per_path;
};

struct ZeroOrderConfig {
  double y0 = 0.5;
  double c0 = 0.1;
  double eta = 0.05;  // step eta_i = eta / sqrt(i)
  int max_iters = 500;
  std::size_t M_inner = 256;  // paths per value query
  double margin = 1e-4;       // clamp interval [margin, 1 - margin]
};

struct FloorStep {
  int i;
  double y;
  double estimate;  // two-point gradient estimate
  double eps;
};

struct FloorResult {
  std::vector<FloorStep> trace;
  double y_final = 0.0;
  bool aborted = false;  // divergence guard tripped (10 consecutive clamps)
};

/// Zeroth-order learner for the boundary value at x = 0: two-point estimates
/// of d/dy J(0, y; never stop) and steps that ASCEND toward the interior
/// stationary point.  `value_query(y)` returns the (estimated) value of the
/// never-stop policy started at (0, y).
FloorResult learn_y_floor(const ZeroOrderConfig& cfg,
                          const std::function<double(double)>& value_query);

/// Simulator-backed variant: queries are Monte Carlo values under g == 1
/// (the policy that never moves the weight process).
FloorResult learn_y_floor(const ZeroOrderConfig& cfg, const Simulator& sim);

/// Monte Carlo value surface for the boundary g; in common-random-numbers
/// mode one ensemble of cfg.M unit paths (streams derived from iteration k)
/// is shared by every grid node, otherwise each node consumes fresh streams.
ValueTable estimate_value_grid(const GridBoundary& g, const SpiConfig& cfg,
                               const Simulator& sim, std::uint64_t k = 0);

/// Mixed difference at interior node (i, j): central in x, one-sided
/// downward in y (the left y-derivative at the boundary row).
double mixed_difference(const ValueTable& t, std::size_t i, std::size_t j);

/// One sample-based boundary update.  Each x-column moves to the level where
/// the x-difference of the value estimate peaks in y (the zero of the mixed
/// difference), chosen robustly against per-path noise; the x = 0 knot is
/// pinned to y_pin and the result is projected onto nondecreasing values.
/// With per-path data (sampled tables under a lifted boundary) the move is
/// two-sided; with exact tables it reduces to the one-sided descent of policy
/// iteration.
GridBoundary spi_update(const GridBoundary& g, const ValueTable& t,
                        const SpiConfig& cfg, double y_pin);

struct SpiTrace {
  std::vector<GridBoundary> iterates;
  std::vector<double> l1_to_truth;
  std::vector<double> l1_steps;
  std::vector<double> sup_steps;
  std::vector<double> seconds;
};

using TableSource = std::function<ValueTable(const GridBoundary&, int k)>;

/// Sample-based policy iteration: K rounds of estimate_value_grid +
/// spi_update.  A custom `source` (e.g. an analytic value surface) replaces
/// the simulator, in which case `sim` may be null.
SpiTrace run_spi(const GridBoundary& g0, const SpiConfig& cfg, const Simulator* sim,
                 double y_pin,
                 const std::optional<GridBoundary>& ground_truth = std::nullopt,
                 const TableSource& source = {});

}  // namespace exos
