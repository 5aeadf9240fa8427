#include "exos/model_free.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace exos {

namespace {

std::vector<double> uniform_grid(double hi, double step) {
  const auto n = static_cast<std::size_t>(std::llround(hi / step));
  if (n == 0 || std::abs(static_cast<double>(n) * step - hi) > 1e-9)
    throw std::invalid_argument("grid step must divide the range");
  std::vector<double> g(n + 1);
  for (std::size_t i = 0; i <= n; ++i) g[i] = static_cast<double>(i) * step;
  g.back() = hi;
  return g;
}

}  // namespace

FloorResult learn_y_floor(const ZeroOrderConfig& cfg,
                          const std::function<double(double)>& value_query) {
  if (!(cfg.y0 > 0.0 && cfg.y0 < 1.0))
    throw std::invalid_argument("learn_y_floor: y0 must be in (0,1)");
  if (!(cfg.c0 > 0.0) || !(cfg.eta > 0.0) || cfg.max_iters < 1)
    throw std::invalid_argument("learn_y_floor: bad config");
  FloorResult res;
  double y = cfg.y0;
  int consecutive_clamps = 0;
  for (int i = 1; i <= cfg.max_iters; ++i) {
    const double eps = std::min({y, 1.0 - y, cfg.c0 / static_cast<double>(i)});
    const double up = value_query(std::min(y + eps, 1.0));
    const double um = value_query(std::max(y - eps, 0.0));
    const double grad = (up - um) / (2.0 * eps);
    res.trace.push_back({i, y, grad, eps});
    const double eta_i = cfg.eta / std::sqrt(static_cast<double>(i));
    const double raw = y + eta_i * grad;  // ascend the concave objective
    y = std::clamp(raw, cfg.margin, 1.0 - cfg.margin);
    if (y != raw)
      ++consecutive_clamps;
    else
      consecutive_clamps = 0;
    if (consecutive_clamps >= 10) {
      res.aborted = true;
      break;
    }
  }
  res.y_final = y;
  return res;
}

FloorResult learn_y_floor(const ZeroOrderConfig& cfg, const Simulator& sim) {
  const GridBoundary never_stop({0.0, 1.0}, {1.0, 1.0});
  std::uint64_t call = 0;
  auto query = [&](double y) {
    return sim.mc_value(0.0, y, never_stop, cfg.M_inner, 0, call++, 0).mean;
  };
  return learn_y_floor(cfg, query);
}

ValueTable estimate_value_grid(const GridBoundary& g, const SpiConfig& cfg,
                               const Simulator& sim, std::uint64_t k) {
  ValueTable t;
  t.xs = uniform_grid(cfg.x_bar, cfg.delta_x);
  t.ys = uniform_grid(1.0, cfg.delta_y);
  const std::size_t nx = t.xs.size(), ny = t.ys.size();
  t.mean.assign(nx, std::vector<double>(ny, 0.0));
  t.stderr_.assign(nx, std::vector<double>(ny, 0.0));
  if (sim.config().mode == SimMode::common_random_numbers) {
    const auto ens = make_ensemble(sim.params(), sim.config(), cfg.M, k);
    t.per_path.resize(nx);
    for (std::size_t i = 0; i < nx; ++i)
      sim.column_rewards(t.xs[i], t.ys, g, ens, t.mean[i], t.stderr_[i],
                         &t.per_path[i]);
  } else {
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < ny; ++j) {
        const auto r = sim.mc_value(t.xs[i], t.ys[j], g, cfg.M, k, i, j);
        t.mean[i][j] = r.mean;
        t.stderr_[i][j] = r.stderr_;
      }
  }
  return t;
}

double mixed_difference(const ValueTable& t, std::size_t i, std::size_t j) {
  if (i == 0 || i + 1 >= t.xs.size() || j == 0 || j >= t.ys.size())
    throw std::invalid_argument("mixed_difference: edge indices rejected");
  const double dx = t.xs[i + 1] - t.xs[i - 1];
  const double dy = t.ys[j] - t.ys[j - 1];
  return ((t.mean[i + 1][j] - t.mean[i - 1][j]) -
          (t.mean[i + 1][j - 1] - t.mean[i - 1][j - 1])) /
         (dx * dy);
}

namespace {

// Core of the sample-based improvement step.  `settled` (optional, in/out)
// carries hysteresis state across outer iterations: a column that has once
// held its level is only re-opened by the strong-signal gate, never by the
// marginal-evidence walk, so settled columns stop drifting under noise.
GridBoundary update_core(const GridBoundary& g, const ValueTable& t,
                         const SpiConfig& cfg, double y_pin,
                         std::vector<char>* settled) {
  if (g.knots() != t.xs)
    throw std::invalid_argument("spi_update: boundary and table grids differ");
  const std::size_t nx = t.xs.size();
  const std::size_t ny = t.ys.size();
  const bool sampled = !t.per_path.empty();
  std::vector<double> out(nx);
  std::vector<char> fired(nx, 0);
  out[0] = y_pin;
  for (std::size_t i = 1; i < nx; ++i) {
    const double gx = g.values()[i];
    // Row at (or just below) the boundary; rows j and j-1 both lie in the
    // exploration region there.
    auto jb = static_cast<std::size_t>(std::floor(gx / cfg.delta_y + 1e-9));
    jb = std::min(jb, ny - 1);
    if (jb < 1) {
      out[i] = std::max(gx, y_pin);
      continue;
    }
    // The x-stencil falls back from central to one-sided whenever the left
    // neighbor column is flat somewhere in the scan range (it then sits in
    // its own stopping region, which would contaminate the difference); one
    // stencil is used for the whole column so the rows stay comparable.
    bool flat_left = false;
    if (i + 1 < nx)
      for (std::size_t j = 1; j <= jb && !flat_left; ++j)
        if (t.mean[i - 1][j] == t.mean[i - 1][j - 1]) flat_left = true;
    enum class Stencil { central, forward, backward };
    const Stencil st = (i + 1 == nx) ? Stencil::backward
                       : flat_left   ? Stencil::forward
                                     : Stencil::central;
    const std::size_t il =
        (st == Stencil::central || st == Stencil::backward) ? i - 1 : i;
    const std::size_t ir = (st == Stencil::backward) ? i : i + 1;
    const double dx = t.xs[ir] - t.xs[il];
    // x-difference profile of the value estimate along the column.
    auto xdiff = [&](std::size_t j) {
      return (t.mean[ir][j] - t.mean[il][j]) / dx;
    };
    // The zero of the mixed difference is where the x-difference of u-bar is
    // maximal in y (u_x increases below the root and decreases above it), so
    // locate the argmax over the column; this uses every row at once and is
    // far more robust to per-row noise than stopping at the first sign flip.
    std::size_t best = 0;
    double best_val = xdiff(0);
    for (std::size_t j = 1; j <= jb; ++j) {
      const double d = xdiff(j);
      if (d > best_val) {
        best_val = d;
        best = j;
      }
    }
    // Per-path x-differences; antithetic pairs (2q, 2q+1) share a stream, so
    // statistics are taken over pair means, which is what is actually i.i.d.
    auto xdiff_path = [&](std::size_t m, std::size_t j) {
      return (t.per_path[ir][m][j] - t.per_path[il][m][j]) / dx;
    };
    const std::size_t M = sampled ? t.per_path[i].size() : 0;
    const std::size_t P = M / 2;
    // mean and standard error of a per-pair quantity
    auto pair_stats = [&](auto&& f) {
      double sum = 0.0, sum2 = 0.0;
      for (std::size_t q = 0; q < P; ++q) {
        const double d = 0.5 * (f(2 * q) + f(2 * q + 1));
        sum += d;
        sum2 += d * d;
      }
      const double mean = sum / static_cast<double>(P);
      const double var =
          std::max(0.0, (sum2 - static_cast<double>(P) * mean * mean) /
                            static_cast<double>(P - 1));
      return std::make_pair(mean, std::sqrt(var / static_cast<double>(P)));
    };
    // A significantly negative boundary-row mixed difference means the column
    // is above the fixed point beyond doubt; take the argmax as-is.  Otherwise
    // move only as far from the current row as the evidence forces: walk from
    // the current row toward the argmax and stop at the first row
    // statistically indistinguishable from it.
    const double mdv = (xdiff(jb) - xdiff(jb - 1)) / (t.ys[jb] - t.ys[jb - 1]);
    const bool aggressive = sampled ? mdv < -cfg.aggressive_margin : mdv < 0.0;
    const bool is_settled = settled && (*settled)[i];
    const bool reopen = mdv < -cfg.reopen_margin;
    std::size_t selected = best;
    if (sampled && is_settled && !reopen) {
      selected = jb;  // settled column without overwhelming evidence: hold
    } else if (sampled && !aggressive && best != jb && P >= 2) {
      const long step = best < jb ? -1 : +1;
      for (long j = static_cast<long>(jb); j != static_cast<long>(best);
           j += step) {
        auto [mean, se] = pair_stats([&](std::size_t m) {
          return xdiff_path(m, best) - xdiff_path(m, static_cast<std::size_t>(j));
        });
        if (mean <= cfg.select_tstat * se) {
          selected = static_cast<std::size_t>(j);
          break;
        }
      }
    }
    double updated;
    if (selected == jb && (!aggressive || (is_settled && !reopen))) {
      updated = gx;  // indistinguishable from the current boundary: hold
      fired[i] = 0;
      if (settled && sampled && gx < 1.0) (*settled)[i] = 1;
    } else if (selected == 0) {
      updated = y_pin;  // maximum at the floor row: clamp and let x=0 pin rule
      fired[i] = 1;
    } else {
      updated = t.ys[selected];
      fired[i] = 1;
      if (selected == best && best >= 1 && best + 1 <= jb) {
        // Sub-cell refinement: parabola through the three rows around the
        // argmax (guarded against degenerate curvature).
        const double dm = xdiff(best - 1), d0 = xdiff(best), dp = xdiff(best + 1);
        const double denom = dm - 2.0 * d0 + dp;
        if (denom < 0.0) {
          const double shift = 0.5 * (dm - dp) / denom;
          if (shift > -1.0 && shift < 1.0)
            updated = t.ys[best] + shift * (t.ys[1] - t.ys[0]);
        }
      }
    }
    out[i] = std::min(1.0, std::max(updated, y_pin));
    if (settled && sampled && fired[i]) (*settled)[i] = 0;
  }
  if (cfg.smooth_radius > 0 && sampled) {
    // Average the per-column targets over a short x-window; only columns that
    // moved adopt the averaged value, so settled neighbors act as stabilizing
    // votes without being dragged along themselves.
    std::vector<double> smoothed = out;
    for (std::size_t i = 1; i < nx; ++i) {
      if (!fired[i]) continue;
      const std::size_t lo =
          i > static_cast<std::size_t>(cfg.smooth_radius)
              ? i - static_cast<std::size_t>(cfg.smooth_radius)
              : 0;
      const std::size_t hi =
          std::min(nx - 1, i + static_cast<std::size_t>(cfg.smooth_radius));
      double sum = 0.0;
      for (std::size_t j = lo; j <= hi; ++j) sum += out[j];
      smoothed[i] = sum / static_cast<double>(hi - lo + 1);
    }
    out = std::move(smoothed);
  }
  // The table carries no information above the current boundary, so the
  // update is the one-sided descent of policy iteration.
  for (std::size_t i = 0; i < nx; ++i) out[i] = std::min(out[i], g.values()[i]);
  out = isotonic_project(std::move(out));
  for (std::size_t i = 0; i < nx; ++i) out[i] = std::min(out[i], g.values()[i]);
  return g.with_values(std::move(out));
}

}  // namespace

GridBoundary spi_update(const GridBoundary& g, const ValueTable& t,
                        const SpiConfig& cfg, double y_pin) {
  return update_core(g, t, cfg, y_pin, nullptr);
}

SpiTrace run_spi(const GridBoundary& g0, const SpiConfig& cfg, const Simulator* sim,
                 double y_pin, const std::optional<GridBoundary>& ground_truth,
                 const TableSource& source) {
  if (!sim && !source)
    throw std::invalid_argument("run_spi: need a simulator or a table source");
  SpiTrace trace;
  trace.iterates.push_back(g0);
  if (ground_truth) trace.l1_to_truth.push_back(l1_distance(g0, *ground_truth));
  // One common-random-numbers ensemble is reused across outer iterations
  // (stream 0), so the map g -> g_next is deterministic; combined with the
  // hysteresis state below the iteration reaches an exact fixed point instead
  // of hovering around one.
  std::vector<char> settled(g0.knots().size(), 0);
  for (int k = 0; k < cfg.K; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    const GridBoundary& g = trace.iterates.back();
    const ValueTable table =
        source ? source(g, k) : estimate_value_grid(g, cfg, *sim, 0);
    GridBoundary g_next = update_core(g, table, cfg, y_pin, &settled);
    trace.l1_steps.push_back(l1_distance(g, g_next));
    trace.sup_steps.push_back(sup_distance(g, g_next));
    trace.iterates.push_back(std::move(g_next));
    if (ground_truth)
      trace.l1_to_truth.push_back(l1_distance(trace.iterates.back(), *ground_truth));
    trace.seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return trace;
}

}  // namespace exos
