#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <vector>

#include "exos/boundary.hpp"
#include "exos/model.hpp"
#include "exos/table.hpp"

namespace exos {

/// Semi-analytic value of the reflection policy with boundary g: on the
/// exploration region E(g) = {y <= g(x)},
///   u(x, y) = A(y) x^{alpha_-} + H_pi(x) y - kappa y - (lambda/rho) y log y,
/// where A is the coefficient integral with A(g(0)) = 0, and u(x, y) = u(x, g(x))
/// on the stopping region.  Immutable after construction; reads are thread-safe.
class SemiAnalyticValue {
 public:
  SemiAnalyticValue(GridBoundary boundary, const ModelParams& params,
                    const ProfitModel& profit, std::size_t table_size = 2000);

  /// u(x, min(y, g(x))); total on x > 0, y in [0, 1].
  double value_of(double x, double y) const;

  /// Coefficient integral A(y); zero for y <= g(0) (the policy never acts
  /// there, and the integrand vanishes with the diverging denominator).
  double a(double y) const;
  /// Exact A'(y) = (kappa + (l/r) log y + l/r - H(g^{-1}(y))) / g^{-1}(y)^{alpha_-}.
  double a_prime(double y) const;

  /// d u / dy on the continuation branch; 0 for y > g(x).
  double dy(double x, double y) const;

  /// Mixed derivative alpha_- A'(y) x^{alpha_- - 1} + H'(x).  Requires
  /// y <= g(x); at y = g(x) this is the left y-derivative.
  double dxy(double x, double y) const;

  const GridBoundary& boundary() const { return boundary_; }
  const ModelParams& params() const { return params_; }
  const ProfitModel& profit() const { return profit_; }
  const CharacteristicRoots& roots() const { return roots_; }

 private:
  GridBoundary boundary_;
  ModelParams params_;
  ProfitModel profit_;
  CharacteristicRoots roots_{};
  HermiteTable a_table_;
};

inline SemiAnalyticValue evaluate_policy(const GridBoundary& g,
                                         const ModelParams& params,
                                         const ProfitModel& profit) {
  return SemiAnalyticValue(g, params, profit);
}

/// Pointwise finite-difference residual of the variational-inequality ODE,
///   (1/2) sigma^2 x^2 u_xx + mu x u_x - rho u + (pi(x) - rho kappa) y
///     - lambda y log y,
/// with central differences of step h in x.
double hjb_residual_at(const std::function<double(double, double)>& u,
                       const ModelParams& params, const ProfitModel& profit,
                       double x, double y, double h);

struct HjbResidualStats {
  double max_abs_continuation = 0.0;  // |residual| max over E(g)
  // Signed max over S(g) (should be <= 0); lowest() when S(g) is not sampled.
  double max_stopping = std::numeric_limits<double>::lowest();
  std::size_t n_continuation = 0;
  std::size_t n_stopping = 0;
};

/// Sweeps the grid, classifying each node by the boundary and skipping any
/// node whose x-stencil comes within `band` (in y) of crossing the boundary,
/// where u_xx jumps.
HjbResidualStats hjb_residual(const std::function<double(double, double)>& u,
                              const ModelParams& params, const ProfitModel& profit,
                              const std::function<double(double)>& boundary,
                              const std::vector<double>& xs,
                              const std::vector<double>& ys, double h,
                              double band);

/// Value-surface CSV, header "x,y,u", row-major over (xs, ys), 17 digits.
void write_value_csv(std::ostream& os, const SemiAnalyticValue& v,
                     const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace exos
