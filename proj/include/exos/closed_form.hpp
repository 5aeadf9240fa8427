#pragma once

#include <vector>

#include "exos/model.hpp"
#include "exos/table.hpp"

namespace exos {

/// Exact solution of the entropy-regularized stopping problem: optimal
/// reflection boundary g_lambda, its inverse b_lambda, the coefficient
/// integral A2 and the piecewise value function.  Immutable after
/// construction; all evaluations are read-only.
class ClosedFormSolution {
 public:
  ClosedFormSolution(const ModelParams& params, const ProfitModel& profit,
                     std::size_t a2_table_size = 2000);

  /// Optimal reflection boundary, capped at 1; g_lambda(0) = y_floor.
  double g_lambda(double x) const;

  /// Inverse boundary on [y_floor, 1]; returns 0 for y below the floor.
  double b_lambda(double y) const;

  /// Coefficient integral A2 on [y_floor, 1].
  double a2(double y) const;
  /// Exact A2'(y) from the smooth-fit identity.
  double a2_prime(double y) const;

  /// Regularized value V^lambda(x, y), x > 0, y in [0,1].
  double value(double x, double y) const;

  double y_floor() const { return y_floor_; }
  /// Smallest x with g_lambda(x) = 1 (+inf never happens: always finite).
  double x_hat() const { return x_hat_; }
  double b_star() const { return b_star_; }
  const CharacteristicRoots& roots() const { return roots_; }
  const ModelParams& params() const { return params_; }
  const ProfitModel& profit() const { return profit_; }

 private:
  double boundary_exponent(double x) const;  // log g_lambda before capping

  ModelParams params_;
  ProfitModel profit_;
  CharacteristicRoots roots_{};
  double y_floor_ = 0.0;
  double x_hat_ = 0.0;
  double b_star_ = 0.0;
  HermiteTable a2_table_;
};

struct SweepRow {
  double lambda;
  double b_lambda_y;
  double gap;  // b_lambda(y) - b_star
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double b_star;
  /// +1: boundaries approach b* from above (y >= 1/e); -1: from below.
  int direction;
};

/// Vanishing-entropy sweep: b_lambda(y) for each lambda (sorted decreasing)
/// plus the classical threshold.
SweepResult vanishing_sweep(const ModelParams& params_without_lambda,
                            const ProfitModel& profit,
                            const std::vector<double>& lambdas, double y);

}  // namespace exos
