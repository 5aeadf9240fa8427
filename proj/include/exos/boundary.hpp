#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "exos/model.hpp"

namespace exos {

/// Uniform x-grid [0, x_bar] with step delta_x.
struct GridSpec {
  double delta_x = 0.02;
  double x_bar = 5.0;
  std::vector<double> knots() const;
};

/// Nondecreasing reflection boundary g: [0, x_bar] -> (0,1], stored at grid
/// knots and interpolated piecewise-linearly.  Immutable after construction.
class GridBoundary {
 public:
  GridBoundary(std::vector<double> knots, std::vector<double> values);

  double eval(double x) const;

  /// Smallest x with g(x) >= y; inverse(1) = x_hat.  Requires y >= g(0).
  double inverse(double y) const;

  /// Smallest knot with value 1, or +inf if the boundary never reaches 1.
  double x_hat() const { return x_hat_; }

  double floor_value() const { return values_.front(); }
  double max_value() const { return values_.back(); }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return knots_.size(); }

  /// Same knots, new values (revalidated).
  GridBoundary with_values(std::vector<double> values) const;

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
  double x_hat_ = std::numeric_limits<double>::infinity();
};

/// Exponential-family initialization satisfying the initial-policy assumption
/// by construction: the exact optimal-boundary exponent plus a zeta-power term,
/// so g0(0) = e^{-(1+kappa rho/lambda)} and g0 >= g_lambda with equality only
/// at x = 0.  Requires zeta in (theta, 1).
GridBoundary init_exponential(const ModelParams& params, const ProfitModel& profit,
                              double zeta, const GridSpec& grid);

/// Linear initialization of Remark form: interpolates (0, e^{-(1+kappa rho/lambda)})
/// and (x1, 1) with x1 = (1/2) (-alpha_-(kappa+lambda/rho)/(theta-alpha_-))^{-theta}.
/// Power profit only.
GridBoundary init_linear(const ModelParams& params, const ProfitModel& profit,
                         const GridSpec& grid);

/// Initial-policy checks at knots: (a) strictly increasing up to x_hat,
/// (b) g(0) = e^{-(1+kappa rho/lambda)} within 1e-10, (c) g >= g_lambda
/// expressed through the resolvent inequality.
ValidationReport validate_initial(const GridBoundary& g0, const ModelParams& params,
                                  const ProfitModel& profit);

/// L2 pool-adjacent-violators projection onto nondecreasing sequences.
std::vector<double> isotonic_project(std::vector<double> values);

/// delta_x-weighted (trapezoid) L1 distance over shared knots.
double l1_distance(const GridBoundary& g, const GridBoundary& h);
double sup_distance(const GridBoundary& g, const GridBoundary& h);

/// CSV serialization, header "x,g", 17 significant digits.
void write_boundary_csv(std::ostream& os, const GridBoundary& g);
void write_boundary_csv(const std::string& path, const GridBoundary& g);
GridBoundary read_boundary_csv(std::istream& is);
GridBoundary read_boundary_csv(const std::string& path);

}  // namespace exos
