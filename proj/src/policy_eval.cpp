#include "exos/policy_eval.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace exos {

SemiAnalyticValue::SemiAnalyticValue(GridBoundary boundary, const ModelParams& params,
                                     const ProfitModel& profit, std::size_t table_size)
    : boundary_(std::move(boundary)), params_(params), profit_(profit) {
  if (!(params.lambda > 0.0))
    throw std::invalid_argument("SemiAnalyticValue: lambda must be positive");
  const auto report = validate(params, profit);
  if (!report.ok())
    throw std::invalid_argument("SemiAnalyticValue: invalid parameters: " +
                                report.violations.front());
  roots_ = characteristic_roots(params);
  const double lo = boundary_.floor_value();
  const double hi = boundary_.max_value();
  if (!(hi - lo > 1e-12))
    throw std::invalid_argument("SemiAnalyticValue: boundary has no increase to invert");
  const auto grid = graded_grid(lo, hi, table_size);
  a_table_ = cumulative_integral_table(grid, [this](double u) { return a_prime(u); });
}

double SemiAnalyticValue::a_prime(double y) const {
  if (y <= boundary_.floor_value()) return 0.0;
  const double w = boundary_.inverse(std::min(y, boundary_.max_value()));
  if (w <= 0.0) return 0.0;
  const double lr = params_.lambda / params_.rho;
  const double num = params_.kappa + lr * std::log(y) + lr -
                     resolvent(profit_, params_, w);
  return num / std::pow(w, roots_.alpha_minus);
}

double SemiAnalyticValue::a(double y) const {
  if (y <= boundary_.floor_value()) return 0.0;
  return a_table_.eval(std::min(y, boundary_.max_value()));
}

double SemiAnalyticValue::value_of(double x, double y) const {
  if (!(x > 0.0)) throw std::invalid_argument("value_of: x must be positive");
  if (y < 0.0 || y > 1.0) throw std::invalid_argument("value_of: y must be in [0,1]");
  const double z = std::min(y, boundary_.eval(x));
  if (z <= 0.0) return 0.0;  // 0 log 0 = 0
  const double lr = params_.lambda / params_.rho;
  return a(z) * std::pow(x, roots_.alpha_minus) +
         resolvent(profit_, params_, x) * z - params_.kappa * z -
         lr * z * std::log(z);
}

double SemiAnalyticValue::dy(double x, double y) const {
  if (!(x > 0.0)) throw std::invalid_argument("dy: x must be positive");
  if (!(y > 0.0 && y <= 1.0)) throw std::invalid_argument("dy: y must be in (0,1]");
  if (y > boundary_.eval(x)) return 0.0;
  const double lr = params_.lambda / params_.rho;
  return a_prime(y) * std::pow(x, roots_.alpha_minus) +
         resolvent(profit_, params_, x) - params_.kappa - lr * (std::log(y) + 1.0);
}

double SemiAnalyticValue::dxy(double x, double y) const {
  if (!(x > 0.0)) throw std::invalid_argument("dxy: x must be positive");
  if (y > boundary_.eval(x) + 1e-12)
    throw std::domain_error("dxy: y above the boundary (stopping region)");
  return roots_.alpha_minus * a_prime(y) * std::pow(x, roots_.alpha_minus - 1.0) +
         resolvent_derivative(profit_, params_, x);
}

double hjb_residual_at(const std::function<double(double, double)>& u,
                       const ModelParams& params, const ProfitModel& profit,
                       double x, double y, double h) {
  if (!(x - h > 0.0)) throw std::invalid_argument("hjb_residual_at: stencil leaves x > 0");
  const double um = u(x - h, y), u0 = u(x, y), up = u(x + h, y);
  const double ux = (up - um) / (2.0 * h);
  const double uxx = (up - 2.0 * u0 + um) / (h * h);
  const double ylogy = (y > 0.0) ? y * std::log(y) : 0.0;
  return 0.5 * params.sigma * params.sigma * x * x * uxx + params.mu * x * ux -
         params.rho * u0 + (profit.profit(x) - params.rho * params.kappa) * y -
         params.lambda * ylogy;
}

HjbResidualStats hjb_residual(const std::function<double(double, double)>& u,
                              const ModelParams& params, const ProfitModel& profit,
                              const std::function<double(double)>& boundary,
                              const std::vector<double>& xs,
                              const std::vector<double>& ys, double h,
                              double band) {
  HjbResidualStats stats;
  for (double x : xs) {
    if (!(x - h > 0.0)) continue;
    // The stencil must stay on one side of the boundary; take the worst case
    // over the three abscissae.
    const double gmin = std::min({boundary(x - h), boundary(x), boundary(x + h)});
    const double gmax = std::max({boundary(x - h), boundary(x), boundary(x + h)});
    for (double y : ys) {
      if (y <= gmin - band) {
        const double r = hjb_residual_at(u, params, profit, x, y, h);
        stats.max_abs_continuation = std::max(stats.max_abs_continuation, std::abs(r));
        ++stats.n_continuation;
      } else if (y >= gmax + band) {
        const double r = hjb_residual_at(u, params, profit, x, y, h);
        stats.max_stopping = std::max(stats.max_stopping, r);
        ++stats.n_stopping;
      }
    }
  }
  return stats;
}

void write_value_csv(std::ostream& os, const SemiAnalyticValue& v,
                     const std::vector<double>& xs, const std::vector<double>& ys) {
  os << "x,y,u\n" << std::setprecision(17);
  for (double x : xs)
    for (double y : ys) os << x << ',' << y << ',' << v.value_of(x, y) << '\n';
}

}  // namespace exos
