#include "exos/closed_form.hpp"

#include <cmath>
#include <stdexcept>

namespace exos {

namespace {

// Left side of the free-boundary equation, H'(x) x/(-a_-) + H(x); strictly
// increasing, value 0 at x = 0.
double free_boundary_lhs(const ModelParams& params, const ProfitModel& profit,
                         double alpha_minus, double x) {
  if (x <= 0.0) return 0.0;
  return resolvent_derivative(profit, params, x) * x / (-alpha_minus) +
         resolvent(profit, params, x);
}

// Solve free_boundary_lhs(x) = target for target >= 0.
double invert_free_boundary(const ModelParams& params, const ProfitModel& profit,
                            double alpha_minus, double target) {
  if (target <= 0.0) return 0.0;
  double hi = 1.0;
  if (profit.is_power()) {
    // Analytic warm start; bisection still refines it below.
    const auto& p = profit.power_spec();
    const double P = power_resolvent_scale(params, p);
    hi = std::pow(target * (-alpha_minus) / (P * p.c * (p.theta - alpha_minus)),
                  1.0 / p.theta);
    hi *= 1.0 + 1e-6;
  }
  int guard = 0;
  while (free_boundary_lhs(params, profit, alpha_minus, hi) < target) {
    hi *= 2.0;
    if (++guard > 300) throw std::runtime_error("b_lambda: bracket expansion failed");
  }
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (free_boundary_lhs(params, profit, alpha_minus, mid) < target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-12 * hi) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ClosedFormSolution::ClosedFormSolution(const ModelParams& params,
                                       const ProfitModel& profit,
                                       std::size_t a2_table_size)
    : params_(params), profit_(profit) {
  if (!(params.lambda > 0.0))
    throw std::invalid_argument(
        "ClosedFormSolution: lambda must be positive (use classical_boundary for lambda=0)");
  const auto report = validate(params, profit);
  if (!report.ok())
    throw std::invalid_argument("ClosedFormSolution: invalid parameters: " +
                                report.violations.front());
  roots_ = characteristic_roots(params);
  y_floor_ = std::exp(-1.0 - params.kappa * params.rho / params.lambda);
  b_star_ = classical_boundary(params, profit);
  x_hat_ = invert_free_boundary(params, profit, roots_.alpha_minus,
                                params.kappa + params.lambda / params.rho);

  // A2(y) = int_{y_floor}^y A2'(u) du with the smooth-fit integrand; the
  // integrand vanishes at the floor (numerator cancels, denominator diverges).
  const auto grid = graded_grid(y_floor_, 1.0, a2_table_size);
  a2_table_ = cumulative_integral_table(grid, [this](double u) { return a2_prime(u); });
}

double ClosedFormSolution::boundary_exponent(double x) const {
  const double lr = params_.lambda / params_.rho;
  if (x <= 0.0) return (-params_.kappa - lr) / lr;  // limit: x H'(x) -> 0, H(0) = 0
  const double h = resolvent(profit_, params_, x);
  const double hp = resolvent_derivative(profit_, params_, x);
  return (-hp * x / roots_.alpha_minus + h - params_.kappa - lr) / lr;
}

double ClosedFormSolution::g_lambda(double x) const {
  if (x < 0.0) throw std::invalid_argument("g_lambda: x must be nonnegative");
  return std::min(std::exp(boundary_exponent(x)), 1.0);
}

double ClosedFormSolution::b_lambda(double y) const {
  if (!(y > 0.0 && y <= 1.0)) throw std::invalid_argument("b_lambda: y must be in (0,1]");
  const double target = params_.kappa +
                        (params_.lambda / params_.rho) * (1.0 + std::log(y));
  return invert_free_boundary(params_, profit_, roots_.alpha_minus, target);
}

double ClosedFormSolution::a2_prime(double y) const {
  if (y <= y_floor_) return 0.0;
  const double b = b_lambda(y);
  if (b <= 0.0) return 0.0;
  const double lr = params_.lambda / params_.rho;
  const double num = params_.kappa + lr * std::log(y) + lr - resolvent(profit_, params_, b);
  return num / std::pow(b, roots_.alpha_minus);
}

double ClosedFormSolution::a2(double y) const {
  if (y < y_floor_ - 1e-12 || y > 1.0 + 1e-12)
    throw std::domain_error("a2: y outside [y_floor, 1]");
  if (y <= y_floor_) return 0.0;
  return a2_table_.eval(std::min(y, 1.0));
}

double ClosedFormSolution::value(double x, double y) const {
  if (!(x > 0.0)) throw std::invalid_argument("value: x must be positive");
  if (y < 0.0 || y > 1.0) throw std::invalid_argument("value: y must be in [0,1]");
  if (y == 0.0) return 0.0;  // 0 log 0 = 0
  const double lr = params_.lambda / params_.rho;
  const double h = resolvent(profit_, params_, x);
  const auto base = [&](double z) {
    return h * z - params_.kappa * z - lr * z * std::log(z);
  };
  if (y < y_floor_) return base(y);
  const double g = g_lambda(x);
  const double z = std::min(y, g);  // stopping region pastes F(x, g_lambda(x))
  return a2(z) * std::pow(x, roots_.alpha_minus) + base(z);
}

SweepResult vanishing_sweep(const ModelParams& params_without_lambda,
                            const ProfitModel& profit,
                            const std::vector<double>& lambdas, double y) {
  if (lambdas.empty()) throw std::invalid_argument("vanishing_sweep: empty lambda list");
  for (std::size_t i = 0; i + 1 < lambdas.size(); ++i)
    if (!(lambdas[i] > lambdas[i + 1]))
      throw std::invalid_argument("vanishing_sweep: lambdas must be sorted decreasing");
  SweepResult out;
  out.b_star = classical_boundary(params_without_lambda, profit);
  out.direction = (y >= std::exp(-1.0)) ? +1 : -1;
  const auto roots = characteristic_roots(params_without_lambda);
  for (double lam : lambdas) {
    ModelParams p = params_without_lambda;
    p.lambda = lam;
    const double target = p.kappa + (lam / p.rho) * (1.0 + std::log(y));
    const double b = invert_free_boundary(p, profit, roots.alpha_minus, target);
    out.rows.push_back({lam, b, b - out.b_star});
  }
  return out;
}

}  // namespace exos
