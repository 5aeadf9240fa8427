#include "exos/model.hpp"

#include <cmath>
#include <stdexcept>

namespace exos {

ProfitModel ProfitModel::power(double c, double theta) {
  ProfitModel m;
  m.is_power_ = true;
  m.power_ = PowerProfit{c, theta};
  return m;
}

ProfitModel ProfitModel::custom(std::function<double(double)> resolvent,
                                std::function<double(double)> resolvent_derivative) {
  if (!resolvent || !resolvent_derivative)
    throw std::invalid_argument("custom profit requires both H_pi and H_pi'");
  ProfitModel m;
  m.is_power_ = false;
  m.custom_ = CustomProfit{std::move(resolvent), std::move(resolvent_derivative)};
  return m;
}

const PowerProfit& ProfitModel::power_spec() const {
  if (!is_power_) throw std::logic_error("not a power profit");
  return power_;
}

const CustomProfit& ProfitModel::custom_spec() const {
  if (is_power_) throw std::logic_error("not a custom profit");
  return custom_;
}

double ProfitModel::profit(double x) const {
  if (!is_power_)
    throw std::logic_error("pi(x) is not available for custom-resolvent profits");
  return power_.c * std::pow(x, power_.theta);
}

ValidationReport validate(const ModelParams& params, const ProfitModel& profit) {
  ValidationReport r;
  if (!(params.sigma > 0.0)) r.violations.push_back("sigma <= 0");
  if (!(params.rho > params.mu)) r.violations.push_back("rho <= mu");
  if (!(params.kappa > 0.0)) r.violations.push_back("kappa <= 0");
  if (!(params.lambda >= 0.0)) r.violations.push_back("lambda < 0");
  if (profit.is_power()) {
    const auto& p = profit.power_spec();
    if (!(p.c > 0.0)) r.violations.push_back("power coefficient c <= 0");
    if (!(p.theta > 0.0 && p.theta < 1.0))
      r.violations.push_back("power exponent theta not in (0,1)");
  } else {
    const auto& c = profit.custom_spec();
    if (std::abs(c.resolvent(0.0)) > 1e-12)
      r.violations.push_back("custom resolvent has H(0) != 0");
    // Sampled monotonicity checks; Assumption on pi translates to H' >= 0 and
    // x H'(x) strictly increasing.
    double prev = 0.0;
    for (int i = 1; i <= 32; ++i) {
      double x = 0.25 * i;
      double hp = c.resolvent_derivative(x);
      if (hp < 0.0) {
        r.violations.push_back("custom resolvent derivative negative at sampled point");
        break;
      }
      double xhp = x * hp;
      if (xhp <= prev) {
        r.violations.push_back("x*H'(x) not strictly increasing at sampled point");
        break;
      }
      prev = xhp;
    }
  }
  return r;
}

CharacteristicRoots characteristic_roots(const ModelParams& params) {
  if (!(params.sigma > 0.0))
    throw std::invalid_argument("characteristic_roots: sigma must be positive");
  const double a = 0.5 * params.sigma * params.sigma;
  const double b = params.mu - a;
  const double c = -params.rho;
  const double disc = b * b - 4.0 * a * c;
  // rho > 0 makes the discriminant positive and the roots straddle zero.
  const double sq = std::sqrt(disc);
  const double big = (b >= 0.0) ? (-b - sq) / (2.0 * a) : (-b + sq) / (2.0 * a);
  const double other = c / (a * big);  // product of roots = c/a
  CharacteristicRoots roots{};
  roots.alpha_minus = std::min(big, other);
  roots.alpha_plus = std::max(big, other);
  return roots;
}

double power_resolvent_scale(const ModelParams& params, const PowerProfit& p) {
  const double denom = params.rho +
                       0.5 * params.sigma * params.sigma * p.theta * (1.0 - p.theta) -
                       p.theta * params.mu;
  if (!(denom > 0.0))
    throw std::domain_error("power resolvent scale undefined: rho + s^2 th(1-th)/2 - th mu <= 0");
  return 1.0 / denom;
}

double resolvent(const ProfitModel& profit, const ModelParams& params, double x) {
  if (x < 0.0) throw std::invalid_argument("resolvent: x must be nonnegative");
  if (profit.is_power()) {
    const auto& p = profit.power_spec();
    return power_resolvent_scale(params, p) * p.c * std::pow(x, p.theta);
  }
  return profit.custom_spec().resolvent(x);
}

double resolvent_derivative(const ProfitModel& profit, const ModelParams& params,
                            double x) {
  if (!(x > 0.0))
    throw std::invalid_argument("resolvent_derivative: x must be positive");
  if (profit.is_power()) {
    const auto& p = profit.power_spec();
    return p.theta * power_resolvent_scale(params, p) * p.c * std::pow(x, p.theta - 1.0);
  }
  return profit.custom_spec().resolvent_derivative(x);
}

namespace {

// Left side of the free-boundary equation, strictly increasing under the
// standing assumptions.
double boundary_lhs(const ModelParams& params, const ProfitModel& profit,
                    double alpha_minus, double x) {
  return resolvent_derivative(profit, params, x) * x / (-alpha_minus) +
         resolvent(profit, params, x);
}

}  // namespace

double classical_boundary(const ModelParams& params, const ProfitModel& profit) {
  const auto roots = characteristic_roots(params);
  if (profit.is_power()) {
    const auto& p = profit.power_spec();
    const double P = power_resolvent_scale(params, p);
    const double am = roots.alpha_minus;
    return std::pow(-(1.0 / (P * p.c)) * (am / (p.theta - am)) * params.kappa,
                    1.0 / p.theta);
  }
  // Generic profit: geometric bracket expansion, then bisection.
  double lo = 1e-8, hi = 1.0;
  const double target = params.kappa;
  int expand = 0;
  while (boundary_lhs(params, profit, roots.alpha_minus, hi) < target) {
    hi *= 2.0;
    if (++expand > 200) throw std::runtime_error("classical_boundary: boundary outside domain");
  }
  while (boundary_lhs(params, profit, roots.alpha_minus, lo) > target) lo *= 0.5;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (boundary_lhs(params, profit, roots.alpha_minus, mid) < target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-10 * hi) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace exos
