#pragma once

#include <functional>
#include <string>
#include <vector>

namespace exos {

/// Market and regularization parameters of the exploratory stopping model.
/// Units: mu, rho are rates (1/time); sigma is 1/sqrt(time); kappa is the
/// lump-sum exit payoff; lambda >= 0 is the entropy temperature.
struct ModelParams {
  double mu = 0.2;
  double sigma = 0.2;
  double rho = 0.5;
  double kappa = 5.0;
  double lambda = 0.5;
};

struct PowerProfit {
  double c = 1.0;      // pi(x) = c * x^theta
  double theta = 0.5;  // in (0,1)
};

struct CustomProfit {
  std::function<double(double)> resolvent;             // H_pi
  std::function<double(double)> resolvent_derivative;  // H_pi'
};

/// Profit specification: either the first-class power profit pi(x)=c x^theta
/// or a caller-supplied resolvent pair (H_pi, H_pi').
class ProfitModel {
 public:
  static ProfitModel power(double c, double theta);
  static ProfitModel custom(std::function<double(double)> resolvent,
                            std::function<double(double)> resolvent_derivative);

  bool is_power() const { return is_power_; }
  const PowerProfit& power_spec() const;
  const CustomProfit& custom_spec() const;

  /// pi(x); only available for the power variant.
  double profit(double x) const;

 private:
  ProfitModel() = default;
  bool is_power_ = true;
  PowerProfit power_{};
  CustomProfit custom_{};
};

/// Roots of (1/2) sigma^2 a(a-1) + mu a - rho = 0.
struct CharacteristicRoots {
  double alpha_minus;  // < 0
  double alpha_plus;   // > 1 when rho > mu
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Standing-assumption check: rho > mu, sigma > 0, kappa > 0, lambda >= 0,
/// power exponent in (0,1); custom resolvents sampled for H(0)=0, H' >= 0
/// and x*H'(x) strictly increasing.
ValidationReport validate(const ModelParams& params, const ProfitModel& profit);

/// Cancellation-safe quadratic roots (larger-magnitude root first, the other
/// from the product -rho/(sigma^2/2)).
CharacteristicRoots characteristic_roots(const ModelParams& params);

/// Resolvent scale P = 1/(rho + sigma^2 theta(1-theta)/2 - theta mu) for the
/// power profit.
double power_resolvent_scale(const ModelParams& params, const PowerProfit& p);

/// H_pi(x) = E[int_0^inf e^{-rho t} pi(X_t^x) dt].
double resolvent(const ProfitModel& profit, const ModelParams& params, double x);

/// H_pi'(x); x must be > 0 (power variant with theta<1 is singular at 0).
double resolvent_derivative(const ProfitModel& profit, const ModelParams& params,
                            double x);

/// Classical (unregularized) stopping threshold b*, the root of
/// H'(x) x / (-alpha_-) + H(x) = kappa.
double classical_boundary(const ModelParams& params, const ProfitModel& profit);

}  // namespace exos
