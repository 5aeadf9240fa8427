#include "exos/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace exos {

std::vector<double> GridSpec::knots() const {
  if (!(delta_x > 0.0) || !(x_bar > 0.0))
    throw std::invalid_argument("GridSpec: delta_x and x_bar must be positive");
  const auto n = static_cast<std::size_t>(std::llround(x_bar / delta_x));
  std::vector<double> xs(n + 1);
  for (std::size_t i = 0; i <= n; ++i) xs[i] = static_cast<double>(i) * delta_x;
  xs.back() = x_bar;
  return xs;
}

GridBoundary::GridBoundary(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  if (knots_.size() != values_.size() || knots_.size() < 2)
    throw std::invalid_argument("GridBoundary: need matching knot/value arrays, size >= 2");
  if (knots_.front() != 0.0)
    throw std::invalid_argument("GridBoundary: first knot must be x = 0");
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i)
    if (!(knots_[i] < knots_[i + 1]))
      throw std::invalid_argument("GridBoundary: knots must be strictly increasing");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0 && values_[i] <= 1.0))
      throw std::invalid_argument("GridBoundary: values must lie in (0,1]");
    if (i > 0 && values_[i] < values_[i - 1])
      throw std::invalid_argument("GridBoundary: values must be nondecreasing");
  }
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (values_[i] >= 1.0) {
      x_hat_ = knots_[i];
      break;
    }
}

GridBoundary GridBoundary::with_values(std::vector<double> values) const {
  return GridBoundary(knots_, std::move(values));
}

double GridBoundary::eval(double x) const {
  if (x <= knots_.front()) return values_.front();
  if (x >= knots_.back()) return values_.back();
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
  const double t = (x - knots_[i]) / (knots_[i + 1] - knots_[i]);
  return values_[i] + t * (values_[i + 1] - values_[i]);
}

double GridBoundary::inverse(double y) const {
  if (y < values_.front()) throw std::domain_error("inverse: below boundary floor");
  if (y > values_.back()) throw std::domain_error("inverse: above boundary range");
  // Smallest x with g(x) >= y; flat segments resolve to their left edge.
  const auto it = std::lower_bound(values_.begin(), values_.end(), y);
  const std::size_t i = static_cast<std::size_t>(it - values_.begin());
  if (i == 0) return knots_.front();
  if (values_[i] == y) return knots_[i];
  const double t = (y - values_[i - 1]) / (values_[i] - values_[i - 1]);
  return knots_[i - 1] + t * (knots_[i] - knots_[i - 1]);
}

GridBoundary init_exponential(const ModelParams& params, const ProfitModel& profit,
                              double zeta, const GridSpec& grid) {
  if (!(params.lambda > 0.0))
    throw std::invalid_argument("init_exponential: lambda must be positive");
  if (!profit.is_power())
    throw std::invalid_argument("init_exponential: power profit required");
  const auto& p = profit.power_spec();
  if (!(zeta > p.theta && zeta < 1.0))
    throw std::invalid_argument("init_exponential: zeta must lie in (theta, 1)");
  const auto roots = characteristic_roots(params);
  const double am = roots.alpha_minus;
  const double P = power_resolvent_scale(params, p);
  const double scale = params.rho * P * p.c / (-am * params.lambda);
  const double offset = (params.rho / params.lambda) *
                        (params.kappa + params.lambda / params.rho);
  auto xs = grid.knots();
  std::vector<double> vs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    const double expo = scale * ((p.theta - am) * std::pow(x, p.theta) +
                                 (zeta - am) * std::pow(x, zeta)) -
                        offset;
    vs[i] = std::min(std::exp(expo), 1.0);
  }
  return GridBoundary(std::move(xs), std::move(vs));
}

GridBoundary init_linear(const ModelParams& params, const ProfitModel& profit,
                         const GridSpec& grid) {
  if (!(params.lambda > 0.0))
    throw std::invalid_argument("init_linear: lambda must be positive");
  if (!profit.is_power())
    throw std::invalid_argument("init_linear: power profit required");
  const auto& p = profit.power_spec();
  const auto roots = characteristic_roots(params);
  const double am = roots.alpha_minus;
  const double y0 = std::exp(-(1.0 + params.kappa * params.rho / params.lambda));
  const double x1 =
      0.5 * std::pow(-am * (params.kappa + params.lambda / params.rho) / (p.theta - am),
                     -p.theta);
  const double slope = (1.0 - y0) / x1;
  auto xs = grid.knots();
  std::vector<double> vs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    vs[i] = std::min(y0 + slope * xs[i], 1.0);
  return GridBoundary(std::move(xs), std::move(vs));
}

ValidationReport validate_initial(const GridBoundary& g0, const ModelParams& params,
                                  const ProfitModel& profit) {
  ValidationReport r;
  const auto roots = characteristic_roots(params);
  const double am = roots.alpha_minus;
  const double lr = params.lambda / params.rho;
  const double y0 = std::exp(-(1.0 + params.kappa * params.rho / params.lambda));
  if (std::abs(g0.floor_value() - y0) > 1e-10)
    r.violations.push_back("(b) g(0) != e^{-(1+kappa rho/lambda)}");
  const auto& xs = g0.knots();
  const auto& vs = g0.values();
  bool strict_ok = true, cover_ok = true;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const bool below_hat = xs[i] <= g0.x_hat();
    if (i > 0 && below_hat && !(vs[i] > vs[i - 1])) strict_ok = false;
    if (i == 0 || !below_hat) continue;
    // (c): -a_-(kappa + (l/r) log g + l/r) + a_- H(x) - H'(x) x >= 0,
    // equivalently g >= g_lambda; checked at knots only.
    const double h = resolvent(profit, params, xs[i]);
    const double hp = resolvent_derivative(profit, params, xs[i]);
    const double cval = -am * (params.kappa + lr * std::log(vs[i]) + lr) + am * h -
                        hp * xs[i];
    if (cval < -1e-9) cover_ok = false;
  }
  if (!strict_ok) r.violations.push_back("(a) not strictly increasing on [0, x_hat]");
  if (!cover_ok) r.violations.push_back("(c) exploration region does not cover the optimal one");
  return r;
}

std::vector<double> isotonic_project(std::vector<double> values) {
  // Pool adjacent violators with block averaging.
  const std::size_t n = values.size();
  std::vector<double> sum(n), weight(n);
  std::vector<std::size_t> len(n);
  std::size_t blocks = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sum[blocks] = values[i];
    weight[blocks] = 1.0;
    len[blocks] = 1;
    ++blocks;
    while (blocks > 1 &&
           sum[blocks - 2] / weight[blocks - 2] > sum[blocks - 1] / weight[blocks - 1]) {
      sum[blocks - 2] += sum[blocks - 1];
      weight[blocks - 2] += weight[blocks - 1];
      len[blocks - 2] += len[blocks - 1];
      --blocks;
    }
  }
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t b = 0; b < blocks; ++b)
    out.insert(out.end(), len[b], sum[b] / weight[b]);
  return out;
}

namespace {

void require_same_grid(const GridBoundary& g, const GridBoundary& h) {
  if (g.knots() != h.knots())
    throw std::invalid_argument("distance: boundaries live on different grids");
}

}  // namespace

double l1_distance(const GridBoundary& g, const GridBoundary& h) {
  require_same_grid(g, h);
  const auto& xs = g.knots();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double d0 = std::abs(g.values()[i] - h.values()[i]);
    const double d1 = std::abs(g.values()[i + 1] - h.values()[i + 1]);
    acc += 0.5 * (d0 + d1) * (xs[i + 1] - xs[i]);
  }
  return acc;
}

double sup_distance(const GridBoundary& g, const GridBoundary& h) {
  require_same_grid(g, h);
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    m = std::max(m, std::abs(g.values()[i] - h.values()[i]));
  return m;
}

void write_boundary_csv(std::ostream& os, const GridBoundary& g) {
  os << "x,g\n" << std::setprecision(17);
  for (std::size_t i = 0; i < g.size(); ++i)
    os << g.knots()[i] << ',' << g.values()[i] << '\n';
}

void write_boundary_csv(const std::string& path, const GridBoundary& g) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_boundary_csv(os, g);
}

GridBoundary read_boundary_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("x,g", 0) != 0)
    throw std::runtime_error("boundary CSV: missing x,g header");
  std::vector<double> xs, vs;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("boundary CSV: malformed row: " + line);
    xs.push_back(std::stod(line.substr(0, comma)));
    vs.push_back(std::stod(line.substr(comma + 1)));
  }
  return GridBoundary(std::move(xs), std::move(vs));
}

GridBoundary read_boundary_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return read_boundary_csv(is);
}

}  // namespace exos
