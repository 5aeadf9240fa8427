#include "exos/table.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace exos {

HermiteTable::HermiteTable(std::vector<double> xs, std::vector<double> ys,
                           std::vector<double> slopes)
    : xs_(std::move(xs)), ys_(std::move(ys)), slopes_(std::move(slopes)) {
  if (xs_.size() < 2 || xs_.size() != ys_.size() || xs_.size() != slopes_.size())
    throw std::invalid_argument("HermiteTable: inconsistent array sizes");
  for (std::size_t i = 0; i + 1 < xs_.size(); ++i)
    if (!(xs_[i] < xs_[i + 1]))
      throw std::invalid_argument("HermiteTable: abscissae must be strictly increasing");
}

std::size_t HermiteTable::segment(double x) const {
  if (x <= xs_.front()) return 0;
  if (x >= xs_.back()) return xs_.size() - 2;
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  return static_cast<std::size_t>(it - xs_.begin()) - 1;
}

double HermiteTable::eval(double x) const {
  const std::size_t i = segment(x);
  const double h = xs_[i + 1] - xs_[i];
  const double t = (x - xs_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * ys_[i] + h * h10 * slopes_[i] + h01 * ys_[i + 1] + h * h11 * slopes_[i + 1];
}

double HermiteTable::slope(double x) const {
  const std::size_t i = segment(x);
  const double h = xs_[i + 1] - xs_[i];
  const double t = (x - xs_[i]) / h;
  const double t2 = t * t;
  const double d00 = (6 * t2 - 6 * t) / h;
  const double d10 = 3 * t2 - 4 * t + 1;
  const double d01 = (-6 * t2 + 6 * t) / h;
  const double d11 = 3 * t2 - 2 * t;
  return d00 * ys_[i] + d10 * slopes_[i] + d01 * ys_[i + 1] + d11 * slopes_[i + 1];
}

std::vector<double> graded_grid(double lo, double hi, std::size_t n, double gamma) {
  if (!(hi > lo) || n < 2) throw std::invalid_argument("graded_grid: bad range or size");
  std::vector<double> g(n + 1);
  const double denom = std::expm1(gamma);
  for (std::size_t i = 0; i <= n; ++i) {
    const double s = std::expm1(gamma * static_cast<double>(i) / static_cast<double>(n)) / denom;
    g[i] = lo + (hi - lo) * s;
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

}  // namespace exos
