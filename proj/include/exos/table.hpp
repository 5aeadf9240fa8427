#pragma once

#include <cstddef>
#include <vector>

namespace exos {

/// Cubic Hermite interpolation table with caller-supplied exact slopes.
class HermiteTable {
 public:
  HermiteTable() = default;
  HermiteTable(std::vector<double> xs, std::vector<double> ys, std::vector<double> slopes);

  double eval(double x) const;
  double slope(double x) const;  // derivative of the interpolant

  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  double front_x() const { return xs_.front(); }
  double back_x() const { return xs_.back(); }

 private:
  std::size_t segment(double x) const;
  std::vector<double> xs_, ys_, slopes_;
};

/// y-grid on [lo, hi] with n+1 nodes, geometrically graded toward lo
/// (smallest spacing ~ gamma/(n e^gamma) of the span).
std::vector<double> graded_grid(double lo, double hi, std::size_t n, double gamma = 12.0);

/// Cumulative integral table of f on the given grid: per-interval Simpson,
/// slopes taken from f itself.  Result evaluates int_{grid.front()}^{x} f.
template <typename F>
HermiteTable cumulative_integral_table(const std::vector<double>& grid, F&& f) {
  std::vector<double> ys(grid.size()), slopes(grid.size());
  slopes[0] = f(grid[0]);
  ys[0] = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double a = grid[i - 1], b = grid[i];
    slopes[i] = f(b);
    const double fm = f(0.5 * (a + b));
    ys[i] = ys[i - 1] + (b - a) / 6.0 * (slopes[i - 1] + 4.0 * fm + slopes[i]);
  }
  return HermiteTable(grid, std::move(ys), std::move(slopes));
}

}  // namespace exos
