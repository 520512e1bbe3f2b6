#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace sc_obstacle {

using ScalarFn = std::function<double(double)>;

// Composite Simpson on [lo, hi] with `intervals` (rounded up to even) panels.
double simpson(const ScalarFn& f, double lo, double hi, int intervals);

// Composite Simpson over uniformly spaced samples (odd count).
double simpson_samples(std::span<const double> values, double h);

// Integral over [lo, hi] ⊂ (0, π) in the variable s = ln tan(φ/2), where
// dφ = sin φ ds. Integrands behaving like 1/φ near a pole stay bounded.
double integrate_polar(const ScalarFn& f, double lo, double hi, int intervals);

// Bisection for a sign change of f on [lo, hi] down to |hi - lo| <= tol.
// Throws RootNotBracketed when f(lo) and f(hi) share a sign.
double bisect_root(const ScalarFn& f, double lo, double hi, double tol = 1e-12);

// Fourth-order finite-difference derivative of nodal samples on a uniform grid
// (centred inside, one-sided at the two ends on each side).
std::vector<double> fd_derivative(std::span<const double> values, double h);

// Smooth interpolant of a tabulated function on a (possibly non-uniform) grid.
class TableFunction {
 public:
  TableFunction(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  double prime(double x) const;
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  double lo_;
  double hi_;
};

// Linear interpolation of nodal data on a uniform grid starting at 0.
double interp_uniform(std::span<const double> values, double h, double x);

}  // namespace sc_obstacle
