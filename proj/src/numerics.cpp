#include "sc_obstacle/numerics.hpp"

#include <algorithm>
#include <boost/math/interpolators/barycentric_rational.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>

#include "sc_obstacle/error.hpp"

namespace sc_obstacle {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonPositiveRho: return "NonPositiveRho";
    case ErrorCode::DegenerateGamma: return "DegenerateGamma";
    case ErrorCode::InvalidMesh: return "InvalidMesh";
    case ErrorCode::ShapeViolation: return "ShapeViolation";
    case ErrorCode::UnboundedRatio: return "UnboundedRatio";
    case ErrorCode::AlphaAtCriticalValue: return "AlphaAtCriticalValue";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::RootNotBracketed: return "RootNotBracketed";
    case ErrorCode::BetaOutOfRange: return "BetaOutOfRange";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::InvalidBounds: return "InvalidBounds";
    case ErrorCode::InsufficientRange: return "InsufficientRange";
    case ErrorCode::CoincidentPoints: return "CoincidentPoints";
    case ErrorCode::PackingFailure: return "PackingFailure";
  }
  return "Unknown";
}

double simpson(const ScalarFn& f, double lo, double hi, int intervals) {
  int m = std::max(intervals, 2);
  if (m % 2 != 0) ++m;
  const double h = (hi - lo) / m;
  double odd = 0.0;
  double even = 0.0;
  for (int i = 1; i < m; ++i) {
    const double v = f(lo + i * h);
    if (i % 2 != 0) {
      odd += v;
    } else {
      even += v;
    }
  }
  return h / 3.0 * (f(lo) + f(hi) + 4.0 * odd + 2.0 * even);
}

double simpson_samples(std::span<const double> values, double h) {
  const std::size_t n = values.size();
  if (n < 3 || n % 2 == 0) {
    throw Error(ErrorCode::DimensionMismatch, "Simpson needs an odd number (>= 3) of samples");
  }
  double odd = 0.0;
  double even = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (i % 2 != 0) {
      odd += values[i];
    } else {
      even += values[i];
    }
  }
  return h / 3.0 * (values.front() + values.back() + 4.0 * odd + 2.0 * even);
}

double integrate_polar(const ScalarFn& f, double lo, double hi, int intervals) {
  if (!(lo > 0.0 && hi < std::numbers::pi && lo <= hi)) {
    throw Error(ErrorCode::InvalidInput, "polar integration needs 0 < lo <= hi < pi");
  }
  if (lo == hi) return 0.0;
  const double s_lo = std::log(std::tan(0.5 * lo));
  const double s_hi = std::log(std::tan(0.5 * hi));
  const auto g = [&f](double s) {
    const double phi = 2.0 * std::atan(std::exp(s));
    return f(phi) * std::sin(phi);
  };
  return simpson(g, s_lo, s_hi, intervals);
}

double bisect_root(const ScalarFn& f, double lo, double hi, double tol) {
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw Error(ErrorCode::RootNotBracketed,
                "f(" + std::to_string(lo) + ")=" + std::to_string(f_lo) + " and f(" +
                    std::to_string(hi) + ")=" + std::to_string(f_hi) + " share a sign");
  }
  boost::uintmax_t max_iter = 200;
  const auto done = [tol](double a, double b) { return std::abs(b - a) <= tol; };
  const auto [a, b] = boost::math::tools::bisect(f, lo, hi, done, max_iter);
  return 0.5 * (a + b);
}

std::vector<double> fd_derivative(std::span<const double> v, double h) {
  const std::size_t n = v.size();
  if (n < 5) throw Error(ErrorCode::DimensionMismatch, "fourth-order differences need >= 5 samples");
  std::vector<double> d(n);
  for (std::size_t i = 2; i + 2 < n; ++i) {
    d[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h);
  }
  const auto fwd0 = [&](std::size_t i) {
    return (-25.0 * v[i] + 48.0 * v[i + 1] - 36.0 * v[i + 2] + 16.0 * v[i + 3] - 3.0 * v[i + 4]) /
           (12.0 * h);
  };
  const auto fwd1 = [&](std::size_t i) {
    return (-3.0 * v[i - 1] - 10.0 * v[i] + 18.0 * v[i + 1] - 6.0 * v[i + 2] + v[i + 3]) / (12.0 * h);
  };
  const auto bwd0 = [&](std::size_t i) {
    return (25.0 * v[i] - 48.0 * v[i - 1] + 36.0 * v[i - 2] - 16.0 * v[i - 3] + 3.0 * v[i - 4]) /
           (12.0 * h);
  };
  const auto bwd1 = [&](std::size_t i) {
    return (3.0 * v[i + 1] + 10.0 * v[i] - 18.0 * v[i - 1] + 6.0 * v[i - 2] - v[i - 3]) / (12.0 * h);
  };
  d[0] = fwd0(0);
  d[1] = fwd1(1);
  d[n - 1] = bwd0(n - 1);
  d[n - 2] = bwd1(n - 2);
  return d;
}

struct TableFunction::Impl {
  boost::math::barycentric_rational<double> interp;
};

TableFunction::TableFunction(std::vector<double> x, std::vector<double> y) {
  if (x.size() != y.size() || x.size() < 4) {
    throw Error(ErrorCode::DimensionMismatch, "table needs >= 4 (x, y) pairs of equal length");
  }
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw Error(ErrorCode::InvalidInput, "table abscissae must increase strictly");
  }
  lo_ = x.front();
  hi_ = x.back();
  impl_ = std::make_shared<const Impl>(
      Impl{boost::math::barycentric_rational<double>(std::move(x), std::move(y), 3)});
}

double TableFunction::operator()(double x) const { return impl_->interp(std::clamp(x, lo_, hi_)); }

double TableFunction::prime(double x) const { return impl_->interp.prime(std::clamp(x, lo_, hi_)); }

double interp_uniform(std::span<const double> values, double h, double x) {
  const double t = x / h;
  if (t <= 0.0) return values.front();
  const auto last = static_cast<double>(values.size() - 1);
  if (t >= last) return values.back();
  const auto i = static_cast<std::size_t>(t);
  const double f = t - static_cast<double>(i);
  return values[i] + f * (values[i + 1] - values[i]);
}

}  // namespace sc_obstacle
