#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "sc_obstacle/error.hpp"
#include "sc_obstacle/numerics.hpp"

using namespace sc_obstacle;

TEST_CASE("simpson is exact on cubics") {
  const auto f = [](double x) { return 1.0 - 2.0 * x + 3.0 * x * x * x; };
  CHECK(simpson(f, -1.0, 2.0, 2) == doctest::Approx(3.0 - 3.0 + 0.75 * 15.0).epsilon(1e-14));
  CHECK(simpson(f, -1.0, 2.0, 7) == doctest::Approx(simpson(f, -1.0, 2.0, 8)).epsilon(1e-14));
}

TEST_CASE("simpson samples needs an odd count") {
  std::vector<double> v(4, 1.0);
  CHECK_THROWS_AS(simpson_samples(v, 0.1), Error);
  v.push_back(1.0);
  CHECK(simpson_samples(v, 0.25) == doctest::Approx(1.0));
}

TEST_CASE("polar integration handles 1/phi endpoints") {
  const auto f = [](double p) { return std::cos(p) / std::sin(p); };
  const double got = integrate_polar(f, 1e-4, 1.0, 1024);
  CHECK(got == doctest::Approx(std::log(std::sin(1.0) / std::sin(1e-4))).epsilon(1e-10));
  CHECK_THROWS_AS(integrate_polar(f, 0.0, 1.0, 16), Error);
}

TEST_CASE("bisection agrees with toms748") {
  const auto f = [](double x) { return std::cos(x) - x; };
  CHECK(bisect_root(f, 0.0, 1.0) == doctest::Approx(oracle::root(f, 0.0, 1.0)).epsilon(1e-12));
  try {
    bisect_root(f, 2.0, 3.0);
    FAIL("expected RootNotBracketed");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RootNotBracketed);
  }
}

TEST_CASE("fourth-order differences converge at fourth order") {
  const auto err = [](int n) {
    const double h = 1.0 / n;
    std::vector<double> v(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) v[static_cast<std::size_t>(i)] = std::exp(std::sin(3.0 * i * h));
    const auto d = fd_derivative(v, h);
    double e = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double x = i * h;
      e = std::max(e, std::abs(d[static_cast<std::size_t>(i)] - 3.0 * std::cos(3.0 * x) * std::exp(std::sin(3.0 * x))));
    }
    return e;
  };
  const double ratio = err(64) / err(128);
  CHECK(ratio > 12.0);
}

TEST_CASE("table function reproduces smooth data") {
  std::vector<double> x, y;
  for (int i = 0; i <= 64; ++i) {
    x.push_back(oracle::pi * i / 64.0);
    y.push_back(std::sin(x.back()));
  }
  const TableFunction t(x, y);
  CHECK(t(1.234) == doctest::Approx(std::sin(1.234)).epsilon(1e-6));
  CHECK(t.prime(1.234) == doctest::Approx(std::cos(1.234)).epsilon(1e-4));
  CHECK_THROWS_AS(TableFunction({0.0, 1.0, 1.0, 2.0}, {0, 0, 0, 0}), Error);
}
