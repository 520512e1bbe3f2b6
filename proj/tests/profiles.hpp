#pragma once

#include <cmath>

#include "oracles.hpp"
#include "sc_obstacle/fields.hpp"

namespace testprof {

// The reflected canonical profile with its right maximum raised by a narrow
// bump: a₁ < a₃ but I₊(α*) < I₋(α*), so the frozen component sits at +β/2.
inline sc_obstacle::AxiPotential mirrored_potential() {
  return sc_obstacle::AxiPotential(
      "mirror",
      [](double p) {
        const double e = std::exp(-std::pow((p - 2.33) / 0.1, 2));
        return oracle::triple_a(oracle::pi - p) + 0.25 * std::sin(p) * std::sin(p) * e;
      },
      [](double p) {
        const double q = oracle::pi - p;
        const double sq = std::sin(q);
        const double da = 2.0 * std::sin(4.0 * q) + std::sin(2.0 * q) * (0.3 - 0.1 * std::cos(q)) + 0.1 * sq * sq * sq;
        const double e = std::exp(-std::pow((p - 2.33) / 0.1, 2));
        const double sp = std::sin(p);
        return -da + 0.25 * e * (std::sin(2.0 * p) - sp * sp * 2.0 * (p - 2.33) / 0.01);
      });
}

}  // namespace testprof
