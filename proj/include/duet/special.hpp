#pragma once

// Digamma via upward recurrence into the asymptotic regime.  The Bernoulli
// tail at x >= 10 is below 5e-17, comfortably past the 1e-12 the analysis
// layer needs.

#include <cmath>
#include <stdexcept>

namespace duet {

inline double digamma(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("digamma: argument must be positive");
    double acc = 0.0;
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    double series = std::log(x) - 0.5 * inv;
    double p = inv2;
    series -= p / 12.0;
    p *= inv2;
    series += p / 120.0;
    p *= inv2;
    series -= p / 252.0;
    p *= inv2;
    series += p / 240.0;
    p *= inv2;
    series -= p / 132.0;
    p *= inv2;
    series += p * (691.0 / 32760.0);
    p *= inv2;
    series -= p / 12.0;
    return acc + series;
}

} // namespace duet
