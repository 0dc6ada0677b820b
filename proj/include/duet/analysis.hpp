#pragma once

// Closed-form performance expressions for one coordinated link.
//
// The model: desired effective gain Gamma(N-2K+1, 1), each of J interfering
// BSs contributes Gamma(K, 1) scaled by (d_j/d0)^-beta, noise enters as
// d0^beta * K / SNR.  Rate coverage P[log2(1+SINR) > gamma] comes from the
// Gamma CDF expansion: with s = 2^gamma - 1 and L_I the interference
// Laplace transform,
//
//   P = sum_{m=0}^{N-2K} (s^m / m!) (-1)^m d^m/ds^m [ e^{-s c} L_I(s) ]
//
// where c is the noise term (zero in the interference-limited regime).
// Derivatives are evaluated with Jet arithmetic, so every order is exact.
// The dominant-interferer approximation keeps the nearest interferer's
// factor and collapses the rest into an exponential.
//
// Ergodic spectral efficiency integrates over the gain distributions:
//
//   SE = (log2 e / L) * int_0^inf e^{-z c} / z * prod_j (1 + z r_j^-beta)^-K
//        * (1 - (1+z)^-(N-2K+1)) dz
//
// computed on (0,1) via z = t/(1-t) with adaptive Gauss-Kronrod.  The
// closed-form lower bound replaces the gains by their logarithmic means
// (digamma), and the spatially averaged variant integrates the interferer
// field expectation, leaving a distance-free expression.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "channel.hpp"
#include "jets.hpp"
#include "quadrature.hpp"
#include "special.hpp"

namespace duet {

namespace detail {

inline void check_link_params(const std::vector<double>& ratios, double beta, int n, int k) {
    if (k < 1) throw std::invalid_argument("analysis: K must be at least 1");
    if (n < 2 * k) throw std::invalid_argument("analysis: need N >= 2K");
    if (beta <= 2.0) throw std::invalid_argument("analysis: beta must exceed 2");
    for (const double r : ratios)
        if (!(r > 0.0)) throw std::invalid_argument("analysis: ratios must be positive");
}

// sum_{m=0}^{order} s^m (-1)^m c_m with c_m the Taylor coefficients of the
// denominator Laplace transform at s
inline double coverage_from_jet(const Jet& lap, double s) {
    double p = 0.0;
    double sm = 1.0;
    for (std::size_t m = 0; m < lap.c.size(); ++m) {
        p += sm * (m % 2 == 0 ? 1.0 : -1.0) * lap.c[m];
        sm *= s;
    }
    return std::clamp(p, 0.0, 1.0);
}

} // namespace detail

// exact rate coverage; snr may be infinite for the interference-limited case
inline double rate_coverage_exact(double gamma_bits, const std::vector<double>& ratios,
                                  double beta, int n, int k,
                                  double snr = std::numeric_limits<double>::infinity(),
                                  double d0 = 1.0) {
    detail::check_link_params(ratios, beta, n, k);
    if (gamma_bits < 0.0) throw std::invalid_argument("rate_coverage: gamma must be >= 0");
    const double s = std::exp2(gamma_bits) - 1.0;
    const std::size_t order = static_cast<std::size_t>(n - 2 * k);
    if (s == 0.0) return 1.0;

    const Jet sv = Jet::variable(order, s);
    Jet lap = Jet::constant(order, 1.0);
    for (const double r : ratios) {
        const double a = std::pow(r, -beta);
        lap = lap * jet_pow(Jet::constant(order, 1.0) + a * sv, -static_cast<double>(k));
    }
    const double c = noise_term(d0, beta, k, snr);
    if (c > 0.0) lap = lap * jet_exp(-c * sv);
    return detail::coverage_from_jet(lap, s);
}

// dominant-interferer approximation: nearest interferer kept exactly, the
// rest collapsed into an exponential
inline double rate_coverage_approx(double gamma_bits, const std::vector<double>& ratios,
                                   double beta, int n, int k,
                                   double snr = std::numeric_limits<double>::infinity(),
                                   double d0 = 1.0) {
    detail::check_link_params(ratios, beta, n, k);
    if (gamma_bits < 0.0) throw std::invalid_argument("rate_coverage: gamma must be >= 0");
    const double s = std::exp2(gamma_bits) - 1.0;
    const std::size_t order = static_cast<std::size_t>(n - 2 * k);
    if (s == 0.0) return 1.0;

    const Jet sv = Jet::variable(order, s);
    Jet lap = Jet::constant(order, 1.0);
    if (!ratios.empty()) {
        const std::size_t dom =
            std::min_element(ratios.begin(), ratios.end()) - ratios.begin();
        double rest = 0.0;
        for (std::size_t j = 0; j < ratios.size(); ++j)
            if (j != dom) rest += std::pow(ratios[j], -beta);
        const double a = std::pow(ratios[dom], -beta);
        lap = jet_pow(Jet::constant(order, 1.0) + a * sv, -static_cast<double>(k));
        if (rest > 0.0)
            lap = lap * jet_exp((-static_cast<double>(k) * rest) * sv);
    }
    const double c = noise_term(d0, beta, k, snr);
    if (c > 0.0) lap = lap * jet_exp(-c * sv);
    return detail::coverage_from_jet(lap, s);
}

// exact ergodic spectral efficiency in bits/s/Hz, including the 1/L
// resource split
inline double ergodic_se_exact(double d0, const std::vector<double>& ratios, double beta,
                               int n, int k, double snr, int prelog_l = 1,
                               double abs_tol = 1e-9) {
    detail::check_link_params(ratios, beta, n, k);
    if (prelog_l < 1) throw std::invalid_argument("ergodic_se: L must be >= 1");
    const double c = noise_term(d0, beta, k, snr);
    if (ratios.empty() && c == 0.0)
        throw std::invalid_argument("ergodic_se: needs interference or noise");

    const int shape = n - 2 * k + 1;
    std::vector<double> atts;
    atts.reserve(ratios.size());
    for (const double r : ratios) atts.push_back(std::pow(r, -beta));

    const auto g = [&](double z) {
        double v = c > 0.0 ? std::exp(-c * z) : 1.0;
        for (const double a : atts) v *= std::pow(1.0 + a * z, -static_cast<double>(k));
        // (1 - (1+z)^-shape) / z, stable for small z
        const double q = -std::expm1(-static_cast<double>(shape) * std::log1p(z)) / z;
        return v * q;
    };
    const auto integrand = [&](double t) {
        const double omt = 1.0 - t;
        const double z = t / omt;
        return g(z) / (omt * omt);
    };
    const auto res = integrate(integrand, 0.0, 1.0, abs_tol);
    return std::numbers::log2e / static_cast<double>(prelog_l) * res.value;
}

// closed-form lower bound on the ergodic spectral efficiency
inline double ergodic_se_lower(double d0, const std::vector<double>& ratios, double beta,
                               int n, int k, double snr, int prelog_l = 1) {
    detail::check_link_params(ratios, beta, n, k);
    if (prelog_l < 1) throw std::invalid_argument("ergodic_se: L must be >= 1");
    const double c = noise_term(d0, beta, k, snr);
    double denom = c;
    for (const double r : ratios) denom += static_cast<double>(k) * std::pow(r, -beta);
    if (denom <= 0.0)
        throw std::invalid_argument("ergodic_se: needs interference or noise");
    const double num = std::exp(digamma(static_cast<double>(n - 2 * k + 1)));
    return std::log2(1.0 + num / denom) / static_cast<double>(prelog_l);
}

// spatially averaged lower bound: interferers integrated out as a field
// beyond the coordination distance, distance-free result
inline double ergodic_se_ppp_lower(double beta, int n, int k, int prelog_l = 1) {
    detail::check_link_params({}, beta, n, k);
    if (prelog_l < 1) throw std::invalid_argument("ergodic_se: L must be >= 1");
    const double factor = (beta * beta - 4.0) / (8.0 * static_cast<double>(k));
    const double num = std::exp(digamma(static_cast<double>(n - 2 * k + 1)));
    return std::log2(1.0 + factor * num) / static_cast<double>(prelog_l);
}

} // namespace duet
