#pragma once

// Adaptive Gauss-Kronrod quadrature (7/15 pair).
//
// Panels are bisected until the embedded error estimate |K15 - G7| meets a
// local tolerance that halves with each split; raw |K15 - G7| already
// overestimates the Kronrod error, so no further safety factor is applied.
// A depth cap keeps integrable endpoint singularities from recursing
// forever; whatever error remains is accumulated and reported.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>

namespace duet {

namespace detail {

// 15-point Kronrod abscissae (positive half) and weights; the 7-point Gauss
// rule sits on the odd-indexed abscissae
inline constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0,
};
inline constexpr double kWgk[8] = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679, 0.1903505780647854, 0.2044329400752989, 0.2094821410847278,
};
inline constexpr double kWg[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694,
};

template <typename F>
inline double gk15_panel(const F& f, double a, double b, double& err) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(mid);
    double kronrod = kWgk[7] * fc;
    double gauss = kWg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kXgk[i];
        const double fsum = f(mid - dx) + f(mid + dx);
        kronrod += kWgk[i] * fsum;
        if (i % 2 == 1) gauss += kWg[i / 2] * fsum;
    }
    kronrod *= half;
    gauss *= half;
    err = std::fabs(kronrod - gauss);
    return kronrod;
}

template <typename F>
inline double adapt(const F& f, double a, double b, double tol, int depth, double& err_acc) {
    double err = 0.0;
    const double val = gk15_panel(f, a, b, err);
    if (err <= tol || depth <= 0) {
        err_acc += err;
        return val;
    }
    const double mid = 0.5 * (a + b);
    return adapt(f, a, mid, 0.5 * tol, depth - 1, err_acc) +
           adapt(f, mid, b, 0.5 * tol, depth - 1, err_acc);
}

} // namespace detail

struct QuadResult {
    double value = 0.0;
    double error = 0.0; // accumulated panel error estimates
};

template <typename F>
inline QuadResult integrate(const F& f, double a, double b, double abs_tol = 1e-9,
                            int max_depth = 48) {
    if (!(abs_tol > 0.0)) throw std::invalid_argument("integrate: tolerance must be positive");
    if (!(a < b)) throw std::invalid_argument("integrate: need a < b");
    QuadResult r;
    r.value = detail::adapt(f, a, b, abs_tol, max_depth, r.error);
    return r;
}

} // namespace duet
