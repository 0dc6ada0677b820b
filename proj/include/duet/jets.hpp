#pragma once

// Truncated Taylor arithmetic.
//
// A Jet holds coefficients c[k] = f^(k)(x0)/k! of a function expanded at
// some point, up to a fixed order.  It exists to evaluate high-order
// derivatives of interference Laplace transforms exactly (products of
// (1 + s a)^-K factors and exponentials), so only the operations those
// expressions need are provided.  Recurrences are the classic power-series
// ones; everything is plain double arithmetic and deterministic.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace duet {

struct Jet {
    std::vector<double> c;

    explicit Jet(std::size_t order) : c(order + 1, 0.0) {}

    static Jet constant(std::size_t order, double v) {
        Jet j(order);
        j.c[0] = v;
        return j;
    }
    // the expansion variable itself: value v, unit first derivative
    static Jet variable(std::size_t order, double v) {
        Jet j(order);
        j.c[0] = v;
        if (order >= 1) j.c[1] = 1.0;
        return j;
    }

    std::size_t order() const { return c.size() - 1; }
};

inline Jet operator+(const Jet& a, const Jet& b) {
    if (a.order() != b.order()) throw std::invalid_argument("jet: order mismatch");
    Jet r(a.order());
    for (std::size_t k = 0; k < r.c.size(); ++k) r.c[k] = a.c[k] + b.c[k];
    return r;
}

inline Jet operator*(const Jet& a, const Jet& b) {
    if (a.order() != b.order()) throw std::invalid_argument("jet: order mismatch");
    Jet r(a.order());
    for (std::size_t k = 0; k < r.c.size(); ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j <= k; ++j) s += a.c[j] * b.c[k - j];
        r.c[k] = s;
    }
    return r;
}

inline Jet operator*(double s, const Jet& a) {
    Jet r = a;
    for (auto& x : r.c) x *= s;
    return r;
}

// w = u^alpha for real alpha, requires u(x0) > 0
inline Jet jet_pow(const Jet& u, double alpha) {
    if (u.c[0] <= 0.0) throw std::invalid_argument("jet_pow: base value must be positive");
    Jet w(u.order());
    w.c[0] = std::pow(u.c[0], alpha);
    for (std::size_t k = 1; k < w.c.size(); ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j <= k; ++j)
            s += ((alpha + 1.0) * static_cast<double>(j) - static_cast<double>(k)) *
                 u.c[j] * w.c[k - j];
        w.c[k] = s / (static_cast<double>(k) * u.c[0]);
    }
    return w;
}

inline Jet jet_exp(const Jet& u) {
    Jet e(u.order());
    e.c[0] = std::exp(u.c[0]);
    for (std::size_t k = 1; k < e.c.size(); ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j <= k; ++j)
            s += static_cast<double>(j) * u.c[j] * e.c[k - j];
        e.c[k] = s / static_cast<double>(k);
    }
    return e;
}

} // namespace duet
