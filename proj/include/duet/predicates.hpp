#pragma once

// Robust orientation / in-circle predicates.
//
// Fast path evaluates in double with a Shewchuk-style static error bound;
// when the bound cannot certify the sign the determinant is recomputed in
// exact rational arithmetic (doubles are dyadic rationals, so the fallback
// is exact, not merely more precise).
//
// Cocircular degeneracies are resolved by symbolic perturbation: vertex i is
// lowered on the lifting paraboloid by eps^(i+1), so the lowest-index vertex
// dominates ties.  For four distinct cocircular points the first-order term
// never vanishes, hence incircle_sos is total on valid inputs.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "point.hpp"

namespace duet::geo {

using bigrat = boost::multiprecision::cpp_rational;

namespace detail {

inline constexpr double mach_eps_half = 1.1102230246251565e-16;            // 2^-53
inline constexpr double ccw_errbound = (3.0 + 16.0 * mach_eps_half) * mach_eps_half;
inline constexpr double icc_errbound = (10.0 + 96.0 * mach_eps_half) * mach_eps_half;

inline int sign_of(const bigrat& v) {
    if (v > 0) return 1;
    if (v < 0) return -1;
    return 0;
}

inline int orient2d_exact(Point a, Point b, Point c) {
    const bigrat ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
    return sign_of((bx - ax) * (cy - ay) - (by - ay) * (cx - ax));
}

inline int incircle_exact(Point a, Point b, Point c, Point d) {
    const bigrat adx = bigrat(a.x) - bigrat(d.x), ady = bigrat(a.y) - bigrat(d.y);
    const bigrat bdx = bigrat(b.x) - bigrat(d.x), bdy = bigrat(b.y) - bigrat(d.y);
    const bigrat cdx = bigrat(c.x) - bigrat(d.x), cdy = bigrat(c.y) - bigrat(d.y);
    const bigrat alift = adx * adx + ady * ady;
    const bigrat blift = bdx * bdx + bdy * bdy;
    const bigrat clift = cdx * cdx + cdy * cdy;
    const bigrat det = alift * (bdx * cdy - cdx * bdy)
                     + blift * (cdx * ady - adx * cdy)
                     + clift * (adx * bdy - bdx * ady);
    return sign_of(det);
}

} // namespace detail

// +1 if (a,b,c) counterclockwise, -1 clockwise, 0 collinear
inline int orient2d_sign(Point a, Point b, Point c) {
    const double detleft = (b.x - a.x) * (c.y - a.y);
    const double detright = (b.y - a.y) * (c.x - a.x);
    const double det = detleft - detright;
    double detsum;
    if (detleft > 0.0) {
        if (detright <= 0.0) return 1; // rounding preserves the sign of products and differences
        detsum = detleft + detright;
    } else if (detleft < 0.0) {
        if (detright >= 0.0) return -1;
        detsum = -detleft - detright;
    } else {
        return detright > 0.0 ? -1 : (detright < 0.0 ? 1 : 0);
    }
    const double errbound = detail::ccw_errbound * detsum;
    if (det >= errbound || -det >= errbound) return det > 0.0 ? 1 : -1;
    return detail::orient2d_exact(a, b, c);
}

// +1 if d strictly inside the circumcircle of ccw triangle (a,b,c),
// -1 strictly outside, 0 cocircular
inline int incircle_sign(Point a, Point b, Point c, Point d) {
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;

    const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    const double cdxady = cdx * ady, adxcdy = adx * cdy;
    const double adxbdy = adx * bdy, bdxady = bdx * ady;
    const double alift = adx * adx + ady * ady;
    const double blift = bdx * bdx + bdy * bdy;
    const double clift = cdx * cdx + cdy * cdy;

    const double det = alift * (bdxcdy - cdxbdy)
                     + blift * (cdxady - adxcdy)
                     + clift * (adxbdy - bdxady);
    const double permanent = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * alift
                           + (std::fabs(cdxady) + std::fabs(adxcdy)) * blift
                           + (std::fabs(adxbdy) + std::fabs(bdxady)) * clift;
    const double errbound = detail::icc_errbound * permanent;
    if (det > errbound || -det > errbound) return det > 0 ? 1 : -1;
    return detail::incircle_exact(a, b, c, d);
}

// incircle with symbolic perturbation; ia..id are the global vertex indices.
// Requires (a,b,c) strictly ccw and all four points distinct; never returns 0.
inline int incircle_sos(Point a, int ia, Point b, int ib, Point c, int ic, Point d, int id) {
    const int s = incircle_sign(a, b, c, d);
    if (s != 0) return s;
    // det is linear in each lifted coordinate; lowering vertex p by w
    // contributes -w * C_p with C_a=+orient(b,c,d), C_b=-orient(a,c,d),
    // C_c=+orient(a,b,d), C_d=-orient(a,b,c).  Weights eps^(i+1) make the
    // smallest index dominant.
    const int mn = std::min(std::min(ia, ib), std::min(ic, id));
    int result;
    if (mn == ia) result = -orient2d_sign(b, c, d);
    else if (mn == ib) result = orient2d_sign(a, c, d);
    else if (mn == ic) result = -orient2d_sign(a, b, d);
    else result = orient2d_sign(a, b, c);
    if (result == 0)
        throw std::logic_error("incircle_sos: degenerate input (duplicate or collinear cocircular points)");
    return result;
}

// For collinear u, v, p: is p strictly inside the open segment (u,v)?
// Coordinate comparisons are exact, so no arithmetic is needed.
inline bool strictly_between(Point u, Point v, Point p) {
    if (u.x != v.x) return (u.x < p.x && p.x < v.x) || (v.x < p.x && p.x < u.x);
    return (u.y < p.y && p.y < v.y) || (v.y < p.y && p.y < u.y);
}

} // namespace duet::geo
