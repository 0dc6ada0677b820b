#pragma once

// Small-scale fading and zero-forcing beamforming.
//
// Channels are i.i.d. unit-variance circularly symmetric Gaussian vectors.
// A transmit vector v for desired channel h must satisfy h_c^T v = 0 for
// every protected channel h_c, i.e. v is orthogonal to conj(h_c) under the
// Hermitian inner product, so the beamformer is the normalized residual of
// conj(h0) against the span of the conjugated constraints.  With c
// constraints the resulting gain |h0^T v|^2 is Gamma(N - c, 1); a
// coordinated pair protecting its own other K-1 users plus the partner's K
// gives shape N - 2K + 1, a solo BS gives N - K + 1.
//
// Interference from a BS transmitting K unit beams onto an independent
// victim channel sums |h^T v_k|^2 over beams; for orthonormal beams that is
// exactly Gamma(K, 1), which is the model the analytical layer assumes.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rng.hpp"

namespace duet {

using cvec = std::vector<std::complex<double>>;

inline std::complex<double> cdot(const cvec& a, const cvec& b) { // a^H b
    if (a.size() != b.size()) throw std::invalid_argument("cdot: size mismatch");
    std::complex<double> s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline double norm2(const cvec& a) {
    double s = 0.0;
    for (const auto& x : a) s += std::norm(x);
    return s;
}

inline cvec conj_vec(cvec a) {
    for (auto& x : a) x = std::conj(x);
    return a;
}

// h ~ CN(0, I_n): real then imaginary normal per component
inline cvec draw_fading(rng::Stream& rs, int n) {
    if (n < 1) throw std::invalid_argument("draw_fading: need at least one antenna");
    cvec h(n);
    for (auto& x : h) {
        const double re = rs.normal();
        const double im = rs.normal();
        x = std::complex<double>(re, im) * std::sqrt(0.5);
    }
    return h;
}

// modified Gram-Schmidt; throws if the set is numerically rank deficient
inline std::vector<cvec> mgs_orthonormalize(const std::vector<cvec>& vectors,
                                            double rel_eps = 1e-12) {
    std::vector<cvec> basis;
    for (const auto& x : vectors) {
        cvec v = x;
        for (const auto& q : basis) {
            const auto coeff = cdot(q, v);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= coeff * q[i];
        }
        const double rn = std::sqrt(norm2(v));
        if (rn <= rel_eps * std::sqrt(norm2(x)))
            throw std::invalid_argument("mgs_orthonormalize: rank deficient input");
        for (auto& c : v) c /= rn;
        basis.push_back(std::move(v));
    }
    return basis;
}

struct Beamformer {
    cvec v;      // unit norm transmit vector
    double gain; // |h0^T v|^2 = squared residual norm
};

inline Beamformer zf_beamformer(const cvec& desired, const std::vector<cvec>& constraints) {
    const std::size_t n = desired.size();
    if (constraints.size() >= n)
        throw std::invalid_argument("zf_beamformer: too many constraints for antenna count");
    std::vector<cvec> conj_constraints;
    conj_constraints.reserve(constraints.size());
    for (const auto& c : constraints) {
        if (c.size() != n) throw std::invalid_argument("zf_beamformer: size mismatch");
        conj_constraints.push_back(conj_vec(c));
    }
    const auto basis = mgs_orthonormalize(conj_constraints);

    cvec r = conj_vec(desired);
    for (const auto& q : basis) {
        const auto coeff = cdot(q, r);
        for (std::size_t i = 0; i < n; ++i) r[i] -= coeff * q[i];
    }
    const double g = norm2(r);
    if (g <= 0.0) throw std::runtime_error("zf_beamformer: desired channel lies in constraint span");
    const double rn = std::sqrt(g);
    for (auto& c : r) c /= rn;
    return {std::move(r), g};
}

// sum over beams of |h^T v_k|^2
inline double interference_gain(const cvec& h, const std::vector<cvec>& beams) {
    double s = 0.0;
    const cvec hc = conj_vec(h);
    for (const auto& v : beams) s += std::norm(cdot(hc, v));
    return s;
}

// K Haar-distributed orthonormal columns in C^n
inline std::vector<cvec> draw_orthonormal_columns(rng::Stream& rs, int n, int k) {
    if (k < 1 || k > n) throw std::invalid_argument("draw_orthonormal_columns: bad sizes");
    std::vector<cvec> cols;
    cols.reserve(k);
    for (int i = 0; i < k; ++i) cols.push_back(draw_fading(rs, n));
    return mgs_orthonormalize(cols);
}

// desired-channel effective gain through the full ZF pipeline: a pair BS
// protects its own other K-1 users plus the partner's K
inline double sample_pair_gain(rng::Stream& rs, int n, int k) {
    if (n < 2 * k) throw std::invalid_argument("sample_pair_gain: need N >= 2K");
    const cvec h0 = draw_fading(rs, n);
    std::vector<cvec> constraints;
    constraints.reserve(2 * k - 1);
    for (int i = 0; i < 2 * k - 1; ++i) constraints.push_back(draw_fading(rs, n));
    return zf_beamformer(h0, constraints).gain;
}

// solo BS serving K users protects only its own other K-1
inline double sample_solo_gain(rng::Stream& rs, int n, int k) {
    if (n < k) throw std::invalid_argument("sample_solo_gain: need N >= K");
    const cvec h0 = draw_fading(rs, n);
    if (k == 1) return norm2(h0); // MRT
    std::vector<cvec> constraints;
    constraints.reserve(k - 1);
    for (int i = 0; i < k - 1; ++i) constraints.push_back(draw_fading(rs, n));
    return zf_beamformer(h0, constraints).gain;
}

// interference power of one BS at an independent victim under the
// orthonormal-beam model
inline double sample_interference_gain(rng::Stream& rs, int n, int k) {
    const auto beams = draw_orthonormal_columns(rs, n, k);
    const cvec h = draw_fading(rs, n);
    return interference_gain(h, beams);
}

// noise term in the normalized SINR: d0^beta * K / SNR, zero when SNR is
// infinite (interference-limited analysis)
inline double noise_term(double d0, double beta, int k, double snr) {
    if (d0 <= 0.0 || beta <= 2.0 || k < 1) throw std::invalid_argument("noise_term: bad parameters");
    if (std::isinf(snr)) return 0.0;
    if (snr <= 0.0) throw std::invalid_argument("noise_term: SNR must be positive");
    return std::pow(d0, beta) * static_cast<double>(k) / snr;
}

// interferers as (precomputed attenuation (d_j/d0)^-beta, effective gain);
// the fast path for tight Monte-Carlo loops where the geometry is fixed
inline double zf_sinr_attenuated(double desired_gain,
                                 const std::vector<std::pair<double, double>>& interferers,
                                 double noise) {
    double denom = noise;
    for (const auto& [att, gain] : interferers) denom += att * gain;
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    return desired_gain / denom;
}

// interferers as (distance ratio d_j/d0, effective gain)
inline double zf_sinr(double desired_gain,
                      const std::vector<std::pair<double, double>>& interferers,
                      double beta, double noise) {
    double denom = noise;
    for (const auto& [ratio, gain] : interferers) {
        if (ratio <= 0.0) throw std::invalid_argument("zf_sinr: ratios must be positive");
        denom += std::pow(ratio, -beta) * gain;
    }
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    return desired_gain / denom;
}

struct PilotOverhead {
    long eta = 0;      // retransmission factor
    long pilot_len = 0; // symbols spent on pilots
    double alpha = 0.0; // fraction of the frame
};

inline PilotOverhead pilot_overhead(double mmse, double sinr_val, int n_antennas, long frame_len) {
    if (mmse <= 0.0 || mmse > 1.0) throw std::invalid_argument("pilot_overhead: MMSE in (0,1]");
    if (sinr_val <= 0.0) throw std::invalid_argument("pilot_overhead: SINR must be positive");
    if (n_antennas < 1 || frame_len < 1) throw std::invalid_argument("pilot_overhead: bad sizes");
    PilotOverhead out;
    const double raw = (1.0 / sinr_val) * (1.0 / mmse - 1.0);
    out.eta = std::max(1L, static_cast<long>(std::floor(raw)));
    out.pilot_len = 2L * out.eta * n_antennas;
    out.alpha = static_cast<double>(out.pilot_len) / static_cast<double>(frame_len);
    if (out.alpha >= 1.0)
        throw std::runtime_error("pilot_overhead: pilots consume the whole frame");
    return out;
}

} // namespace duet
