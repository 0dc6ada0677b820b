// Oracles for the closed-form link analysis.  Digamma and the frozen
// coverage / ergodic values below were computed with an independent
// high-precision library (mpmath, 30 digits); the rational coverage values
// were additionally reduced by hand from the Gamma-mixture integral.  Jet
// arithmetic is checked against analytic derivatives and against m-fold
// central differences with two Richardson levels.

#include <catch2/catch_amalgamated.hpp>

#include <duet/analysis.hpp>
#include <duet/rng.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

using namespace duet;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double binom_real(double alpha, int m) {
    double b = 1.0;
    for (int i = 0; i < m; ++i) b *= (alpha - static_cast<double>(i)) / (i + 1.0);
    return b;
}

// m-th derivative via m-fold central differences, two Richardson levels
// (leading error O(h^6)); good to ~1e-7 relative for the smooth factors
// used below
template <typename F>
double fd_derivative(const F& f, double s, int m) {
    const auto cdiff = [&](double h) {
        double acc = 0.0;
        for (int i = 0; i <= m; ++i) {
            const double sign = (i % 2 == 0) ? 1.0 : -1.0;
            acc += sign * binom_real(static_cast<double>(m), i) *
                   f(s + (0.5 * m - static_cast<double>(i)) * h);
        }
        return acc / std::pow(h, m);
    };
    const auto rich = [&](double h) { return (4.0 * cdiff(0.5 * h) - cdiff(h)) / 3.0; };
    const double h0 = 0.05;
    return (16.0 * rich(0.5 * h0) - rich(h0)) / 15.0;
}

double factorial(int m) {
    double f = 1.0;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
}

} // namespace

TEST_CASE("digamma matches reference values", "[analysis]") {
    CHECK(digamma(1.0) == Catch::Approx(-0.57721566490153286).epsilon(1e-14));
    CHECK(digamma(2.0) == Catch::Approx(0.42278433509846714).epsilon(1e-14));
    CHECK(digamma(0.5) == Catch::Approx(-1.9635100260214235).epsilon(1e-14));
    CHECK(digamma(10.0) == Catch::Approx(2.2517525890667211).epsilon(1e-14));
    CHECK(digamma(100.0) == Catch::Approx(4.6001618527380874).epsilon(1e-14));
    // recurrence region: psi(5) = H_4 - gamma
    const double h4 = 1.0 + 0.5 + 1.0 / 3.0 + 0.25;
    CHECK(digamma(5.0) == Catch::Approx(h4 - 0.57721566490153286).epsilon(1e-14));
    CHECK_THROWS_AS(digamma(0.0), std::invalid_argument);
    CHECK_THROWS_AS(digamma(-1.5), std::invalid_argument);
}

TEST_CASE("jet product truncates the Cauchy product", "[analysis]") {
    Jet a(2);
    a.c = {1.0, 2.0, 1.0}; // 1 + 2s + s^2
    Jet b(2);
    b.c = {1.0, -1.0, 0.0}; // 1 - s
    const Jet p = a * b;
    CHECK(p.c[0] == 1.0);
    CHECK(p.c[1] == 1.0);
    CHECK(p.c[2] == -1.0); // s^3 term dropped

    Jet wrong(3);
    CHECK_THROWS_AS(a + wrong, std::invalid_argument);
    CHECK_THROWS_AS(a * wrong, std::invalid_argument);
}

TEST_CASE("jet_pow matches the binomial series on a linear base", "[analysis]") {
    const double alpha = 2.5;
    const double aa = 0.3;
    const double s0 = 0.7;
    const std::size_t order = 6;
    Jet lin(order);
    lin.c[0] = 1.0 + aa * s0;
    lin.c[1] = aa;
    const Jet w = jet_pow(lin, alpha);
    const double u0 = 1.0 + aa * s0;
    for (std::size_t m = 0; m <= order; ++m) {
        const double expect =
            std::pow(u0, alpha) * binom_real(alpha, static_cast<int>(m)) * std::pow(aa / u0, static_cast<double>(m));
        CHECK(w.c[m] == Catch::Approx(expect).epsilon(1e-12).margin(1e-15));
    }
}

TEST_CASE("jet_pow matches analytic derivatives of an attenuation factor", "[analysis]") {
    // (1 + a s)^-K expanded at s0: coefficient m is u0^-K binom(-K,m) (a/u0)^m
    const double k = 3.0;
    const double aa = 0.3;
    const double s0 = 0.7;
    const std::size_t order = 5;
    Jet lin(order);
    lin.c[0] = 1.0 + aa * s0;
    lin.c[1] = aa;
    const Jet w = jet_pow(lin, -k);
    const double u0 = lin.c[0];
    for (std::size_t m = 0; m <= order; ++m) {
        const double expect =
            std::pow(u0, -k) * binom_real(-k, static_cast<int>(m)) * std::pow(aa / u0, static_cast<double>(m));
        CHECK(w.c[m] == Catch::Approx(expect).epsilon(1e-12));
    }
    Jet zero_base(3);
    CHECK_THROWS_AS(jet_pow(zero_base, 2.0), std::invalid_argument);
    Jet neg_base(3);
    neg_base.c[0] = -1.0;
    CHECK_THROWS_AS(jet_pow(neg_base, 2.0), std::invalid_argument);
}

TEST_CASE("jet_exp matches the exponential series", "[analysis]") {
    // exp(-2s) at s0 = 0.5: coefficient m is e^-1 (-2)^m / m!
    const std::size_t order = 6;
    Jet lin(order);
    lin.c[0] = -2.0 * 0.5;
    lin.c[1] = -2.0;
    const Jet e = jet_exp(lin);
    for (std::size_t m = 0; m <= order; ++m) {
        const double expect =
            std::exp(-1.0) * std::pow(-2.0, static_cast<double>(m)) / factorial(static_cast<int>(m));
        CHECK(e.c[m] == Catch::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("jet product of transform factors matches finite differences", "[analysis]") {
    // L(s) = (1+0.4s)^-2 (1+0.07s)^-2 e^{-0.3s}, derivatives at s = 1
    const std::size_t order = 5;
    const double s0 = 1.0;
    const Jet sv = Jet::variable(order, s0);
    const Jet lap = jet_pow(Jet::constant(order, 1.0) + 0.4 * sv, -2.0) *
                    jet_pow(Jet::constant(order, 1.0) + 0.07 * sv, -2.0) *
                    jet_exp(-0.3 * sv);
    const auto f = [](double s) {
        return std::pow(1.0 + 0.4 * s, -2.0) * std::pow(1.0 + 0.07 * s, -2.0) *
               std::exp(-0.3 * s);
    };
    for (int m = 0; m <= static_cast<int>(order); ++m) {
        const double expect = fd_derivative(f, s0, m);
        CHECK(lap.c[m] * factorial(m) == Catch::Approx(expect).epsilon(1e-5));
    }
}

TEST_CASE("gauss kronrod integrates polynomials in one panel", "[analysis]") {
    int calls = 0;
    const auto f = [&](double x) {
        ++calls;
        double p = 1.0;
        for (int i = 0; i < 10; ++i) p *= x;
        return p;
    };
    const auto res = integrate(f, 0.0, 2.0);
    CHECK(res.value == Catch::Approx(2048.0 / 11.0).epsilon(1e-13));
    CHECK(calls == 15); // both embedded rules are exact, no subdivision
    CHECK(res.error < 1e-9);
}

TEST_CASE("gauss kronrod integrates sin to machine accuracy", "[analysis]") {
    const auto res = integrate([](double x) { return std::sin(x); }, 0.0,
                               3.14159265358979323846, 1e-12);
    CHECK(res.value == Catch::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("gauss kronrod digs into an integrable endpoint singularity", "[analysis]") {
    const auto res = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
    CHECK(std::abs(res.value - 2.0) < 1e-5);
    CHECK(res.error < 1e-4);
}

TEST_CASE("integrate validates its arguments", "[analysis]") {
    const auto f = [](double) { return 1.0; };
    CHECK_THROWS_AS(integrate(f, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(integrate(f, 0.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(integrate(f, 0.0, 1.0, -1e-9), std::invalid_argument);
}

TEST_CASE("rate coverage matches hand-reduced rational values", "[analysis]") {
    // single interferer at ratio 2, beta 4, gamma 1 bit (s = 1), no noise:
    // L(s) = (1 + s/16)^-1, successive coefficient sums give 16/17, 288/289,
    // 4912/4913 for N = 2, 3, 4 with K = 1
    CHECK(rate_coverage_exact(1.0, {2.0}, 4.0, 2, 1) ==
          Catch::Approx(16.0 / 17.0).epsilon(1e-13));
    CHECK(rate_coverage_exact(1.0, {2.0}, 4.0, 3, 1) ==
          Catch::Approx(288.0 / 289.0).epsilon(1e-13));
    CHECK(rate_coverage_exact(1.0, {2.0}, 4.0, 4, 1) ==
          Catch::Approx(4912.0 / 4913.0).epsilon(1e-13));
}

TEST_CASE("rate coverage is one at zero threshold and stays in range", "[analysis]") {
    CHECK(rate_coverage_exact(0.0, {1.5, 2.0}, 4.0, 6, 2) == 1.0);
    const double p = rate_coverage_exact(20.0, {1.01}, 4.0, 6, 1);
    CHECK(p >= 0.0);
    CHECK(p <= 1e-3);
}

TEST_CASE("rate coverage decreases with threshold, interference, and noise", "[analysis]") {
    const std::vector<double> ratios = {1.3, 1.8, 2.2};
    double prev = 1.0;
    for (double g = 0.25; g <= 3.01; g += 0.25) {
        const double p = rate_coverage_exact(g, ratios, 4.0, 6, 2, 100.0);
        CHECK(p < prev);
        prev = p;
    }
    CHECK(rate_coverage_exact(1.0, {1.5, 2.5}, 4.0, 4, 1) <
          rate_coverage_exact(1.0, {1.5}, 4.0, 4, 1));
    CHECK(rate_coverage_exact(1.0, {1.5}, 4.0, 4, 1, 10.0) <
          rate_coverage_exact(1.0, {1.5}, 4.0, 4, 1));
}

TEST_CASE("dominant interferer approximation collapses correctly", "[analysis]") {
    // with a single interferer the approximation is the exact expression
    CHECK(rate_coverage_approx(1.2, {1.7}, 4.0, 4, 1) ==
          Catch::Approx(rate_coverage_exact(1.2, {1.7}, 4.0, 4, 1)).epsilon(1e-14));
    CHECK(rate_coverage_approx(1.2, {1.7}, 4.0, 4, 1, 30.0) ==
          Catch::Approx(rate_coverage_exact(1.2, {1.7}, 4.0, 4, 1, 30.0)).epsilon(1e-14));

    // exp(-Ksa) <= (1+sa)^-K, so collapsing the far interferers can only
    // lower the zeroth-order coverage
    const std::vector<double> near_far = {1.2, 1.9, 3.0};
    CHECK(rate_coverage_approx(1.0, near_far, 4.0, 4, 2) <=
          rate_coverage_exact(1.0, near_far, 4.0, 4, 2) + 1e-15);

    // remote secondary interferers: approximation is nearly exact
    const std::vector<double> remote = {1.2, 8.0, 9.0};
    CHECK(std::abs(rate_coverage_approx(1.0, remote, 4.0, 5, 1) -
                   rate_coverage_exact(1.0, remote, 4.0, 5, 1)) < 1e-4);
}

TEST_CASE("rate coverage agrees with gain-model monte carlo", "[analysis]") {
    const int trials = 200000;

    SECTION("three interferers, K = 1, interference limited") {
        const std::vector<double> ratios = {1.2, 1.5, 2.0};
        const double beta = 4.0;
        std::vector<double> atts;
        for (double r : ratios) atts.push_back(std::pow(r, -beta));
        for (double g : {0.5, 1.5}) {
            rng::Stream st(20260819, "coverage_mc", static_cast<std::uint64_t>(g * 10));
            const double s = std::exp2(g) - 1.0;
            int hits = 0;
            for (int t = 0; t < trials; ++t) {
                const double g0 = st.gamma_int(3); // N - 2K + 1 = 3
                double interf = 0.0;
                for (double a : atts) interf += a * st.exponential();
                if (g0 > s * interf) ++hits;
            }
            const double mc = static_cast<double>(hits) / trials;
            const double exact = rate_coverage_exact(g, ratios, beta, 4, 1);
            const double sigma = std::sqrt(exact * (1.0 - exact) / trials);
            CHECK(std::abs(mc - exact) < 4.0 * sigma + 1e-9);
        }
    }

    SECTION("two interferers, K = 2, with noise") {
        const std::vector<double> ratios = {1.4, 2.0};
        const double beta = 4.0;
        const double snr = 50.0;
        const double d0 = 1.3;
        const double c = std::pow(d0, beta) * 2.0 / snr;
        const double g = 0.8;
        const double s = std::exp2(g) - 1.0;
        rng::Stream st(20260819, "coverage_mc_k2");
        int hits = 0;
        for (int t = 0; t < trials; ++t) {
            const double g0 = st.gamma_int(2); // N - 2K + 1 = 2
            double interf = c;
            for (double r : ratios) interf += std::pow(r, -beta) * st.gamma_int(2);
            if (g0 > s * interf) ++hits;
        }
        const double mc = static_cast<double>(hits) / trials;
        const double exact = rate_coverage_exact(g, ratios, beta, 5, 2, snr, d0);
        const double sigma = std::sqrt(exact * (1.0 - exact) / trials);
        CHECK(std::abs(mc - exact) < 4.0 * sigma + 1e-9);
    }
}

TEST_CASE("rate coverage validates parameters", "[analysis]") {
    CHECK_THROWS_AS(rate_coverage_exact(1.0, {1.5}, 2.0, 4, 1), std::invalid_argument);
    CHECK_THROWS_AS(rate_coverage_exact(1.0, {1.5}, 4.0, 3, 2), std::invalid_argument);
    CHECK_THROWS_AS(rate_coverage_exact(-0.5, {1.5}, 4.0, 4, 1), std::invalid_argument);
    CHECK_THROWS_AS(rate_coverage_exact(1.0, {-1.5}, 4.0, 4, 1), std::invalid_argument);
    CHECK_THROWS_AS(rate_coverage_exact(1.0, {1.5}, 4.0, 4, 1, -3.0), std::invalid_argument);
    CHECK_THROWS_AS(rate_coverage_approx(1.0, {1.5}, 4.0, 3, 2), std::invalid_argument);
}

TEST_CASE("ergodic spectral efficiency matches independent integration", "[analysis]") {
    // no interferers, N = 2, K = 1, SNR = 1: integral is e E1(1), so the
    // spectral efficiency is log2(e) * 0.59634736232319407
    CHECK(ergodic_se_exact(1.0, {}, 4.0, 2, 1, 1.0) ==
          Catch::Approx(0.86034738227088595).margin(1e-9));
    // one interferer at ratio 2, interference limited
    CHECK(ergodic_se_exact(1.0, {2.0}, 4.0, 3, 1, kInf) ==
          Catch::Approx(5.5210969325037832).margin(1e-8));
    // same link with SNR = 10
    CHECK(ergodic_se_exact(1.0, {2.0}, 4.0, 3, 1, 10.0) ==
          Catch::Approx(3.5084496903439242).margin(1e-8));
    // the resource split enters only as the 1/L pre-log
    CHECK(ergodic_se_exact(1.0, {2.0}, 4.0, 3, 1, kInf, 4) ==
          Catch::Approx(5.5210969325037832 / 4.0).epsilon(1e-12));
}

TEST_CASE("ergodic lower bound sits below the exact value", "[analysis]") {
    // frozen: K = 1, one interferer at the serving distance, no noise
    CHECK(ergodic_se_lower(1.0, {1.0}, 4.0, 3, 1, kInf) ==
          Catch::Approx(1.3369717814329559).epsilon(1e-12));

    const std::vector<std::pair<int, int>> nk = {{3, 1}, {4, 2}, {8, 3}, {6, 1}};
    rng::Stream st(77, "lower_bound_draws");
    for (int rep = 0; rep < 10; ++rep) {
        const auto [n, k] = nk[rep % nk.size()];
        std::vector<double> ratios(1 + st.below(5));
        for (auto& r : ratios) r = st.uniform(1.0, 3.0);
        const double snr = (rep % 3 == 0) ? kInf : ((rep % 3 == 1) ? 10.0 : 1e6);
        const double lo = ergodic_se_lower(1.0, ratios, 4.0, n, k, snr);
        const double ex = ergodic_se_exact(1.0, ratios, 4.0, n, k, snr);
        CHECK(lo <= ex + 1e-9);
    }
}

TEST_CASE("spatially averaged lower bound matches its closed form", "[analysis]") {
    CHECK(ergodic_se_ppp_lower(4.0, 3, 1, 4) ==
          Catch::Approx(0.42944598946076493).epsilon(1e-12));
    CHECK(ergodic_se_ppp_lower(4.0, 3, 1, 1) ==
          Catch::Approx(4.0 * 0.42944598946076493).epsilon(1e-12));
}

TEST_CASE("ergodic expressions validate parameters", "[analysis]") {
    CHECK_THROWS_AS(ergodic_se_exact(1.0, {}, 4.0, 2, 1, kInf), std::invalid_argument);
    CHECK_THROWS_AS(ergodic_se_lower(1.0, {}, 4.0, 2, 1, kInf), std::invalid_argument);
    CHECK_THROWS_AS(ergodic_se_exact(1.0, {1.5}, 4.0, 3, 1, kInf, 0), std::invalid_argument);
    CHECK_THROWS_AS(ergodic_se_lower(1.0, {1.5}, 1.9, 3, 1, kInf), std::invalid_argument);
    CHECK_THROWS_AS(ergodic_se_ppp_lower(2.0, 3, 1), std::invalid_argument);
    CHECK_THROWS_AS(ergodic_se_ppp_lower(4.0, 1, 1), std::invalid_argument);
}
