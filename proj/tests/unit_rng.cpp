#include <catch2/catch_amalgamated.hpp>

#include <duet/rng.hpp>

#include <cstdint>
#include <vector>

#include "support/stats.hpp"

using duet::rng::Stream;

TEST_CASE("streams replay bit-identically for equal (seed, tag, index)") {
    Stream a(1234, "fading", 7);
    Stream b(1234, "fading", 7);
    for (int i = 0; i < 64; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct tags and indices give distinct streams") {
    Stream a(1234, "fading", 0);
    Stream b(1234, "users", 0);
    Stream c(1234, "fading", 1);
    Stream d(99, "fading", 0);
    const auto x = a.next_u64();
    REQUIRE(x != b.next_u64());
    REQUIRE(x != c.next_u64());
    REQUIRE(x != d.next_u64());
}

TEST_CASE("golden sequence frozen for cross-build reproducibility") {
    // frozen from the reference implementation of xoshiro256++ seeded via
    // splitmix64(seed ^ fnv1a64(tag)); a change here is a breaking change
    // to every recorded experiment
    Stream s(42, "golden");
    const std::uint64_t expect[4] = {
        10268097438123765318ull,
        17745642803205257799ull,
        15397511061540485472ull,
        16214331557633226082ull,
    };
    for (auto e : expect) REQUIRE(s.next_u64() == e);
}

TEST_CASE("uniform moments and range") {
    Stream s(7, "uniform");
    const std::size_t n = 200000;
    std::vector<double> xs(n);
    for (auto& x : xs) {
        x = s.uniform();
        REQUIRE(x >= 0.0);
        REQUIRE(x < 1.0);
    }
    REQUIRE_THAT(teststat::mean(xs), Catch::Matchers::WithinAbs(0.5, 0.004));
    REQUIRE_THAT(teststat::variance(xs), Catch::Matchers::WithinAbs(1.0 / 12.0, 0.002));
}

TEST_CASE("bounded integers are unbiased") {
    Stream s(11, "below");
    const std::uint64_t m = 7;
    const std::size_t n = 350000;
    std::vector<std::size_t> counts(m, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto v = s.below(m);
        REQUIRE(v < m);
        ++counts[v];
    }
    const double stat = teststat::chi2_uniform_stat(counts, n);
    REQUIRE(teststat::chi2_pvalue_even_dof(6, stat) > 0.001);
}

TEST_CASE("exponential sampler passes KS against Exp(1)") {
    Stream s(3, "exp");
    std::vector<double> xs(100000);
    for (auto& x : xs) x = s.exponential();
    const double d = teststat::ks_statistic(xs, [](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-x); });
    REQUIRE(d < teststat::ks_critical(xs.size(), 0.01));
}

TEST_CASE("normal sampler passes KS against N(0,1)") {
    Stream s(5, "normal");
    std::vector<double> xs(100000);
    for (auto& x : xs) x = s.normal();
    const double d = teststat::ks_statistic(xs, teststat::normal_cdf);
    REQUIRE(d < teststat::ks_critical(xs.size(), 0.01));
}

TEST_CASE("integer-shape gamma matches its closed-form CDF") {
    Stream s(9, "gamma");
    std::vector<double> xs(100000);
    for (auto& x : xs) x = s.gamma_int(3);
    const double d = teststat::ks_statistic(xs, [](double x) { return teststat::gamma_cdf_int(3, x); });
    REQUIRE(d < teststat::ks_critical(xs.size(), 0.01));
}

TEST_CASE("poisson sampler has the right first two moments, small and large mean") {
    Stream s(13, "poisson");
    for (const double lambda : {0.7, 4.0, 49.0}) {
        const std::size_t n = 200000;
        std::vector<double> xs(n);
        for (auto& x : xs) x = static_cast<double>(s.poisson(lambda));
        const double se = std::sqrt(lambda / static_cast<double>(n));
        REQUIRE_THAT(teststat::mean(xs), Catch::Matchers::WithinAbs(lambda, 5.0 * se));
        REQUIRE_THAT(teststat::variance(xs) / lambda, Catch::Matchers::WithinAbs(1.0, 0.05));
    }
    REQUIRE(Stream(1, "z").poisson(0.0) == 0);
}
