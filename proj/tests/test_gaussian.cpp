#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "poppersim/errors.hpp"
#include "poppersim/gaussian.hpp"

using namespace poppersim;
using gauss::GaussianMode;
using gauss::Interval;
using gauss::PhysicalParams;
using gauss::PopperState;

TEST_CASE("gaussian amplitude: peak value, translation, normalization") {
    GaussianMode mode{0.0, 1.0};
    // (2 pi)^(-1/4)
    CHECK(gauss::gaussian_amplitude(mode, 0.0) == doctest::Approx(0.6316187777460647).epsilon(1e-12));

    GaussianMode shifted{2.5, 1.0};
    for (double y : {-1.0, 0.0, 0.7, 3.2})
        CHECK(gauss::gaussian_amplitude(shifted, y + 2.5) ==
              doctest::Approx(gauss::gaussian_amplitude(mode, y)).epsilon(1e-14));

    // |psi|^2 integrates to 1 (Simpson, step sigma/50)
    for (double sigma : {0.3, 1.0, 2.7}) {
        GaussianMode m{0.4, sigma};
        const double norm = oracles::simpson_step(
            [&](double y) {
                const double a = gauss::gaussian_amplitude(m, y);
                return a * a;
            },
            0.4 - 12.0 * sigma, 0.4 + 12.0 * sigma, sigma / 50.0);
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-10));
    }

    // |psi|^2 has standard deviation sigma
    GaussianMode m{0.0, 0.8};
    const double var = oracles::simpson_step(
        [&](double y) {
            const double a = gauss::gaussian_amplitude(m, y);
            return y * y * a * a;
        },
        -12.0 * 0.8, 12.0 * 0.8, 0.8 / 50.0);
    CHECK(std::sqrt(var) == doctest::Approx(0.8).epsilon(1e-10));
}

TEST_CASE("spread law: identity at t=0, sqrt(2) at the optimal point") {
    CHECK(gauss::spread_after_time(1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(gauss::spread_after_time(0.37, 0.0) == doctest::Approx(0.37).epsilon(1e-15));
    // sigma = 1, t = 2, hbar = m = 1
    CHECK(gauss::spread_after_time(1.0, 2.0) ==
          doctest::Approx(1.4142135623730951).epsilon(1e-14));
    CHECK_THROWS_AS((void)gauss::spread_after_time(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)gauss::spread_after_time(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)gauss::spread_after_time(1.0, -0.5), std::invalid_argument);
}

TEST_CASE("spread law: monotone growth in t like sqrt(t) asymptotically") {
    double prev = gauss::spread_after_time(0.5, 0.0);
    for (double t : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
        const double cur = gauss::spread_after_time(0.5, t);
        CHECK(cur > prev);
        prev = cur;
    }
    // large-t slope: sigma_bar -> hbar t / (2 m sigma)
    const double t = 1e6;
    CHECK(gauss::spread_after_time(0.5, t) == doctest::Approx(t / (2 * 0.5)).epsilon(1e-6));
}

TEST_CASE("optimal sigma: closed form agrees with direct minimization") {
    CHECK(gauss::optimal_sigma(2.0) == doctest::Approx(1.0).epsilon(1e-14));
    const PhysicalParams p{1.0, 1.0};
    for (double t : {0.5, 1.0, 3.0}) {
        const double expect = std::sqrt(t / 2.0);
        // golden-section oracle over the spread law
        const double found = oracles::golden_min(
            [&](double s) { return gauss::spread_after_time(s, t, p); }, 0.05 * expect,
            20.0 * expect, 1e-12);
        CHECK(gauss::optimal_sigma(t, p) == doctest::Approx(expect).epsilon(1e-13));
        CHECK(found == doctest::Approx(expect).epsilon(1e-8));
        // minimum value is sqrt(2) times the optimal sigma
        CHECK(gauss::spread_after_time(expect, t, p) ==
              doctest::Approx(std::sqrt(2.0) * expect).epsilon(1e-13));
        // strictly worse on both sides
        CHECK(gauss::spread_after_time(0.5 * expect, t, p) > std::sqrt(2.0) * expect);
        CHECK(gauss::spread_after_time(2.0 * expect, t, p) > std::sqrt(2.0) * expect);
    }
    CHECK_THROWS_AS((void)gauss::optimal_sigma(0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)gauss::optimal_sigma(-1.0), std::invalid_argument);
}

TEST_CASE("evolved density: normal with spread width") {
    GaussianMode mode{1.2, 0.7};
    const double t = 1.7;
    const double sb = gauss::spread_after_time(0.7, t);
    // integrates to 1
    const double norm = oracles::simpson_step(
        [&](double y) { return gauss::evolved_gaussian_density(mode, t, y); }, 1.2 - 12 * sb,
        1.2 + 12 * sb, sb / 50.0);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-10));
    // variance equals the spread law squared
    const double var = oracles::simpson_step(
        [&](double y) {
            return (y - 1.2) * (y - 1.2) * gauss::evolved_gaussian_density(mode, t, y);
        },
        1.2 - 12 * sb, 1.2 + 12 * sb, sb / 50.0);
    CHECK(std::sqrt(var) == doctest::Approx(sb).epsilon(1e-9));
    // t = 0 reduces to |amplitude|^2
    for (double y : {0.3, 1.2, 2.0}) {
        const double a = gauss::gaussian_amplitude(mode, y);
        CHECK(gauss::evolved_gaussian_density(mode, 0.0, y) ==
              doctest::Approx(a * a).epsilon(1e-13));
    }
}

TEST_CASE("interval probability: three-sigma mass, half line, full proxy") {
    GaussianMode mode{0.0, 1.0};
    CHECK(gauss::interval_probability(mode, {-3.0, 3.0}) ==
          doctest::Approx(0.9973002039367398).epsilon(1e-12));
    CHECK(gauss::interval_probability(mode, {0.0, 1e9}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(gauss::interval_probability(mode, {-12.0, 12.0}) == doctest::Approx(1.0).epsilon(1e-10));
    // translation covariance
    GaussianMode off{5.0, 2.0};
    CHECK(gauss::interval_probability(off, {5.0 - 6.0, 5.0 + 6.0}) ==
          doctest::Approx(0.9973002039367398).epsilon(1e-12));
    CHECK_THROWS_AS((void)gauss::interval_probability(mode, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)gauss::interval_probability(mode, {2.0, -2.0}), std::invalid_argument);
}

TEST_CASE("three-branch state: construction guards and norm") {
    CHECK_THROWS_AS(PopperState(7.9, 1.0), std::invalid_argument); // alpha below 8 sigma
    CHECK_THROWS_AS(PopperState(8.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(PopperState(-8.0, 1.0), std::invalid_argument);

    PopperState st(8.0, 1.0);
    // norm^2 = 1 + (4 exp(-16) + 2 exp(-64)) / 3
    const double expect_norm = std::sqrt(1.0 + (4.0 * std::exp(-16.0) + 2.0 * std::exp(-64.0)) / 3.0);
    CHECK(st.norm() == doctest::Approx(expect_norm).epsilon(1e-14));
    CHECK(std::abs(st.norm() - 1.0) < 1e-6);

    // 2D quadrature oracle: the amplitude is normalized, so its square
    // integrates to one (norm() reports the raw three-branch sum's norm)
    const double alpha = 8.0, sigma = 1.0;
    const double lim = alpha + 8.0 * sigma;
    const double norm2 = oracles::simpson2d_step(
        [&](double y1, double y2) {
            const double a = gauss::popper_state_amplitude(st, y1, y2);
            return a * a;
        },
        -lim, lim, -lim, lim, sigma / 50.0);
    CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("three-branch state: peak value and exchange symmetry") {
    PopperState st(8.0, 1.0);
    // side-branch peak: (6 pi)^(-1/2) over the norm, plus exp(-32) bleed
    // from the central branch; the origin collects bleed from both sides
    const double base = 1.0 / (std::sqrt(6.0 * 3.141592653589793) * st.norm());
    CHECK(base == doctest::Approx(0.23032943).epsilon(1e-7));
    CHECK(gauss::popper_state_amplitude(st, 8.0, -8.0) ==
          doctest::Approx(base * (1.0 + std::exp(-32.0))).epsilon(1e-13));
    CHECK(gauss::popper_state_amplitude(st, 0.0, 0.0) ==
          doctest::Approx(base * (1.0 + 2.0 * std::exp(-32.0))).epsilon(1e-13));
    for (double y1 : {-8.5, -2.0, 0.0, 1.3, 8.0})
        for (double y2 : {-8.0, -0.4, 2.2, 9.1})
            CHECK(gauss::popper_state_amplitude(st, y1, y2) ==
                  doctest::Approx(gauss::popper_state_amplitude(st, y2, y1)).epsilon(1e-14));
}

TEST_CASE("branch overlap matches the closed form and stays below 1e-3 at 8 sigma") {
    const double sigma = 1.0;
    for (double alpha : {8.0, 10.0}) {
        GaussianMode a{0.0, sigma}, b{alpha, sigma};
        const double overlap = oracles::simpson_step(
            [&](double y) {
                return gauss::gaussian_amplitude(a, y) * gauss::gaussian_amplitude(b, y);
            },
            -12.0 * sigma, alpha + 12.0 * sigma, sigma / 50.0);
        CHECK(overlap ==
              doctest::Approx(std::exp(-alpha * alpha / (8.0 * sigma * sigma))).epsilon(1e-9));
    }
    CHECK(std::exp(-8.0) == doctest::Approx(3.3546262790251185e-4).epsilon(1e-12));
    CHECK(std::exp(-8.0) < 1e-3);
}

TEST_CASE("conditional band probability: coincidence bands anti-correlate") {
    PopperState st(8.0, 1.0);
    const Interval band1{6.0, 10.0};       // around +alpha for particle 1
    const Interval band2{-10.0, -6.0};     // around -alpha for particle 2
    const double got = gauss::conditional_band_probability(st, band1, band2);
    CHECK(got == doctest::Approx(0.95449973).epsilon(1e-6));
    CHECK(got >= 0.95);

    // quadrature oracle for the same ratio
    const double lim = 8.0 + 8.0;
    auto dens = [&](double y1, double y2) {
        const double a = gauss::popper_state_amplitude(st, y1, y2);
        return a * a;
    };
    const double joint = oracles::simpson2d_step(dens, 6.0, 10.0, -10.0, -6.0, 1.0 / 50.0);
    const double marg = oracles::simpson2d_step(dens, 6.0, 10.0, -lim, lim, 1.0 / 50.0);
    CHECK(got == doctest::Approx(joint / marg).epsilon(1e-7));

    // same-side band carries essentially nothing
    const double same = gauss::conditional_band_probability(st, band1, {6.0, 10.0});
    CHECK(same <= 1e-6);

    // conditioning on the whole line is the unconditional band probability
    const double whole = gauss::conditional_band_probability(st, {-1e3, 1e3}, band2);
    const double expect_branch = gauss::interval_probability({-8.0, 1.0}, band2) / 3.0 +
                                 gauss::interval_probability({0.0, 1.0}, band2) / 3.0 +
                                 gauss::interval_probability({8.0, 1.0}, band2) / 3.0;
    CHECK(whole == doctest::Approx(expect_branch).epsilon(1e-6));

    // empty conditioning band is rejected
    CHECK_THROWS_AS((void)gauss::conditional_band_probability(st, {100.0, 104.0}, band2),
                    poppersim::UndefinedConditionalError);
}
