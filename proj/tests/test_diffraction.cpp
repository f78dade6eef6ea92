#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "poppersim/diffraction.hpp"
#include "poppersim/gaussian.hpp"
#include "poppersim/grid.hpp"

using namespace poppersim;
using slit::SlitEvolutionParams;

namespace {
constexpr double kPi = std::numbers::pi;

double fresnel_c_oracle(double theta) {
    // brute quadrature, independent of the library's adaptive scheme
    return oracles::simpson_step([](double z) { return std::cos(0.5 * kPi * z * z); }, 0.0,
                                 theta, 1e-4);
}

double fresnel_s_oracle(double theta) {
    return oracles::simpson_step([](double z) { return std::sin(0.5 * kPi * z * z); }, 0.0,
                                 theta, 1e-4);
}
} // namespace

TEST_CASE("fresnel integrals: zero, unit argument, oddness") {
    CHECK(slit::fresnel_c(0.0) == 0.0);
    CHECK(slit::fresnel_s(0.0) == 0.0);
    CHECK(slit::fresnel_c(1.0) == doctest::Approx(0.7798934003768228).epsilon(1e-10));
    CHECK(slit::fresnel_s(1.0) == doctest::Approx(0.4382591473903548).epsilon(1e-10));
    CHECK(slit::fresnel_c(1.0) == doctest::Approx(fresnel_c_oracle(1.0)).epsilon(1e-9));
    CHECK(slit::fresnel_s(1.0) == doctest::Approx(fresnel_s_oracle(1.0)).epsilon(1e-9));
    for (double th : {0.3, 1.7, 2.9, 5.5, 8.0, 21.0}) {
        CHECK(slit::fresnel_c(-th) == doctest::Approx(-slit::fresnel_c(th)).epsilon(1e-14));
        CHECK(slit::fresnel_s(-th) == doctest::Approx(-slit::fresnel_s(th)).epsilon(1e-14));
    }
}

TEST_CASE("fresnel integrals: quadrature agreement across the seam") {
    for (double th : {0.5, 1.5, 2.5, 4.0, 5.9, 6.0, 6.1, 7.5, 12.0}) {
        CHECK(slit::fresnel_c(th) == doctest::Approx(fresnel_c_oracle(th)).epsilon(5e-8));
        CHECK(slit::fresnel_s(th) == doctest::Approx(fresnel_s_oracle(th)).epsilon(5e-8));
    }
    // seam continuity at |theta| = 6
    CHECK(std::abs(slit::fresnel_c(6.0 - 1e-9) - slit::fresnel_c(6.0 + 1e-9)) < 1e-8);
    CHECK(std::abs(slit::fresnel_s(6.0 - 1e-9) - slit::fresnel_s(6.0 + 1e-9)) < 1e-8);
}

TEST_CASE("fresnel integrals: bounded and settling to one half") {
    for (double th = -30.0; th <= 30.0; th += 0.37) {
        CHECK(std::abs(slit::fresnel_c(th)) <= 0.9);
        CHECK(std::abs(slit::fresnel_s(th)) <= 0.9);
    }
    for (double th : {10.0, 50.0, 300.0}) {
        CHECK(std::abs(slit::fresnel_c(th) - 0.5) <= 1.0 / (kPi * th) + 1e-12);
        CHECK(std::abs(slit::fresnel_s(th) - 0.5) <= 1.0 / (kPi * th) + 1e-12);
    }
    CHECK(std::abs(slit::fresnel_c(50.0) - 0.5) < 1e-2);
    CHECK(std::abs(slit::fresnel_s(50.0) - 0.5) < 1e-2);
}

TEST_CASE("slit params: derived arguments track the inputs") {
    SlitEvolutionParams sp(1.0, 1.0);
    CHECK(sp.v() == doctest::Approx(0.5 / std::sqrt(kPi)).epsilon(1e-14));
    CHECK(sp.u_of(2.0) == doctest::Approx(2.0 / std::sqrt(kPi)).epsilon(1e-14));
    SlitEvolutionParams wide(2.0, 1.0);
    CHECK(wide.v() == doctest::Approx(2.0 * sp.v()).epsilon(1e-14));
    CHECK_THROWS_AS(SlitEvolutionParams(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(SlitEvolutionParams(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("exact slit density: center value reduces algebraically") {
    for (double d : {0.4, 1.0, 3.0}) {
        for (double t : {0.5, 2.0}) {
            SlitEvolutionParams sp(d, t);
            const double v = sp.v();
            const double expect = (2.0 / d) * (slit::fresnel_c(v) * slit::fresnel_c(v) +
                                               slit::fresnel_s(v) * slit::fresnel_s(v));
            CHECK(slit::slit_density_exact(0.0, sp) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("exact slit density: near field is the slit profile") {
    // v = 10: barely evolved, density sits at 1/d inside and ~0 outside
    const double d = 1.0;
    const double t = d * d / (4.0 * kPi * 100.0); // v = (d/2) / sqrt(pi t) = 10
    SlitEvolutionParams sp(d, t);
    CHECK(sp.v() == doctest::Approx(10.0).epsilon(1e-12));
    for (double y : {0.0, 0.15, -0.3})
        CHECK(slit::slit_density_exact(y, sp) == doctest::Approx(1.0 / d).epsilon(0.10));
    for (double y : {0.8, -1.2, 2.0})
        CHECK(slit::slit_density_exact(y, sp) < 0.05 / d);
}

TEST_CASE("far-field density: center limit, zeros, series branch continuity") {
    SlitEvolutionParams sp(1.0, 1.0);
    // m d / (2 pi hbar t)
    CHECK(slit::slit_density_fraunhofer(0.0, sp) ==
          doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-13));
    // zeros at multiples of 2 pi hbar t / (m d)
    for (int k = 1; k <= 3; ++k) {
        CHECK(slit::slit_density_fraunhofer(2.0 * kPi * k, sp) < 1e-25);
        const double just_off = 2.0 * kPi * k + 0.05;
        CHECK(slit::slit_density_fraunhofer(just_off, sp) > 1e-6);
    }
    // series branch matches the direct expression at the crossover
    const double eps = 1e-4 * 2.0; // |m d y / (2 hbar t)| = 1e-4 at this y
    const double lo = slit::slit_density_fraunhofer(eps * 0.999, sp);
    const double hi = slit::slit_density_fraunhofer(eps * 1.001, sp);
    CHECK(lo == doctest::Approx(hi).epsilon(1e-7));
    CHECK(lo == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-7));
}

TEST_CASE("far-field width: closed form and scaling") {
    SlitEvolutionParams unit(1.0, 1.0);
    CHECK(slit::fraunhofer_width(unit) == doctest::Approx(4.0 * kPi).epsilon(1e-14));
    // halving the slit doubles the width
    SlitEvolutionParams half(0.5, 1.0);
    CHECK(slit::fraunhofer_width(half) ==
          doctest::Approx(2.0 * slit::fraunhofer_width(unit)).epsilon(1e-14));
    // width equals the spacing of adjacent zeros times two
    CHECK(slit::fraunhofer_width(unit) == doctest::Approx(2.0 * (2.0 * kPi)).epsilon(1e-14));
}

TEST_CASE("far field converges to the exact density as v shrinks") {
    const double t = 1.0;
    double prev_sup = 1e9;
    for (double v : {0.5, 0.2, 0.1, 0.05, 0.02}) {
        const double d = 2.0 * v * std::sqrt(kPi * t);
        SlitEvolutionParams sp(d, t);
        const double half_lobe = 0.5 * slit::fraunhofer_width(sp);
        const double peak = slit::slit_density_fraunhofer(0.0, sp);
        double sup = 0.0;
        for (int i = -400; i <= 400; ++i) {
            const double y = half_lobe * i / 400.0;
            sup = std::max(sup, std::abs(slit::slit_density_exact(y, sp) -
                                         slit::slit_density_fraunhofer(y, sp)) /
                                    peak);
        }
        CHECK(sup < prev_sup);
        prev_sup = sup;
        if (v <= 0.05) CHECK(sup < 0.01);
    }
}

TEST_CASE("exact-density minima spacing approaches the closed-form width") {
    const double t = 1.0;
    const double d = 0.1 * std::sqrt(kPi); // v = 0.05
    SlitEvolutionParams sp(d, t);
    const double width = slit::fraunhofer_width(sp);
    auto density = [&](double y) { return slit::slit_density_exact(y, sp); };
    // golden-section refinement inside brackets around the expected zeros
    const double right = oracles::golden_min(density, 0.35 * width, 0.65 * width, 1e-10);
    const double left = oracles::golden_min(density, -0.65 * width, -0.35 * width, 1e-10);
    CHECK((right - left) == doctest::Approx(width).epsilon(5e-3));
}

TEST_CASE("exact density matches spectral propagation of the sampled slit") {
    // d = 2, t = 1: slit sampled at 151 nodes so the beyond-Nyquist tail of the
    // hard edges (folded back with the wrong phase, amplitude ~ 2/(pi M) of the
    // peak) stays well under the tolerance; box wide enough that the wrapped
    // 1/y^2 tails do too
    const double d = 2.0, t = 1.0;
    SlitEvolutionParams sp(d, t);
    grid::Grid1D g = grid::symmetric_grid(65536 * (d / 151.0) / 2.0, 65536);
    auto psi0 = grid::discretize(grid::Aperture(0.0, d), g);
    grid::PropagationOptions opts;
    opts.boundary_mass_tol = 0.05; // hard-edge tails: comparison handles wrap
    auto psi = grid::propagate_free(psi0, t, {}, opts);
    auto dens = grid::density_of(psi);
    const double peak = slit::slit_density_exact(0.0, sp);
    const double half_lobe = 0.5 * slit::fraunhofer_width(sp);
    double sup = 0.0;
    for (int i = 0; i < g.n_points; ++i) {
        const double y = g.node(i);
        if (std::abs(y) > half_lobe) continue;
        sup = std::max(sup, std::abs(dens.values[i] - slit::slit_density_exact(y, sp)) / peak);
    }
    CHECK(sup < 0.01);
}

TEST_CASE("scatter ratio: linear in the narrowing factor") {
    const double ratio1 = 4.0 * kPi / (3.0 * std::sqrt(2.0));
    CHECK(slit::scatter_ratio(1.0, 2.0) == doctest::Approx(2.961921958772244).epsilon(1e-13));
    CHECK(slit::scatter_ratio(1.0, 2.0) == doctest::Approx(ratio1).epsilon(1e-13));
    CHECK(slit::scatter_ratio(4.0, 2.0) == doctest::Approx(11.847687835088976).epsilon(1e-13));
    // exact linearity, independent of t
    for (double t : {0.5, 2.0, 7.0})
        for (int n = 1; n <= 16; ++n)
            CHECK(slit::scatter_ratio(n, t) == doctest::Approx(n * ratio1).epsilon(1e-12));
    CHECK_THROWS_AS((void)slit::scatter_ratio(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("far-field regime threshold constant") {
    CHECK(slit::farfield_threshold_sigma_units() ==
          doctest::Approx(2.0 * std::sqrt(2.0 * kPi)).epsilon(1e-12));
    CHECK(slit::farfield_threshold_sigma_units() ==
          doctest::Approx(5.0132565492620005).epsilon(1e-12));
}
