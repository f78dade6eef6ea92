#pragma once

#include "poppersim/gaussian.hpp"

// Closed-form single-slit scatter after free flight: Fresnel integrals, the
// exact post-slit density, its far-field (Fraunhofer) limit, and the width
// ratios that quantify how slit narrowing drives the scatter.

namespace poppersim::slit {

// Fresnel integrals C(theta) = int_0^theta cos(pi z^2 / 2) dz and
// S(theta) = int_0^theta sin(pi z^2 / 2) dz. Odd in theta; both tend to 1/2
// with envelope 1/(pi theta). Adaptive quadrature for |theta| <= 6, the
// standard asymptotic series beyond, matched continuously at the seam;
// absolute error below 1e-10.
double fresnel_c(double theta);
double fresnel_s(double theta);

// Slit of width d, flight time t. The dimensionless arguments are
// u = y2 sqrt(m / (pi hbar t)) and v = (d/2) sqrt(m / (pi hbar t));
// v << 1 is the far-field regime.
struct SlitEvolutionParams {
    SlitEvolutionParams(double d, double t, const gauss::PhysicalParams& p = {});

    double d;
    double t;
    gauss::PhysicalParams phys;

    double u_of(double y2) const;
    double v() const;
};

// Exact evolved density of the normalized slit state:
// (1/2d) [ (C(u+v) - C(u-v))^2 + (S(u+v) - S(u-v))^2 ].
double slit_density_exact(double y2, const SlitEvolutionParams& sp);

// Far-field limit (m d / (2 pi hbar t)) sinc^2(m d y2 / (2 hbar t)); finite
// at y2 = 0 and zero exactly at y2 = 2 pi hbar t k / (m d).
double slit_density_fraunhofer(double y2, const SlitEvolutionParams& sp);

// Distance between the two first-order zeros: 4 pi hbar t / (m d).
double fraunhofer_width(const SlitEvolutionParams& sp);

// Horizontal scatter ratio for slit d = sigma/n at the optimal initial
// width: fraunhofer_width / (6 sigma_bar) = (4 pi / (3 sqrt 2)) n. Grows
// without bound in n: narrowing the slit widens the scatter.
double scatter_ratio(double n, double t, const gauss::PhysicalParams& p = {});

// Far-field regime threshold in units of the optimal sigma: v << 1 is
// d << 2 sqrt(2 pi) sigma, about 5 sigma.
double farfield_threshold_sigma_units();

} // namespace poppersim::slit
