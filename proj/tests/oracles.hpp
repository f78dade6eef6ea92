#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

// Test-only reference numerics, written before the library implementations
// they check. Everything here is brute force on purpose: fixed-step Simpson
// sums, tensor-product 2D quadrature, and a golden-section minimizer. The
// library must agree with these, never the other way round.

namespace oracles {

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;

// Composite Simpson with a fixed even panel count.
inline double simpson(const Fn1& f, double a, double b, int panels) {
    if (panels % 2 != 0 || panels < 2) throw std::invalid_argument("simpson: even panels");
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Simpson with step <= max_step.
inline double simpson_step(const Fn1& f, double a, double b, double max_step) {
    int panels = static_cast<int>(std::ceil((b - a) / max_step));
    if (panels % 2) ++panels;
    if (panels < 2) panels = 2;
    return simpson(f, a, b, panels);
}

// Recursive adaptive Simpson, absolute tolerance.
inline double adaptive_simpson_(const Fn1& f, double a, double b, double fa, double fm,
                                double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           adaptive_simpson_(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

inline double adaptive_simpson(const Fn1& f, double a, double b, double tol = 1e-12,
                               int max_depth = 48) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// Tensor-product Simpson on [ax, bx] x [ay, by] with steps <= max_step.
inline double simpson2d_step(const Fn2& f, double ax, double bx, double ay, double by,
                             double max_step) {
    return simpson_step(
        [&](double x) {
            return simpson_step([&](double y) { return f(x, y); }, ay, by, max_step);
        },
        ax, bx, max_step);
}

// Golden-section search for the minimizer of a unimodal function.
inline double golden_min(const Fn1& f, double a, double b, double xtol = 1e-10) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > xtol) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Parabolic refinement of a sampled minimum: vertex of the parabola through
// (x0-h, y0), (x0, y1), (x0+h, y2).
inline double parabolic_vertex(double x0, double h, double ym, double y0, double yp) {
    const double denom = ym - 2.0 * y0 + yp;
    if (denom == 0.0) return x0;
    return x0 + 0.5 * h * (ym - yp) / denom;
}

} // namespace oracles
