#include "poppersim/diffraction.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace poppersim::slit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSeam = 6.0;      // quadrature below, asymptotic series above
constexpr double kQuadTol = 1e-13; // local error target per panel

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

template <typename F>
double adaptive_simpson(F f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate(F f, double a, double b) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, kQuadTol, 48);
}

// Auxiliary asymptotic amplitudes: for large theta,
//   C = 1/2 + f sin(w) - g cos(w),  S = 1/2 - f cos(w) - g sin(w),
// with w = pi theta^2 / 2. Series in odd double factorials over (pi theta^2);
// truncated at the smallest term, which is ~1e-14 at the seam.
struct Auxiliary {
    double f;
    double g;
};

Auxiliary auxiliary_fg(double theta) {
    const double x = kPi * theta * theta;
    const double x2 = x * x;
    double f = 0.0;
    double term = 1.0; // (4m-1)!! / x^(2m), m = 0
    for (int m = 0;; ++m) {
        f += term;
        const double next = -term * (4.0 * m + 1.0) * (4.0 * m + 3.0) / x2;
        if (std::abs(next) >= std::abs(term) || std::abs(next) < 1e-17) break;
        term = next;
    }
    double g = 0.0;
    term = 1.0 / x; // (4m+1)!! / x^(2m+1), m = 0
    for (int m = 0;; ++m) {
        g += term;
        const double next = -term * (4.0 * m + 3.0) * (4.0 * m + 5.0) / x2;
        if (std::abs(next) >= std::abs(term) || std::abs(next) < 1e-17) break;
        term = next;
    }
    return {f / (kPi * theta), g / (kPi * theta)};
}

double fresnel_c_positive(double theta) {
    if (theta <= kSeam)
        return integrate([](double z) { return std::cos(0.5 * kPi * z * z); }, 0.0, theta);
    const auto [f, g] = auxiliary_fg(theta);
    const double w = 0.5 * kPi * theta * theta;
    return 0.5 + f * std::sin(w) - g * std::cos(w);
}

double fresnel_s_positive(double theta) {
    if (theta <= kSeam)
        return integrate([](double z) { return std::sin(0.5 * kPi * z * z); }, 0.0, theta);
    const auto [f, g] = auxiliary_fg(theta);
    const double w = 0.5 * kPi * theta * theta;
    return 0.5 - f * std::cos(w) - g * std::sin(w);
}

double sq(double x) { return x * x; }

} // namespace

double fresnel_c(double theta) {
    if (theta == 0.0) return 0.0;
    return theta > 0.0 ? fresnel_c_positive(theta) : -fresnel_c_positive(-theta);
}

double fresnel_s(double theta) {
    if (theta == 0.0) return 0.0;
    return theta > 0.0 ? fresnel_s_positive(theta) : -fresnel_s_positive(-theta);
}

SlitEvolutionParams::SlitEvolutionParams(double d_, double t_, const gauss::PhysicalParams& p)
    : d(d_), t(t_), phys(p) {
    require(d > 0.0, "slit width must be positive");
    require(t > 0.0, "flight time must be positive");
    require(p.hbar > 0.0 && p.mass > 0.0, "hbar and mass must be positive");
}

double SlitEvolutionParams::u_of(double y2) const {
    return y2 * std::sqrt(phys.mass / (kPi * phys.hbar * t));
}

double SlitEvolutionParams::v() const {
    return 0.5 * d * std::sqrt(phys.mass / (kPi * phys.hbar * t));
}

double slit_density_exact(double y2, const SlitEvolutionParams& sp) {
    const double u = sp.u_of(y2);
    const double v = sp.v();
    const double dc = fresnel_c(u + v) - fresnel_c(u - v);
    const double ds = fresnel_s(u + v) - fresnel_s(u - v);
    return (dc * dc + ds * ds) / (2.0 * sp.d);
}

double slit_density_fraunhofer(double y2, const SlitEvolutionParams& sp) {
    const double x = sp.phys.mass * sp.d * y2 / (2.0 * sp.phys.hbar * sp.t);
    const double sinc = (x == 0.0) ? 1.0 : std::sin(x) / x;
    return sp.phys.mass * sp.d / (2.0 * kPi * sp.phys.hbar * sp.t) * sq(sinc);
}

double fraunhofer_width(const SlitEvolutionParams& sp) {
    return 4.0 * kPi * sp.phys.hbar * sp.t / (sp.phys.mass * sp.d);
}

double scatter_ratio(double n, double t, const gauss::PhysicalParams& p) {
    require(n > 0.0, "narrowing factor must be positive");
    const double sigma = gauss::optimal_sigma(t, p);
    const double sigma_bar = gauss::spread_after_time(sigma, t, p);
    const SlitEvolutionParams sp(sigma / n, t, p);
    return fraunhofer_width(sp) / (6.0 * sigma_bar);
}

double farfield_threshold_sigma_units() { return 2.0 * std::sqrt(2.0 * kPi); }

} // namespace poppersim::slit
