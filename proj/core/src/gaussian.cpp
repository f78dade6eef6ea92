#include "poppersim/gaussian.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "poppersim/errors.hpp"

namespace poppersim::gauss {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

double sq(double x) { return x * x; }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

void check_params(const PhysicalParams& p) {
    require(p.hbar > 0.0 && p.mass > 0.0, "hbar and mass must be positive");
}

// Branch centers of the three-branch state: (y1, y2) per branch.
std::array<std::array<double, 2>, 3> branch_centers(const PopperState& st) {
    const double a = st.alpha();
    return {{{0.0, 0.0}, {a, -a}, {-a, a}}};
}

// int_B g_a g_b dy for unit-norm packets of common width sigma centered at
// a and b: the product is a displaced gaussian scaled by the pair overlap.
double band_overlap(double a, double b, double sigma, double lo, double hi) {
    const double weight = std::exp(-sq(a - b) / (8.0 * sigma * sigma));
    const double m = 0.5 * (a + b);
    return weight * (normal_cdf((hi - m) / sigma) - normal_cdf((lo - m) / sigma));
}

} // namespace

double gaussian_amplitude(const GaussianMode& mode, double y) {
    require(mode.sigma > 0.0, "gaussian sigma must be positive");
    const double s2 = mode.sigma * mode.sigma;
    return std::pow(2.0 * kPi * s2, -0.25) * std::exp(-sq(y - mode.mean) / (4.0 * s2));
}

double spread_after_time(double sigma, double t, const PhysicalParams& p) {
    require(sigma > 0.0, "gaussian sigma must be positive");
    require(t >= 0.0, "time must be nonnegative");
    check_params(p);
    const double r = p.hbar * t / (2.0 * p.mass * sigma * sigma);
    return sigma * std::sqrt(1.0 + r * r);
}

double optimal_sigma(double t, const PhysicalParams& p) {
    require(t > 0.0, "time must be positive");
    check_params(p);
    return std::sqrt(p.hbar * t / (2.0 * p.mass));
}

double evolved_gaussian_density(const GaussianMode& mode, double t, double y,
                                const PhysicalParams& p) {
    const double sbar = spread_after_time(mode.sigma, t, p);
    return std::exp(-0.5 * sq((y - mode.mean) / sbar)) / (sbar * std::sqrt(2.0 * kPi));
}

double interval_probability(const GaussianMode& mode, const Interval& iv) {
    require(mode.sigma > 0.0, "gaussian sigma must be positive");
    require(iv.hi > iv.lo, "interval must have positive length");
    return normal_cdf((iv.hi - mode.mean) / mode.sigma) -
           normal_cdf((iv.lo - mode.mean) / mode.sigma);
}

PopperState::PopperState(double alpha, double sigma) : alpha_(alpha), sigma_(sigma) {
    require(sigma > 0.0, "gaussian sigma must be positive");
    require(alpha >= 8.0 * sigma, "branch separation must be at least 8 sigma");
}

double PopperState::norm() const {
    // cross terms: the two near pairs are alpha apart in each coordinate,
    // the outer pair 2 alpha; per-coordinate overlap exp(-delta^2/8 sigma^2)
    const double near = std::exp(-sq(alpha_) / (4.0 * sq(sigma_)));
    const double outer = std::exp(-sq(alpha_) / sq(sigma_));
    return std::sqrt(1.0 + 2.0 * (2.0 * near + outer) / 3.0);
}

double popper_state_amplitude(const PopperState& state, double y1, double y2) {
    const GaussianMode g{0.0, state.sigma()};
    double sum = 0.0;
    for (const auto& c : branch_centers(state))
        sum += gaussian_amplitude(g, y1 - c[0]) * gaussian_amplitude(g, y2 - c[1]);
    return sum / (std::sqrt(3.0) * state.norm());
}

double conditional_band_probability(const PopperState& state, const Interval& band1,
                                    const Interval& band2) {
    require(band1.hi >= band1.lo && band2.hi >= band2.lo, "interval bounds must be ordered");
    const auto centers = branch_centers(state);
    const double sigma = state.sigma();
    double joint = 0.0;
    double marginal = 0.0;
    for (const auto& ci : centers)
        for (const auto& cj : centers) {
            const double w1 = band_overlap(ci[0], cj[0], sigma, band1.lo, band1.hi);
            const double w2full = std::exp(-sq(ci[1] - cj[1]) / (8.0 * sigma * sigma));
            marginal += w1 * w2full;
            joint += w1 * band_overlap(ci[1], cj[1], sigma, band2.lo, band2.hi);
        }
    // the common 1/(3 norm^2) factor cancels in the ratio
    if (marginal < kConditionalFloor * 3.0)
        throw UndefinedConditionalError("conditioning band carries no probability");
    return joint / marginal;
}

} // namespace poppersim::gauss
