#pragma once

// Closed-form algebra of one-dimensional Gaussian packets: amplitudes,
// free-evolution widths, interval probabilities, and the symmetrized
// three-branch two-particle state used by the slit scenarios.

namespace poppersim::gauss {

struct PhysicalParams {
    double hbar = 1.0;
    double mass = 1.0;
};

// Minimum-uncertainty packet centered at `mean`; `sigma` is the standard
// deviation of the position distribution |psi|^2.
struct GaussianMode {
    double mean = 0.0;
    double sigma = 1.0;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Position amplitude (2 pi sigma^2)^(-1/4) exp(-(y-mean)^2 / (4 sigma^2)).
// Real-valued; the evolved state is only ever needed as a density.
double gaussian_amplitude(const GaussianMode& mode, double y);

// Width of the freely evolved density after time t:
// sigma * sqrt(1 + (hbar t)^2 / (2 m sigma^2)^2).
double spread_after_time(double sigma, double t, const PhysicalParams& p = {});

// Initial width minimizing the evolved width at fixed t: sqrt(hbar t / (2 m)).
// The minimum value is sqrt(2) times this.
double optimal_sigma(double t, const PhysicalParams& p = {});

// |psi(y, t)|^2 for a packet starting in `mode`: a normal density with the
// original mean and the spread width.
double evolved_gaussian_density(const GaussianMode& mode, double t, double y,
                                const PhysicalParams& p = {});

// Probability that position lies in [iv.lo, iv.hi] under |psi|^2.
double interval_probability(const GaussianMode& mode, const Interval& iv);

// Symmetrized two-particle state for the coincidence-slit experiment:
// equal-weight branches with the packets at (+alpha, -alpha), (0, 0),
// (-alpha, +alpha). Branch overlap decays like exp(-alpha^2 / 8 sigma^2);
// alpha >= 8 sigma keeps branches distinguishable and the norm within 1e-6
// of one.
class PopperState {
public:
    PopperState(double alpha, double sigma);

    double alpha() const { return alpha_; }
    double sigma() const { return sigma_; }

    // Exact norm of the three-branch sum including cross terms.
    double norm() const;

private:
    double alpha_;
    double sigma_;
};

// Amplitude of the three-branch state at (y1, y2). Real-valued at t = 0.
double popper_state_amplitude(const PopperState& state, double y1, double y2);

// P(y2 in band2 | y1 in band1) for the three-branch state, from the closed
// form of branch-pair overlap integrals (cross terms included).
double conditional_band_probability(const PopperState& state,
                                    const Interval& band1, const Interval& band2);

inline constexpr double kConditionalFloor = 1e-12;

} // namespace poppersim::gauss
