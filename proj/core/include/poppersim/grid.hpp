#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "poppersim/gaussian.hpp"

// Sampled wavefunctions on uniform grids with spectral free evolution.
// This is the numerical oracle the closed forms are checked against, so the
// operations carry their own norm bookkeeping and guard rails: support must
// fit the box at discretization time and evolved mass must stay away from
// the periodic edges.

namespace poppersim::grid {

using Complex = std::complex<double>;

// Uniform grid on [y_min, y_max) with power-of-two point count >= 64.
// Node i sits at y_min + i * spacing; a symmetric grid has a node at 0.
struct Grid1D {
    Grid1D() = default;
    Grid1D(double y_min, double y_max, int n_points);

    double y_min = 0.0;
    double y_max = 0.0;
    int n_points = 0;

    double spacing() const { return (y_max - y_min) / n_points; }
    double node(int i) const { return y_min + i * spacing(); }

    bool operator==(const Grid1D&) const = default;
};

// Symmetric grid [-extent, extent).
Grid1D symmetric_grid(double extent, int n_points);

struct SampledWavefunction1D {
    Grid1D grid;
    std::vector<Complex> amp; // amp[i] at grid.node(i)
    double norm_sq = 0.0;     // tracked discrete norm, sum |amp|^2 * spacing

    double discrete_norm_sq() const;
};

// Row-major storage: amp[i1 * grid2.n_points + i2].
struct SampledWavefunction2D {
    Grid1D grid1;
    Grid1D grid2;
    std::vector<Complex> amp;
    double norm_sq = 0.0;

    double discrete_norm_sq() const;
    Complex& at(int i1, int i2) { return amp[static_cast<std::size_t>(i1) * grid2.n_points + i2]; }
    const Complex& at(int i1, int i2) const {
        return amp[static_cast<std::size_t>(i1) * grid2.n_points + i2];
    }
};

struct SampledDensity1D {
    Grid1D grid;
    std::vector<double> values; // density, integrates with weight spacing

    double mass() const;
};

// Hard slit: multiply by the characteristic function of
// [center - width/2, center + width/2]. Must fit inside the target grid.
struct Aperture {
    Aperture(double center, double width);
    double center = 0.0;
    double width = 0.0;
};

inline constexpr double kSupportLeakTol = 1e-12;  // analytic mass allowed outside the box
inline constexpr double kNorm1DTol = 1e-10;
inline constexpr double kNorm2DTol = 1e-8;
inline constexpr double kBoundaryMassTolDefault = 1e-6;
inline constexpr int kBoundaryStripCells = 5;
inline constexpr double kPostSelectionFloor = 1e-12;

// Sample a Gaussian mode; renormalize so the discrete norm equals the
// analytic one. Throws GridTooSmallError when more than kSupportLeakTol of
// the analytic mass lies outside the box.
SampledWavefunction1D discretize(const gauss::GaussianMode& mode, const Grid1D& g);

// Sample the normalized characteristic function of an aperture (amplitude
// 1/sqrt(width) inside). The aperture must sit strictly inside the box.
SampledWavefunction1D discretize(const Aperture& ap, const Grid1D& g);

// Sample the three-branch two-particle state on a tensor grid.
SampledWavefunction2D discretize(const gauss::PopperState& state,
                                 const Grid1D& g1, const Grid1D& g2);

struct PropagationOptions {
    // Mass tolerated in the strips kBoundaryStripCells wide at each edge
    // after evolution, relative to the total. Hard-aperture far fields have
    // 1/y^2 tails, so far-field scenario configs must raise this knowingly;
    // axis-1 marginals are unaffected by axis-2 wrap-around either way.
    double boundary_mass_tol = kBoundaryMassTolDefault;
};

// Free evolution: multiply momentum amplitudes by exp(-i hbar k^2 t / 2m)
// per axis. Norm is conserved to 1e-10. Throws GridTooSmallError when the
// evolved boundary-strip mass exceeds the tolerance.
SampledWavefunction1D propagate_free(const SampledWavefunction1D& psi, double t,
                                     const gauss::PhysicalParams& p = {},
                                     const PropagationOptions& opts = {});
SampledWavefunction2D propagate_free(const SampledWavefunction2D& psi, double t,
                                     const gauss::PhysicalParams& p = {},
                                     const PropagationOptions& opts = {});

struct ApertureResult {
    SampledWavefunction2D passed;
    SampledWavefunction2D absorbed;
    double pass_probability = 0.0; // squared norm of the passed component
};

// Split psi into the parts inside and outside the slit along `axis` (1 or 2).
// Pointwise, |passed|^2 + |absorbed|^2 reconstructs |psi|^2 exactly.
ApertureResult apply_aperture(const SampledWavefunction2D& psi, int axis, const Aperture& ap);

// Renormalize the passed component to unit norm. Throws
// EmptyPostSelectionError below the floor.
SampledWavefunction2D condition_on_coincidence(const SampledWavefunction2D& passed);

// Integrate |psi|^2 over the other axis; result integrates to the norm.
SampledDensity1D marginal_density(const SampledWavefunction2D& psi, int axis);

SampledDensity1D density_of(const SampledWavefunction1D& psi);

double density_mean(const SampledDensity1D& d);
double density_stdev(const SampledDensity1D& d);

struct MinimaSearchOptions {
    // Gaussian smoothing width applied before the scan; 0 disables. Far-field
    // marginals carry high-frequency wrap fringes far below the lobe scale.
    double smooth_sigma = 0.0;
    // A dip only counts as a diffraction minimum when the curve rebounds to
    // at least this multiple of the dip value. Wrapped slit tails fill the
    // true zeros to a percent-level floor, so the first side lobe typically
    // rebounds to 3-5x the dip, not to many times it.
    double rebound_factor = 2.0;
    // ...and the rebound reaches at least this fraction of the global peak.
    double rebound_min_fraction = 1e-5;
};

// Distance between the first local minima on each side of the global peak,
// or nullopt when no such pair exists (featureless densities).
std::optional<double> first_minima_width(const SampledDensity1D& d,
                                         const MinimaSearchOptions& opts = {});

} // namespace poppersim::grid
