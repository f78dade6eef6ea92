#include "poppersim/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "poppersim/errors.hpp"

namespace poppersim::grid {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// analytic mass of a gaussian mode outside [lo, hi]
double gaussian_leak(const gauss::GaussianMode& m, double lo, double hi) {
    return normal_cdf((lo - m.mean) / m.sigma) + normal_cdf(-(hi - m.mean) / m.sigma);
}

void check_support(double leak, const char* what) {
    if (leak > kSupportLeakTol)
        throw GridTooSmallError(std::string(what) +
                                ": analytic support leaks outside the box");
}

// FFTW plan creation and destruction are not thread safe; execution is.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

void fft_1d(std::vector<Complex>& data, int sign) {
    fftw_complex* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(data.size()), ptr, ptr, sign,
                                FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(plan);
    }
}

void fft_2d(std::vector<Complex>& data, int n1, int n2, int sign) {
    fftw_complex* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        plan = fftw_plan_dft_2d(n1, n2, ptr, ptr, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(plan);
    }
}

// wavenumber of DFT bin j on a length-L ring of n samples
double wavenumber(int j, int n, double length) {
    const int shifted = (j <= n / 2 - 1) ? j : j - n;
    return 2.0 * kPi * shifted / length;
}

void check_time_and_params(double t, const gauss::PhysicalParams& p) {
    require(t >= 0.0, "time must be nonnegative");
    require(p.hbar > 0.0 && p.mass > 0.0, "hbar and mass must be positive");
}

double strip_mass_1d(const SampledWavefunction1D& psi) {
    double m = 0.0;
    const int n = psi.grid.n_points;
    for (int i = 0; i < kBoundaryStripCells; ++i)
        m += std::norm(psi.amp[i]) + std::norm(psi.amp[n - 1 - i]);
    return m * psi.grid.spacing();
}

double strip_mass_2d(const SampledWavefunction2D& psi) {
    const int n1 = psi.grid1.n_points;
    const int n2 = psi.grid2.n_points;
    double m = 0.0;
    for (int i1 = 0; i1 < n1; ++i1) {
        const bool edge1 = i1 < kBoundaryStripCells || i1 >= n1 - kBoundaryStripCells;
        for (int i2 = 0; i2 < n2; ++i2) {
            if (!edge1 && i2 >= kBoundaryStripCells && i2 < n2 - kBoundaryStripCells)
                continue;
            m += std::norm(psi.at(i1, i2));
        }
    }
    return m * psi.grid1.spacing() * psi.grid2.spacing();
}

void guard_boundary(double strip_mass, double total, double tol) {
    if (total > 0.0 && strip_mass / total > tol)
        throw GridTooSmallError("evolved mass reached the boundary strips");
}

void guard_norm(double tracked, double discrete, double tol) {
    if (tracked > 0.0 && std::abs(discrete - tracked) > tol * tracked)
        throw std::runtime_error("spectral propagation failed to conserve the norm");
}

// inclusive node mask of an aperture on one axis
bool inside(const Aperture& ap, double y) { return std::abs(y - ap.center) <= 0.5 * ap.width; }

void check_aperture_fits(const Aperture& ap, const Grid1D& g) {
    require(ap.center - 0.5 * ap.width > g.y_min && ap.center + 0.5 * ap.width < g.y_max,
            "aperture must sit strictly inside the box");
}

} // namespace

Grid1D::Grid1D(double y_min_, double y_max_, int n_points_)
    : y_min(y_min_), y_max(y_max_), n_points(n_points_) {
    require(y_max > y_min, "grid needs positive length");
    require(is_pow2(n_points) && n_points >= 64,
            "grid size must be a power of two, at least 64");
}

Grid1D symmetric_grid(double extent, int n_points) {
    require(extent > 0.0, "grid extent must be positive");
    return Grid1D(-extent, extent, n_points);
}

double SampledWavefunction1D::discrete_norm_sq() const {
    double s = 0.0;
    for (const Complex& a : amp) s += std::norm(a);
    return s * grid.spacing();
}

double SampledWavefunction2D::discrete_norm_sq() const {
    double s = 0.0;
    for (const Complex& a : amp) s += std::norm(a);
    return s * grid1.spacing() * grid2.spacing();
}

double SampledDensity1D::mass() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * grid.spacing();
}

Aperture::Aperture(double center_, double width_) : center(center_), width(width_) {
    require(width > 0.0, "aperture width must be positive");
}

SampledWavefunction1D discretize(const gauss::GaussianMode& mode, const Grid1D& g) {
    require(mode.sigma > 0.0, "gaussian sigma must be positive");
    check_support(gaussian_leak(mode, g.y_min, g.y_max), "gaussian mode");
    SampledWavefunction1D psi;
    psi.grid = g;
    psi.amp.resize(g.n_points);
    for (int i = 0; i < g.n_points; ++i)
        psi.amp[i] = gauss::gaussian_amplitude(mode, g.node(i));
    const double s = psi.discrete_norm_sq();
    const double scale = 1.0 / std::sqrt(s);
    for (Complex& a : psi.amp) a *= scale;
    psi.norm_sq = 1.0;
    return psi;
}

SampledWavefunction1D discretize(const Aperture& ap, const Grid1D& g) {
    check_aperture_fits(ap, g);
    SampledWavefunction1D psi;
    psi.grid = g;
    psi.amp.assign(g.n_points, Complex(0.0, 0.0));
    int count = 0;
    for (int i = 0; i < g.n_points; ++i)
        if (inside(ap, g.node(i))) {
            psi.amp[i] = 1.0;
            ++count;
        }
    if (count == 0) throw GridTooSmallError("aperture narrower than one grid cell");
    const double scale = 1.0 / std::sqrt(count * g.spacing());
    for (Complex& a : psi.amp)
        if (a != Complex(0.0, 0.0)) a = scale;
    psi.norm_sq = 1.0;
    return psi;
}

SampledWavefunction2D discretize(const gauss::PopperState& state, const Grid1D& g1,
                                 const Grid1D& g2) {
    const double a = state.alpha();
    const double s = state.sigma();
    for (const Grid1D* g : {&g1, &g2}) {
        double leak = 0.0;
        for (double c : {0.0, a, -a})
            leak += gaussian_leak({c, s}, g->y_min, g->y_max) / 3.0;
        check_support(leak, "three-branch state");
    }

    // per-axis branch factors; the state is a sum of three products
    const double centers1[3] = {0.0, a, -a};
    const double centers2[3] = {0.0, -a, a};
    std::vector<double> f1(3 * g1.n_points), f2(3 * g2.n_points);
    for (int b = 0; b < 3; ++b) {
        for (int i = 0; i < g1.n_points; ++i)
            f1[b * g1.n_points + i] =
                gauss::gaussian_amplitude({centers1[b], s}, g1.node(i));
        for (int j = 0; j < g2.n_points; ++j)
            f2[b * g2.n_points + j] =
                gauss::gaussian_amplitude({centers2[b], s}, g2.node(j));
    }

    SampledWavefunction2D psi;
    psi.grid1 = g1;
    psi.grid2 = g2;
    psi.amp.resize(static_cast<std::size_t>(g1.n_points) * g2.n_points);
    for (int i = 0; i < g1.n_points; ++i) {
        const double b0 = f1[i];
        const double b1 = f1[g1.n_points + i];
        const double b2 = f1[2 * g1.n_points + i];
        Complex* row = &psi.amp[static_cast<std::size_t>(i) * g2.n_points];
        for (int j = 0; j < g2.n_points; ++j)
            row[j] = b0 * f2[j] + b1 * f2[g2.n_points + j] + b2 * f2[2 * g2.n_points + j];
    }
    const double norm = psi.discrete_norm_sq();
    const double scale = 1.0 / std::sqrt(norm);
    for (Complex& v : psi.amp) v *= scale;
    psi.norm_sq = 1.0;
    return psi;
}

SampledWavefunction1D propagate_free(const SampledWavefunction1D& psi, double t,
                                     const gauss::PhysicalParams& p,
                                     const PropagationOptions& opts) {
    check_time_and_params(t, p);
    SampledWavefunction1D out = psi;
    const int n = psi.grid.n_points;
    const double length = psi.grid.y_max - psi.grid.y_min;
    fft_1d(out.amp, FFTW_FORWARD);
    for (int j = 0; j < n; ++j) {
        const double k = wavenumber(j, n, length);
        const double phase = -p.hbar * k * k * t / (2.0 * p.mass);
        out.amp[j] *= Complex(std::cos(phase), std::sin(phase)) / static_cast<double>(n);
    }
    fft_1d(out.amp, FFTW_BACKWARD);
    guard_norm(out.norm_sq, out.discrete_norm_sq(), kNorm1DTol);
    guard_boundary(strip_mass_1d(out), out.norm_sq, opts.boundary_mass_tol);
    return out;
}

SampledWavefunction2D propagate_free(const SampledWavefunction2D& psi, double t,
                                     const gauss::PhysicalParams& p,
                                     const PropagationOptions& opts) {
    check_time_and_params(t, p);
    SampledWavefunction2D out = psi;
    const int n1 = psi.grid1.n_points;
    const int n2 = psi.grid2.n_points;
    const double l1 = psi.grid1.y_max - psi.grid1.y_min;
    const double l2 = psi.grid2.y_max - psi.grid2.y_min;
    fft_2d(out.amp, n1, n2, FFTW_FORWARD);
    const double scale = 1.0 / (static_cast<double>(n1) * n2);
    for (int j1 = 0; j1 < n1; ++j1) {
        const double k1 = wavenumber(j1, n1, l1);
        Complex* row = &out.amp[static_cast<std::size_t>(j1) * n2];
        for (int j2 = 0; j2 < n2; ++j2) {
            const double k2 = wavenumber(j2, n2, l2);
            const double phase = -p.hbar * (k1 * k1 + k2 * k2) * t / (2.0 * p.mass);
            row[j2] *= Complex(std::cos(phase), std::sin(phase)) * scale;
        }
    }
    fft_2d(out.amp, n1, n2, FFTW_BACKWARD);
    guard_norm(out.norm_sq, out.discrete_norm_sq(), kNorm2DTol);
    guard_boundary(strip_mass_2d(out), out.norm_sq, opts.boundary_mass_tol);
    return out;
}

ApertureResult apply_aperture(const SampledWavefunction2D& psi, int axis, const Aperture& ap) {
    require(axis == 1 || axis == 2, "axis must be 1 or 2");
    const Grid1D& g = (axis == 1) ? psi.grid1 : psi.grid2;
    check_aperture_fits(ap, g);

    ApertureResult r;
    r.passed.grid1 = r.absorbed.grid1 = psi.grid1;
    r.passed.grid2 = r.absorbed.grid2 = psi.grid2;
    r.passed.amp.assign(psi.amp.size(), Complex(0.0, 0.0));
    r.absorbed.amp.assign(psi.amp.size(), Complex(0.0, 0.0));

    std::vector<bool> mask(g.n_points);
    for (int i = 0; i < g.n_points; ++i) mask[i] = inside(ap, g.node(i));

    const int n2 = psi.grid2.n_points;
    for (int i1 = 0; i1 < psi.grid1.n_points; ++i1)
        for (int i2 = 0; i2 < n2; ++i2) {
            const std::size_t k = static_cast<std::size_t>(i1) * n2 + i2;
            const bool pass = mask[axis == 1 ? i1 : i2];
            (pass ? r.passed.amp[k] : r.absorbed.amp[k]) = psi.amp[k];
        }
    r.passed.norm_sq = r.passed.discrete_norm_sq();
    r.absorbed.norm_sq = r.absorbed.discrete_norm_sq();
    r.pass_probability = r.passed.norm_sq;
    return r;
}

SampledWavefunction2D condition_on_coincidence(const SampledWavefunction2D& passed) {
    const double p = passed.discrete_norm_sq();
    if (p < kPostSelectionFloor)
        throw EmptyPostSelectionError("post-selected mass below the floor");
    SampledWavefunction2D out = passed;
    const double scale = 1.0 / std::sqrt(p);
    for (Complex& a : out.amp) a *= scale;
    out.norm_sq = 1.0;
    return out;
}

SampledDensity1D marginal_density(const SampledWavefunction2D& psi, int axis) {
    require(axis == 1 || axis == 2, "axis must be 1 or 2");
    const int n1 = psi.grid1.n_points;
    const int n2 = psi.grid2.n_points;
    SampledDensity1D d;
    d.grid = (axis == 1) ? psi.grid1 : psi.grid2;
    d.values.assign(d.grid.n_points, 0.0);
    const double weight = (axis == 1) ? psi.grid2.spacing() : psi.grid1.spacing();
    for (int i1 = 0; i1 < n1; ++i1)
        for (int i2 = 0; i2 < n2; ++i2)
            d.values[axis == 1 ? i1 : i2] += std::norm(psi.at(i1, i2));
    for (double& v : d.values) v *= weight;
    return d;
}

SampledDensity1D density_of(const SampledWavefunction1D& psi) {
    SampledDensity1D d;
    d.grid = psi.grid;
    d.values.resize(psi.amp.size());
    for (std::size_t i = 0; i < psi.amp.size(); ++i) d.values[i] = std::norm(psi.amp[i]);
    return d;
}

double density_mean(const SampledDensity1D& d) {
    double m = 0.0, w = 0.0;
    for (int i = 0; i < d.grid.n_points; ++i) {
        m += d.values[i] * d.grid.node(i);
        w += d.values[i];
    }
    require(w > 0.0, "density carries no mass");
    return m / w;
}

double density_stdev(const SampledDensity1D& d) {
    const double mean = density_mean(d);
    double var = 0.0, w = 0.0;
    for (int i = 0; i < d.grid.n_points; ++i) {
        const double dy = d.grid.node(i) - mean;
        var += d.values[i] * dy * dy;
        w += d.values[i];
    }
    return std::sqrt(var / w);
}

namespace {

std::vector<double> smoothed(const SampledDensity1D& d, double sigma) {
    if (sigma <= 0.0) return d.values;
    const double dx = d.grid.spacing();
    const int radius = std::max(1, static_cast<int>(std::ceil(5.0 * sigma / dx)));
    std::vector<double> kernel(2 * radius + 1);
    for (int k = -radius; k <= radius; ++k)
        kernel[k + radius] = std::exp(-0.5 * (k * dx) * (k * dx) / (sigma * sigma));
    const int n = d.grid.n_points;
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0, wsum = 0.0;
        const int lo = std::max(0, i - radius);
        const int hi = std::min(n - 1, i + radius);
        for (int j = lo; j <= hi; ++j) {
            const double w = kernel[j - i + radius];
            acc += w * d.values[j];
            wsum += w;
        }
        out[i] = acc / wsum;
    }
    return out;
}

// first accepted minimum scanning from `start` in direction `step`;
// returns the refined position or nothing
std::optional<double> first_minimum(const std::vector<double>& v, const Grid1D& g, int start,
                                    int step, double peak, const MinimaSearchOptions& opts) {
    const int n = static_cast<int>(v.size());
    for (int i = start + step; i > 0 && i < n - 1; i += step) {
        if (!(v[i] < v[i - step] && v[i] <= v[i + step])) continue;
        // rebound beyond the dip decides whether this is a real minimum
        double rebound = 0.0;
        for (int j = i + step; j >= 0 && j < n; j += step) {
            rebound = std::max(rebound, v[j]);
            if (v[j] < v[i]) break; // curve fell below the dip: scan on from here
        }
        if (rebound >= std::max(opts.rebound_factor * v[i],
                                opts.rebound_min_fraction * peak)) {
            // parabolic refinement through the three points around the dip
            const double ym = v[i - 1], y0 = v[i], yp = v[i + 1];
            const double denom = ym - 2.0 * y0 + yp;
            const double shift = (denom > 0.0) ? 0.5 * (ym - yp) / denom : 0.0;
            return g.node(i) + shift * g.spacing();
        }
    }
    return std::nullopt;
}

} // namespace

std::optional<double> first_minima_width(const SampledDensity1D& d,
                                         const MinimaSearchOptions& opts) {
    if (d.grid.n_points < 8) return std::nullopt;
    const std::vector<double> v = smoothed(d, opts.smooth_sigma);
    int peak_idx = 0;
    for (int i = 1; i < d.grid.n_points; ++i)
        if (v[i] > v[peak_idx]) peak_idx = i;
    const double peak = v[peak_idx];
    if (peak <= 0.0) return std::nullopt;

    const auto right = first_minimum(v, d.grid, peak_idx, +1, peak, opts);
    const auto left = first_minimum(v, d.grid, peak_idx, -1, peak, opts);
    if (!right || !left) return std::nullopt;
    return *right - *left;
}

} // namespace poppersim::grid
