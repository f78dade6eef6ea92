#include "poppersim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "poppersim/diffraction.hpp"
#include "poppersim/errors.hpp"

namespace poppersim::scenario {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

void check_points(int n, const char* which) {
    if (!is_pow2(n) || n < 64)
        throw std::invalid_argument(std::string(which) +
                                    " must be a power of two, at least 64");
}

// closed-form first-minima separation of the evolved hard slit
double closed_form_width(double d, double t, const gauss::PhysicalParams& p) {
    return slit::fraunhofer_width(slit::SlitEvolutionParams(d, t, p));
}

double regime_v(double d, double t, const gauss::PhysicalParams& p) {
    if (t <= 0.0) return std::numeric_limits<double>::infinity();
    return slit::SlitEvolutionParams(d, t, p).v();
}

// relative mass in the strips kBoundaryStripCells wide at the box edges
double strip_mass(const grid::SampledWavefunction2D& psi) {
    const int n1 = psi.grid1.n_points;
    const int n2 = psi.grid2.n_points;
    const int b = grid::kBoundaryStripCells;
    double m = 0.0;
    for (int i1 = 0; i1 < n1; ++i1) {
        const bool edge1 = i1 < b || i1 >= n1 - b;
        for (int i2 = 0; i2 < n2; ++i2) {
            if (!edge1 && i2 >= b && i2 < n2 - b) continue;
            m += std::norm(psi.at(i1, i2));
        }
    }
    m *= psi.grid1.spacing() * psi.grid2.spacing();
    const double total = psi.discrete_norm_sq();
    return total > 0.0 ? m / total : 0.0;
}

} // namespace

ScenarioConfig resolve(const ScenarioConfig& cfg) {
    ScenarioConfig e = cfg;
    require(e.t >= 0.0, "time must be nonnegative");
    require(e.phys.hbar > 0.0 && e.phys.mass > 0.0, "hbar and mass must be positive");
    require(e.alpha > 0.0, "branch separation must be positive");
    check_points(e.grid.points1, "grid points1");
    check_points(e.grid.points2, "grid points2");
    require(e.grid.boundary_mass_tol > 0.0, "boundary mass tolerance must be positive");
    require(e.fraunhofer_v_max > 0.0, "fraunhofer_v_max must be positive");
    require(e.clicks >= 0, "click count must be nonnegative");

    if (e.sigma == 0.0) e.sigma = gauss::optimal_sigma(e.t, e.phys);
    require(e.sigma > 0.0, "sigma must be positive");
    require(e.alpha >= 8.0 * e.sigma, "branches must sit at least eight sigma apart");

    if (e.n) {
        require(*e.n >= 1, "narrowing factor must be at least 1");
        e.slit_r_width = e.sigma / *e.n;
    } else if (e.slit_r_width == 0.0) {
        e.slit_r_width = 6.0 * e.sigma;
    }
    require(e.slit_r_width > 0.0, "slit width must be positive");

    if (e.slit_l_width == 0.0) e.slit_l_width = 2.25 * (e.alpha + e.sigma);
    require(e.slit_l_width > 2.0 * (e.alpha + e.sigma),
            "near slit must clear all three branches");

    if (e.minima_smooth_sigma < 0.0) e.minima_smooth_sigma = e.sigma;

    const double sigma_bar = gauss::spread_after_time(e.sigma, e.t, e.phys);
    const double containment = e.alpha + 10.0 * sigma_bar;
    if (e.grid.extent1 == 0.0) e.grid.extent1 = containment;
    if (e.grid.extent2 == 0.0) {
        const double v = regime_v(e.slit_r_width, e.t, e.phys);
        if (e.n && v < e.fraunhofer_v_max) {
            // Far-field run: snap the box so the slit covers an odd number of
            // whole cells with a node at its center. The sampled width is then
            // exactly the requested one and the discrete spectrum puts the
            // first zeros exactly where the closed form does.
            const double half_lobe =
                0.5 * closed_form_width(e.slit_r_width, e.t, e.phys);
            // Margin past the first zeros: the box images of the 1/y^2 slit
            // tails raise the floor between lobes like 1/(2 extent - y)^2, so
            // a tight box can bury the first minima. 1.6 keeps the floor a
            // few times below the first side lobe while still fitting a
            // 3-cell slit for the standard narrowing scenarios.
            const double needed = std::max(1.6 * half_lobe, containment);
            int cells = static_cast<int>(
                std::floor(e.grid.points2 * e.slit_r_width / (2.0 * needed)));
            if (cells % 2 == 0) --cells;
            if (cells < 3)
                throw GridTooSmallError(
                    "cannot resolve the slit and contain its first lobe; "
                    "more far-axis points needed");
            e.grid.extent2 = e.grid.points2 * e.slit_r_width / (2.0 * cells);
        } else {
            e.grid.extent2 = containment;
        }
    }
    require(e.grid.extent1 > 0.0 && e.grid.extent2 > 0.0, "extents must be positive");
    return e;
}

ScenarioReport run_popper(const ScenarioConfig& cfg) {
    const ScenarioConfig e = resolve(cfg);
    ScenarioReport rep;
    rep.effective = e;
    rep.sigma_bar = gauss::spread_after_time(e.sigma, e.t, e.phys);
    rep.v = regime_v(e.slit_r_width, e.t, e.phys);

    const grid::Grid1D g1 = grid::symmetric_grid(e.grid.extent1, e.grid.points1);
    const grid::Grid1D g2 = grid::symmetric_grid(e.grid.extent2, e.grid.points2);
    const gauss::PopperState state(e.alpha, e.sigma);

    grid::ApertureResult at_l;
    {
        const auto psi0 = grid::discretize(state, g1, g2);
        at_l = grid::apply_aperture(psi0, 1, grid::Aperture(0.0, e.slit_l_width));
    }
    at_l.absorbed = {}; // the near-slit reject never enters any readout
    auto at_r = grid::apply_aperture(at_l.passed, 2, grid::Aperture(0.0, e.slit_r_width));
    rep.pass_probability = at_r.pass_probability; // joint coincidence mass

    // Only the coincidence readout is sensitive to wrap-around, so only it
    // runs under the configured boundary guard. The reference and absorbed
    // evolutions feed the marginal-sum identity, which is exact under any
    // unitary on the far axis.
    const grid::PropagationOptions guarded{e.grid.boundary_mass_tol};
    const grid::PropagationOptions unguarded{1.0};

    const auto conditioned = grid::condition_on_coincidence(at_r.passed);
    at_r.passed = {};
    const auto evolved = grid::propagate_free(conditioned, e.t, e.phys, guarded);
    rep.boundary_strip_mass = strip_mass(evolved);
    rep.l_density = grid::marginal_density(evolved, 1);
    rep.r_density = grid::marginal_density(evolved, 2);
    rep.l_conditional_stdev = grid::density_stdev(rep.l_density);
    rep.r_conditional_stdev = grid::density_stdev(rep.r_density);

    // Locality audit: the near-side split plus evolution must leave the
    // far-side marginal of passed + absorbed equal to the no-slit baseline.
    const auto m_ref =
        grid::marginal_density(grid::propagate_free(at_l.passed, e.t, e.phys, unguarded), 1);
    const auto m_abs =
        grid::marginal_density(grid::propagate_free(at_r.absorbed, e.t, e.phys, unguarded), 1);
    double dist = 0.0;
    for (int i = 0; i < g1.n_points; ++i) {
        const double recombined =
            rep.pass_probability * rep.l_density.values[i] + m_abs.values[i];
        dist = std::max(dist, std::abs(recombined - m_ref.values[i]));
    }
    rep.l_marginal_distance = dist;

    if (e.t > 0.0) {
        rep.predicted_ratio =
            closed_form_width(e.slit_r_width, e.t, e.phys) / (6.0 * rep.sigma_bar);
        const double half_lobe = 0.5 * closed_form_width(e.slit_r_width, e.t, e.phys);
        if (rep.v < e.fraunhofer_v_max && 1.25 * half_lobe <= e.grid.extent2) {
            grid::MinimaSearchOptions mo;
            mo.smooth_sigma = e.minima_smooth_sigma;
            rep.r_first_minima_width = grid::first_minima_width(rep.r_density, mo);
            if (rep.r_first_minima_width)
                rep.measured_ratio = *rep.r_first_minima_width / (6.0 * rep.sigma_bar);
        }
    }
    return rep;
}

ClickHistogram sample_clicks(const grid::SampledDensity1D& density, int count,
                             double bin_width, std::uint64_t seed) {
    require(count >= 0, "click count must be nonnegative");
    require(bin_width > 0.0, "bin width must be positive");
    require(density.grid.n_points > 0 &&
                density.values.size() == static_cast<std::size_t>(density.grid.n_points),
            "density and grid sizes must agree");

    std::vector<double> cdf(density.values.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < density.values.size(); ++i) {
        require(density.values[i] >= 0.0, "density must be nonnegative");
        acc += density.values[i];
        cdf[i] = acc;
    }
    require(acc > 0.0, "density carries no mass");

    ClickHistogram h;
    h.bin_width = bin_width;
    h.seed = seed;
    h.origin = bin_width * std::floor(density.grid.y_min / bin_width);
    const double span = density.grid.y_max + 0.5 * density.grid.spacing() - h.origin;
    const int n_bins = std::max(1, static_cast<int>(std::ceil(span / bin_width)));
    h.counts.assign(n_bins, 0);

    std::mt19937_64 rng(seed);
    const auto uniform = [&rng]() {
        return static_cast<double>(rng() >> 11) * 0x1.0p-53; // in [0, 1)
    };
    const double dx = density.grid.spacing();
    for (int c = 0; c < count; ++c) {
        const double r = uniform() * acc;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
        const int cell = std::min<int>(static_cast<int>(it - cdf.begin()),
                                       density.grid.n_points - 1);
        const double below = cell > 0 ? cdf[cell - 1] : 0.0;
        const double weight = cdf[cell] - below;
        const double frac = weight > 0.0 ? (r - below) / weight : 0.5;
        const double y = density.grid.node(cell) + (frac - 0.5) * dx;
        int b = static_cast<int>(std::floor((y - h.origin) / bin_width));
        b = std::clamp(b, 0, n_bins - 1);
        ++h.counts[b];
    }
    return h;
}

double collett_loudon_delta_l(const CollettLoudonParams& p, double s_r) {
    require(p.d_src > 0.0 && p.r > 0.0 && p.lambda > 0.0,
            "geometry parameters must be positive");
    require(s_r > 0.0, "slit half-width must be positive");
    const double geometric = (p.d_src + p.r) / p.d_src * s_r;
    const double diffractive = p.r * p.lambda / (4.0 * kPi * s_r);
    return std::hypot(geometric, diffractive);
}

double collett_loudon_optimal_s(const CollettLoudonParams& p) {
    require(p.d_src > 0.0 && p.r > 0.0 && p.lambda > 0.0,
            "geometry parameters must be positive");
    return std::sqrt(p.r * p.lambda * p.d_src / (4.0 * kPi * (p.d_src + p.r)));
}

CollettLoudonComparison collett_loudon_sweep(const CollettLoudonParams& p,
                                             const std::vector<double>& s_r_values,
                                             const ScenarioConfig& base) {
    require(!s_r_values.empty(), "sweep needs at least one slit half-width");
    CollettLoudonComparison cmp;
    cmp.params = p;
    double pred_min = std::numeric_limits<double>::infinity(), pred_max = 0.0;
    double sim_min = std::numeric_limits<double>::infinity(), sim_max = 0.0;
    for (double s_r : s_r_values) {
        CollettLoudonRow row;
        row.s_r = s_r;
        row.predicted_delta_l = collett_loudon_delta_l(p, s_r);
        row.slit_r_width = 2.0 * s_r;

        ScenarioConfig cfg = base;
        cfg.n.reset();
        cfg.slit_r_width = row.slit_r_width;
        // Narrow slits throw their diffraction tails all the way around the
        // far axis. Only the wrap-immune near-side marginal is read here, so
        // the boundary guard is off for the sweep.
        cfg.grid.boundary_mass_tol = 1.0;
        const ScenarioReport rep = run_popper(cfg);
        row.sim_l_stdev = rep.l_conditional_stdev;
        row.pass_probability = rep.pass_probability;

        pred_min = std::min(pred_min, row.predicted_delta_l);
        pred_max = std::max(pred_max, row.predicted_delta_l);
        sim_min = std::min(sim_min, row.sim_l_stdev);
        sim_max = std::max(sim_max, row.sim_l_stdev);
        cmp.rows.push_back(row);
    }
    cmp.prediction_ratio = pred_max / pred_min;
    cmp.sim_ratio = sim_max / sim_min;
    return cmp;
}

std::vector<EprProbePoint> epr_limit_probe(const std::vector<double>& widths,
                                           double broad_sigma, double t,
                                           const gauss::PhysicalParams& p,
                                           const grid::Grid1D& g) {
    require(!widths.empty(), "probe needs at least one width");
    require(broad_sigma > 0.0, "broad quadrature width must be positive");
    require(t >= 0.0, "time must be nonnegative");
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    std::vector<EprProbePoint> out;
    out.reserve(widths.size());
    for (double w : widths) {
        require(w > 0.0, "quadrature width must be positive");
        grid::SampledWavefunction2D psi;
        psi.grid1 = g;
        psi.grid2 = g;
        psi.amp.resize(static_cast<std::size_t>(g.n_points) * g.n_points);
        for (int i1 = 0; i1 < g.n_points; ++i1) {
            const double y1 = g.node(i1);
            for (int i2 = 0; i2 < g.n_points; ++i2) {
                const double y2 = g.node(i2);
                const double s = (y1 + y2) * inv_sqrt2;
                const double u = (y1 - y2) * inv_sqrt2;
                psi.at(i1, i2) = std::exp(-s * s / (4.0 * w * w) -
                                          u * u / (4.0 * broad_sigma * broad_sigma));
            }
        }
        const double norm = psi.discrete_norm_sq();
        require(norm > 0.0, "probe state vanished on the grid");
        const double scale = 1.0 / std::sqrt(norm);
        for (grid::Complex& a : psi.amp) a *= scale;
        psi.norm_sq = 1.0;

        const auto evolved = grid::propagate_free(psi, t, p);
        out.push_back({w, grid::density_stdev(grid::marginal_density(evolved, 1))});
    }
    return out;
}

bool strictly_increasing_stdev(const std::vector<EprProbePoint>& pts) {
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (!(pts[i].marginal_stdev > pts[i - 1].marginal_stdev)) return false;
    return true;
}

} // namespace poppersim::scenario
