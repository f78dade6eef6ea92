// Command line front end: every subcommand reads a flat key = value config
// (all keys optional, unknown keys rejected), runs one experiment, and writes
// its result to --out atomically, or to stdout. Outputs embed the effective
// configuration and seed so a result file is enough to rerun it.
//
// Exit codes: 0 success, 1 computation failure (including a failed
// no-signaling audit), 2 usage or configuration errors.

#include "CLI11.hpp"

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "poppersim/diffraction.hpp"
#include "poppersim/experiment.hpp"
#include "poppersim/finite_qm.hpp"
#include "poppersim/gaussian.hpp"
#include "poppersim/grid.hpp"
#include "poppersim/io.hpp"
#include "poppersim/run_config.hpp"

namespace {

using poppersim::config::format_double;
using poppersim::config::format_int;
using poppersim::config::RunConfig;
namespace gauss = poppersim::gauss;
namespace grid = poppersim::grid;
namespace io = poppersim::io;
namespace qm = poppersim::qm;
namespace scenario = poppersim::scenario;
namespace slit = poppersim::slit;

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty())
        std::cout << content;
    else
        io::atomic_write(out_path, content);
}

RunConfig load(const std::string& config_path, const std::vector<std::string>& keys) {
    if (config_path.empty()) return RunConfig::empty();
    return RunConfig::parse_file(config_path, keys);
}

gauss::PhysicalParams read_phys(RunConfig& rc) {
    gauss::PhysicalParams p;
    p.hbar = rc.get_double("hbar", p.hbar);
    p.mass = rc.get_double("mass", p.mass);
    return p;
}

const std::vector<std::string> kScenarioKeys{
    "alpha",          "sigma",         "t",
    "hbar",           "mass",          "slit_l_width",
    "slit_r_width",   "n",             "extent1",
    "points1",        "extent2",       "points2",
    "boundary_mass_tol", "fraunhofer_v_max", "minima_smooth_sigma",
    "clicks",         "seed",          "click_bin_width"};

scenario::ScenarioConfig read_scenario(RunConfig& rc) {
    scenario::ScenarioConfig cfg;
    cfg.alpha = rc.get_double("alpha", cfg.alpha);
    cfg.sigma = rc.get_double("sigma", cfg.sigma);
    cfg.t = rc.get_double("t", cfg.t);
    cfg.phys = read_phys(rc);
    cfg.slit_l_width = rc.get_double("slit_l_width", cfg.slit_l_width);
    cfg.slit_r_width = rc.get_double("slit_r_width", cfg.slit_r_width);
    const int n = rc.get_int("n", 0);
    if (n > 0) cfg.n = n;
    cfg.grid.extent1 = rc.get_double("extent1", cfg.grid.extent1);
    cfg.grid.points1 = rc.get_int("points1", cfg.grid.points1);
    cfg.grid.extent2 = rc.get_double("extent2", cfg.grid.extent2);
    cfg.grid.points2 = rc.get_int("points2", cfg.grid.points2);
    cfg.grid.boundary_mass_tol =
        rc.get_double("boundary_mass_tol", cfg.grid.boundary_mass_tol);
    cfg.fraunhofer_v_max = rc.get_double("fraunhofer_v_max", cfg.fraunhofer_v_max);
    cfg.minima_smooth_sigma = rc.get_double("minima_smooth_sigma", cfg.minima_smooth_sigma);
    cfg.clicks = rc.get_int("clicks", cfg.clicks);
    cfg.seed = rc.get_u64("seed", cfg.seed);
    return cfg;
}

io::MetaPairs scenario_meta(const scenario::ScenarioConfig& e) {
    io::MetaPairs m;
    m.emplace_back("alpha", format_double(e.alpha));
    m.emplace_back("sigma", format_double(e.sigma));
    m.emplace_back("t", format_double(e.t));
    m.emplace_back("hbar", format_double(e.phys.hbar));
    m.emplace_back("mass", format_double(e.phys.mass));
    m.emplace_back("slit_l_width", format_double(e.slit_l_width));
    m.emplace_back("slit_r_width", format_double(e.slit_r_width));
    m.emplace_back("n", format_int(e.n ? *e.n : 0));
    m.emplace_back("extent1", format_double(e.grid.extent1));
    m.emplace_back("points1", format_int(e.grid.points1));
    m.emplace_back("extent2", format_double(e.grid.extent2));
    m.emplace_back("points2", format_int(e.grid.points2));
    m.emplace_back("boundary_mass_tol", format_double(e.grid.boundary_mass_tol));
    m.emplace_back("seed", std::to_string(e.seed));
    return m;
}

std::string list_text(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += format_double(values[i]);
    }
    return out;
}

// --- subcommand drivers -------------------------------------------------

struct NosigArgs {
    std::string config, out;
    std::uint64_t seed = 0;
    int trials = 0, d1 = 0, d2 = 0; // 0: take the config value
    bool seed_set = false;
};

int run_nosig(const NosigArgs& a) {
    RunConfig rc = load(a.config, {"trials", "d1", "d2", "seed"});
    const int trials = a.trials > 0 ? a.trials : rc.get_int("trials", 1000);
    const int d1 = a.d1 > 0 ? a.d1 : rc.get_int("d1", 2);
    const int d2 = a.d2 > 0 ? a.d2 : rc.get_int("d2", 2);
    const std::uint64_t seed = a.seed_set ? a.seed : rc.get_u64("seed", 0);
    const qm::AuditReport report =
        qm::run_no_signaling_audit(trials, qm::Dims{d1, d2}, seed);
    emit(a.out, qm::audit_report_json(report) + "\n");
    if (!report.failures.empty()) {
        std::cerr << "no-signaling audit FAILED: " << report.failures.size()
                  << " of " << report.trials << " trials exceeded "
                  << format_double(qm::kAuditDeviationBound) << "\n";
        return 1;
    }
    return 0;
}

int run_spread(const std::string& config, const std::string& out) {
    RunConfig rc = load(config, {"t", "sigma_min", "sigma_max", "steps", "extent",
                                 "points", "hbar", "mass"});
    const double t = rc.get_double("t", 2.0);
    const double sigma_min = rc.get_double("sigma_min", 0.25);
    const double sigma_max = rc.get_double("sigma_max", 4.0);
    const int steps = rc.get_int("steps", 25);
    const gauss::PhysicalParams phys = read_phys(rc);
    if (sigma_min <= 0.0 || sigma_max < sigma_min)
        throw std::invalid_argument("need 0 < sigma_min <= sigma_max");
    if (steps < 1) throw std::invalid_argument("steps must be at least 1");

    double extent = rc.get_double("extent", 0.0);
    if (extent == 0.0)
        extent = 12.0 * std::max(gauss::spread_after_time(sigma_min, t, phys),
                                 gauss::spread_after_time(sigma_max, t, phys));
    const int points = rc.get_int("points", 1024);
    const grid::Grid1D g = grid::symmetric_grid(extent, points);

    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < steps; ++i) {
        const double sigma =
            steps == 1 ? sigma_min
                       : sigma_min + i * (sigma_max - sigma_min) / (steps - 1);
        const auto evolved =
            grid::propagate_free(grid::discretize(gauss::GaussianMode{0.0, sigma}, g), t, phys);
        rows.push_back({format_double(sigma),
                        format_double(gauss::spread_after_time(sigma, t, phys)),
                        format_double(grid::density_stdev(grid::density_of(evolved)))});
    }
    io::MetaPairs meta{{"t", format_double(t)},
                       {"sigma_min", format_double(sigma_min)},
                       {"sigma_max", format_double(sigma_max)},
                       {"steps", format_int(steps)},
                       {"extent", format_double(extent)},
                       {"points", format_int(points)},
                       {"hbar", format_double(phys.hbar)},
                       {"mass", format_double(phys.mass)},
                       {"optimal_sigma", format_double(gauss::optimal_sigma(t, phys))}};
    emit(out, io::csv_table(meta, {"sigma", "predicted_stdev", "grid_stdev"}, rows));
    return 0;
}

int run_diffraction(const std::string& config, const std::string& out) {
    RunConfig rc = load(config, {"d", "t", "y_max", "points", "hbar", "mass"});
    const double d = rc.get_double("d", 1.0);
    const double t = rc.get_double("t", 1.0);
    const gauss::PhysicalParams phys = read_phys(rc);
    const slit::SlitEvolutionParams sp(d, t, phys);
    double y_max = rc.get_double("y_max", 0.0);
    if (y_max == 0.0) y_max = std::max(2.0 * d, slit::fraunhofer_width(sp));
    const int points = rc.get_int("points", 501);
    if (y_max <= 0.0) throw std::invalid_argument("y_max must be positive");
    if (points < 2) throw std::invalid_argument("points must be at least 2");

    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < points; ++i) {
        const double y = -y_max + 2.0 * y_max * i / (points - 1);
        rows.push_back({format_double(y), format_double(slit::slit_density_exact(y, sp)),
                        format_double(slit::slit_density_fraunhofer(y, sp))});
    }
    io::MetaPairs meta{{"d", format_double(d)},
                       {"t", format_double(t)},
                       {"hbar", format_double(phys.hbar)},
                       {"mass", format_double(phys.mass)},
                       {"y_max", format_double(y_max)},
                       {"points", format_int(points)},
                       {"v", format_double(sp.v())},
                       {"fraunhofer_width", format_double(slit::fraunhofer_width(sp))},
                       {"farfield_threshold_sigma_units",
                        format_double(slit::farfield_threshold_sigma_units())}};
    emit(out, io::csv_table(meta, {"y", "exact", "fraunhofer"}, rows));
    return 0;
}

struct PopperArgs {
    std::string config, out, l_density, r_density, l_clicks, r_clicks;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

int run_popper_cmd(const PopperArgs& a) {
    RunConfig rc = load(a.config, kScenarioKeys);
    scenario::ScenarioConfig cfg = read_scenario(rc);
    double bin_width = rc.get_double("click_bin_width", 0.0);
    if (a.seed_set) cfg.seed = a.seed;

    const scenario::ScenarioReport rep = scenario::run_popper(cfg);
    emit(a.out, io::scenario_report_json(rep));

    const io::MetaPairs base = scenario_meta(rep.effective);
    const auto with = [&base](const char* key, const std::string& value) {
        io::MetaPairs m = base;
        m.emplace_back(key, value);
        return m;
    };
    if (!a.l_density.empty())
        emit(a.l_density, io::density_csv(with("axis", "1"), rep.l_density));
    if (!a.r_density.empty())
        emit(a.r_density, io::density_csv(with("axis", "2"), rep.r_density));

    if (!a.l_clicks.empty() || !a.r_clicks.empty()) {
        if (rep.effective.clicks <= 0)
            throw std::invalid_argument("click output requested but clicks = 0");
        if (bin_width == 0.0) bin_width = rep.sigma_bar / 4.0;
        if (!a.l_clicks.empty()) {
            const auto h = scenario::sample_clicks(
                rep.l_density, rep.effective.clicks, bin_width,
                qm::derive_trial_seed(rep.effective.seed, 1));
            emit(a.l_clicks, io::click_histogram_csv(with("axis", "1"), h));
        }
        if (!a.r_clicks.empty()) {
            const auto h = scenario::sample_clicks(
                rep.r_density, rep.effective.clicks, bin_width,
                qm::derive_trial_seed(rep.effective.seed, 2));
            emit(a.r_clicks, io::click_histogram_csv(with("axis", "2"), h));
        }
    }
    return 0;
}

int run_collett_loudon(const std::string& config, const std::string& out) {
    std::vector<std::string> keys{"d_src", "r", "lambda", "s_r"};
    for (const auto& k : kScenarioKeys)
        if (k != "slit_r_width" && k != "n" && k != "clicks" && k != "click_bin_width")
            keys.push_back(k);
    RunConfig rc = load(config, keys);
    scenario::CollettLoudonParams p;
    p.d_src = rc.get_double("d_src", p.d_src);
    p.r = rc.get_double("r", p.r);
    p.lambda = rc.get_double("lambda", p.lambda);
    const std::vector<double> s_values =
        rc.get_double_list("s_r", {0.0631, 0.1122, 0.1995, 0.3548, 0.631});
    const scenario::ScenarioConfig base = read_scenario(rc);

    const auto cmp = scenario::collett_loudon_sweep(p, s_values, base);
    io::MetaPairs meta = scenario_meta(scenario::resolve(base));
    meta.emplace_back("s_r_values", list_text(s_values));
    emit(out, io::collett_loudon_csv(meta, cmp));
    return 0;
}

int run_epr_limit(const std::string& config, const std::string& out) {
    RunConfig rc = load(config, {"widths", "broad_sigma", "t", "extent", "points",
                                 "hbar", "mass"});
    const std::vector<double> widths = rc.get_double_list("widths", {1.0, 0.5, 0.25});
    const double broad_sigma = rc.get_double("broad_sigma", 4.0);
    const double t = rc.get_double("t", 2.0);
    const double extent = rc.get_double("extent", 30.0);
    const int points = rc.get_int("points", 512);
    const gauss::PhysicalParams phys = read_phys(rc);

    const grid::Grid1D g = grid::symmetric_grid(extent, points);
    const auto pts = scenario::epr_limit_probe(widths, broad_sigma, t, phys, g);
    io::MetaPairs meta{{"widths", list_text(widths)},
                       {"broad_sigma", format_double(broad_sigma)},
                       {"t", format_double(t)},
                       {"extent", format_double(extent)},
                       {"points", format_int(points)},
                       {"hbar", format_double(phys.hbar)},
                       {"mass", format_double(phys.mass)}};
    emit(out, io::epr_probe_csv(meta, pts, scenario::strictly_increasing_stdev(pts)));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coincidence-slit thought experiment: simulator and checks"};
    app.require_subcommand(1);

    NosigArgs nosig_args;
    CLI::App* nosig = app.add_subcommand(
        "nosig", "random-state audit that local operations cannot move a remote marginal");
    nosig->add_option("--config", nosig_args.config, "flat key = value config file");
    nosig->add_option("--out", nosig_args.out, "output path (stdout when omitted)");
    nosig->add_option("--trials", nosig_args.trials, "number of random trials");
    nosig->add_option("--d1", nosig_args.d1, "kept subsystem dimension");
    nosig->add_option("--d2", nosig_args.d2, "operated subsystem dimension");
    CLI::Option* nosig_seed = nosig->add_option("--seed", nosig_args.seed, "master seed");

    std::string spread_config, spread_out;
    CLI::App* spread = app.add_subcommand(
        "spread", "free packet spreading over a sigma sweep, grid versus closed form");
    spread->add_option("--config", spread_config, "flat key = value config file");
    spread->add_option("--out", spread_out, "output path (stdout when omitted)");

    std::string diff_config, diff_out;
    CLI::App* diff = app.add_subcommand(
        "diffraction", "evolved hard-slit density: exact curve and far-field limit");
    diff->add_option("--config", diff_config, "flat key = value config file");
    diff->add_option("--out", diff_out, "output path (stdout when omitted)");

    PopperArgs popper_args;
    CLI::App* popper = app.add_subcommand(
        "popper", "full coincidence-slit scenario with locality audit");
    popper->add_option("--config", popper_args.config, "flat key = value config file");
    popper->add_option("--out", popper_args.out, "report JSON path (stdout when omitted)");
    popper->add_option("--l-density", popper_args.l_density,
                       "write the evolved near-side coincidence marginal CSV here");
    popper->add_option("--r-density", popper_args.r_density,
                       "write the evolved slit-side coincidence marginal CSV here");
    popper->add_option("--l-clicks", popper_args.l_clicks,
                       "write a sampled near-side click histogram CSV here");
    popper->add_option("--r-clicks", popper_args.r_clicks,
                       "write a sampled slit-side click histogram CSV here");
    CLI::Option* popper_seed =
        popper->add_option("--seed", popper_args.seed, "override the config seed");

    std::string cl_config, cl_out;
    CLI::App* cl = app.add_subcommand(
        "collett-loudon", "remote-localization prediction against the simulated scatter");
    cl->add_option("--config", cl_config, "flat key = value config file");
    cl->add_option("--out", cl_out, "output path (stdout when omitted)");

    std::string epr_config, epr_out;
    CLI::App* epr = app.add_subcommand(
        "epr-limit", "sharpening the correlated quadrature broadens each marginal");
    epr->add_option("--config", epr_config, "flat key = value config file");
    epr->add_option("--out", epr_out, "output path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        nosig_args.seed_set = nosig_seed->count() > 0;
        popper_args.seed_set = popper_seed->count() > 0;
        if (nosig->parsed()) return run_nosig(nosig_args);
        if (spread->parsed()) return run_spread(spread_config, spread_out);
        if (diff->parsed()) return run_diffraction(diff_config, diff_out);
        if (popper->parsed()) return run_popper_cmd(popper_args);
        if (cl->parsed()) return run_collett_loudon(cl_config, cl_out);
        if (epr->parsed()) return run_epr_limit(epr_config, epr_out);
    } catch (const poppersim::config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid parameter: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2; // no subcommand selected
}
