#include "poppersim/io.hpp"

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "poppersim/run_config.hpp"

namespace poppersim::io {

namespace {

namespace fs = std::filesystem;

using config::format_double;
using config::format_int;

std::string fmt(double v) { return format_double(v); }

std::string opt_fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string{}; }

std::string join(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += fields[i];
    }
    return out;
}

std::string json_number(double v) { return fmt(v); }

void append_field(std::string& out, const char* key, const std::string& value, bool last = false) {
    out += '"';
    out += key;
    out += "\": ";
    out += value;
    if (!last) out += ", ";
}

} // namespace

void atomic_write(const std::string& path, const std::string& content) {
    static std::atomic<unsigned> counter{0};
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid()) + "." +
                         std::to_string(counter.fetch_add(1));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out.good()) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("failed writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        std::error_code ec2;
        fs::remove(tmp, ec2);
        throw std::runtime_error("cannot move temporary onto '" + path + "': " + ec.message());
    }
}

std::string metadata_block(const MetaPairs& meta) {
    std::string out;
    for (const auto& [key, value] : meta) {
        out += "# ";
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    }
    return out;
}

std::string csv_table(const MetaPairs& meta, const std::vector<std::string>& columns,
                      const std::vector<std::vector<std::string>>& rows) {
    std::string out = metadata_block(meta);
    out += join(columns);
    out += '\n';
    for (const auto& row : rows) {
        if (row.size() != columns.size())
            throw std::invalid_argument("csv row width does not match the column count");
        out += join(row);
        out += '\n';
    }
    return out;
}

std::string density_csv(const MetaPairs& meta, const grid::SampledDensity1D& density) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(density.values.size());
    for (int i = 0; i < density.grid.n_points; ++i)
        rows.push_back({fmt(density.grid.node(i)), fmt(density.values[i])});
    return csv_table(meta, {"y", "density"}, rows);
}

std::string scenario_report_json(const scenario::ScenarioReport& report) {
    const scenario::ScenarioConfig& e = report.effective;
    std::string eff = "{";
    append_field(eff, "alpha", json_number(e.alpha));
    append_field(eff, "sigma", json_number(e.sigma));
    append_field(eff, "t", json_number(e.t));
    append_field(eff, "hbar", json_number(e.phys.hbar));
    append_field(eff, "mass", json_number(e.phys.mass));
    append_field(eff, "slit_l_width", json_number(e.slit_l_width));
    append_field(eff, "slit_r_width", json_number(e.slit_r_width));
    append_field(eff, "n", format_int(e.n ? *e.n : 0)); // 0: no narrowing factor
    append_field(eff, "extent1", json_number(e.grid.extent1));
    append_field(eff, "points1", format_int(e.grid.points1));
    append_field(eff, "extent2", json_number(e.grid.extent2));
    append_field(eff, "points2", format_int(e.grid.points2));
    append_field(eff, "boundary_mass_tol", json_number(e.grid.boundary_mass_tol));
    append_field(eff, "fraunhofer_v_max", json_number(e.fraunhofer_v_max));
    append_field(eff, "minima_smooth_sigma", json_number(e.minima_smooth_sigma));
    append_field(eff, "clicks", format_int(e.clicks));
    append_field(eff, "seed", std::to_string(e.seed), true);
    eff += '}';

    const auto opt_json = [](const std::optional<double>& v) {
        return v ? json_number(*v) : std::string("null");
    };

    std::string out = "{\n";
    const auto line = [&out](const char* key, const std::string& value, bool last = false) {
        out += "  \"";
        out += key;
        out += "\": ";
        out += value;
        out += last ? "\n" : ",\n";
    };
    line("effective", eff);
    line("sigma_bar", json_number(report.sigma_bar));
    line("v", json_number(report.v));
    line("pass_probability", json_number(report.pass_probability));
    line("l_conditional_stdev", json_number(report.l_conditional_stdev));
    line("r_conditional_stdev", json_number(report.r_conditional_stdev));
    line("l_marginal_distance", json_number(report.l_marginal_distance));
    line("r_first_minima_width", opt_json(report.r_first_minima_width));
    line("measured_ratio", opt_json(report.measured_ratio));
    line("predicted_ratio", json_number(report.predicted_ratio));
    line("boundary_strip_mass", json_number(report.boundary_strip_mass), true);
    out += "}\n";
    return out;
}

std::string scenario_table_csv(const MetaPairs& meta,
                               const std::vector<scenario::ScenarioReport>& reports) {
    const std::vector<std::string> columns{
        "n", "slit_r_width", "pass_probability", "l_conditional_stdev",
        "r_conditional_stdev", "l_marginal_distance", "r_first_minima_width",
        "measured_ratio", "predicted_ratio", "sigma_bar", "v", "boundary_strip_mass"};
    std::vector<std::vector<std::string>> rows;
    rows.reserve(reports.size());
    for (const auto& r : reports) {
        rows.push_back({r.effective.n ? format_int(*r.effective.n) : std::string{},
                        fmt(r.effective.slit_r_width), fmt(r.pass_probability),
                        fmt(r.l_conditional_stdev), fmt(r.r_conditional_stdev),
                        fmt(r.l_marginal_distance), opt_fmt(r.r_first_minima_width),
                        opt_fmt(r.measured_ratio), fmt(r.predicted_ratio), fmt(r.sigma_bar),
                        fmt(r.v), fmt(r.boundary_strip_mass)});
    }
    return csv_table(meta, columns, rows);
}

std::string collett_loudon_csv(const MetaPairs& meta,
                               const scenario::CollettLoudonComparison& cmp) {
    MetaPairs full = meta;
    full.emplace_back("d_src", fmt(cmp.params.d_src));
    full.emplace_back("r", fmt(cmp.params.r));
    full.emplace_back("lambda", fmt(cmp.params.lambda));
    full.emplace_back("prediction_ratio", fmt(cmp.prediction_ratio));
    full.emplace_back("sim_ratio", fmt(cmp.sim_ratio));
    std::vector<std::vector<std::string>> rows;
    rows.reserve(cmp.rows.size());
    for (const auto& row : cmp.rows)
        rows.push_back({fmt(row.s_r), fmt(row.predicted_delta_l), fmt(row.slit_r_width),
                        fmt(row.sim_l_stdev), fmt(row.pass_probability)});
    return csv_table(full,
                     {"s_r", "predicted_delta_l", "slit_r_width", "sim_l_stdev",
                      "pass_probability"},
                     rows);
}

std::string epr_probe_csv(const MetaPairs& meta,
                          const std::vector<scenario::EprProbePoint>& pts,
                          bool monotonic_flag) {
    MetaPairs full = meta;
    full.emplace_back("monotonic_increase", monotonic_flag ? "true" : "false");
    std::vector<std::vector<std::string>> rows;
    rows.reserve(pts.size());
    for (const auto& p : pts) rows.push_back({fmt(p.width), fmt(p.marginal_stdev)});
    return csv_table(full, {"width", "marginal_stdev"}, rows);
}

std::string click_histogram_csv(const MetaPairs& meta, const scenario::ClickHistogram& h) {
    MetaPairs full = meta;
    full.emplace_back("bin_width", fmt(h.bin_width));
    full.emplace_back("origin", fmt(h.origin));
    std::vector<std::vector<std::string>> rows;
    rows.reserve(h.counts.size());
    for (std::size_t b = 0; b < h.counts.size(); ++b)
        rows.push_back({fmt(h.bin_center(static_cast<int>(b))),
                        format_int(h.counts[b])});
    return csv_table(full, {"bin_center", "count"}, rows);
}

} // namespace poppersim::io
