#pragma once

#include <string>
#include <vector>

#include "poppersim/experiment.hpp"
#include "poppersim/finite_qm.hpp"
#include "poppersim/grid.hpp"

// Serialization of results: CSV tables with '#' metadata headers and JSON
// reports. All writes go through an atomic temp-file + rename so partially
// written outputs never appear under the final name. Formatting is locale
// independent ('.' decimal point, '\n' line endings) and deterministic, so
// identical runs produce identical bytes.

namespace poppersim::io {

using MetaPairs = std::vector<std::pair<std::string, std::string>>;

// Write content to path atomically (temp file in the same directory, rename).
void atomic_write(const std::string& path, const std::string& content);

// '# key = value' metadata block; stripping the leading '# ' yields a valid
// run configuration.
std::string metadata_block(const MetaPairs& meta);

// CSV with metadata header, a column-name row, and numeric rows. Each row
// must match the column count; absent optionals render as empty fields.
std::string csv_table(const MetaPairs& meta, const std::vector<std::string>& columns,
                      const std::vector<std::vector<std::string>>& rows);

std::string density_csv(const MetaPairs& meta, const grid::SampledDensity1D& density);

std::string scenario_report_json(const scenario::ScenarioReport& report);

// One report per row; fixed column set documented in the README.
std::string scenario_table_csv(const MetaPairs& meta,
                               const std::vector<scenario::ScenarioReport>& reports);

std::string collett_loudon_csv(const MetaPairs& meta,
                               const scenario::CollettLoudonComparison& cmp);

std::string epr_probe_csv(const MetaPairs& meta,
                          const std::vector<scenario::EprProbePoint>& pts,
                          bool monotonic_flag);

std::string click_histogram_csv(const MetaPairs& meta, const scenario::ClickHistogram& h);

} // namespace poppersim::io
