#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "greenmesh/sim.hpp"

namespace greenmesh {

// Re-reads a metrics CSV produced by write_metrics_csv. Only the pinned
// columns are recovered; per-row extras (offered/kept/...) stay zero.
// slots_per_day and baseline are left at their defaults — callers that know
// the run configuration should set them before deriving summaries.
MetricsLog read_metrics_csv(std::istream& in);

// Human-readable run summary built strictly from pinned CSV columns, so a
// regenerated report matches the one written at simulation time.
std::string render_summary(const MetricsLog& log, const std::string& controller);

// Plot data: "hour mean_savings_pct" rows, hours 0..23.
std::string render_hourly(const MetricsLog& log);

// Plot data for sweeps: x llc_savings open_savings llc_theta_mec open_theta_mec.
std::string render_sweep(const std::vector<SweepRow>& rows, const std::string& xname);

// Plot data for forecast overlays: "step predicted [real]".
std::string render_forecast(const std::vector<double>& predicted,
                            const std::vector<double>& real);

std::uint64_t fnv1a64(const std::string& text);

// Content-derived run id: subcommand plus hash of the resolved inputs.
std::string run_id(const std::string& subcommand, const std::string& resolved);

} // namespace greenmesh
