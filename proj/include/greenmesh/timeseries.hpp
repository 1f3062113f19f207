#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace greenmesh {

enum class Unit { normalized, joules_per_slot, jobs_per_slot };

std::string unit_name(Unit u);
Unit unit_from_name(const std::string& name);

struct TimeSeries {
    std::vector<double> values;
    int slot_seconds = 1800;
    Unit unit = Unit::normalized;

    std::size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }
    double max_value() const; // 0 for an empty series

    // Throws ValidationError on non-finite or negative samples, or samples
    // outside [0,1] when unit == normalized.
    void validate() const;
};

// One day of samples; length must equal slots_per_day wherever it is used.
using DailyProfile = std::vector<double>;

// Accepts one value per line or comma-separated values; a single leading
// non-numeric header line is skipped.
TimeSeries load_trace_csv(std::istream& in, Unit unit);
void write_trace_csv(std::ostream& out, const TimeSeries& ts);

// Divides by the series maximum; all-zero input stays all-zero.
TimeSeries normalize(const TimeSeries& ts);

// Consecutive non-overlapping windows; trailing partial day discarded.
std::vector<DailyProfile> slice_days(const TimeSeries& ts, int slots_per_day);

enum class TraceKind { traffic, solar, wind };

std::string trace_kind_name(TraceKind k);
TraceKind trace_kind_from_name(const std::string& name);

// Diurnal traffic shape: a baseline plus two Gaussian humps (hours).
struct TrafficShape {
    double base;
    double peak1, center1, width1;
    double peak2, center2, width2;
};

// The four representative daily-load categories used by the synthetic
// scenario (distinct peak hours and duty cycles).
const std::vector<TrafficShape>& traffic_cluster_shapes();

TimeSeries synth_traffic_profile(const TrafficShape& shape, int days,
                                 std::uint64_t seed, double noise,
                                 int slots_per_day = 48);

// kind-shaped synthetic series, normalized to [0,1], deterministic per seed.
// traffic: double-hump diurnal with an early-morning trough; solar: daylight
// bell, exactly zero at night; wind: mean-reverting positive random walk.
TimeSeries synth_trace(TraceKind kind, int days, std::uint64_t seed,
                       double noise, int slots_per_day = 48);

// (l_sensitive, l_tolerant) = (ratio * L, L - ratio * L).
std::pair<double, double> split_workloads(double L, double ratio);

} // namespace greenmesh
