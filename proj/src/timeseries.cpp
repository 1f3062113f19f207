#include "greenmesh/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "greenmesh/errors.hpp"
#include "greenmesh/rng.hpp"

namespace greenmesh {

std::string unit_name(Unit u) {
    switch (u) {
        case Unit::normalized: return "normalized";
        case Unit::joules_per_slot: return "joules-per-slot";
        case Unit::jobs_per_slot: return "jobs-per-slot";
    }
    return "?";
}

Unit unit_from_name(const std::string& name) {
    if (name == "normalized") return Unit::normalized;
    if (name == "joules-per-slot") return Unit::joules_per_slot;
    if (name == "jobs-per-slot") return Unit::jobs_per_slot;
    throw ValidationError("unknown unit tag: " + name);
}

double TimeSeries::max_value() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, v);
    return m;
}

void TimeSeries::validate() const {
    if (slot_seconds <= 0) throw ValidationError("slot_seconds must be positive");
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (!std::isfinite(v))
            throw ValidationError("sample " + std::to_string(i) + " is not finite");
        if (v < 0.0)
            throw ValidationError("sample " + std::to_string(i) + " is negative");
        if (unit == Unit::normalized && v > 1.0)
            throw ValidationError("sample " + std::to_string(i) +
                                  " exceeds 1 in a normalized series");
    }
}

namespace {

bool parse_sample(const std::string& tok, double& out) {
    std::size_t pos = 0;
    try {
        out = std::stod(tok, &pos);
    } catch (const std::exception&) {
        return false;
    }
    // Reject trailing garbage ("1.5x").
    while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
    return pos == tok.size();
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

} // namespace

TimeSeries load_trace_csv(std::istream& in, Unit unit) {
    TimeSeries ts;
    ts.unit = unit;
    std::string line;
    int lineno = 0;
    bool seen_content = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        std::stringstream row(stripped);
        std::string tok;
        bool first_tok = true;
        while (std::getline(row, tok, ',')) {
            tok = trim(tok);
            if (tok.empty()) continue;
            double v = 0.0;
            if (!parse_sample(tok, v)) {
                // Tolerate one header line (e.g. "value") at the top.
                if (!seen_content && first_tok) {
                    seen_content = true;
                    break;
                }
                throw ParseError("line " + std::to_string(lineno) +
                                 ": malformed number '" + tok + "'");
            }
            if (v < 0.0)
                throw ValidationError("line " + std::to_string(lineno) +
                                      ": negative sample " + tok);
            ts.values.push_back(v);
            first_tok = false;
            seen_content = true;
        }
    }
    ts.validate();
    return ts;
}

void write_trace_csv(std::ostream& out, const TimeSeries& ts) {
    char buf[64];
    for (double v : ts.values) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v);
        out << buf;
    }
}

TimeSeries normalize(const TimeSeries& ts) {
    ts.validate();
    TimeSeries out = ts;
    out.unit = Unit::normalized;
    const double m = ts.max_value();
    if (m > 0.0)
        for (double& v : out.values) v /= m;
    return out;
}

std::vector<DailyProfile> slice_days(const TimeSeries& ts, int slots_per_day) {
    if (slots_per_day < 1) throw ValidationError("slots_per_day must be >= 1");
    std::vector<DailyProfile> days;
    const std::size_t n = ts.values.size() / static_cast<std::size_t>(slots_per_day);
    days.reserve(n);
    for (std::size_t d = 0; d < n; ++d) {
        auto begin = ts.values.begin() + static_cast<std::ptrdiff_t>(d) * slots_per_day;
        days.emplace_back(begin, begin + slots_per_day);
    }
    return days;
}

std::string trace_kind_name(TraceKind k) {
    switch (k) {
        case TraceKind::traffic: return "traffic";
        case TraceKind::solar: return "solar";
        case TraceKind::wind: return "wind";
    }
    return "?";
}

TraceKind trace_kind_from_name(const std::string& name) {
    if (name == "traffic") return TraceKind::traffic;
    if (name == "solar") return TraceKind::solar;
    if (name == "wind") return TraceKind::wind;
    throw ValidationError("unknown trace kind: " + name);
}

const std::vector<TrafficShape>& traffic_cluster_shapes() {
    // Residential-evening, business-day, nightlife, and flat-suburban
    // profiles; separated enough that clustering recovers them.
    static const std::vector<TrafficShape> shapes = {
        {0.10, 0.25, 9.0, 2.5, 0.80, 20.5, 2.2},
        {0.08, 0.80, 10.5, 2.0, 0.35, 15.5, 3.0},
        {0.15, 0.30, 13.0, 3.0, 0.72, 22.5, 1.8},
        {0.30, 0.35, 11.0, 4.5, 0.38, 18.5, 3.5},
    };
    return shapes;
}

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

double hump(double hour, double peak, double center, double width) {
    const double d = hour - center;
    return peak * std::exp(-d * d / (2.0 * width * width));
}

} // namespace

TimeSeries synth_traffic_profile(const TrafficShape& s, int days,
                                 std::uint64_t seed, double noise,
                                 int slots_per_day) {
    if (days < 1) throw ValidationError("days must be >= 1");
    if (noise < 0.0) throw ValidationError("noise must be >= 0");
    Rng rng(seed);
    TimeSeries ts;
    ts.unit = Unit::normalized;
    ts.values.reserve(static_cast<std::size_t>(days) * slots_per_day);
    const double slot_hours = 24.0 / slots_per_day;
    for (int d = 0; d < days; ++d) {
        for (int t = 0; t < slots_per_day; ++t) {
            const double hour = (t + 0.5) * slot_hours;
            double v = s.base + hump(hour, s.peak1, s.center1, s.width1) +
                       hump(hour, s.peak2, s.center2, s.width2);
            v += noise * rng.gauss();
            ts.values.push_back(clamp01(v));
        }
    }
    return ts;
}

TimeSeries synth_trace(TraceKind kind, int days, std::uint64_t seed,
                       double noise, int slots_per_day) {
    if (days < 1) throw ValidationError("days must be >= 1");
    if (noise < 0.0) throw ValidationError("noise must be >= 0");
    if (kind == TraceKind::traffic) {
        // Canonical double-hump day: quiet early morning, midday shoulder,
        // evening peak.
        const TrafficShape s{0.15, 0.55, 11.0, 2.8, 0.75, 20.0, 2.2};
        return synth_traffic_profile(s, days, seed, noise, slots_per_day);
    }
    Rng rng(seed);
    TimeSeries ts;
    ts.unit = Unit::normalized;
    ts.values.reserve(static_cast<std::size_t>(days) * slots_per_day);
    const double slot_hours = 24.0 / slots_per_day;
    if (kind == TraceKind::solar) {
        // Bell over daylight hours, rebased so the curve hits zero exactly at
        // sunrise/sunset; multiplicative noise (cloud cover) keeps night at 0.
        const double center = 12.5, sigma = 2.6, edge_hour = 6.5;
        const double de = edge_hour - center;
        const double edge = std::exp(-de * de / (2.0 * sigma * sigma));
        for (int d = 0; d < days; ++d) {
            for (int t = 0; t < slots_per_day; ++t) {
                const double hour = (t + 0.5) * slot_hours;
                const double dh = hour - center;
                const double raw = std::exp(-dh * dh / (2.0 * sigma * sigma));
                double v = std::max(0.0, (raw - edge) / (1.0 - edge));
                if (v > 0.0) v *= 1.0 + noise * rng.gauss();
                ts.values.push_back(clamp01(v));
            }
        }
        return ts;
    }
    // wind: mean-reverting walk around a moderate level, never negative.
    double x = 0.45;
    for (int d = 0; d < days; ++d) {
        for (int t = 0; t < slots_per_day; ++t) {
            x += 0.08 * (0.45 - x) + noise * rng.gauss();
            x = clamp01(x);
            ts.values.push_back(x);
        }
    }
    return ts;
}

std::pair<double, double> split_workloads(double L, double ratio) {
    if (L < 0.0) throw ValidationError("load must be >= 0");
    if (ratio < 0.0 || ratio > 1.0) throw ValidationError("ratio must be in [0,1]");
    const double sensitive = ratio * L;
    return {sensitive, L - sensitive};
}

} // namespace greenmesh
