#include "greenmesh/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "greenmesh/errors.hpp"

namespace greenmesh {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string tok;
    std::stringstream ss(line);
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
}

double num(const std::string& tok, int lineno) {
    try {
        std::size_t pos = 0;
        double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError("metrics csv line " + std::to_string(lineno) +
                         ": bad number '" + tok + "'");
    }
}

} // namespace

MetricsLog read_metrics_csv(std::istream& in) {
    static const char* kHeader =
        "slot,site,theta_bs,theta_mec,theta_site,battery,d_active,"
        "w_local,w_in,w_out,qos_penalty,deficit,savings_pct";
    std::string line;
    if (!std::getline(in, line)) throw ParseError("metrics csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) throw ParseError("metrics csv: unexpected header");

    MetricsLog log;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto toks = split_csv(line);
        if (toks.size() != 13)
            throw ParseError("metrics csv line " + std::to_string(lineno) +
                             ": expected 13 fields, got " + std::to_string(toks.size()));
        MetricsRow r;
        r.slot = static_cast<int>(num(toks[0], lineno));
        r.site = static_cast<int>(num(toks[1], lineno));
        r.theta_bs = num(toks[2], lineno);
        r.theta_mec = num(toks[3], lineno);
        r.theta_site = num(toks[4], lineno);
        r.battery = num(toks[5], lineno);
        r.d_active = static_cast<int>(num(toks[6], lineno));
        r.w_local = num(toks[7], lineno);
        r.w_in = num(toks[8], lineno);
        r.w_out = num(toks[9], lineno);
        r.qos_penalty = num(toks[10], lineno);
        r.deficit = num(toks[11], lineno);
        r.savings_pct = num(toks[12], lineno);
        log.rows.push_back(r);
        log.n_sites = std::max(log.n_sites, r.site + 1);
        log.slots = std::max(log.slots, r.slot + 1);
    }
    return log;
}

std::string render_summary(const MetricsLog& log, const std::string& controller) {
    double theta_site = 0.0, theta_mec = 0.0, w_out = 0.0, w_local = 0.0;
    double qos = 0.0, deficit_j = 0.0, batt_min = 0.0, batt_max = 0.0;
    long deficit_rows = 0;
    if (!log.rows.empty()) {
        batt_min = batt_max = log.rows.front().battery;
    }
    for (const auto& r : log.rows) {
        theta_site += r.theta_site;
        theta_mec += r.theta_mec;
        w_out += r.w_out;
        w_local += r.w_local;
        qos += r.qos_penalty;
        deficit_j += r.deficit;
        if (r.deficit > 0.0) ++deficit_rows;
        batt_min = std::min(batt_min, r.battery);
        batt_max = std::max(batt_max, r.battery);
    }
    const double n = log.rows.empty() ? 1.0 : static_cast<double>(log.rows.size());
    char buf[1024];
    std::snprintf(buf, sizeof buf,
                  "controller            %s\n"
                  "sites                 %d\n"
                  "slots                 %d\n"
                  "rows                  %zu\n"
                  "mean savings_pct      %.4f\n"
                  "mean theta_site (J)   %.4f\n"
                  "mean theta_mec (J)    %.4f\n"
                  "mean qos_penalty      %.4f\n"
                  "total w_local (MB)    %.4f\n"
                  "total w_out (MB)      %.4f\n"
                  "deficit rows          %ld\n"
                  "total deficit (J)     %.4f\n"
                  "battery min/max (J)   %.4f / %.4f\n",
                  controller.c_str(), log.n_sites, log.slots, log.rows.size(),
                  log.run_mean_savings(), theta_site / n, theta_mec / n, qos / n,
                  w_local, w_out, deficit_rows, deficit_j, batt_min, batt_max);
    return buf;
}

std::string render_hourly(const MetricsLog& log) {
    const auto hourly = log.hourly_mean_savings();
    std::string out = "# hour mean_savings_pct\n";
    char buf[64];
    for (int h = 0; h < 24; ++h) {
        std::snprintf(buf, sizeof buf, "%d %.6f\n", h, hourly[h]);
        out += buf;
    }
    return out;
}

std::string render_sweep(const std::vector<SweepRow>& rows, const std::string& xname) {
    std::string out = "# " + xname +
                      " llc_savings_pct open_savings_pct llc_theta_mec open_theta_mec\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6g %.6f %.6f %.6f %.6f\n", r.value,
                      r.llc_savings, r.open_savings, r.llc_theta_mec, r.open_theta_mec);
        out += buf;
    }
    return out;
}

std::string render_forecast(const std::vector<double>& predicted,
                            const std::vector<double>& real) {
    const bool overlay = real.size() >= predicted.size();
    std::string out = overlay ? "# step predicted real\n" : "# step predicted\n";
    char buf[120];
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (overlay)
            std::snprintf(buf, sizeof buf, "%zu %.9g %.9g\n", i, predicted[i], real[i]);
        else
            std::snprintf(buf, sizeof buf, "%zu %.9g\n", i, predicted[i]);
        out += buf;
    }
    return out;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string run_id(const std::string& subcommand, const std::string& resolved) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%s-%016llx", subcommand.c_str(),
                  static_cast<unsigned long long>(fnv1a64(subcommand + "\n" + resolved)));
    return buf;
}

} // namespace greenmesh
