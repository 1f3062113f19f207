#include "greenmesh/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "greenmesh/errors.hpp"

namespace greenmesh {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (const std::exception&) {
        throw ConfigError(key + ": not a number: '" + v + "'");
    }
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return i;
    } catch (const std::exception&) {
        throw ConfigError(key + ": not an integer: '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(key + ": not a boolean: '" + v + "'");
}

std::vector<double> to_levels(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) throw ConfigError(key + ": empty list entry");
        out.push_back(to_double(key, tok));
    }
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

std::string levels_str(const std::vector<double>& levels) {
    std::string out;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (i) out += ",";
        out += fmt_double(levels[i]);
    }
    return out;
}

struct KeyDef {
    const char* name;
    std::function<std::string(const SimConfig&)> get;
    std::function<void(SimConfig&, const std::string&, const std::string&)> set;
};

const std::vector<KeyDef>& registry() {
    auto D = [](double SimConfig::* f) {
        return KeyDef{nullptr,
                      [f](const SimConfig& c) { return fmt_double(c.*f); },
                      [f](SimConfig& c, const std::string& k, const std::string& v) {
                          c.*f = to_double(k, v);
                      }};
    };
    auto I = [](int SimConfig::* f) {
        return KeyDef{nullptr,
                      [f](const SimConfig& c) { return std::to_string(c.*f); },
                      [f](SimConfig& c, const std::string& k, const std::string& v) {
                          c.*f = static_cast<int>(to_int(k, v));
                      }};
    };
    auto named = [](KeyDef d, const char* n) {
        d.name = n;
        return d;
    };
    static const std::vector<KeyDef> defs = [&] {
        std::vector<KeyDef> r;
        r.push_back(named(I(&SimConfig::n_sites), "sim.sites"));
        r.push_back(named(I(&SimConfig::days), "sim.days"));
        r.push_back(named(I(&SimConfig::slots_per_day), "sim.slots_per_day"));
        r.push_back(named(I(&SimConfig::slot_seconds), "sim.slot_seconds"));
        r.push_back({"sim.seed",
                     [](const SimConfig& c) { return std::to_string(c.seed); },
                     [](SimConfig& c, const std::string& k, const std::string& v) {
                         long long s = to_int(k, v);
                         if (s < 0) throw ConfigError(k + ": must be >= 0");
                         c.seed = static_cast<std::uint64_t>(s);
                     }});
        r.push_back({"sim.controller",
                     [](const SimConfig& c) { return controller_name(c.controller); },
                     [](SimConfig& c, const std::string& k, const std::string& v) {
                         try {
                             c.controller = controller_from_name(v);
                         } catch (const ValidationError& e) {
                             throw ConfigError(k + ": " + e.what());
                         }
                     }});
        r.push_back(named(D(&SimConfig::gamma), "sim.gamma"));
        r.push_back(named(I(&SimConfig::horizon), "sim.horizon"));
        r.push_back({"sim.topology",
                     [](const SimConfig& c) { return topology_name(c.topology); },
                     [](SimConfig& c, const std::string& k, const std::string& v) {
                         try {
                             c.topology = topology_from_name(v);
                         } catch (const ValidationError& e) {
                             throw ConfigError(k + ": " + e.what());
                         }
                     }});
        r.push_back(named(I(&SimConfig::topology_k), "sim.topology_k"));

        r.push_back(named(D(&SimConfig::b_max), "energy.b_max"));
        r.push_back(named(D(&SimConfig::mu), "energy.mu"));
        r.push_back(named(D(&SimConfig::alpha), "energy.alpha"));
        r.push_back(named(D(&SimConfig::eta), "energy.eta"));
        r.push_back(named(D(&SimConfig::kappa), "energy.kappa"));
        r.push_back(named(D(&SimConfig::bs_idle), "energy.bs_idle"));
        r.push_back(named(D(&SimConfig::bs_load), "energy.bs_load"));
        r.push_back(named(D(&SimConfig::mec_idle), "energy.mec_idle"));
        r.push_back(named(D(&SimConfig::mec_dyn), "energy.mec_dyn"));

        r.push_back(named(I(&SimConfig::d_budget), "compute.d_budget"));
        r.push_back(named(D(&SimConfig::lambda_max), "compute.lambda_max"));
        r.push_back(named(D(&SimConfig::sensitive_ratio), "compute.sensitive_ratio"));
        r.push_back(named(D(&SimConfig::admission_eps), "compute.admission_eps"));

        r.push_back({"grid.levels",
                     [](const SimConfig& c) { return levels_str(c.grid.fraction_levels); },
                     [](SimConfig& c, const std::string& k, const std::string& v) {
                         c.grid.fraction_levels = to_levels(k, v);
                     }});
        r.push_back({"grid.neighbor_fanout",
                     [](const SimConfig& c) { return std::to_string(c.grid.neighbor_fanout); },
                     [](SimConfig& c, const std::string& k, const std::string& v) {
                         c.grid.neighbor_fanout = static_cast<int>(to_int(k, v));
                     }});
        r.push_back({"grid.battery_buckets",
                     [](const SimConfig& c) { return std::to_string(c.grid.battery_buckets); },
                     [](SimConfig& c, const std::string& k, const std::string& v) {
                         c.grid.battery_buckets = static_cast<int>(to_int(k, v));
                     }});

        r.push_back(named(D(&SimConfig::open_v), "open.v"));

        r.push_back({"forecast.use_lstm",
                     [](const SimConfig& c) { return c.use_lstm ? std::string("true")
                                                                : std::string("false"); },
                     [](SimConfig& c, const std::string& k, const std::string& v) {
                         c.use_lstm = to_bool(k, v);
                     }});
        r.push_back(named(I(&SimConfig::train_days), "forecast.train_days"));
        r.push_back({"forecast.train_seed",
                     [](const SimConfig& c) { return std::to_string(c.train_seed); },
                     [](SimConfig& c, const std::string& k, const std::string& v) {
                         long long s = to_int(k, v);
                         if (s < 0) throw ConfigError(k + ": must be >= 0");
                         c.train_seed = static_cast<std::uint64_t>(s);
                     }});

        r.push_back({"train.epochs",
                     [](const SimConfig& c) { return std::to_string(c.train.epochs); },
                     [](SimConfig& c, const std::string& k, const std::string& v) {
                         c.train.epochs = static_cast<int>(to_int(k, v));
                     }});
        r.push_back({"train.batch_size",
                     [](const SimConfig& c) { return std::to_string(c.train.batch_size); },
                     [](SimConfig& c, const std::string& k, const std::string& v) {
                         c.train.batch_size = static_cast<int>(to_int(k, v));
                     }});
        r.push_back({"train.fraction",
                     [](const SimConfig& c) { return fmt_double(c.train.train_fraction); },
                     [](SimConfig& c, const std::string& k, const std::string& v) {
                         c.train.train_fraction = to_double(k, v);
                     }});
        r.push_back({"train.window",
                     [](const SimConfig& c) { return std::to_string(c.train.window_len); },
                     [](SimConfig& c, const std::string& k, const std::string& v) {
                         c.train.window_len = static_cast<int>(to_int(k, v));
                     }});
        r.push_back({"train.lr",
                     [](const SimConfig& c) { return fmt_double(c.train.learning_rate); },
                     [](SimConfig& c, const std::string& k, const std::string& v) {
                         c.train.learning_rate = to_double(k, v);
                     }});
        r.push_back({"train.seed",
                     [](const SimConfig& c) { return std::to_string(c.train.seed); },
                     [](SimConfig& c, const std::string& k, const std::string& v) {
                         long long s = to_int(k, v);
                         if (s < 0) throw ConfigError(k + ": must be >= 0");
                         c.train.seed = static_cast<std::uint64_t>(s);
                     }});

        r.push_back(named(D(&SimConfig::load_scale_mb), "trace.load_scale_mb"));
        r.push_back(named(D(&SimConfig::solar_scale_j), "trace.solar_scale_j"));
        r.push_back(named(D(&SimConfig::wind_scale_j), "trace.wind_scale_j"));
        r.push_back(named(D(&SimConfig::solar_fraction), "trace.solar_fraction"));
        r.push_back(named(D(&SimConfig::battery_init_frac), "trace.battery_init_frac"));
        r.push_back(named(D(&SimConfig::traffic_noise), "trace.traffic_noise"));
        r.push_back(named(D(&SimConfig::harvest_noise), "trace.harvest_noise"));

        std::sort(r.begin(), r.end(),
                  [](const KeyDef& a, const KeyDef& b) {
                      return std::string(a.name) < std::string(b.name);
                  });
        return r;
    }();
    return defs;
}

const KeyDef* find_key(const std::string& key) {
    for (const auto& d : registry())
        if (key == d.name) return &d;
    return nullptr;
}

} // namespace

SimConfig default_config() { return SimConfig{}; }

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& d : registry()) out.push_back(d.name);
    return out;
}

void apply_override(SimConfig& cfg, const std::string& key, const std::string& value) {
    const KeyDef* def = find_key(key);
    if (!def) throw ConfigError("unknown config key: " + key);
    def->set(cfg, key, value);
}

SimConfig parse_config_stream(std::istream& in, const std::string& label,
                              const std::vector<std::pair<std::string, std::string>>& overrides) {
    SimConfig cfg = default_config();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(label + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(label + ":" + std::to_string(lineno) + ": empty key");
        apply_override(cfg, key, value);
    }
    for (const auto& [k, v] : overrides) apply_override(cfg, k, v);
    try {
        cfg.validate();
    } catch (const ValidationError& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
    return cfg;
}

SimConfig parse_config(const std::string& path,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
    if (path.empty()) {
        std::istringstream empty;
        return parse_config_stream(empty, "<defaults>", overrides);
    }
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_config_stream(in, path, overrides);
}

std::string render_config(const SimConfig& cfg) {
    std::string out;
    for (const auto& d : registry()) {
        out += d.name;
        out += " = ";
        out += d.get(cfg);
        out += "\n";
    }
    return out;
}

} // namespace greenmesh
