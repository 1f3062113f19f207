// Command-line front end. Every subcommand resolves a config (defaults <
// file < --set overrides), derives a content-addressed run directory under
// $GREENMESH_OUT (default ./out), echoes the resolved config there, and
// writes its artifacts next to it.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "greenmesh/clustering.hpp"
#include "greenmesh/config.hpp"
#include "greenmesh/errors.hpp"
#include "greenmesh/lstm.hpp"
#include "greenmesh/report.hpp"
#include "greenmesh/rng.hpp"
#include "greenmesh/sim.hpp"
#include "greenmesh/timeseries.hpp"

namespace fs = std::filesystem;
using namespace greenmesh;

namespace {

struct Cli {
    std::string config_path;
    std::vector<std::string> sets;
    std::string out_root;

    // subcommand locals
    int days = 10;
    std::vector<std::string> inputs;
    int k_min = 1;
    int k_max = 10;
    std::string kind = "traffic";
    std::string weights_path;
    std::string input_path;
    int horizon = -1;
    std::string unit = "normalized";
    std::string values;
    std::string run_dir;
};

std::vector<std::pair<std::string, std::string>> parse_sets(const std::vector<std::string>& sets) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("override must be key=value: '" + s + "'");
        out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    return out;
}

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ConfigError("--values: not a number: '" + tok + "'");
        }
    }
    if (out.empty()) throw ConfigError("--values: empty list");
    return out;
}

std::string out_root(const Cli& cli) {
    if (!cli.out_root.empty()) return cli.out_root;
    if (const char* env = std::getenv("GREENMESH_OUT"); env && *env) return env;
    return "./out";
}

fs::path make_run_dir(const Cli& cli, const std::string& sub, const std::string& material) {
    fs::path dir = fs::path(out_root(cli)) / run_id(sub, material);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + p.string());
    out << content;
    if (!out) throw Error("short write: " + p.string());
}

TimeSeries load_series(const std::string& path, const std::string& unit_str) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open trace: " + path);
    TimeSeries ts = load_trace_csv(in, unit_from_name(unit_str));
    if (ts.unit != Unit::normalized) ts = normalize(ts);
    return ts;
}

int cmd_synth_traces(const Cli& cli, const SimConfig& cfg) {
    const auto& shapes = traffic_cluster_shapes();
    const std::string material =
        render_config(cfg) + "days=" + std::to_string(cli.days) + "\n";
    const fs::path dir = make_run_dir(cli, "synth-traces", material);
    write_file(dir / "config.txt", render_config(cfg));

    Rng root(cfg.train_seed);
    std::string manifest = "# file kind days slots_per_day\n";
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        TimeSeries ts = synth_traffic_profile(shapes[i], cli.days, root.next_u64(),
                                              cfg.traffic_noise, cfg.slots_per_day);
        std::ostringstream body;
        write_trace_csv(body, ts);
        const std::string name = "traffic_c" + std::to_string(i) + ".csv";
        write_file(dir / name, body.str());
        manifest += name + " traffic " + std::to_string(cli.days) + " " +
                    std::to_string(cfg.slots_per_day) + "\n";
    }
    for (TraceKind kind : {TraceKind::solar, TraceKind::wind}) {
        TimeSeries ts = synth_trace(kind, cli.days, root.next_u64(),
                                    cfg.harvest_noise, cfg.slots_per_day);
        std::ostringstream body;
        write_trace_csv(body, ts);
        const std::string name = trace_kind_name(kind) + ".csv";
        write_file(dir / name, body.str());
        manifest += name + " " + trace_kind_name(kind) + " " +
                    std::to_string(cli.days) + " " +
                    std::to_string(cfg.slots_per_day) + "\n";
    }
    write_file(dir / "manifest.txt", manifest);
    std::cout << "wrote " << dir.string() << " (" << shapes.size() + 2
              << " traces, " << cli.days << " days)\n";
    return 0;
}

int cmd_cluster(const Cli& cli, const SimConfig& cfg) {
    std::vector<DailyProfile> profiles;
    std::string source;
    if (!cli.inputs.empty()) {
        for (const auto& path : cli.inputs) {
            TimeSeries ts = load_series(path, cli.unit);
            for (auto& day : slice_days(ts, cfg.slots_per_day))
                profiles.push_back(std::move(day));
            source += path + ",";
        }
    } else {
        Rng root(cfg.train_seed);
        for (const auto& shape : traffic_cluster_shapes()) {
            TimeSeries ts = synth_traffic_profile(shape, cli.days, root.next_u64(),
                                                  cfg.traffic_noise, cfg.slots_per_day);
            for (auto& day : slice_days(ts, cfg.slots_per_day))
                profiles.push_back(std::move(day));
        }
        source = "<synthetic>";
    }

    std::string material = render_config(cfg) + "inputs=" + source + "\n" +
                           "k_min=" + std::to_string(cli.k_min) + "\n" +
                           "k_max=" + std::to_string(cli.k_max) + "\n";
    const fs::path dir = make_run_dir(cli, "cluster", material);
    write_file(dir / "config.txt", render_config(cfg));

    const ClusterModel model = xmeans_cluster(profiles, cli.k_min, cli.k_max, cfg.seed);

    std::string centroids = "# slot";
    for (int c = 0; c < model.k; ++c) centroids += " c" + std::to_string(c);
    centroids += "\n";
    char buf[48];
    for (int s = 0; s < cfg.slots_per_day; ++s) {
        centroids += std::to_string(s);
        for (int c = 0; c < model.k; ++c) {
            std::snprintf(buf, sizeof buf, " %.9g", model.centroids[c][s]);
            centroids += buf;
        }
        centroids += "\n";
    }
    write_file(dir / "centroids.txt", centroids);

    std::string assignments = "# profile cluster\n";
    for (std::size_t i = 0; i < model.assignments.size(); ++i)
        assignments += std::to_string(i) + " " + std::to_string(model.assignments[i]) + "\n";
    write_file(dir / "assignments.txt", assignments);

    std::vector<int> sizes(model.k, 0);
    for (int a : model.assignments) ++sizes[a];
    std::ostringstream summary;
    summary << "profiles   " << profiles.size() << "\n"
            << "k          " << model.k << "\n"
            << "bic        " << model.bic << "\n";
    for (int c = 0; c < model.k; ++c)
        summary << "cluster " << c << " size " << sizes[c] << "\n";
    write_file(dir / "summary.txt", summary.str());
    std::cout << "wrote " << dir.string() << " (k=" << model.k
              << ", profiles=" << profiles.size() << ")\n";
    return 0;
}

int cmd_train_forecaster(const Cli& cli, const SimConfig& cfg) {
    TimeSeries ts;
    std::string source;
    if (!cli.input_path.empty()) {
        ts = load_series(cli.input_path, cli.unit);
        source = cli.input_path;
    } else {
        ts = synth_trace(trace_kind_from_name(cli.kind), cfg.train_days,
                         cfg.train_seed, cli.kind == "traffic" ? cfg.traffic_noise
                                                               : cfg.harvest_noise,
                         cfg.slots_per_day);
        source = "<synthetic:" + cli.kind + ">";
    }

    const std::string material = render_config(cfg) + "input=" + source + "\n";
    const fs::path dir = make_run_dir(cli, "train-forecaster", material);
    write_file(dir / "config.txt", render_config(cfg));

    const TrainResult res = train(ts, cfg.train);
    std::ostringstream weights;
    save_weights(weights, res.weights);
    write_file(dir / "weights.txt", weights.str());

    const double naive = persistence_rmse(ts, cfg.train);
    std::ostringstream summary;
    summary << "source            " << source << "\n"
            << "samples           " << ts.size() << "\n"
            << "epochs            " << cfg.train.epochs << "\n"
            << "test rmse         " << res.test_rmse << "\n"
            << "persistence rmse  " << naive << "\n"
            << "final epoch loss  "
            << (res.epoch_loss.empty() ? 0.0 : res.epoch_loss.back()) << "\n";
    write_file(dir / "summary.txt", summary.str());

    std::string losses = "# epoch mse\n";
    for (std::size_t e = 0; e < res.epoch_loss.size(); ++e) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%zu %.9g\n", e, res.epoch_loss[e]);
        losses += buf;
    }
    write_file(dir / "train_loss.txt", losses);

    std::cout << "wrote " << dir.string() << " (test rmse "
              << res.test_rmse << ", persistence " << naive << ")\n";
    return 0;
}

int cmd_forecast(const Cli& cli, const SimConfig& cfg) {
    std::ifstream win(cli.weights_path);
    if (!win) throw Error("cannot open weights: " + cli.weights_path);
    const LstmWeights w = load_weights(win);

    const TimeSeries ts = load_series(cli.input_path, cli.unit);
    const int horizon = cli.horizon > 0 ? cli.horizon : cfg.horizon;
    const int window = cfg.train.window_len;
    const int len = static_cast<int>(ts.size());
    if (len < window)
        throw ValidationError("input shorter than the forecaster window (" +
                              std::to_string(window) + ")");
    const int anchor = std::max(window, len - horizon);

    const std::vector<double> hist(ts.values.begin() + (anchor - window),
                                   ts.values.begin() + anchor);
    const ForecastResult fc = predict_horizon(w, hist, horizon);
    std::vector<double> real;
    if (anchor + horizon <= len)
        real.assign(ts.values.begin() + anchor, ts.values.begin() + anchor + horizon);

    const std::string material = render_config(cfg) + "weights=" + cli.weights_path +
                                 "\ninput=" + cli.input_path +
                                 "\nhorizon=" + std::to_string(horizon) + "\n";
    const fs::path dir = make_run_dir(cli, "forecast", material);
    write_file(dir / "config.txt", render_config(cfg));
    write_file(dir / "forecast.txt", render_forecast(fc.predictions, real));

    std::ostringstream summary;
    summary << "weights   " << cli.weights_path << "\n"
            << "input     " << cli.input_path << "\n"
            << "anchor    " << anchor << "\n"
            << "horizon   " << horizon << "\n";
    if (!real.empty()) summary << "rmse      " << rmse(fc.predictions, real) << "\n";
    write_file(dir / "summary.txt", summary.str());
    std::cout << "wrote " << dir.string() << "\n";
    return 0;
}

int cmd_simulate(const Cli& cli, const SimConfig& cfg) {
    const fs::path dir = make_run_dir(cli, "simulate", render_config(cfg));
    write_file(dir / "config.txt", render_config(cfg));

    const MetricsLog log = run_sim(cfg);
    std::ostringstream metrics;
    write_metrics_csv(metrics, log);
    write_file(dir / "metrics.csv", metrics.str());
    write_file(dir / "summary.txt",
               render_summary(log, controller_name(cfg.controller)));
    write_file(dir / "hourly_savings.txt", render_hourly(log));

    std::cout << "wrote " << dir.string() << " (controller "
              << controller_name(cfg.controller) << ", mean savings "
              << log.run_mean_savings() << "%)\n";
    return 0;
}

int cmd_sweep(const Cli& cli, const SimConfig& cfg, SweepVariable var) {
    const bool is_gamma = var == SweepVariable::gamma;
    const std::string def = is_gamma ? "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9"
                                     : "1,5,10,15,20";
    const std::vector<double> values = parse_values(cli.values.empty() ? def : cli.values);
    const std::string sub = is_gamma ? "sweep-gamma" : "sweep-containers";

    std::string material = render_config(cfg) + "values=";
    for (double v : values) material += std::to_string(v) + ",";
    material += "\n";
    const fs::path dir = make_run_dir(cli, sub, material);
    write_file(dir / "config.txt", render_config(cfg));

    const std::vector<SweepRow> rows = sweep(cfg, var, values, nullptr);
    const std::string xname = is_gamma ? "gamma" : "containers";
    const std::string table = render_sweep(rows, xname);
    write_file(dir / (xname + "_sweep.txt"), table);

    std::cout << "wrote " << dir.string() << "\n" << table;
    return 0;
}

int cmd_report(const Cli& cli) {
    const fs::path dir(cli.run_dir);
    std::ifstream cin_(dir / "config.txt");
    if (!cin_) throw ConfigError("no config.txt in " + dir.string());
    const SimConfig cfg = parse_config((dir / "config.txt").string(), {});

    std::ifstream min_(dir / "metrics.csv");
    if (!min_) throw Error("no metrics.csv in " + dir.string());
    MetricsLog log = read_metrics_csv(min_);
    log.slots_per_day = cfg.slots_per_day;
    log.baseline = baseline_energy(cfg.site_model());

    write_file(dir / "summary.txt", render_summary(log, controller_name(cfg.controller)));
    write_file(dir / "hourly_savings.txt", render_hourly(log));
    std::cout << "report regenerated in " << dir.string() << " (mean savings "
              << log.run_mean_savings() << "%)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    Cli cli;
    CLI::App app{"renewable edge-site energy management: traces, forecasting, "
                 "control simulation, reporting"};
    app.require_subcommand(1);
    app.fallthrough(); // global options may follow the subcommand
    app.add_option("--config", cli.config_path, "config file (key = value lines)");
    app.add_option("--set", cli.sets, "override, e.g. --set sim.gamma=0.3")
        ->take_all();
    app.add_option("--out", cli.out_root,
                   "output root (else $GREENMESH_OUT, else ./out)");

    auto* synth = app.add_subcommand("synth-traces", "generate the synthetic trace corpus");
    synth->add_option("--days", cli.days, "days per trace")->check(CLI::PositiveNumber);

    auto* cluster = app.add_subcommand("cluster", "x-means over daily load profiles");
    cluster->add_option("--input", cli.inputs, "trace CSVs (default: synthetic corpus)");
    cluster->add_option("--days", cli.days, "days per synthetic trace");
    cluster->add_option("--k-min", cli.k_min, "initial cluster count");
    cluster->add_option("--k-max", cli.k_max, "cluster count cap");
    cluster->add_option("--unit", cli.unit, "input unit (normalized|joules-per-slot|jobs-per-slot)");

    auto* trainc = app.add_subcommand("train-forecaster", "fit the load/harvest forecaster");
    trainc->add_option("--input", cli.input_path, "training trace CSV");
    trainc->add_option("--kind", cli.kind, "synthetic kind if no input (traffic|solar|wind)");
    trainc->add_option("--unit", cli.unit, "input unit (normalized|joules-per-slot|jobs-per-slot)");

    auto* fcast = app.add_subcommand("forecast", "multi-step forecast from saved weights");
    fcast->add_option("--weights", cli.weights_path, "weights file")->required();
    fcast->add_option("--input", cli.input_path, "history trace CSV")->required();
    fcast->add_option("--horizon", cli.horizon, "steps ahead (default sim.horizon)");
    fcast->add_option("--unit", cli.unit, "input unit (normalized|joules-per-slot|jobs-per-slot)");

    app.add_subcommand("simulate", "run the slotted multi-site simulation");

    auto* sgamma = app.add_subcommand("sweep-gamma", "LLC vs OPEN across QoS weights");
    sgamma->add_option("--values", cli.values, "comma-separated gamma values");

    auto* scont = app.add_subcommand("sweep-containers", "LLC vs OPEN across container budgets");
    scont->add_option("--values", cli.values, "comma-separated container counts");

    auto* report = app.add_subcommand("report", "regenerate summary/plot data for a run");
    report->add_option("--run", cli.run_dir, "existing run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const SimConfig cfg = parse_config(cli.config_path, parse_sets(cli.sets));
        if (app.got_subcommand("synth-traces")) return cmd_synth_traces(cli, cfg);
        if (app.got_subcommand("cluster")) return cmd_cluster(cli, cfg);
        if (app.got_subcommand("train-forecaster")) return cmd_train_forecaster(cli, cfg);
        if (app.got_subcommand("forecast")) return cmd_forecast(cli, cfg);
        if (app.got_subcommand("simulate")) return cmd_simulate(cli, cfg);
        if (app.got_subcommand("sweep-gamma")) return cmd_sweep(cli, cfg, SweepVariable::gamma);
        if (app.got_subcommand("sweep-containers"))
            return cmd_sweep(cli, cfg, SweepVariable::containers);
        if (app.got_subcommand("report")) return cmd_report(cli);
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
