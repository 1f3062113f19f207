// Python face of the library: enough surface to drive trace synthesis,
// forecasting, clustering, and full simulations from scripts/notebooks.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "greenmesh/clustering.hpp"
#include "greenmesh/config.hpp"
#include "greenmesh/energy.hpp"
#include "greenmesh/compute.hpp"
#include "greenmesh/controller.hpp"
#include "greenmesh/errors.hpp"
#include "greenmesh/lstm.hpp"
#include "greenmesh/report.hpp"
#include "greenmesh/sim.hpp"
#include "greenmesh/timeseries.hpp"

namespace py = pybind11;
using namespace greenmesh;

PYBIND11_MODULE(_greenmesh, m) {
    m.doc() = "renewable edge-site energy management: traces, forecasting, "
              "clustering, and slotted control simulation";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<CapacityError>(m, "CapacityError", PyExc_RuntimeError);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init(&default_config))
        .def("set", &apply_override, py::arg("key"), py::arg("value"),
             "set a dotted config key from its text value")
        .def("get",
             [](const SimConfig& cfg, const std::string& key) -> std::string {
                 std::istringstream lines(render_config(cfg));
                 std::string line;
                 while (std::getline(lines, line)) {
                     const auto eq = line.find(" = ");
                     if (eq != std::string::npos && line.substr(0, eq) == key)
                         return line.substr(eq + 3);
                 }
                 throw ConfigError("unknown config key: " + key);
             },
             py::arg("key"))
        .def("validate", &SimConfig::validate)
        .def("render", [](const SimConfig& cfg) { return render_config(cfg); })
        .def_static("keys", &config_keys);

    m.def("parse_config", &parse_config, py::arg("path") = std::string(),
          py::arg("overrides") = std::vector<std::pair<std::string, std::string>>{});

    py::class_<MetricsLog>(m, "MetricsLog")
        .def_property_readonly("n_sites", [](const MetricsLog& l) { return l.n_sites; })
        .def_property_readonly("slots", [](const MetricsLog& l) { return l.slots; })
        .def_property_readonly("baseline", [](const MetricsLog& l) { return l.baseline; })
        .def("run_mean_savings", &MetricsLog::run_mean_savings)
        .def("mean_theta_mec", &MetricsLog::mean_theta_mec)
        .def("hourly_mean_savings", &MetricsLog::hourly_mean_savings)
        .def("to_csv",
             [](const MetricsLog& log) {
                 std::ostringstream out;
                 write_metrics_csv(out, log);
                 return out.str();
             })
        .def("__len__", [](const MetricsLog& l) { return l.rows.size(); });

    m.def("run_sim", [](const SimConfig& cfg) { return run_sim(cfg); },
          py::arg("config"), py::call_guard<py::gil_scoped_release>());

    m.def("synth_trace",
          [](const std::string& kind, int days, std::uint64_t seed, double noise,
             int slots_per_day) {
              return synth_trace(trace_kind_from_name(kind), days, seed, noise,
                                 slots_per_day)
                  .values;
          },
          py::arg("kind"), py::arg("days"), py::arg("seed"), py::arg("noise") = 0.05,
          py::arg("slots_per_day") = 48);

    m.def("xmeans",
          [](const std::vector<DailyProfile>& profiles, int k_min, int k_max,
             std::uint64_t seed) {
              const ClusterModel model = xmeans_cluster(profiles, k_min, k_max, seed);
              return py::make_tuple(model.k, model.assignments, model.centroids,
                                    model.bic);
          },
          py::arg("profiles"), py::arg("k_min") = 1, py::arg("k_max") = 10,
          py::arg("seed") = 0,
          "returns (k, assignments, centroids, bic)");

    m.def("train_forecaster",
          [](const std::vector<double>& values, int epochs, int window, double lr,
             std::uint64_t seed) {
              TimeSeries ts;
              ts.values = values;
              ts.unit = Unit::normalized;
              TrainConfig cfg;
              cfg.epochs = epochs;
              cfg.window_len = window;
              cfg.learning_rate = lr;
              cfg.seed = seed;
              TrainResult res;
              {
                  // Release only around the heavy call: the tuple below
                  // builds Python objects and needs the GIL held.
                  py::gil_scoped_release release;
                  res = train(ts, cfg);
              }
              std::ostringstream blob;
              save_weights(blob, res.weights);
              return py::make_tuple(blob.str(), res.test_rmse, res.epoch_loss);
          },
          py::arg("values"), py::arg("epochs") = 80, py::arg("window") = 48,
          py::arg("lr") = 0.01, py::arg("seed") = 1,
          "returns (weights_text, test_rmse, epoch_loss)");

    m.def("forecast",
          [](const std::string& weights_text, const std::vector<double>& window,
             int horizon) {
              std::istringstream in(weights_text);
              const LstmWeights w = load_weights(in);
              return predict_horizon(w, window, horizon).predictions;
          },
          py::arg("weights"), py::arg("window"), py::arg("horizon") = 3);

    // Formula-level helpers, handy for notebook sanity checks.
    m.def("battery_step",
          [](double level, double capacity, double leak, double charge_eff,
             double theta, double h_c) {
              Battery b;
              b.level = level;
              b.capacity = capacity;
              b.leak = leak;
              b.charge_eff = charge_eff;
              const BatteryStep r = battery_step(b, theta, h_c);
              return py::make_tuple(r.level, r.deficit);
          },
          py::arg("level"), py::arg("capacity"), py::arg("leak"),
          py::arg("charge_eff"), py::arg("theta"), py::arg("h_c"),
          "returns (next_level, deficit)");
    m.def("containers_needed", &containers_needed, py::arg("load_mb"),
          py::arg("lambda_max") = 10.0, py::arg("budget") = 20);
    m.def("cost_j",
          [](double theta, double w_nn, double w_out, double gamma) {
              return cost_J(theta, w_nn, w_out, CostWeights{gamma});
          },
          py::arg("theta"), py::arg("w_nn"), py::arg("w_out"), py::arg("gamma"));
}
