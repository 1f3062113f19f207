#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "greenmesh/controller.hpp"
#include "greenmesh/lstm.hpp"
#include "greenmesh/timeseries.hpp"

namespace greenmesh {

enum class ControllerKind { llc, open, none };
enum class TopologyKind { complete, ring, k_nearest };

std::string controller_name(ControllerKind c);
ControllerKind controller_from_name(const std::string& name);
std::string topology_name(TopologyKind t);
TopologyKind topology_from_name(const std::string& name);

struct Topology {
    int n_sites = 20;
    TopologyKind kind = TopologyKind::complete;
    int k = 4; // neighbors per site for k_nearest (split over both sides)
    std::vector<std::vector<int>> adjacency;

    static Topology make(int n_sites, TopologyKind kind, int k = 4);
    void validate() const;
};

struct SimConfig {
    int n_sites = 20;
    int days = 7;
    int slots_per_day = 48;
    int slot_seconds = 1800;
    int horizon = 3;
    double gamma = 0.5;
    std::uint64_t seed = 1;
    ControllerKind controller = ControllerKind::llc;
    TopologyKind topology = TopologyKind::complete;
    int topology_k = 4;

    // Site and network constants.
    int d_budget = 20;
    double b_max = 100000.0;
    double mu = 0.9999;
    double alpha = 0.900;
    double eta = 0.105;
    double kappa = -0.035;
    double lambda_max = 10.0;
    double bs_idle = 50.0;
    double bs_load = 150.0;
    double mec_idle = 2.0;
    double mec_dyn = 8.0;

    ActionGrid grid;
    double open_v = 1000.0;

    // Scenario shaping.
    double load_scale_mb = 100.0;
    double solar_scale_j = 900.0;
    double wind_scale_j = 300.0;
    double solar_fraction = 0.5;
    double battery_init_frac = 0.05;
    double sensitive_ratio = 0.8;
    double traffic_noise = 0.05;
    double harvest_noise = 0.10;
    double admission_eps = 1.0;

    // Forecasting.
    bool use_lstm = true; // false: persistence forecasts throughout
    TrainConfig train;
    int train_days = 10;
    std::uint64_t train_seed = 99;

    void validate() const;
    SiteModel site_model() const; // h_max filled per site by the simulator
};

// Forecasters shared across a run: one per traffic category plus one per
// harvest kind. Train once, reuse across seeds and sweep points.
struct ForecastBank {
    std::vector<LstmWeights> traffic; // one per entry of traffic_cluster_shapes()
    LstmWeights solar;
    LstmWeights wind;
    std::vector<double> test_rmse; // traffic..., solar, wind
};

ForecastBank train_bank(const SimConfig& cfg);

struct MetricsRow {
    int slot = 0;
    int site = 0;
    double theta_bs = 0.0, theta_mec = 0.0, theta_site = 0.0;
    double battery = 0.0;
    int d_active = 0;
    double w_local = 0.0, w_in = 0.0, w_out = 0.0;
    double qos_penalty = 0.0;
    double deficit = 0.0;
    double savings_pct = 0.0;
    // Not part of the CSV surface; kept for invariant checking and reports.
    double offered = 0.0, kept = 0.0, shed = 0.0;
    double h_c = 0.0, h_o = 0.0, harvest = 0.0;
    bool constrained = false;
};

struct MetricsLog {
    std::vector<MetricsRow> rows; // slot-major, site-minor
    int n_sites = 0;
    int slots = 0;
    int slots_per_day = 48;
    double baseline = 0.0;

    double run_mean_savings() const;
    double mean_theta_mec() const;
    // Mean savings per hour of day, 24 entries.
    std::vector<double> hourly_mean_savings() const;
};

void write_metrics_csv(std::ostream& out, const MetricsLog& log);

// Per-site inputs to the slot barrier's flow settlement.
struct ReconcileInput {
    double offered = 0.0;
    double kept_desired = 0.0;
    double admission_cap = 0.0;
    bool constrained = false;
    std::vector<std::pair<int, double>> out_desired; // receiver id -> MB
};

struct ReconcileOutcome {
    FlowSet flows; // w_local = settled kept; granted in/out maps
    double kept = 0.0;
    double shed = 0.0;
};

// Grant requests against receiver residual capacity (proportional scaling on
// oversubscription, constrained receivers take nothing); ungranted load
// returns to the sender's admission, then sheds.
std::vector<ReconcileOutcome> reconcile_flows(const std::vector<ReconcileInput>& sites,
                                              double site_capacity_mb);

MetricsLog run_sim(const SimConfig& cfg);
MetricsLog run_sim(const SimConfig& cfg, const ForecastBank* bank);

struct SavingsTable {
    std::vector<double> per_slot; // network mean per slot
    std::vector<double> hourly;   // 24 hour-of-day means
    double run_mean = 0.0;
};

SavingsTable compute_savings(const MetricsLog& log, double baseline);

enum class SweepVariable { gamma, containers };

struct SweepRow {
    double value = 0.0;
    double llc_savings = 0.0;
    double open_savings = 0.0;
    double llc_theta_mec = 0.0;
    double open_theta_mec = 0.0;
};

// Rerun the simulation per value with common random numbers; LLC and OPEN
// share seeds and traces at each point.
std::vector<SweepRow> sweep(const SimConfig& cfg, SweepVariable variable,
                            const std::vector<double>& values,
                            const ForecastBank* bank = nullptr);

} // namespace greenmesh
