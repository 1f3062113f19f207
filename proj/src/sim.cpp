#include "greenmesh/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "greenmesh/clustering.hpp"
#include "greenmesh/errors.hpp"
#include "greenmesh/rng.hpp"

namespace greenmesh {

std::string controller_name(ControllerKind c) {
    switch (c) {
        case ControllerKind::llc: return "LLC";
        case ControllerKind::open: return "OPEN";
        case ControllerKind::none: return "NONE";
    }
    return "?";
}

ControllerKind controller_from_name(const std::string& name) {
    if (name == "LLC" || name == "llc") return ControllerKind::llc;
    if (name == "OPEN" || name == "open") return ControllerKind::open;
    if (name == "NONE" || name == "none") return ControllerKind::none;
    throw ValidationError("unknown controller: " + name);
}

std::string topology_name(TopologyKind t) {
    switch (t) {
        case TopologyKind::complete: return "complete";
        case TopologyKind::ring: return "ring";
        case TopologyKind::k_nearest: return "k-nearest";
    }
    return "?";
}

TopologyKind topology_from_name(const std::string& name) {
    if (name == "complete") return TopologyKind::complete;
    if (name == "ring") return TopologyKind::ring;
    if (name == "k-nearest" || name == "k_nearest") return TopologyKind::k_nearest;
    throw ValidationError("unknown topology: " + name);
}

Topology Topology::make(int n_sites, TopologyKind kind, int k) {
    if (n_sites < 1) throw ValidationError("topology: need at least one site");
    Topology topo;
    topo.n_sites = n_sites;
    topo.kind = kind;
    topo.k = k;
    topo.adjacency.assign(n_sites, {});
    auto link = [&](int a, int b) {
        if (a == b) return;
        auto& va = topo.adjacency[a];
        if (std::find(va.begin(), va.end(), b) == va.end()) {
            va.push_back(b);
            topo.adjacency[b].push_back(a);
        }
    };
    switch (kind) {
        case TopologyKind::complete:
            for (int a = 0; a < n_sites; ++a)
                for (int b = a + 1; b < n_sites; ++b) link(a, b);
            break;
        case TopologyKind::ring:
            for (int a = 0; a < n_sites; ++a) link(a, (a + 1) % n_sites);
            break;
        case TopologyKind::k_nearest: {
            // Sites on a circle; neighbors by index distance, k/2 per side.
            if (k < 1) throw ValidationError("topology: k must be >= 1");
            const int side = std::max(1, k / 2);
            for (int a = 0; a < n_sites; ++a)
                for (int d = 1; d <= side; ++d) link(a, (a + d) % n_sites);
            break;
        }
    }
    for (auto& row : topo.adjacency) std::sort(row.begin(), row.end());
    topo.validate();
    return topo;
}

void Topology::validate() const {
    if (static_cast<int>(adjacency.size()) != n_sites)
        throw ValidationError("topology: adjacency size mismatch");
    for (int a = 0; a < n_sites; ++a) {
        for (int b : adjacency[a]) {
            if (b == a) throw ValidationError("topology: self-loop");
            if (b < 0 || b >= n_sites) throw ValidationError("topology: bad index");
            const auto& back = adjacency[b];
            if (std::find(back.begin(), back.end(), a) == back.end())
                throw ValidationError("topology: asymmetric adjacency");
        }
    }
}

void SimConfig::validate() const {
    if (n_sites < 1 || days < 1 || slots_per_day < 1 || slot_seconds < 1)
        throw ValidationError("sim config: sizes must be positive");
    if (horizon < 1) throw ValidationError("sim config: horizon must be >= 1");
    if (gamma < 0.0 || gamma > 1.0) throw ValidationError("sim config: gamma must be in [0,1]");
    if (d_budget < 1) throw ValidationError("sim config: d_budget must be >= 1");
    if (b_max <= 0.0) throw ValidationError("sim config: b_max must be > 0");
    if (!(mu > 0.0 && mu <= 1.0)) throw ValidationError("sim config: mu must be in (0,1]");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("sim config: alpha must be in (0,1]");
    if (lambda_max <= 0.0) throw ValidationError("sim config: lambda_max must be > 0");
    if (open_v <= 0.0) throw ValidationError("sim config: open_v must be > 0");
    if (load_scale_mb < 0.0 || solar_scale_j < 0.0 || wind_scale_j < 0.0)
        throw ValidationError("sim config: scales must be >= 0");
    if (solar_fraction < 0.0 || solar_fraction > 1.0)
        throw ValidationError("sim config: solar_fraction must be in [0,1]");
    if (battery_init_frac < 0.0 || battery_init_frac > 1.0)
        throw ValidationError("sim config: battery_init_frac must be in [0,1]");
    if (sensitive_ratio < 0.0 || sensitive_ratio > 1.0)
        throw ValidationError("sim config: sensitive_ratio must be in [0,1]");
    if (traffic_noise < 0.0 || harvest_noise < 0.0)
        throw ValidationError("sim config: noise must be >= 0");
    if (train_days < 2) throw ValidationError("sim config: train_days must be >= 2");
    grid.validate();
    SiteModel m = site_model();
    m.coeffs.validate();
    m.battery_tpl.validate();
}

SiteModel SimConfig::site_model() const {
    SiteModel m;
    m.coeffs.eta = eta;
    m.coeffs.kappa = kappa;
    m.coeffs.bs_idle = bs_idle;
    m.coeffs.bs_load = bs_load;
    m.coeffs.mec_idle_per_container = mec_idle;
    m.coeffs.mec_dyn_per_container = mec_dyn;
    m.battery_tpl.capacity = b_max;
    m.battery_tpl.leak = mu;
    m.battery_tpl.charge_eff = alpha;
    m.battery_tpl.level = 0.0;
    m.d_budget = d_budget;
    m.lambda_max = lambda_max;
    m.load_scale_mb = load_scale_mb;
    m.sensitive_ratio = sensitive_ratio;
    m.admission_eps = admission_eps;
    return m;
}

ForecastBank train_bank(const SimConfig& cfg) {
    const auto& shapes = traffic_cluster_shapes();
    Rng root(cfg.train_seed);
    ForecastBank bank;
    bank.traffic.reserve(shapes.size());
    for (const auto& shape : shapes) {
        TimeSeries ts = synth_traffic_profile(shape, cfg.train_days, root.next_u64(),
                                              cfg.traffic_noise, cfg.slots_per_day);
        TrainResult res = train(ts, cfg.train);
        bank.traffic.push_back(std::move(res.weights));
        bank.test_rmse.push_back(res.test_rmse);
    }
    {
        TimeSeries ts = synth_trace(TraceKind::solar, cfg.train_days, root.next_u64(),
                                    cfg.harvest_noise, cfg.slots_per_day);
        TrainResult res = train(ts, cfg.train);
        bank.solar = std::move(res.weights);
        bank.test_rmse.push_back(res.test_rmse);
    }
    {
        TimeSeries ts = synth_trace(TraceKind::wind, cfg.train_days, root.next_u64(),
                                    cfg.harvest_noise, cfg.slots_per_day);
        TrainResult res = train(ts, cfg.train);
        bank.wind = std::move(res.weights);
        bank.test_rmse.push_back(res.test_rmse);
    }
    return bank;
}

double MetricsLog::run_mean_savings() const {
    if (rows.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : rows) s += r.savings_pct;
    return s / rows.size();
}

double MetricsLog::mean_theta_mec() const {
    if (rows.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : rows) s += r.theta_mec;
    return s / rows.size();
}

std::vector<double> MetricsLog::hourly_mean_savings() const {
    std::vector<double> sums(24, 0.0);
    std::vector<long> counts(24, 0);
    for (const auto& r : rows) {
        const int sod = r.slot % slots_per_day;
        const int hour = sod * 24 / slots_per_day;
        sums[hour] += r.savings_pct;
        ++counts[hour];
    }
    std::vector<double> out(24, 0.0);
    for (int h = 0; h < 24; ++h)
        if (counts[h] > 0) out[h] = sums[h] / counts[h];
    return out;
}

void write_metrics_csv(std::ostream& out, const MetricsLog& log) {
    out << "slot,site,theta_bs,theta_mec,theta_site,battery,d_active,"
           "w_local,w_in,w_out,qos_penalty,deficit,savings_pct\n";
    char buf[360];
    for (const auto& r : log.rows) {
        std::snprintf(buf, sizeof buf,
                      "%d,%d,%.9g,%.9g,%.9g,%.9g,%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                      r.slot, r.site, r.theta_bs, r.theta_mec, r.theta_site,
                      r.battery, r.d_active, r.w_local, r.w_in, r.w_out,
                      r.qos_penalty, r.deficit, r.savings_pct);
        out << buf;
    }
}

std::vector<ReconcileOutcome> reconcile_flows(const std::vector<ReconcileInput>& sites,
                                              double site_capacity_mb) {
    const int n = static_cast<int>(sites.size());
    std::vector<double> residual(n, 0.0), incoming(n, 0.0);
    for (int i = 0; i < n; ++i) {
        residual[i] = sites[i].constrained
                          ? 0.0
                          : std::max(0.0, site_capacity_mb - sites[i].kept_desired);
    }
    for (const auto& s : sites)
        for (const auto& [to, mb] : s.out_desired) {
            if (to < 0 || to >= n) throw ValidationError("reconcile: bad receiver id");
            if (mb < 0.0) throw ValidationError("reconcile: negative request");
            incoming[to] += mb;
        }

    std::vector<double> scale(n, 1.0), granted_to(n, 0.0);
    for (int i = 0; i < n; ++i)
        if (incoming[i] > residual[i])
            scale[i] = incoming[i] > 0.0 ? residual[i] / incoming[i] : 0.0;

    std::vector<ReconcileOutcome> out(n);
    // Grant pass: deterministic sender order, cumulative clamp so float dust
    // never oversubscribes a receiver.
    for (int s = 0; s < n; ++s) {
        for (const auto& [to, mb] : sites[s].out_desired) {
            double g = mb * scale[to];
            g = std::min(g, residual[to] - granted_to[to]);
            g = std::max(0.0, g);
            granted_to[to] += g;
            if (g > 0.0) {
                out[s].flows.w_out[to] += g;
                out[to].flows.w_in[s] += g;
            }
        }
    }
    // Settle: returned load goes back through the sender's admission.
    for (int s = 0; s < n; ++s) {
        const auto& in = sites[s];
        const double out_granted = out[s].flows.out_total();
        double desired_total = 0.0;
        for (const auto& [to, mb] : in.out_desired) desired_total += mb;
        const double returned = std::max(0.0, desired_total - out_granted);
        const double in_granted = out[s].flows.in_total();
        double kept = in.constrained
                          ? 0.0
                          : std::min({in.kept_desired + returned, in.admission_cap,
                                      site_capacity_mb - in_granted});
        kept = std::max(0.0, kept);
        out[s].kept = kept;
        out[s].shed = std::max(0.0, in.offered - kept - out_granted);
        out[s].flows.w_local = kept;
    }
    return out;
}

namespace {

struct SiteRuntime {
    int traffic_shape = 0;
    bool is_solar = false;
    std::vector<double> traffic;      // normalized
    std::vector<double> harvest_norm; // normalized
    double harvest_scale = 0.0;
    SiteModel model;
    SystemState state;
    double open_queue = 0.0;
    double harvest_sum = 0.0;
    long harvest_count = 0;
};

std::vector<double> window_of(const std::vector<double>& series, int end_exclusive,
                              int len) {
    return std::vector<double>(series.begin() + (end_exclusive - len),
                               series.begin() + end_exclusive);
}

} // namespace

MetricsLog run_sim(const SimConfig& cfg) { return run_sim(cfg, nullptr); }

MetricsLog run_sim(const SimConfig& cfg, const ForecastBank* bank) {
    cfg.validate();
    const int n = cfg.n_sites;
    const int slots = cfg.days * cfg.slots_per_day;
    const Topology topo = Topology::make(n, cfg.topology, cfg.topology_k);
    const auto& shapes = traffic_cluster_shapes();

    ForecastBank local_bank;
    const ForecastBank* fc_bank = bank;
    const bool want_lstm = cfg.use_lstm && cfg.controller == ControllerKind::llc;
    if (want_lstm && !fc_bank) {
        local_bank = train_bank(cfg);
        fc_bank = &local_bank;
    }
    if (fc_bank && static_cast<int>(fc_bank->traffic.size()) <
                       static_cast<int>(shapes.size()))
        throw ValidationError("run_sim: forecast bank is missing traffic models");

    // Site setup: category, harvest kind, traces.
    Rng root(cfg.seed);
    std::vector<SiteRuntime> sites(n);
    for (int i = 0; i < n; ++i) {
        SiteRuntime& site = sites[i];
        site.traffic_shape =
            static_cast<int>(root.uniform_int(0, static_cast<std::int64_t>(shapes.size()) - 1));
        site.is_solar = root.uniform01() < cfg.solar_fraction;
        const std::uint64_t tseed = root.next_u64();
        const std::uint64_t hseed = root.next_u64();
        site.traffic = synth_traffic_profile(shapes[site.traffic_shape], cfg.days,
                                             tseed, cfg.traffic_noise,
                                             cfg.slots_per_day)
                           .values;
        site.harvest_norm =
            synth_trace(site.is_solar ? TraceKind::solar : TraceKind::wind, cfg.days,
                        hseed, cfg.harvest_noise, cfg.slots_per_day)
                .values;
        site.harvest_scale = site.is_solar ? cfg.solar_scale_j : cfg.wind_scale_j;
        site.model = cfg.site_model();
        double hmax = 0.0;
        for (double v : site.harvest_norm) hmax = std::max(hmax, v * site.harvest_scale);
        site.model.h_max = hmax;
        site.state.battery_level = cfg.battery_init_frac * cfg.b_max;
        site.state.energy_constrained = cfg.controller == ControllerKind::none;
    }

    MetricsLog log;
    log.n_sites = n;
    log.slots = slots;
    log.slots_per_day = cfg.slots_per_day;
    log.baseline = baseline_energy(sites.front().model);
    log.rows.reserve(static_cast<std::size_t>(slots) * n);

    const CostWeights weights{cfg.gamma};
    const int W = cfg.train.window_len;
    const double capacity_mb = static_cast<double>(cfg.d_budget) * cfg.lambda_max;

    std::vector<ControlInput> actions(n);
    std::vector<double> belief_h(n, 0.0);
    std::vector<ReconcileInput> rec_in(n);

    for (int t = 0; t < slots; ++t) {
        // Slot-boundary view of every site, for neighbor targeting.
        std::vector<NeighborInfo> all_info(n);
        for (int i = 0; i < n; ++i)
            all_info[i] = {i, sites[i].state.battery_level,
                           sites[i].state.energy_constrained};

        // Decide.
        for (int i = 0; i < n; ++i) {
            SiteRuntime& site = sites[i];
            std::vector<NeighborInfo> nbrs;
            nbrs.reserve(topo.adjacency[i].size());
            for (int j : topo.adjacency[i]) nbrs.push_back(all_info[j]);

            if (cfg.controller == ControllerKind::none) {
                actions[i] = failsafe_action(site.model);
                belief_h[i] = site.state.last_harvest;
                continue;
            }

            if (cfg.controller == ControllerKind::open) {
                const double budget =
                    site.harvest_count > 0 ? site.harvest_sum / site.harvest_count : 0.0;
                OpenResult res = open_step(site.state, site.state.last_load,
                                           site.state.last_harvest, cfg.open_v,
                                           site.open_queue, budget, weights,
                                           cfg.grid, nbrs, site.model);
                actions[i] = std::move(res.action);
                site.open_queue = res.queue;
                belief_h[i] = site.state.last_harvest;
                continue;
            }

            // LLC: forecast T steps ahead; persistence while the window fills.
            std::vector<Forecast> fc(cfg.horizon);
            if (want_lstm && t >= W) {
                const LstmWeights& traffic_model = fc_bank->traffic[site.traffic_shape];
                const LstmWeights& harvest_model =
                    site.is_solar ? fc_bank->solar : fc_bank->wind;
                const ForecastResult lf = predict_horizon(
                    traffic_model, window_of(site.traffic, t, W), cfg.horizon);
                const ForecastResult hf = predict_horizon(
                    harvest_model, window_of(site.harvest_norm, t, W), cfg.horizon);
                for (int p = 0; p < cfg.horizon; ++p) {
                    fc[p].load_norm = lf.predictions[p];
                    fc[p].harvest_j = hf.predictions[p] * site.harvest_scale;
                }
            } else {
                for (int p = 0; p < cfg.horizon; ++p) {
                    fc[p].load_norm = site.state.last_load;
                    fc[p].harvest_j = std::min(site.state.last_harvest, site.model.h_max);
                }
            }
            actions[i] = llc_plan(site.state, fc, cfg.horizon, weights, cfg.grid,
                                  nbrs, site.model);
            belief_h[i] = fc[0].harvest_j;
        }

        // Desired flows against realized load, believed harvest.
        for (int i = 0; i < n; ++i) {
            SiteRuntime& site = sites[i];
            const FlowPlan plan = desired_flows(site.state, actions[i],
                                                site.traffic[t], belief_h[i],
                                                site.model);
            rec_in[i].offered = plan.offered_sensitive;
            rec_in[i].kept_desired = plan.kept_desired;
            rec_in[i].admission_cap = plan.admission_cap;
            rec_in[i].constrained = site.state.energy_constrained;
            rec_in[i].out_desired = plan.out_desired;
        }

        const std::vector<ReconcileOutcome> settled = reconcile_flows(rec_in, capacity_mb);

        // Commit at the slot barrier.
        for (int i = 0; i < n; ++i) {
            SiteRuntime& site = sites[i];
            SettledFlows flows;
            flows.kept = settled[i].kept;
            flows.w_in = settled[i].flows.in_total();
            flows.w_out = settled[i].flows.out_total();
            flows.offered = rec_in[i].offered;
            flows.charge_fraction = actions[i].harvest_charge_fraction;
            const double h_realized = site.harvest_norm[t] * site.harvest_scale;

            const Transition tr =
                commit_slot(site.state, flows, site.traffic[t], h_realized, site.model);

            MetricsRow row;
            row.slot = t;
            row.site = i;
            row.theta_bs = tr.energy.theta_bs;
            row.theta_mec = tr.energy.theta_mec;
            row.theta_site = tr.energy.theta_site;
            row.battery = tr.next.battery_level;
            row.d_active = tr.d_active;
            row.w_local = tr.kept;
            row.w_in = tr.w_in;
            row.w_out = tr.w_out;
            const double bal = tr.kept - tr.w_out;
            row.qos_penalty = cfg.gamma * bal * bal;
            row.deficit = tr.deficit;
            row.savings_pct = 100.0 * (1.0 - tr.energy.theta_site / log.baseline);
            row.offered = tr.offered;
            row.kept = tr.kept;
            row.shed = tr.shed;
            row.h_c = tr.h_c;
            row.h_o = tr.h_o;
            row.harvest = h_realized;
            row.constrained = site.state.energy_constrained;
            log.rows.push_back(row);

            site.state = tr.next;
            if (cfg.controller == ControllerKind::none)
                site.state.energy_constrained = true;
            site.harvest_sum += h_realized;
            ++site.harvest_count;
        }
    }
    return log;
}

SavingsTable compute_savings(const MetricsLog& log, double baseline) {
    if (baseline <= 0.0) throw ValidationError("compute_savings: baseline must be > 0");
    SavingsTable table;
    table.per_slot.assign(log.slots, 0.0);
    std::vector<int> counts(log.slots, 0);
    double total = 0.0;
    for (const auto& r : log.rows) {
        const double s = 100.0 * (1.0 - r.theta_site / baseline);
        table.per_slot[r.slot] += s;
        ++counts[r.slot];
        total += s;
    }
    for (int t = 0; t < log.slots; ++t)
        if (counts[t] > 0) table.per_slot[t] /= counts[t];
    table.run_mean = log.rows.empty() ? 0.0 : total / log.rows.size();

    std::vector<double> sums(24, 0.0);
    std::vector<long> hc(24, 0);
    for (const auto& r : log.rows) {
        const int hour = (r.slot % log.slots_per_day) * 24 / log.slots_per_day;
        sums[hour] += 100.0 * (1.0 - r.theta_site / baseline);
        ++hc[hour];
    }
    table.hourly.assign(24, 0.0);
    for (int h = 0; h < 24; ++h)
        if (hc[h] > 0) table.hourly[h] = sums[h] / hc[h];
    return table;
}

std::vector<SweepRow> sweep(const SimConfig& cfg, SweepVariable variable,
                            const std::vector<double>& values,
                            const ForecastBank* bank) {
    if (values.empty()) throw ValidationError("sweep: no values");
    ForecastBank local_bank;
    const ForecastBank* use_bank = bank;
    if (cfg.use_lstm && !use_bank) {
        local_bank = train_bank(cfg);
        use_bank = &local_bank;
    }
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (double v : values) {
        SimConfig point = cfg;
        if (variable == SweepVariable::gamma) {
            point.gamma = v;
        } else {
            point.d_budget = static_cast<int>(v);
            if (point.d_budget < 1 ||
                static_cast<double>(point.d_budget) != v)
                throw ValidationError("sweep: container counts must be positive integers");
        }
        SweepRow row;
        row.value = v;
        point.controller = ControllerKind::llc;
        MetricsLog llc_log = run_sim(point, use_bank);
        row.llc_savings = llc_log.run_mean_savings();
        row.llc_theta_mec = llc_log.mean_theta_mec();
        point.controller = ControllerKind::open;
        MetricsLog open_log = run_sim(point, use_bank);
        row.open_savings = open_log.run_mean_savings();
        row.open_theta_mec = open_log.mean_theta_mec();
        rows.push_back(row);
    }
    return rows;
}

} // namespace greenmesh
