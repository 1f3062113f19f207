#include "greenmesh/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "greenmesh/errors.hpp"
#include "greenmesh/timeseries.hpp"

namespace greenmesh {

double ControlInput::offload_total() const {
    double s = 0.0;
    for (const auto& [id, f] : offload_fractions) s += f;
    return s;
}

void ActionGrid::validate() const {
    if (fraction_levels.size() < 2 || fraction_levels.front() != 0.0 ||
        fraction_levels.back() != 1.0)
        throw ValidationError("action grid: levels must start at 0 and end at 1");
    for (std::size_t i = 1; i < fraction_levels.size(); ++i)
        if (fraction_levels[i] <= fraction_levels[i - 1])
            throw ValidationError("action grid: levels must be strictly increasing");
    if (neighbor_fanout < 1) throw ValidationError("action grid: fanout must be >= 1");
    if (battery_buckets < 0) throw ValidationError("action grid: buckets must be >= 0");
}

double cost_J(double theta_site, double w_nn, double w_out_total,
              const CostWeights& weights) {
    if (weights.gamma < 0.0 || weights.gamma > 1.0)
        throw ValidationError("cost weights: gamma must be in [0,1]");
    const double d = w_nn - w_out_total;
    return (1.0 - weights.gamma) * theta_site + weights.gamma * d * d;
}

double baseline_energy(const SiteModel& m) {
    return m.coeffs.bs_idle + m.coeffs.bs_load +
           m.d_budget * (m.coeffs.mec_idle_per_container + m.coeffs.mec_dyn_per_container);
}

ControlInput failsafe_action(const SiteModel& m) {
    ControlInput phi;
    phi.harvest_charge_fraction = 0.0;
    phi.d_active = m.d_budget;
    return phi;
}

namespace {

double predicted_next_level(const SystemState& q, double h_belief_j,
                            const SiteModel& m) {
    // Battery outlook used by admission: leak plus the charged harvest,
    // before this slot's consumption is decided.
    const double raw = m.battery_tpl.leak * q.battery_level +
                       m.battery_tpl.charge_eff * h_belief_j;
    return std::clamp(raw, 0.0, m.battery_tpl.capacity);
}

} // namespace

FlowPlan desired_flows(const SystemState& q, const ControlInput& phi,
                       double load_norm, double h_belief_j, const SiteModel& m) {
    FlowPlan plan;
    plan.offered_sensitive = split_workloads(load_norm * m.load_scale_mb,
                                             m.sensitive_ratio).first;
    if (q.energy_constrained) return plan; // admits nothing, requests nothing

    plan.admission_cap = local_admission(q.battery_level,
                                         predicted_next_level(q, h_belief_j, m),
                                         plan.offered_sensitive, m.admission_eps);
    double frac_total = 0.0;
    for (const auto& [id, f] : phi.offload_fractions) {
        if (f < 0.0 || f > 1.0)
            throw ValidationError("control input: offload fraction outside [0,1]");
        if (f > 0.0) plan.out_desired.emplace_back(id, f * plan.offered_sensitive);
        frac_total += f;
    }
    if (frac_total > 1.0 + 1e-12)
        throw ValidationError("control input: offload fractions sum above 1");
    const double not_offloaded = std::max(0.0, (1.0 - frac_total) * plan.offered_sensitive);
    plan.kept_desired = std::min({plan.admission_cap, not_offloaded,
                                  static_cast<double>(m.d_budget) * m.lambda_max});
    // Net outflow may not exceed the locally computed share: trim requests
    // proportionally when they overshoot it; the trimmed remainder is shed.
    double out_total = 0.0;
    for (const auto& [id, mb] : plan.out_desired) out_total += mb;
    if (out_total > plan.kept_desired + 1e-9) {
        plan.out_capped = true;
        const double scale =
            out_total > 0.0 ? plan.kept_desired / out_total : 0.0;
        for (auto& [id, mb] : plan.out_desired) mb *= scale;
    }
    return plan;
}

Transition commit_slot(const SystemState& q, const SettledFlows& flows,
                       double load_norm, double harvest_j, const SiteModel& m) {
    if (harvest_j < 0.0) throw ValidationError("commit: harvest must be >= 0");
    const double h = std::min(harvest_j, m.h_max);
    Battery batt = m.battery_tpl;
    batt.level = q.battery_level;

    Transition tr;
    tr.offered = flows.offered;

    if (q.energy_constrained) {
        // Unmanaged slot: full transmission, every container busy, no flows.
        // The buffer pays what it can; the logged deficit is covered by the
        // site's fallback supply.
        const double theta = baseline_energy(m);
        tr.energy.theta_bs = m.coeffs.bs_idle + m.coeffs.bs_load;
        tr.energy.theta_mec = theta - tr.energy.theta_bs;
        tr.energy.theta_site = theta;
        const HarvestSplit hs = split_harvest(h, theta, m.h_max);
        tr.h_c = hs.h_c;
        tr.h_o = hs.h_o;
        const BatteryStep bs = battery_step(batt, theta - hs.h_o, hs.h_c);
        tr.deficit = bs.deficit;
        tr.shed = flows.offered;
        tr.d_active = m.d_budget;
        tr.next = q;
        tr.next.battery_level = bs.level;
        tr.next.energy_constrained = bs.deficit > 0.0;
        tr.next.prev_containers = m.d_budget;
        tr.next.last_load = load_norm;
        tr.next.last_harvest = harvest_j;
        tr.next.buffered_out_jobs = 0.0;
        return tr;
    }

    tr.kept = flows.kept;
    tr.w_in = flows.w_in;
    tr.w_out = flows.w_out;
    tr.shed = std::max(0.0, flows.offered - flows.kept - flows.w_out);

    const ContainerAllocation alloc =
        distribute_load(flows.kept + flows.w_in, m.lambda_max, m.d_budget);
    // Jobs shipped out leave the bill through the rebate coefficient only;
    // the proportional charge covers what this server computes: its own
    // admitted share plus whatever neighbors forwarded here.
    tr.energy = site_energy(m.coeffs, load_norm, alloc, flows.kept, flows.w_in,
                            flows.w_out);

    const double gamma_c = std::clamp(flows.charge_fraction, 0.0, 1.0);
    const double reserved = gamma_c * h;
    const HarvestSplit hs = split_harvest(h - reserved, tr.energy.theta_site, m.h_max);
    tr.h_o = hs.h_o;
    tr.h_c = hs.h_c + reserved;

    const BatteryStep bs =
        battery_step(batt, std::max(0.0, tr.energy.theta_site - tr.h_o), tr.h_c);
    tr.deficit = bs.deficit;
    tr.d_active = alloc.d_active();

    tr.next = q;
    tr.next.battery_level = bs.level;
    tr.next.energy_constrained = bs.deficit > 0.0;
    tr.next.prev_containers = tr.d_active;
    tr.next.last_load = load_norm;
    tr.next.last_harvest = harvest_j;
    tr.next.buffered_out_jobs = 0.0;
    return tr;
}

Transition plan_transition(const SystemState& q, const ControlInput& phi,
                           double load_norm_hat, double harvest_j_hat,
                           const SiteModel& m) {
    const FlowPlan plan = desired_flows(q, phi, load_norm_hat, harvest_j_hat, m);
    SettledFlows flows;
    flows.offered = plan.offered_sensitive;
    flows.kept = plan.kept_desired;
    flows.w_in = 0.0; // fully distributed planning: expect no inflow
    for (const auto& [id, mb] : plan.out_desired) flows.w_out += mb;
    flows.charge_fraction = phi.harvest_charge_fraction;
    return commit_slot(q, flows, load_norm_hat, harvest_j_hat, m);
}

SystemState next_state(const SystemState& q, const ControlInput& phi,
                       double load_norm_hat, double harvest_j_hat,
                       const SiteModel& m) {
    return plan_transition(q, phi, load_norm_hat, harvest_j_hat, m).next;
}

namespace {

// Offload-fraction tuples over `slots` targets with sum <= 1, in
// lexicographic order over the level grid.
void fraction_combos(const std::vector<double>& levels, int slots,
                     std::vector<double>& cur, double sum,
                     std::vector<std::vector<double>>& out) {
    if (static_cast<int>(cur.size()) == slots) {
        out.push_back(cur);
        return;
    }
    for (double f : levels) {
        if (sum + f > 1.0 + 1e-12) continue;
        cur.push_back(f);
        fraction_combos(levels, slots, cur, sum + f, out);
        cur.pop_back();
    }
}

} // namespace

std::vector<ControlInput> enumerate_actions(const SystemState& q,
                                            double load_norm_hat,
                                            double harvest_j_hat,
                                            const ActionGrid& grid,
                                            const std::vector<NeighborInfo>& neighbors,
                                            const SiteModel& m) {
    grid.validate();

    // Target the most promising peers: constrained sites grant nothing at
    // reconciliation, so they are not candidates at all; rank the rest by
    // fullest battery, index as the final tie.
    std::vector<NeighborInfo> targets;
    targets.reserve(neighbors.size());
    for (const NeighborInfo& n : neighbors)
        if (!n.energy_constrained) targets.push_back(n);
    std::stable_sort(targets.begin(), targets.end(),
                     [](const NeighborInfo& a, const NeighborInfo& b) {
                         if (a.battery_level != b.battery_level)
                             return a.battery_level > b.battery_level;
                         return a.id < b.id;
                     });
    if (static_cast<int>(targets.size()) > grid.neighbor_fanout)
        targets.resize(grid.neighbor_fanout);

    std::vector<std::vector<double>> combos;
    std::vector<double> cur;
    fraction_combos(grid.fraction_levels, static_cast<int>(targets.size()), cur,
                    0.0, combos);
    if (combos.empty()) combos.push_back({});

    std::vector<ControlInput> actions;
    actions.reserve(grid.fraction_levels.size() * combos.size());
    for (double gc : grid.fraction_levels) {
        for (const auto& combo : combos) {
            ControlInput phi;
            phi.harvest_charge_fraction = gc;
            for (std::size_t i = 0; i < combo.size(); ++i)
                if (combo[i] > 0.0)
                    phi.offload_fractions.emplace_back(targets[i].id, combo[i]);
            FlowPlan plan;
            try {
                plan = desired_flows(q, phi, load_norm_hat, harvest_j_hat, m);
                phi.d_active = containers_needed(plan.kept_desired, m.lambda_max,
                                                 m.d_budget);
            } catch (const CapacityError&) {
                continue; // infeasible candidate
            }
            // Splits whose requests overshoot the net-outflow bound would
            // silently shed the trimmed share; keep them off the menu.
            if (plan.out_capped) continue;
            actions.push_back(std::move(phi));
        }
    }
    if (actions.empty()) {
        // The all-local action with no charging reservation is always valid.
        ControlInput phi;
        phi.d_active = 0;
        actions.push_back(phi);
    }
    return actions;
}

namespace {

struct PathNode {
    SystemState q;
    double j = 0.0;
    double theta = 0.0;
    double out = 0.0;
    int first = -1;
    std::size_t seq = 0;
};

bool better(const PathNode& a, const PathNode& b) {
    if (a.j != b.j) return a.j < b.j;
    if (a.theta != b.theta) return a.theta < b.theta;
    if (a.out != b.out) return a.out < b.out;
    return a.seq < b.seq;
}

} // namespace

ControlInput llc_plan(const SystemState& q, const std::vector<Forecast>& forecasts,
                      int t_depth, const CostWeights& weights, const ActionGrid& grid,
                      const std::vector<NeighborInfo>& neighbors, const SiteModel& m) {
    if (t_depth < 1) throw ValidationError("llc_plan: depth must be >= 1");
    if (static_cast<int>(forecasts.size()) != t_depth)
        throw ValidationError("llc_plan: forecast list must match the depth");

    const std::vector<ControlInput> root_actions =
        enumerate_actions(q, forecasts[0].load_norm, forecasts[0].harvest_j, grid,
                          neighbors, m);

    std::vector<PathNode> level{{q, 0.0, 0.0, 0.0, -1, 0}};
    std::size_t seq = 0;
    for (int p = 0; p < t_depth; ++p) {
        std::vector<PathNode> next;
        const Forecast& fc = forecasts[p];
        for (const PathNode& node : level) {
            const std::vector<ControlInput>& actions =
                p == 0 ? root_actions
                       : enumerate_actions(node.q, fc.load_norm, fc.harvest_j,
                                           grid, neighbors, m);
            for (std::size_t ai = 0; ai < actions.size(); ++ai) {
                Transition tr;
                try {
                    tr = plan_transition(node.q, actions[ai], fc.load_norm,
                                         fc.harvest_j, m);
                } catch (const CapacityError&) {
                    continue;
                }
                PathNode child;
                child.q = tr.next;
                child.j = node.j + cost_J(tr.energy.theta_site, tr.kept, tr.w_out,
                                          weights);
                child.theta = node.theta + tr.energy.theta_site;
                child.out = node.out + tr.w_out;
                child.first = p == 0 ? static_cast<int>(ai) : node.first;
                child.seq = seq++;
                next.push_back(child);
            }
        }
        if (next.empty())
            throw CapacityError("llc_plan: no feasible action sequence");

        if (grid.battery_buckets > 0 && p + 1 < t_depth) {
            // Dominance pruning: best path per (battery bucket, constrained).
            const double cap = std::max(m.battery_tpl.capacity, 1e-9);
            std::vector<PathNode> kept;
            std::vector<int> slot_of(2 * static_cast<std::size_t>(grid.battery_buckets) + 2, -1);
            for (const PathNode& node : next) {
                int bucket = static_cast<int>(node.q.battery_level / cap *
                                              grid.battery_buckets);
                bucket = std::clamp(bucket, 0, grid.battery_buckets - 1);
                const std::size_t key = static_cast<std::size_t>(bucket) * 2 +
                                        (node.q.energy_constrained ? 1 : 0);
                if (slot_of[key] < 0) {
                    slot_of[key] = static_cast<int>(kept.size());
                    kept.push_back(node);
                } else if (better(node, kept[slot_of[key]])) {
                    kept[slot_of[key]] = node;
                }
            }
            level = std::move(kept);
        } else {
            level = std::move(next);
        }
    }

    const PathNode* best = &level.front();
    for (const PathNode& node : level)
        if (better(node, *best)) best = &node;
    return root_actions[static_cast<std::size_t>(best->first)];
}

OpenResult open_step(const SystemState& q, double load_obs_norm,
                     double harvest_obs_j, double v, double deficit_queue,
                     double energy_budget_j, const CostWeights& weights,
                     const ActionGrid& grid,
                     const std::vector<NeighborInfo>& neighbors,
                     const SiteModel& m) {
    if (v <= 0.0) throw ValidationError("open_step: v must be > 0");
    const std::vector<ControlInput> actions =
        enumerate_actions(q, load_obs_norm, harvest_obs_j, grid, neighbors, m);

    double best_score = std::numeric_limits<double>::infinity();
    double best_theta = std::numeric_limits<double>::infinity();
    double best_out = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    double chosen_theta = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        Transition tr;
        try {
            tr = plan_transition(q, actions[i], load_obs_norm, harvest_obs_j, m);
        } catch (const CapacityError&) {
            continue;
        }
        const double theta = tr.energy.theta_site;
        const double score =
            v * cost_J(theta, tr.kept, tr.w_out, weights) + deficit_queue * theta;
        const bool win = !any || score < best_score ||
                         (score == best_score &&
                          (theta < best_theta ||
                           (theta == best_theta && tr.w_out < best_out)));
        if (win) {
            best_score = score;
            best_theta = theta;
            best_out = tr.w_out;
            best_i = i;
            chosen_theta = theta;
            any = true;
        }
    }
    if (!any) throw CapacityError("open_step: no feasible action");

    OpenResult res;
    res.action = actions[best_i];
    res.queue = std::max(0.0, deficit_queue + chosen_theta - energy_budget_j);
    return res;
}

} // namespace greenmesh
