#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "greenmesh/compute.hpp"
#include "greenmesh/energy.hpp"

namespace greenmesh {

// Observable per-site state at a slot boundary.
struct SystemState {
    double battery_level = 0.0;
    double buffered_out_jobs = 0.0; // output batching buffer; drained every slot
    int prev_containers = 0;
    double last_load = 0.0;    // normalized
    double last_harvest = 0.0; // joules/slot
    bool energy_constrained = false;
};

// One site's per-slot decision.
struct ControlInput {
    double harvest_charge_fraction = 0.0; // reserved for charging before direct use
    std::vector<std::pair<int, double>> offload_fractions; // neighbor id -> share of delay-sensitive load
    int d_active = 0; // containers implied by the admitted local load

    double offload_total() const;
};

struct CostWeights {
    double gamma = 0.5; // 0 = pure energy, 1 = pure flow-balance penalty
};

// Discretization of the continuous controls.
struct ActionGrid {
    std::vector<double> fraction_levels{0.0, 0.25, 0.5, 0.75, 1.0};
    int neighbor_fanout = 2;
    int battery_buckets = 64; // 0 disables dominance pruning

    void validate() const;
};

// What a planning site knows about a neighbor at the slot boundary.
struct NeighborInfo {
    int id = 0;
    double battery_level = 0.0;
    bool energy_constrained = false;
};

// Static per-site scenario parameters shared by planning and commit.
struct SiteModel {
    EnergyCoeffs coeffs;
    Battery battery_tpl;          // capacity/leak/charge_eff template; level unused
    int d_budget = 20;
    double lambda_max = 10.0;     // MB per container per slot
    double load_scale_mb = 100.0; // offered MB at normalized load 1
    double sensitive_ratio = 0.8;
    double h_max = 1.0e9;         // per-slot harvest ceiling, joules
    double admission_eps = 1.0;   // joules
};

double cost_J(double theta_site, double w_nn, double w_out_total,
              const CostWeights& weights);

// Maximum-capacity dimensioning: full-load transmission plus every container
// busy. The savings denominator, and the consumption of an unmanaged slot.
double baseline_energy(const SiteModel& m);

// The no-management action: everything local, all containers up.
ControlInput failsafe_action(const SiteModel& m);

// Everything one slot produces, for the planner, the simulator, and the logs.
struct Transition {
    SystemState next;
    SiteEnergy energy;
    double offered = 0.0;  // delay-sensitive MB arriving this slot
    double kept = 0.0;     // computed locally
    double w_in = 0.0;     // accepted from neighbors
    double w_out = 0.0;    // forwarded to neighbors
    double shed = 0.0;     // offered - kept - w_out
    double h_c = 0.0, h_o = 0.0;
    double deficit = 0.0;
    int d_active = 0;
};

// Admission and desired flows for one slot, before reconciliation. An
// energy-constrained site admits nothing and requests nothing.
struct FlowPlan {
    double offered_sensitive = 0.0;
    double admission_cap = 0.0;
    double kept_desired = 0.0;
    bool out_capped = false; // requests trimmed to the net-outflow bound
    std::vector<std::pair<int, double>> out_desired; // neighbor id -> MB
};

FlowPlan desired_flows(const SystemState& q, const ControlInput& phi,
                       double load_norm, double h_belief_j, const SiteModel& m);

// Commit one slot with settled flows: energy, harvest split, battery update.
// Constrained sites run unmanaged at baseline energy for the slot.
struct SettledFlows {
    double kept = 0.0;
    double w_in = 0.0;
    double w_out = 0.0;
    double offered = 0.0;
    double charge_fraction = 0.0;
};

Transition commit_slot(const SystemState& q, const SettledFlows& flows,
                       double load_norm, double harvest_j, const SiteModel& m);

// Planner's slot model: desired flows with every request assumed granted and
// zero expected inflow.
Transition plan_transition(const SystemState& q, const ControlInput& phi,
                           double load_norm_hat, double harvest_j_hat,
                           const SiteModel& m);

// Estimated next state under forecasted load and harvest.
SystemState next_state(const SystemState& q, const ControlInput& phi,
                       double load_norm_hat, double harvest_j_hat,
                       const SiteModel& m);

// Candidate actions: harvest-charge fractions crossed with offload splits
// over the most energy-rich neighbors; the all-local action is always there.
std::vector<ControlInput> enumerate_actions(const SystemState& q,
                                            double load_norm_hat,
                                            double harvest_j_hat,
                                            const ActionGrid& grid,
                                            const std::vector<NeighborInfo>& neighbors,
                                            const SiteModel& m);

struct Forecast {
    double load_norm = 0.0;
    double harvest_j = 0.0;
};

// Breadth-first lookahead over estimated states; returns the first action of
// a minimum-cost path. Ties: lower accumulated energy, lower total offload,
// then enumeration order.
ControlInput llc_plan(const SystemState& q, const std::vector<Forecast>& forecasts,
                      int t_depth, const CostWeights& weights, const ActionGrid& grid,
                      const std::vector<NeighborInfo>& neighbors, const SiteModel& m);

// Drift-plus-penalty step on current observations only.
struct OpenResult {
    ControlInput action;
    double queue = 0.0;
};

OpenResult open_step(const SystemState& q, double load_obs_norm,
                     double harvest_obs_j, double v, double deficit_queue,
                     double energy_budget_j, const CostWeights& weights,
                     const ActionGrid& grid,
                     const std::vector<NeighborInfo>& neighbors,
                     const SiteModel& m);

} // namespace greenmesh
