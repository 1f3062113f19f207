#pragma once

#include <map>
#include <vector>

#include "greenmesh/energy.hpp"

namespace greenmesh {

struct ContainerAllocation {
    std::vector<double> loads;  // per-container load, each in (0, lambda_max]
    double lambda_max = 10.0;   // MB per slot per container

    int d_active() const { return static_cast<int>(loads.size()); }
    double total() const;
    void validate() const;
};

struct FlowSet {
    double w_local = 0.0;           // load computed at this site
    std::map<int, double> w_in;     // neighbor id -> inbound load
    std::map<int, double> w_out;    // neighbor id -> outbound load

    double in_total() const;
    double out_total() const;
};

// Smallest container count whose combined capacity covers the workload.
// Throws CapacityError when that count exceeds the site budget.
int containers_needed(double w_nn, double lambda_max, int budget_d = 20);

// Fill containers to lambda_max, remainder in the last one.
ContainerAllocation distribute_load(double w_nn, double lambda_max,
                                    int budget_d = 20);

// Battery-ratio admission of the offered delay-sensitive load, clamped to
// [0, l]; a vanishing predicted next level admits nothing.
double local_admission(double b_now, double b_next_pred, double l,
                       double eps = 1.0);

double mec_energy(const ContainerAllocation& alloc, const EnergyCoeffs& coeffs);

// Net outbound flow may not exceed the load collected here.
bool check_flow_conservation(const FlowSet& flows);

} // namespace greenmesh
