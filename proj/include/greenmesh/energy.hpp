#pragma once

namespace greenmesh {

struct ContainerAllocation;

// Energy buffer with leakage and charging loss.
struct Battery {
    double level = 0.0;          // joules
    double capacity = 100000.0;  // joules
    double leak = 0.9999;        // per-slot retention factor, in (0,1]
    double charge_eff = 0.900;   // charging efficiency, in (0,1]

    void validate() const;
};

struct HarvestSplit {
    double h_c = 0.0; // joules routed to charging
    double h_o = 0.0; // joules used directly
};

struct EnergyCoeffs {
    double eta = 0.105;    // J per (job/slot) of collected + incoming flow
    double kappa = -0.035; // J per (job/slot) of outgoing flow, negative
    double bs_idle = 50.0; // J/slot with no traffic
    double bs_load = 150.0; // J/slot extra at full normalized load
    double mec_idle_per_container = 2.0;
    double mec_dyn_per_container = 8.0; // J/slot extra per container at full load

    void validate() const;
};

struct SiteEnergy {
    double theta_bs = 0.0;
    double theta_mec = 0.0;
    double theta_site = 0.0;
};

// Use-then-charge: direct use first, remainder to the battery.
HarvestSplit split_harvest(double h_available, double demand, double h_max);

struct BatteryStep {
    double level = 0.0;   // next-slot level, clamped to [0, capacity]
    double deficit = 0.0; // energy the buffer could not cover this slot
};

// level' = clamp(leak * (level - theta) + charge_eff * h_c, 0, capacity);
// deficit = max(0, theta - level).
BatteryStep battery_step(const Battery& batt, double theta, double h_c);

// Flow-proportional demand; negative raw values clamp to zero.
double flow_energy(const EnergyCoeffs& coeffs, double w_local, double w_in,
                   double w_out);

// theta_bs affine in normalized load; theta_mec = container energy plus the
// flow term.
SiteEnergy site_energy(const EnergyCoeffs& coeffs, double load,
                       const ContainerAllocation& alloc, double w_local,
                       double w_in, double w_out);

} // namespace greenmesh
