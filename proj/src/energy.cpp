#include "greenmesh/energy.hpp"

#include <algorithm>
#include <cmath>

#include "greenmesh/compute.hpp"
#include "greenmesh/errors.hpp"

namespace greenmesh {

void Battery::validate() const {
    if (capacity < 0.0) throw ValidationError("battery: capacity must be >= 0");
    if (!(leak > 0.0 && leak <= 1.0)) throw ValidationError("battery: leak must be in (0,1]");
    if (!(charge_eff > 0.0 && charge_eff <= 1.0))
        throw ValidationError("battery: charge_eff must be in (0,1]");
    if (level < 0.0 || level > capacity)
        throw ValidationError("battery: level outside [0, capacity]");
}

void EnergyCoeffs::validate() const {
    if (!(eta > 0.0)) throw ValidationError("coeffs: eta must be > 0");
    if (!(kappa < 0.0)) throw ValidationError("coeffs: kappa must be < 0");
    if (!(std::abs(eta) > std::abs(kappa)))
        throw ValidationError("coeffs: |eta| must exceed |kappa|");
    if (bs_idle < 0.0 || bs_load < 0.0 || mec_idle_per_container < 0.0 ||
        mec_dyn_per_container < 0.0)
        throw ValidationError("coeffs: design constants must be >= 0");
}

HarvestSplit split_harvest(double h_available, double demand, double h_max) {
    if (h_available < 0.0 || demand < 0.0 || h_max < 0.0)
        throw ValidationError("split_harvest: arguments must be >= 0");
    if (h_available > h_max)
        throw ValidationError("split_harvest: harvest exceeds the slot ceiling");
    HarvestSplit s;
    s.h_o = std::min(h_available, demand);
    s.h_c = h_available - s.h_o;
    return s;
}

BatteryStep battery_step(const Battery& batt, double theta, double h_c) {
    if (theta < 0.0 || h_c < 0.0)
        throw ValidationError("battery_step: theta and h_c must be >= 0");
    const double raw = batt.leak * (batt.level - theta) + batt.charge_eff * h_c;
    BatteryStep out;
    out.level = std::clamp(raw, 0.0, batt.capacity);
    out.deficit = std::max(0.0, theta - batt.level);
    return out;
}

double flow_energy(const EnergyCoeffs& coeffs, double w_local, double w_in,
                   double w_out) {
    if (w_local < 0.0 || w_in < 0.0 || w_out < 0.0)
        throw ValidationError("flow_energy: flows must be >= 0");
    const double raw = coeffs.eta * (w_local + w_in) + coeffs.kappa * w_out;
    return std::max(0.0, raw);
}

SiteEnergy site_energy(const EnergyCoeffs& coeffs, double load,
                       const ContainerAllocation& alloc, double w_local,
                       double w_in, double w_out) {
    if (load < 0.0 || load > 1.0)
        throw ValidationError("site_energy: load must be normalized to [0,1]");
    SiteEnergy e;
    e.theta_bs = coeffs.bs_idle + coeffs.bs_load * load;
    e.theta_mec = mec_energy(alloc, coeffs) + flow_energy(coeffs, w_local, w_in, w_out);
    e.theta_site = e.theta_bs + e.theta_mec;
    return e;
}

} // namespace greenmesh
