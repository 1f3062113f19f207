#include "greenmesh/compute.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "greenmesh/errors.hpp"

namespace greenmesh {

double ContainerAllocation::total() const {
    double s = 0.0;
    for (double l : loads) s += l;
    return s;
}

void ContainerAllocation::validate() const {
    if (lambda_max <= 0.0) throw ValidationError("allocation: lambda_max must be > 0");
    for (double l : loads)
        if (!(l > 0.0 && l <= lambda_max))
            throw ValidationError("allocation: container load outside (0, lambda_max]");
}

double FlowSet::in_total() const {
    double s = 0.0;
    for (const auto& [id, v] : w_in) s += v;
    return s;
}

double FlowSet::out_total() const {
    double s = 0.0;
    for (const auto& [id, v] : w_out) s += v;
    return s;
}

int containers_needed(double w_nn, double lambda_max, int budget_d) {
    if (w_nn < 0.0) throw ValidationError("containers_needed: workload must be >= 0");
    if (lambda_max <= 0.0) throw ValidationError("containers_needed: lambda_max must be > 0");
    if (w_nn == 0.0) return 0;
    const int d = static_cast<int>(std::ceil(w_nn / lambda_max));
    if (d > budget_d)
        throw CapacityError("workload " + std::to_string(w_nn) + " needs " +
                            std::to_string(d) + " containers, budget is " +
                            std::to_string(budget_d));
    return d;
}

ContainerAllocation distribute_load(double w_nn, double lambda_max, int budget_d) {
    const int d = containers_needed(w_nn, lambda_max, budget_d);
    ContainerAllocation alloc;
    alloc.lambda_max = lambda_max;
    alloc.loads.reserve(d);
    double rest = w_nn;
    for (int i = 0; i + 1 < d; ++i) {
        alloc.loads.push_back(lambda_max);
        rest -= lambda_max;
    }
    if (d > 0) alloc.loads.push_back(rest);
    return alloc;
}

double local_admission(double b_now, double b_next_pred, double l, double eps) {
    if (l < 0.0 || b_now < 0.0 || b_next_pred < 0.0)
        throw ValidationError("local_admission: arguments must be >= 0");
    if (b_next_pred <= eps) return 0.0;
    const double raw = (b_now / b_next_pred) * l;
    return std::clamp(raw, 0.0, l);
}

double mec_energy(const ContainerAllocation& alloc, const EnergyCoeffs& coeffs) {
    alloc.validate();
    double e = 0.0;
    for (double l : alloc.loads)
        e += coeffs.mec_idle_per_container +
             coeffs.mec_dyn_per_container * l / alloc.lambda_max;
    return e;
}

bool check_flow_conservation(const FlowSet& flows) {
    if (flows.w_local < 0.0) return false;
    for (const auto& [id, v] : flows.w_in)
        if (v < 0.0) return false;
    for (const auto& [id, v] : flows.w_out)
        if (v < 0.0) return false;
    return flows.out_total() - flows.in_total() <= flows.w_local;
}

} // namespace greenmesh
