#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "greenmesh/compute.hpp"
#include "greenmesh/errors.hpp"
#include "greenmesh/rng.hpp"

using namespace greenmesh;

TEST_CASE("containers_needed: hand cases") {
    CHECK(containers_needed(0.0, 10.0) == 0);
    CHECK(containers_needed(0.001, 10.0) == 1);
    CHECK(containers_needed(10.0, 10.0) == 1);
    CHECK(containers_needed(10.0001, 10.0) == 2);
    CHECK(containers_needed(95.0, 10.0) == 10);
    CHECK(containers_needed(200.0, 10.0) == 20);
    CHECK_THROWS_AS(containers_needed(200.1, 10.0, 20), CapacityError);
}

TEST_CASE("containers_needed matches a linear-scan oracle") {
    Rng rng(101);
    for (int i = 0; i < 1000; ++i) {
        const double lambda = rng.uniform(0.5, 20.0);
        const double w = rng.uniform(0.0, 30.0 * lambda);
        int oracle = 0;
        while (oracle * lambda < w && oracle < 64) ++oracle; // smallest sufficient count
        if (oracle > 32) {
            CHECK_THROWS_AS(containers_needed(w, lambda, 32), CapacityError);
        } else {
            CHECK(containers_needed(w, lambda, 32) == oracle);
        }
    }
}

TEST_CASE("distribute_load fills containers to the brim") {
    const ContainerAllocation a = distribute_load(25.0, 10.0, 20);
    REQUIRE(a.d_active() == 3);
    CHECK(a.loads[0] == 10.0);
    CHECK(a.loads[1] == 10.0);
    CHECK(a.loads[2] == doctest::Approx(5.0));
    CHECK(a.total() == doctest::Approx(25.0));
    CHECK_NOTHROW(a.validate());

    const ContainerAllocation zero = distribute_load(0.0, 10.0, 20);
    CHECK(zero.d_active() == 0);
    CHECK(zero.total() == 0.0);
}

TEST_CASE("distribute_load conserves workload over random cases") {
    Rng rng(55);
    for (int i = 0; i < 1000; ++i) {
        const double lambda = rng.uniform(1.0, 15.0);
        const double w = rng.uniform(0.0, 20.0 * lambda);
        const ContainerAllocation a = distribute_load(w, lambda, 20);
        CHECK(a.total() == doctest::Approx(w).epsilon(1e-12));
        CHECK(a.d_active() == containers_needed(w, lambda, 20));
        for (double l : a.loads) {
            CHECK(l > 0.0);
            CHECK(l <= lambda + 1e-12);
        }
    }
}

TEST_CASE("local admission scales with the battery ratio") {
    // admitted = clamp((b_now / b_next_pred) * l, 0, l)
    CHECK(local_admission(50.0, 100.0, 40.0) == doctest::Approx(20.0));
    CHECK(local_admission(200.0, 100.0, 40.0) == 40.0); // capped at offered
    CHECK(local_admission(0.0, 100.0, 40.0) == 0.0);
    SUBCASE("vanishing predicted level admits nothing") {
        CHECK(local_admission(100.0, 0.0, 40.0) == 0.0);
        CHECK(local_admission(100.0, 0.5, 40.0, 1.0) == 0.0); // below eps
    }
}

TEST_CASE("local admission oracle over random cases") {
    Rng rng(66);
    for (int i = 0; i < 1000; ++i) {
        const double b_now = rng.uniform(0.0, 1000.0);
        const double b_next = rng.uniform(0.0, 1000.0);
        const double l = rng.uniform(0.0, 300.0);
        const double got = local_admission(b_now, b_next, l, 1.0);
        const double want =
            b_next <= 1.0 ? 0.0 : std::clamp(b_now / b_next * l, 0.0, l);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
        CHECK(got >= 0.0);
        CHECK(got <= l);
    }
}

TEST_CASE("mec energy sums idle plus proportional dynamic power") {
    EnergyCoeffs c;
    ContainerAllocation a;
    a.lambda_max = 10.0;
    a.loads = {10.0, 4.0};
    CHECK(mec_energy(a, c) == doctest::Approx(2.0 * 2.0 + 8.0 * (1.0 + 0.4)));
    CHECK(mec_energy(ContainerAllocation{}, c) == 0.0);
}

TEST_CASE("flow conservation bounds net outbound by collected load") {
    FlowSet f;
    f.w_local = 50.0;
    f.w_out[1] = 30.0;
    f.w_out[2] = 20.0;
    CHECK(check_flow_conservation(f));
    f.w_out[2] = 21.0;
    CHECK_FALSE(check_flow_conservation(f));
    f.w_in[3] = 1.0; // inbound relaxes the net bound
    CHECK(check_flow_conservation(f));
    SUBCASE("negative entries are rejected") {
        FlowSet bad;
        bad.w_local = 10.0;
        bad.w_in[1] = -0.5;
        CHECK_FALSE(check_flow_conservation(bad));
    }
}

TEST_CASE("container allocation validation") {
    ContainerAllocation a;
    a.lambda_max = 10.0;
    a.loads = {10.0, 0.0};
    CHECK_THROWS_AS(a.validate(), ValidationError); // zero-load container
    a.loads = {10.5};
    CHECK_THROWS_AS(a.validate(), ValidationError); // over lambda_max
}
