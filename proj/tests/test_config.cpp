#include <doctest.h>

#include <sstream>

#include "greenmesh/config.hpp"
#include "greenmesh/errors.hpp"
#include "greenmesh/report.hpp"

using namespace greenmesh;

TEST_CASE("defaults carry the published scenario constants") {
    const SimConfig cfg = parse_config("", {});
    CHECK(cfg.n_sites == 20);
    CHECK(cfg.d_budget == 20);
    CHECK(cfg.b_max == 100000.0);
    CHECK(cfg.mu == 0.9999);
    CHECK(cfg.alpha == 0.900);
    CHECK(cfg.eta == 0.105);
    CHECK(cfg.kappa == -0.035);
    CHECK(cfg.lambda_max == 10.0);
    CHECK(cfg.slots_per_day == 48);
    CHECK(cfg.slot_seconds == 1800);
    CHECK(cfg.horizon == 3);
    CHECK(cfg.open_v == 1000.0);
    CHECK(cfg.sensitive_ratio == 0.8);
}

TEST_CASE("file values override defaults, overrides beat the file") {
    std::istringstream file(
        "# scenario tweaks\n"
        "sim.gamma = 0.2   # mid-weight\n"
        "sim.days = 3\n"
        "\n"
        "energy.bs_idle = 60\n");
    const SimConfig cfg =
        parse_config_stream(file, "<test>", {{"sim.gamma", "0.7"}});
    CHECK(cfg.gamma == 0.7);
    CHECK(cfg.days == 3);
    CHECK(cfg.bs_idle == 60.0);
}

TEST_CASE("unknown keys and bad values are config errors naming the key") {
    std::istringstream bad_key("sim.gammma = 0.5\n");
    CHECK_THROWS_WITH_AS(parse_config_stream(bad_key, "<t>", {}),
                         "unknown config key: sim.gammma", ConfigError);
    std::istringstream bad_val("sim.days = soon\n");
    CHECK_THROWS_AS(parse_config_stream(bad_val, "<t>", {}), ConfigError);
    std::istringstream bad_line("sim.days\n");
    CHECK_THROWS_AS(parse_config_stream(bad_line, "<t>", {}), ConfigError);
}

TEST_CASE("invariant violations are config errors") {
    std::istringstream empty;
    CHECK_THROWS_AS(parse_config_stream(empty, "<t>", {{"sim.gamma", "1.5"}}),
                    ConfigError);
    std::istringstream empty2;
    CHECK_THROWS_AS(parse_config_stream(empty2, "<t>", {{"energy.kappa", "0.05"}}),
                    ConfigError);
    std::istringstream empty3;
    CHECK_THROWS_AS(parse_config_stream(empty3, "<t>", {{"sim.sites", "0"}}),
                    ConfigError);
}

TEST_CASE("missing config files are reported") {
    CHECK_THROWS_AS(parse_config("/no/such/file.cfg", {}), ConfigError);
}

TEST_CASE("rendered config re-parses to the same resolved state") {
    std::istringstream empty;
    SimConfig cfg = parse_config_stream(
        empty, "<t>",
        {{"sim.gamma", "0.3"},
         {"sim.controller", "OPEN"},
         {"sim.topology", "k-nearest"},
         {"grid.levels", "0,0.5,1"},
         {"train.lr", "0.0125"},
         {"trace.solar_fraction", "0.6"}});
    const std::string text = render_config(cfg);
    std::istringstream again(text);
    const SimConfig back = parse_config_stream(again, "<echo>", {});
    CHECK(render_config(back) == text);
    CHECK(back.gamma == cfg.gamma);
    CHECK(back.controller == ControllerKind::open);
    CHECK(back.topology == TopologyKind::k_nearest);
    CHECK(back.grid.fraction_levels == cfg.grid.fraction_levels);
    CHECK(back.train.learning_rate == 0.0125);
}

TEST_CASE("every registered key appears in the rendered echo") {
    const SimConfig cfg = parse_config("", {});
    const std::string text = render_config(cfg);
    for (const auto& key : config_keys())
        CHECK(text.find(key + " = ") != std::string::npos);
}

TEST_CASE("run ids are stable content hashes") {
    CHECK(fnv1a64("") == 14695981039346656037ull);
    CHECK(fnv1a64("a") == 12638187200555641996ull);
    const std::string id1 = run_id("simulate", "sim.gamma = 0.5\n");
    const std::string id2 = run_id("simulate", "sim.gamma = 0.5\n");
    const std::string id3 = run_id("simulate", "sim.gamma = 0.6\n");
    CHECK(id1 == id2);
    CHECK(id1 != id3);
    CHECK(id1.rfind("simulate-", 0) == 0);
}
