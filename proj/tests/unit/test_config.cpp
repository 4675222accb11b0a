#include <doctest.h>

#include "isac/config.hpp"

using namespace isac;

TEST_CASE("empty scenario document gives the reference scenario") {
    const ScenarioConfig cfg = scenario_from_json(json::object());
    const ScenarioConfig ref = reference_scenario();
    CHECK(cfg.waveform.n_subc == 400);
    CHECK(cfg.waveform.n_sym == 60);
    CHECK(cfg.targets.size() == 2);
    CHECK(cfg.targets[1].rcs == doctest::Approx(ref.targets[1].rcs));
    CHECK(cfg.beam_angle == doctest::Approx(ref.beam_angle));
}

TEST_CASE("unit conversions on load") {
    const json j = {{"waveform", {{"tx_power_dbm", 40.0}, {"noise_figure_db", 3.0}, {"noise_psd_dbm_hz", -174.0}}},
                    {"beam_angle_deg", 30.0},
                    {"targets", {{{"position_m", {10.0, 5.0}}, {"rcs_dbsm", 10.0}}}}};
    const ScenarioConfig cfg = scenario_from_json(j);
    CHECK(cfg.waveform.tx_power == doctest::Approx(10.0));
    CHECK(cfg.waveform.noise_figure == doctest::Approx(1.9953).epsilon(1e-4));
    CHECK(cfg.waveform.noise_psd == doctest::Approx(3.981e-21).epsilon(1e-3));
    CHECK(cfg.beam_angle == doctest::Approx(kPi / 6.0));
    REQUIRE(cfg.targets.size() == 1);
    CHECK(cfg.targets[0].rcs == doctest::Approx(10.0));
    CHECK(cfg.targets[0].velocity == Vec2{0.0, 0.0});
}

TEST_CASE("scenario JSON round trip") {
    ScenarioConfig cfg = reference_scenario();
    cfg.random_phase = true;
    cfg.phase_seed = 77;
    const ScenarioConfig back = scenario_from_json(scenario_to_json(cfg));
    CHECK(back.waveform.tx_power == doctest::Approx(cfg.waveform.tx_power));
    CHECK(back.targets[0].position == cfg.targets[0].position);
    CHECK(back.random_phase);
    CHECK(back.phase_seed == 77);
}

TEST_CASE("malformed scenario documents are rejected") {
    CHECK_THROWS_AS(scenario_from_json({{"tx_positon_m", {0, 0}}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json({{"tx_position_m", {0, 0, 0}}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json({{"waveform", {{"n_subcarriers", "many"}}}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json({{"targets", {{{"rcs_dbsm", 1.0}}}}}), ConfigError);
}

TEST_CASE("CFAR config") {
    const CfarConfig c = cfar_from_json({{"pfa", 1e-3}, {"guard", {1, 1}}, {"training", {4, 3}}, {"wrap", false}});
    CHECK(c.pfa == 1e-3);
    CHECK(c.training.delay == 4);
    CHECK_FALSE(c.wrap);
    CHECK(cfar_from_json(cfar_to_json(c)).training.doppler == 3);
    CHECK_THROWS_AS(cfar_from_json({{"pfa", 2.0}}), ConfigError);
    CHECK_THROWS_AS(cfar_from_json({{"guard", {3, 3}}, {"training", {2, 2}}}), ConfigError);
}
