#include "isac/config.hpp"

#include <algorithm>
#include <fstream>

namespace isac {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
    for (const auto& [key, _] : j.items()) {
        const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
        if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

namespace {

double rad(double deg) { return deg * kPi / 180.0; }
double deg(double r) { return r * 180.0 / kPi; }

Vec2 vec2_from(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) throw ConfigError(where + ": expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

json vec2_to(Vec2 v) { return json::array({v.x, v.y}); }

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ScenarioConfig scenario_from_json(const json& j) {
    check_keys(j,
               {"waveform", "tx_position_m", "rx_position_m", "beam_angle_deg", "element_spacing_wavelengths",
                "random_phase", "phase_seed", "targets"},
               "scenario");
    ScenarioConfig cfg = reference_scenario();
    try {
        if (j.contains("waveform")) {
            const json& w = j.at("waveform");
            check_keys(w,
                       {"carrier_frequency_hz", "subcarrier_spacing_hz", "n_subcarriers", "n_symbols", "cp_fraction",
                        "tx_power_dbm", "noise_psd_dbm_hz", "noise_figure_db", "n_tx"},
                       "scenario.waveform");
            WaveformConfig& wf = cfg.waveform;
            read_opt(w, "carrier_frequency_hz", wf.fc);
            read_opt(w, "subcarrier_spacing_hz", wf.df);
            read_opt(w, "n_subcarriers", wf.n_subc);
            read_opt(w, "n_symbols", wf.n_sym);
            read_opt(w, "cp_fraction", wf.cp_fraction);
            read_opt(w, "n_tx", wf.n_tx);
            if (w.contains("tx_power_dbm")) wf.tx_power = dbm_to_watt(w.at("tx_power_dbm").get<double>());
            if (w.contains("noise_psd_dbm_hz")) wf.noise_psd = dbm_to_watt(w.at("noise_psd_dbm_hz").get<double>());
            if (w.contains("noise_figure_db")) wf.noise_figure = db_to_linear(w.at("noise_figure_db").get<double>());
        }
        if (j.contains("tx_position_m")) cfg.tx_pos = vec2_from(j.at("tx_position_m"), "tx_position_m");
        if (j.contains("rx_position_m")) cfg.rx_pos = vec2_from(j.at("rx_position_m"), "rx_position_m");
        if (j.contains("beam_angle_deg")) cfg.beam_angle = rad(j.at("beam_angle_deg").get<double>());
        read_opt(j, "element_spacing_wavelengths", cfg.element_spacing_wavelengths);
        read_opt(j, "random_phase", cfg.random_phase);
        read_opt(j, "phase_seed", cfg.phase_seed);
        if (j.contains("targets")) {
            cfg.targets.clear();
            for (const auto& t : j.at("targets")) {
                check_keys(t, {"position_m", "velocity_mps", "rcs_dbsm"}, "scenario.targets[]");
                TargetSpec spec;
                spec.position = vec2_from(t.at("position_m"), "position_m");
                if (t.contains("velocity_mps")) spec.velocity = vec2_from(t.at("velocity_mps"), "velocity_mps");
                spec.rcs = db_to_linear(t.at("rcs_dbsm").get<double>());
                cfg.targets.push_back(spec);
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

json scenario_to_json(const ScenarioConfig& cfg) {
    const WaveformConfig& wf = cfg.waveform;
    json targets = json::array();
    for (const auto& t : cfg.targets)
        targets.push_back({{"position_m", vec2_to(t.position)},
                           {"velocity_mps", vec2_to(t.velocity)},
                           {"rcs_dbsm", linear_to_db(t.rcs)}});
    return {
        {"waveform",
         {{"carrier_frequency_hz", wf.fc},
          {"subcarrier_spacing_hz", wf.df},
          {"n_subcarriers", wf.n_subc},
          {"n_symbols", wf.n_sym},
          {"cp_fraction", wf.cp_fraction},
          {"tx_power_dbm", linear_to_db(wf.tx_power) + 30.0},
          {"noise_psd_dbm_hz", linear_to_db(wf.noise_psd) + 30.0},
          {"noise_figure_db", linear_to_db(wf.noise_figure)},
          {"n_tx", wf.n_tx}}},
        {"tx_position_m", vec2_to(cfg.tx_pos)},
        {"rx_position_m", vec2_to(cfg.rx_pos)},
        {"beam_angle_deg", deg(cfg.beam_angle)},
        {"element_spacing_wavelengths", cfg.element_spacing_wavelengths},
        {"random_phase", cfg.random_phase},
        {"phase_seed", cfg.phase_seed},
        {"targets", targets},
    };
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return scenario_from_json(json::parse(is));
}

CfarConfig cfar_from_json(const json& j) {
    check_keys(j, {"pfa", "guard", "training", "wrap", "floor_rel"}, "cfar");
    CfarConfig cfg;
    try {
        read_opt(j, "pfa", cfg.pfa);
        read_opt(j, "wrap", cfg.wrap);
        read_opt(j, "floor_rel", cfg.floor_rel);
        auto extent = [&](const char* key, CellExtent& out) {
            if (!j.contains(key)) return;
            const json& e = j.at(key);
            if (!e.is_array() || e.size() != 2) throw ConfigError(std::string("cfar.") + key + ": expected [delay, doppler]");
            out = {e[0].get<int>(), e[1].get<int>()};
        };
        extent("guard", cfg.guard);
        extent("training", cfg.training);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("cfar: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

json cfar_to_json(const CfarConfig& cfg) {
    return {{"pfa", cfg.pfa},
            {"guard", {cfg.guard.delay, cfg.guard.doppler}},
            {"training", {cfg.training.delay, cfg.training.doppler}},
            {"wrap", cfg.wrap},
            {"floor_rel", cfg.floor_rel}};
}

}  // namespace isac
