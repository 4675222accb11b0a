#include "isac/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "isac/rng.hpp"

namespace isac {

double Vec2::norm() const { return std::hypot(x, y); }

void WaveformConfig::validate() const {
    if (n_subc < 1 || n_sym < 1) throw ConfigError("grid dimensions must be at least 1x1");
    if (!(df > 0.0)) throw ConfigError("subcarrier spacing must be positive");
    if (!(fc > 0.0)) throw ConfigError("carrier frequency must be positive");
    if (!(tx_power > 0.0)) throw ConfigError("transmit power must be positive");
    if (!(cp_fraction >= 0.0)) throw ConfigError("cp_fraction must be non-negative");
    if (!(noise_psd > 0.0) || !(noise_figure > 0.0)) throw ConfigError("noise parameters must be positive");
    if (n_tx < 1) throw ConfigError("n_tx must be at least 1");
}

void ScenarioConfig::validate() const {
    waveform.validate();
    if (tx_pos == rx_pos) throw ConfigError("tx and rx positions coincide");
    if (!(element_spacing_wavelengths > 0.0)) throw ConfigError("element spacing must be positive");
    for (const auto& t : targets) {
        if (!(t.rcs > 0.0)) throw ConfigError("target RCS must be positive");
        if (t.position == tx_pos || t.position == rx_pos)
            throw ConfigError("target position coincides with tx or rx");
    }
}

double PathSet::total_power() const {
    double s = 0.0;
    for (const auto& p : paths) s += std::norm(p.gain);
    return s;
}

double noise_variance(const WaveformConfig& wf) {
    return wf.noise_psd * wf.n_subc * wf.df * wf.noise_figure;
}

cdouble array_factor(const ScenarioConfig& cfg, double theta) {
    const int n_tx = cfg.waveform.n_tx;
    // k*d with d = spacing * lambda.
    const double kd = 2.0 * kPi * cfg.element_spacing_wavelengths;
    const double scale = std::sqrt(cfg.waveform.tx_power / n_tx);
    const double delta = std::sin(theta) - std::sin(cfg.beam_angle);
    cdouble acc{0.0, 0.0};
    for (int i = 0; i < n_tx; ++i) acc += std::polar(1.0, kd * i * delta);
    return scale * acc;
}

PathSet derive_paths(const ScenarioConfig& cfg) {
    cfg.validate();
    const double lambda = cfg.waveform.wavelength();

    PathSet out;
    out.paths.reserve(cfg.targets.size() + 1);

    const Vec2 los = cfg.rx_pos - cfg.tx_pos;
    const double d0 = los.norm();
    if (!(d0 > 0.0)) throw ConfigError("zero LOS distance");
    const double aod0 = std::atan2(los.y, los.x);
    const double mag0 = lambda / (4.0 * kPi * d0);
    out.paths.push_back({mag0 * array_factor(cfg, aod0), d0 / kSpeedOfLight, 0.0, aod0});

    const double geo = std::pow(4.0 * kPi, 1.5);
    for (const auto& t : cfg.targets) {
        const Vec2 leg1 = t.position - cfg.tx_pos;
        const Vec2 leg2 = t.position - cfg.rx_pos;
        const double d1 = leg1.norm();
        const double d2 = leg2.norm();
        if (!(d1 > 0.0) || !(d2 > 0.0)) throw ConfigError("zero bistatic leg length");

        const double aod = std::atan2(leg1.y, leg1.x);
        const double mag = lambda * std::sqrt(t.rcs) / (geo * d1 * d2);
        // Rate of change of the total path length for stationary TX/RX.
        const double range_rate = t.velocity.dot(leg1) / d1 + t.velocity.dot(leg2) / d2;
        out.paths.push_back({mag * array_factor(cfg, aod), (d1 + d2) / kSpeedOfLight,
                             -range_rate / lambda, aod});
    }

    if (cfg.random_phase) {
        Rng rng = make_rng(cfg.phase_seed, Stream::path_phase);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
        for (auto& p : out.paths) p.gain *= std::polar(1.0, phase(rng));
    }

    double lo = out.paths.front().delay;
    double hi = lo;
    for (const auto& p : out.paths) {
        lo = std::min(lo, p.delay);
        hi = std::max(hi, p.delay);
    }
    if (hi - lo > cfg.waveform.cp_duration())
        throw ConfigError("delay spread " + std::to_string(hi - lo) + " s exceeds the cyclic prefix " +
                          std::to_string(cfg.waveform.cp_duration()) + " s");
    return out;
}

PathSet snap_to_grid(const PathSet& paths, const WaveformConfig& wf) {
    PathSet out = paths;
    for (auto& p : out.paths) {
        p.delay = std::round(p.delay / wf.delay_resolution()) * wf.delay_resolution();
        p.doppler = std::round(p.doppler / wf.doppler_resolution()) * wf.doppler_resolution();
    }
    return out;
}

ScenarioConfig reference_scenario() {
    ScenarioConfig cfg;
    cfg.targets = {
        {{56.9, 10.0}, {1.4, -2.2}, db_to_linear(4.9)},
        {{79.4, 7.0}, {2.2, -13.7}, db_to_linear(1.5)},
    };
    return cfg;
}

}  // namespace isac
