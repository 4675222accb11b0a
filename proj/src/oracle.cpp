#include "isac/oracle.hpp"

#include <cstdio>
#include <limits>

#include "isac/channel.hpp"
#include "isac/receiver.hpp"

namespace isac {

namespace {

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

struct OnGrid {
    ScenarioConfig cfg = reference_scenario();
    PathSet paths;
    ChannelMatrix h;
};

OnGrid on_grid_reference() {
    OnGrid g;
    g.paths = snap_to_grid(derive_paths(g.cfg), g.cfg.waveform);
    g.h = synthesize_channel(g.paths, g.cfg.waveform);
    return g;
}

/// Largest relative error between each true gain and the LS gain fitted at
/// its bin; +inf if a true bin is missing from the detections.
double gain_error(const CVector& gains, const DetectionList& det, const PathSet& paths, const WaveformConfig& wf) {
    double worst = 0.0;
    for (const auto& p : paths.paths) {
        const Bin b = true_bin(p, wf);
        double err = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < det.size(); ++i)
            if (det.peaks[i].delay_bin == b.delay && det.peaks[i].doppler_bin == b.doppler)
                err = std::abs(gains[static_cast<Eigen::Index>(i)] - p.gain) / std::abs(p.gain);
        worst = std::max(worst, err);
    }
    return worst;
}

bool exact_bins(const DetectionList& det, const PathSet& paths, const WaveformConfig& wf) {
    if (det.size() != paths.size()) return false;
    const auto hits = associate(det, paths, 0, wf);
    for (bool h : hits)
        if (!h) return false;
    return true;
}

OracleCheck genie_check() {
    const OnGrid g = on_grid_reference();
    const WaveformConfig& wf = g.cfg.waveform;
    auto pilots = std::make_shared<const PilotPattern>(generate_pilot_pattern(wf.n_subc, wf.n_sym, 5.0, 1));
    auto cst = std::make_shared<const Constellation>(Modulation::qpsk);
    const TxFrame x = build_tx_frame(pilots, cst, 1, 1);
    const RxFrame y = apply_channel(x, g.h, 0.0, 1);

    ReceiverConfig rc;
    rc.scheme = Scheme::genie;
    rc.snr_x = rc.snr_h = std::numeric_limits<double>::infinity();
    const PipelineOutput out = run_pipeline(y, x, rc, CfarConfig{}, wf);
    const bool bins = exact_bins(out.detections, g.paths, wf);
    const double err = gain_error(ls_gains(out.h_hat_final, out.detections, wf), out.detections, g.paths, wf);
    return {"genie_noiseless_on_grid", bins && err <= 1e-9,
            fmt("%.0f detections, max relative gain error %.3g", static_cast<double>(out.detections.size()), err)};
}

OracleCheck all_pilot_round_trip() {
    const OnGrid g = on_grid_reference();
    const WaveformConfig& wf = g.cfg.waveform;
    auto pilots = std::make_shared<const PilotPattern>(generate_pilot_pattern(wf.n_subc, wf.n_sym, 100.0, 1));
    auto cst = std::make_shared<const Constellation>(Modulation::qpsk);
    const TxFrame x = build_tx_frame(pilots, cst, 1, 1);
    const RxFrame y = apply_channel(x, g.h, 0.0, 1);

    const ChannelEstimate est = stage1_pilot_estimate(y, x);
    const DetectionList det = cfar_2d(delay_doppler_image(est), CfarConfig{});
    const CVector gains = ls_gains(est, det, wf);
    const ChannelEstimate rec = reconstruct_channel(gains, det, wf, pilots);
    const double rel = (rec.h_hat - g.h.h).norm() / g.h.h.norm();
    return {"all_pilot_round_trip", exact_bins(det, g.paths, wf) && rel <= 1e-9,
            fmt("reconstruction relative error %.3g", rel)};
}

OracleCheck synthesis_check() {
    WaveformConfig wf;
    wf.n_subc = 16;
    wf.n_sym = 8;
    PathSet paths;
    paths.paths = {{{0.7, -0.2}, 37e-9, 310.0, 0.0}, {{-0.1, 0.4}, 91e-9, -2250.0, 0.0}, {{0.05, 0.05}, 12e-9, 40.0, 0.0}};
    const CGrid h = synthesize_channel(paths, wf).h;
    double worst = 0.0;
    for (int n = 0; n < wf.n_subc; ++n) {
        for (int m = 0; m < wf.n_sym; ++m) {
            cdouble ref{0.0, 0.0};
            for (const auto& p : paths.paths)
                ref += p.gain * std::exp(cdouble(0.0, -2.0 * kPi * n * wf.df * p.delay)) *
                       std::exp(cdouble(0.0, 2.0 * kPi * m * wf.symbol_duration() * p.doppler));
            worst = std::max(worst, std::abs(h(n, m) - ref) / std::abs(ref));
        }
    }
    return {"channel_synthesis_brute_force", worst < 1e-12, fmt("max relative error %.3g", worst)};
}

}  // namespace

std::vector<OracleCheck> run_oracles() {
    return {synthesis_check(), all_pilot_round_trip(), genie_check()};
}

}  // namespace isac
