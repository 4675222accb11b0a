#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "isac/channel.hpp"
#include "isac/detect.hpp"
#include "isac/grid.hpp"
#include "isac/ofdm.hpp"

namespace isac {

/// Stage-1 could not run: there are no pilots to divide by.
class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Estimator { rf, mf, lmmse };
enum class Scheme { pilot_only, data_aided, genie };

Estimator parse_estimator(std::string_view s);
Scheme parse_scheme(std::string_view s);
std::string to_string(Estimator e);
std::string to_string(Scheme s);

/// Which cells of an estimate carry observations. Stage-1 estimates are only
/// observed at pilots (data cells are zero placeholders); refined estimates
/// cover the whole grid.
enum class Support { pilots, full_grid };

struct ChannelEstimate {
    CGrid h_hat;
    std::shared_ptr<const PilotPattern> pilot_set;
    Support support = Support::full_grid;
};

struct ReceiverConfig {
    Estimator estimator = Estimator::lmmse;
    int max_iterations = 2;
    Scheme scheme = Scheme::data_aided;
    double snr_x = 1.0;  ///< E|x|^2 / sigma^2 (may be +inf for noiseless runs)
    double snr_h = 1.0;  ///< sum |alpha_k|^2 / sigma^2
    /// Feed the raw LMMSE soft symbols into the channel refinement instead of
    /// hard decisions. Off by default.
    bool soft_feedback = false;
    /// Replace snr_x / snr_h by estimates from the Stage-1 reconstruction
    /// residual at the pilots (data-aided scheme only). Off by default.
    bool estimate_snr = false;
    /// Keep every intermediate estimate and image in PipelineOutput::stages.
    bool keep_trace = false;

    void validate() const;
};

struct StageSnapshot {
    std::string name;
    CGrid h_hat;
    RGrid image;
};

struct PipelineOutput {
    ChannelEstimate h_hat_final;
    DetectionList detections;
    CGrid x_hat;  ///< hard-decided data grid (pilot cells hold the known pilots)
    std::vector<DetectionList> per_iteration;
    /// True when Stage 1 found nothing and the data-aided run degraded to pilot-only.
    bool fell_back = false;
    std::vector<StageSnapshot> stages;  ///< only with keep_trace
};

/// H_P = Y_P ./ X_P, H_D = 0.
ChannelEstimate stage1_pilot_estimate(const RxFrame& y, const TxFrame& x);

/// |F_N^H H F_M|^2 with unitary DFTs. Bin (p, q) <-> tau = p/(N df),
/// nu = q/(M T_sym), q taken modulo M.
RGrid delay_doppler_image(const ChannelEstimate& h_hat);
RGrid delay_doppler_image(const CGrid& h_hat);

/// Least-squares path gains for the detected bins, fitted over the estimate's
/// observed cells. Duplicate bins get a zero gain (with a warning on stderr).
CVector ls_gains(const ChannelEstimate& h_hat, const DetectionList& detections, const WaveformConfig& wf);

/// Sum of alpha_k b(tau_k) c(nu_k)^T at the detected bins over the full grid.
ChannelEstimate reconstruct_channel(const CVector& gains, const DetectionList& detections,
                                    const WaveformConfig& wf, std::shared_ptr<const PilotPattern> pilot_set);

/// X_D = (Y_D .* conj(H_D)) ./ (|H_D|^2 + 1/SNR_x). Pilot cells are zero.
CGrid lmmse_demod(const RxFrame& y, const ChannelEstimate& h_hat, double snr_x);

/// Replaces data cells of `soft` with the nearest constellation points and
/// pilot cells with the known pilots.
CGrid hard_decide(const CGrid& soft, const TxFrame& x);

/// Refines H_D from decided symbols with RF, MF or LMMSE; resets H_P to
/// Y_P ./ X_P. `x_hat` must hold the known pilots at pilot cells.
///
/// When `alphabet` is given, data cells of `x_hat` are points of it and RF
/// divides Y .* conj(X) by the points' exact energies; for unit-energy
/// alphabets RF and MF then agree bit for bit.
ChannelEstimate refine_channel(const RxFrame& y, const CGrid& x_hat, std::shared_ptr<const PilotPattern> pilot_set,
                               Estimator estimator, double snr_h, const Constellation* alphabet = nullptr);

/// Full receiver for one frame.
PipelineOutput run_pipeline(const RxFrame& y, const TxFrame& x, const ReceiverConfig& cfg,
                            const CfarConfig& cfar, const WaveformConfig& wf);

}  // namespace isac
