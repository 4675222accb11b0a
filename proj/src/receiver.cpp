#include "isac/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>
#include <utility>

#include "isac/fft.hpp"

namespace isac {

Estimator parse_estimator(std::string_view s) {
    if (s == "RF" || s == "rf") return Estimator::rf;
    if (s == "MF" || s == "mf") return Estimator::mf;
    if (s == "LMMSE" || s == "lmmse") return Estimator::lmmse;
    throw ConfigError("unknown estimator '" + std::string(s) + "'");
}

Scheme parse_scheme(std::string_view s) {
    if (s == "pilot_only") return Scheme::pilot_only;
    if (s == "data_aided") return Scheme::data_aided;
    if (s == "genie") return Scheme::genie;
    throw ConfigError("unknown scheme '" + std::string(s) + "'");
}

std::string to_string(Estimator e) {
    switch (e) {
        case Estimator::rf: return "RF";
        case Estimator::mf: return "MF";
        case Estimator::lmmse: return "LMMSE";
    }
    return "?";
}

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::pilot_only: return "pilot_only";
        case Scheme::data_aided: return "data_aided";
        case Scheme::genie: return "genie";
    }
    return "?";
}

void ReceiverConfig::validate() const {
    if (scheme == Scheme::data_aided && max_iterations < 1)
        throw ConfigError("data-aided receiver needs max_iterations >= 1");
    if (!(snr_x > 0.0) || !(snr_h > 0.0)) throw ConfigError("SNR values must be positive");
}

ChannelEstimate stage1_pilot_estimate(const RxFrame& y, const TxFrame& x) {
    const PilotPattern& pilots = *x.pilots;
    if (pilots.size() == 0) throw EstimationError("pilot-only estimation impossible: empty pilot set");
    ChannelEstimate est;
    est.h_hat = CGrid::Zero(y.y.rows(), y.y.cols());
    est.pilot_set = x.pilots;
    est.support = Support::pilots;
    const cdouble* yy = y.y.data();
    const cdouble* xx = x.x.data();
    cdouble* hh = est.h_hat.data();
    for (std::size_t i = 0; i < pilots.cells(); ++i)
        if (pilots.is_pilot(i)) hh[i] = yy[i] / xx[i];
    return est;
}

RGrid delay_doppler_image(const CGrid& h_hat) { return delay_doppler_transform(h_hat).cwiseAbs2(); }

RGrid delay_doppler_image(const ChannelEstimate& h_hat) { return delay_doppler_image(h_hat.h_hat); }

namespace {

// Exact-phase grid steering values: exp(-j 2 pi n p / N) and exp(j 2 pi m q / M).
cdouble grid_phasor(long num, long den, double sign) {
    const long r = ((num % den) + den) % den;
    return std::polar(1.0, sign * 2.0 * kPi * static_cast<double>(r) / static_cast<double>(den));
}

}  // namespace

CVector ls_gains(const ChannelEstimate& h_hat, const DetectionList& detections, [[maybe_unused]] const WaveformConfig& wf) {
    const int n = static_cast<int>(h_hat.h_hat.rows());
    const int m = static_cast<int>(h_hat.h_hat.cols());
    const std::size_t k_total = detections.peaks.size();
    CVector gains = CVector::Zero(static_cast<Eigen::Index>(k_total));
    if (k_total == 0) return gains;

    std::vector<std::size_t> kept;
    std::set<std::pair<int, int>> seen;
    for (std::size_t k = 0; k < k_total; ++k) {
        const auto& pk = detections.peaks[k];
        if (!seen.insert({pk.delay_bin, pk.doppler_bin}).second) {
            std::clog << "ls_gains: dropping duplicate detection at bin (" << pk.delay_bin << ", " << pk.doppler_bin
                      << ")\n";
            continue;
        }
        kept.push_back(k);
    }

    std::vector<Eigen::Index> rows;
    const bool pilots_only = h_hat.support == Support::pilots && h_hat.pilot_set;
    rows.reserve(pilots_only ? h_hat.pilot_set->size() : static_cast<std::size_t>(n) * m);
    for (Eigen::Index i = 0; i < h_hat.h_hat.size(); ++i)
        if (!pilots_only || h_hat.pilot_set->is_pilot(static_cast<std::size_t>(i))) rows.push_back(i);
    if (rows.empty()) return gains;

    const auto n_rows = static_cast<Eigen::Index>(rows.size());
    const auto n_cols = static_cast<Eigen::Index>(kept.size());
    Eigen::MatrixXcd a(n_rows, n_cols);
    CVector rhs(n_rows);
    for (Eigen::Index r = 0; r < n_rows; ++r) rhs[r] = h_hat.h_hat.data()[rows[r]];
    CVector b(n), cv(m);
    for (Eigen::Index c = 0; c < n_cols; ++c) {
        const auto& pk = detections.peaks[kept[c]];
        for (int i = 0; i < n; ++i) b[i] = grid_phasor(static_cast<long>(i) * pk.delay_bin, n, -1.0);
        for (int j = 0; j < m; ++j) cv[j] = grid_phasor(static_cast<long>(j) * pk.doppler_bin, m, 1.0);
        for (Eigen::Index r = 0; r < n_rows; ++r) a(r, c) = b[rows[r] % n] * cv[rows[r] / n];
    }
    const CVector sol = a.completeOrthogonalDecomposition().solve(rhs);
    for (Eigen::Index c = 0; c < n_cols; ++c) gains[static_cast<Eigen::Index>(kept[c])] = sol[c];
    return gains;
}

ChannelEstimate reconstruct_channel(const CVector& gains, const DetectionList& detections,
                                    const WaveformConfig& wf, std::shared_ptr<const PilotPattern> pilot_set) {
    if (static_cast<std::size_t>(gains.size()) != detections.peaks.size())
        throw std::invalid_argument("reconstruct_channel: gain count does not match detections");
    const int n = wf.n_subc, m = wf.n_sym;
    ChannelEstimate est;
    est.h_hat = CGrid::Zero(n, m);
    est.pilot_set = std::move(pilot_set);
    est.support = Support::full_grid;
    for (std::size_t k = 0; k < detections.peaks.size(); ++k) {
        const auto& pk = detections.peaks[k];
        const cdouble g = gains[static_cast<Eigen::Index>(k)];
        if (g == cdouble{}) continue;
        CVector b(n), c(m);
        for (int i = 0; i < n; ++i) b[i] = grid_phasor(static_cast<long>(i) * pk.delay_bin, n, -1.0);
        for (int j = 0; j < m; ++j) c[j] = grid_phasor(static_cast<long>(j) * pk.doppler_bin, m, 1.0);
        est.h_hat.noalias() += g * (b * c.transpose());
    }
    return est;
}

CGrid lmmse_demod(const RxFrame& y, const ChannelEstimate& h_hat, double snr_x) {
    if (!(snr_x > 0.0)) throw std::invalid_argument("lmmse_demod: snr_x must be positive");
    const double reg = 1.0 / snr_x;
    CGrid out = CGrid::Zero(y.y.rows(), y.y.cols());
    const cdouble* yy = y.y.data();
    const cdouble* hh = h_hat.h_hat.data();
    cdouble* xx = out.data();
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        if (h_hat.pilot_set && h_hat.pilot_set->is_pilot(static_cast<std::size_t>(i))) continue;
        const double den = std::norm(hh[i]) + reg;
        xx[i] = den > 0.0 ? yy[i] * std::conj(hh[i]) / den : cdouble{};
    }
    return out;
}

CGrid hard_decide(const CGrid& soft, const TxFrame& x) {
    CGrid out(soft.rows(), soft.cols());
    const Constellation& cst = *x.constellation;
    const cdouble* s = soft.data();
    const cdouble* known = x.x.data();
    cdouble* o = out.data();
    for (Eigen::Index i = 0; i < out.size(); ++i)
        o[i] = x.pilots->is_pilot(static_cast<std::size_t>(i)) ? known[i] : cst.map(cst.slice(s[i]));
    return out;
}

ChannelEstimate refine_channel(const RxFrame& y, const CGrid& x_hat, std::shared_ptr<const PilotPattern> pilot_set,
                               Estimator estimator, double snr_h, const Constellation* alphabet) {
    if (!(snr_h > 0.0)) throw std::invalid_argument("refine_channel: snr_h must be positive");
    const double reg = 1.0 / snr_h;
    ChannelEstimate est;
    est.h_hat.resize(y.y.rows(), y.y.cols());
    est.support = Support::full_grid;
    const cdouble* yy = y.y.data();
    const cdouble* xx = x_hat.data();
    cdouble* hh = est.h_hat.data();
    for (Eigen::Index i = 0; i < est.h_hat.size(); ++i) {
        if (pilot_set->is_pilot(static_cast<std::size_t>(i))) {
            hh[i] = yy[i] / xx[i];
            continue;
        }
        switch (estimator) {
            case Estimator::rf:
                if (std::abs(xx[i]) < 1e-12)
                    throw EstimationError("reciprocal filtering with a near-zero symbol estimate");
                hh[i] = alphabet ? yy[i] * std::conj(xx[i]) / alphabet->energy(alphabet->slice(xx[i])) : yy[i] / xx[i];
                break;
            case Estimator::mf:
                hh[i] = yy[i] * std::conj(xx[i]);
                break;
            case Estimator::lmmse: {
                const double e = alphabet ? alphabet->energy(alphabet->slice(xx[i])) : std::norm(xx[i]);
                const double den = e + reg;
                hh[i] = den > 0.0 ? yy[i] * std::conj(xx[i]) / den : cdouble{};
                break;
            }
        }
    }
    est.pilot_set = std::move(pilot_set);
    return est;
}

namespace {

void snapshot(PipelineOutput& out, const ReceiverConfig& cfg, std::string name, const CGrid& h, const RGrid& img) {
    if (cfg.keep_trace) out.stages.push_back({std::move(name), h, img});
}

CGrid pilots_only_grid(const TxFrame& x) {
    CGrid g = CGrid::Zero(x.x.rows(), x.x.cols());
    for (const auto& idx : x.pilots->indices) g(idx.subcarrier, idx.symbol) = x.x(idx.subcarrier, idx.symbol);
    return g;
}

}  // namespace

PipelineOutput run_pipeline(const RxFrame& y, const TxFrame& x, const ReceiverConfig& cfg, const CfarConfig& cfar,
                            const WaveformConfig& wf) {
    cfg.validate();
    PipelineOutput out;

    if (cfg.scheme == Scheme::genie) {
        // Known data: pilots by division, data cells by the LMMSE refinement.
        out.h_hat_final = refine_channel(y, x.x, x.pilots, Estimator::lmmse, cfg.snr_h, x.constellation.get());
        const RGrid img = delay_doppler_image(out.h_hat_final);
        out.detections = cfar_2d(img, cfar);
        out.per_iteration.push_back(out.detections);
        out.x_hat = x.x;
        snapshot(out, cfg, "genie", out.h_hat_final.h_hat, img);
        return out;
    }

    ChannelEstimate est1 = stage1_pilot_estimate(y, x);
    const RGrid img1 = delay_doppler_image(est1);
    DetectionList det1 = cfar_2d(img1, cfar);
    snapshot(out, cfg, "stage1_pilot", est1.h_hat, img1);

    if (cfg.scheme == Scheme::pilot_only || det1.empty()) {
        out.fell_back = cfg.scheme == Scheme::data_aided;
        out.h_hat_final = std::move(est1);
        out.detections = std::move(det1);
        out.x_hat = pilots_only_grid(x);
        return out;
    }

    // Structured Stage-1 estimate drives the first demodulation.
    const CVector gains1 = ls_gains(est1, det1, wf);
    ChannelEstimate structured = reconstruct_channel(gains1, det1, wf, x.pilots);
    if (cfg.keep_trace) snapshot(out, cfg, "stage1_reconstruction", structured.h_hat, delay_doppler_image(structured));

    double snr_x = cfg.snr_x;
    double snr_h = cfg.snr_h;
    if (cfg.estimate_snr) {
        double resid = 0.0;
        for (const auto& idx : x.pilots->indices) {
            const cdouble e = y.y(idx.subcarrier, idx.symbol) -
                              x.x(idx.subcarrier, idx.symbol) * structured.h_hat(idx.subcarrier, idx.symbol);
            resid += std::norm(e);
        }
        const double sigma2_hat = resid / static_cast<double>(x.pilots->size());
        if (sigma2_hat > 0.0) {
            snr_x = 1.0 / sigma2_hat;
            snr_h = gains1.squaredNorm() / sigma2_hat;
        }
    }

    ChannelEstimate refined;
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        const CGrid soft = lmmse_demod(y, structured, snr_x);
        CGrid decided = hard_decide(soft, x);
        CGrid feedback = decided;
        if (cfg.soft_feedback) {
            feedback = soft;
            for (const auto& idx : x.pilots->indices)
                feedback(idx.subcarrier, idx.symbol) = x.x(idx.subcarrier, idx.symbol);
        }
        refined = refine_channel(y, feedback, x.pilots, cfg.estimator, snr_h,
                                 cfg.soft_feedback ? nullptr : x.constellation.get());
        const RGrid img = delay_doppler_image(refined);
        DetectionList det = cfar_2d(img, cfar);
        snapshot(out, cfg, "iteration_" + std::to_string(it), refined.h_hat, img);

        if (it < cfg.max_iterations && !det.empty())
            structured = reconstruct_channel(ls_gains(refined, det, wf), det, wf, x.pilots);

        out.per_iteration.push_back(std::move(det));
        out.x_hat = std::move(decided);
    }
    out.h_hat_final = std::move(refined);
    out.detections = out.per_iteration.back();
    return out;
}

}  // namespace isac
