#include "isac/detect.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

namespace isac {

void CfarConfig::validate() const {
    if (!(pfa > 0.0 && pfa < 1.0)) throw ConfigError("CFAR pfa must lie in (0, 1)");
    if (guard.delay < 0 || guard.doppler < 0) throw ConfigError("CFAR guard extents must be non-negative");
    if (training.delay < guard.delay || training.doppler < guard.doppler)
        throw ConfigError("CFAR training window must contain the guard window");
    if (training_cell_count(*this) < 1) throw ConfigError("CFAR training ring is empty");
    if (!(floor_rel >= 0.0)) throw ConfigError("CFAR floor_rel must be non-negative");
}

double cfar_scale(int training_cells, double pfa) {
    const double nt = training_cells;
    return nt * (std::pow(pfa, -1.0 / nt) - 1.0);
}

int training_cell_count(const CfarConfig& cfg) {
    const int outer = (2 * cfg.training.delay + 1) * (2 * cfg.training.doppler + 1);
    const int inner = (2 * cfg.guard.delay + 1) * (2 * cfg.guard.doppler + 1);
    return outer - inner;
}

namespace {

void check_fits(const RGrid& image, const CfarConfig& cfg) {
    cfg.validate();
    if (2 * cfg.training.delay + 1 > image.rows() || 2 * cfg.training.doppler + 1 > image.cols())
        throw ConfigError("CFAR training window (" + std::to_string(2 * cfg.training.delay + 1) + "x" +
                          std::to_string(2 * cfg.training.doppler + 1) + ") is larger than the " +
                          std::to_string(image.rows()) + "x" + std::to_string(image.cols()) + " image");
}

inline int wrap_index(int i, int n) {
    i %= n;
    return i < 0 ? i + n : i;
}

}  // namespace

RGrid cfar_threshold(const RGrid& image, const CfarConfig& cfg) {
    check_fits(image, cfg);
    const int n = static_cast<int>(image.rows());
    const int m = static_cast<int>(image.cols());
    const int td = cfg.training.delay, tv = cfg.training.doppler;
    const int gd = cfg.guard.delay, gv = cfg.guard.doppler;
    const double alpha_full = cfar_scale(training_cell_count(cfg), cfg.pfa);

    RGrid thr(n, m);
    for (int q = 0; q < m; ++q) {
        for (int p = 0; p < n; ++p) {
            double sum = 0.0;
            int count = 0;
            for (int dq = -tv; dq <= tv; ++dq) {
                int qq = q + dq;
                if (cfg.wrap) qq = wrap_index(qq, m);
                else if (qq < 0 || qq >= m) continue;
                const bool in_guard_cols = std::abs(dq) <= gv;
                for (int dp = -td; dp <= td; ++dp) {
                    if (in_guard_cols && std::abs(dp) <= gd) continue;
                    int pp = p + dp;
                    if (cfg.wrap) pp = wrap_index(pp, n);
                    else if (pp < 0 || pp >= n) continue;
                    sum += image(pp, qq);
                    ++count;
                }
            }
            if (count == 0) {
                thr(p, q) = std::numeric_limits<double>::infinity();
            } else {
                const double alpha = cfg.wrap ? alpha_full : cfar_scale(count, cfg.pfa);
                thr(p, q) = alpha * (sum / count);
            }
        }
    }
    return thr;
}

DetectionList cfar_2d(const RGrid& image, const CfarConfig& cfg) {
    const RGrid thr = cfar_threshold(image, cfg);
    const int n = static_cast<int>(image.rows());
    const int m = static_cast<int>(image.cols());
    const double floor = cfg.floor_rel * image.maxCoeff();

    auto exceeds = [&](int p, int q) {
        const double v = image(p, q);
        return v > thr(p, q) && v > floor && v > 0.0;
    };

    DetectionList out;
    for (int q = 0; q < m; ++q) {
        for (int p = 0; p < n; ++p) {
            if (!exceeds(p, q)) continue;
            const double v = image(p, q);
            const long self = static_cast<long>(p) + static_cast<long>(n) * q;
            bool is_max = true;
            for (int dq = -1; dq <= 1 && is_max; ++dq) {
                for (int dp = -1; dp <= 1; ++dp) {
                    if (dp == 0 && dq == 0) continue;
                    int pp = p + dp, qq = q + dq;
                    if (cfg.wrap) {
                        pp = wrap_index(pp, n);
                        qq = wrap_index(qq, m);
                    } else if (pp < 0 || pp >= n || qq < 0 || qq >= m) {
                        continue;
                    }
                    if (pp == p && qq == q) continue;
                    if (!exceeds(pp, qq)) continue;
                    const double w = image(pp, qq);
                    const long other = static_cast<long>(pp) + static_cast<long>(n) * qq;
                    if (w > v || (w == v && other < self)) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) out.peaks.push_back({p, q, v, thr(p, q)});
        }
    }
    std::stable_sort(out.peaks.begin(), out.peaks.end(),
                     [](const Peak& a, const Peak& b) { return a.value > b.value; });
    return out;
}

int signed_doppler_bin(int q, int m) { return q >= (m + 1) / 2 ? q - m : q; }

Bin true_bin(const Path& p, const WaveformConfig& wf) {
    const long d = std::lround(p.delay / wf.delay_resolution());
    const long v = std::lround(p.doppler / wf.doppler_resolution());
    return {wrap_index(static_cast<int>(d % wf.n_subc), wf.n_subc),
            wrap_index(static_cast<int>(v % wf.n_sym), wf.n_sym)};
}

namespace {

int toroidal_distance(int a, int b, int n) {
    const int d = wrap_index(a - b, n);
    return std::min(d, n - d);
}

}  // namespace

std::vector<bool> associate(const DetectionList& detections, const PathSet& truth, int gate,
                            const WaveformConfig& wf) {
    struct Candidate {
        std::size_t peak;
        std::size_t path;
        double peak_value;
        double path_power;
    };
    std::vector<Candidate> candidates;
    std::vector<Bin> bins;
    bins.reserve(truth.size());
    for (const auto& p : truth.paths) bins.push_back(true_bin(p, wf));

    for (std::size_t i = 0; i < detections.peaks.size(); ++i) {
        const Peak& pk = detections.peaks[i];
        for (std::size_t k = 0; k < bins.size(); ++k) {
            if (toroidal_distance(pk.delay_bin, bins[k].delay, wf.n_subc) <= gate &&
                toroidal_distance(pk.doppler_bin, bins[k].doppler, wf.n_sym) <= gate)
                candidates.push_back({i, k, pk.value, std::norm(truth.paths[k].gain)});
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.peak_value != b.peak_value) return a.peak_value > b.peak_value;
        return a.path_power > b.path_power;
    });

    std::vector<bool> hit(truth.size(), false);
    std::vector<bool> used(detections.peaks.size(), false);
    for (const auto& c : candidates) {
        if (used[c.peak] || hit[c.path]) continue;
        used[c.peak] = true;
        hit[c.path] = true;
    }
    return hit;
}

void write_peaks_csv(const std::string& path, const DetectionList& detections, const WaveformConfig& wf,
                     double los_distance) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "delay_bin,doppler_bin,differential_range_m,doppler_hz,value,threshold\n";
    char buf[256];
    for (const auto& pk : detections.peaks) {
        const double tau = pk.delay_bin * wf.delay_resolution();
        const double nu = signed_doppler_bin(pk.doppler_bin, wf.n_sym) * wf.doppler_resolution();
        std::snprintf(buf, sizeof buf, "%d,%d,%.9g,%.9g,%.9g,%.9g\n", pk.delay_bin, pk.doppler_bin,
                      kSpeedOfLight * tau - los_distance, nu, pk.value, pk.threshold);
        os << buf;
    }
}

}  // namespace isac
