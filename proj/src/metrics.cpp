#include "isac/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "isac/rng.hpp"

namespace isac {

double empirical_pd(const std::vector<bool>& trial_hits) {
    if (trial_hits.empty()) throw std::invalid_argument("empirical_pd: no trials");
    const auto hits = std::count(trial_hits.begin(), trial_hits.end(), true);
    return static_cast<double>(hits) / static_cast<double>(trial_hits.size());
}

double pd_stderr(double pd, std::size_t trials) {
    if (trials == 0) return 0.0;
    return std::sqrt(pd * (1.0 - pd) / static_cast<double>(trials));
}

double mutual_information(const Constellation& constellation, const ChannelMatrix& h, double sigma2,
                          std::size_t n_mc, std::uint64_t seed) {
    if (n_mc < 1) throw std::invalid_argument("mutual_information: n_mc must be at least 1");
    const auto& pts = constellation.points();
    const std::size_t q = pts.size();
    const double log2q = std::log2(static_cast<double>(q));
    if (sigma2 == 0.0) return log2q;
    if (!(sigma2 > 0.0)) throw std::invalid_argument("mutual_information: negative noise variance");
    if (!std::isfinite(sigma2)) return 0.0;

    Rng rng = make_rng(seed, Stream::mutual_information);
    std::normal_distribution<double> gauss(0.0, std::sqrt(sigma2 / 2.0));
    const auto cells = static_cast<std::uint64_t>(h.h.size());
    const cdouble* hh = h.h.data();

    std::vector<double> expo(q);
    double acc = 0.0;
    for (std::size_t s = 0; s < n_mc; ++s) {
        const cdouble g = hh[uniform_below(rng, cells)];
        const cdouble x = pts[uniform_below(rng, q)];
        const double re = gauss(rng);
        const double im = gauss(rng);
        const cdouble z(re, im);
        const cdouble y = g * x + z;
        const double z2 = std::norm(z);
        // log2 sum_x' exp((|z|^2 - |y - g x'|^2) / sigma2) via log-sum-exp.
        double peak = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < q; ++k) {
            expo[k] = (z2 - std::norm(y - g * pts[k])) / sigma2;
            peak = std::max(peak, expo[k]);
        }
        double sum = 0.0;
        for (std::size_t k = 0; k < q; ++k) sum += std::exp(expo[k] - peak);
        acc += (peak + std::log(sum)) / std::log(2.0);
    }
    const double mi = log2q - acc / static_cast<double>(n_mc);
    return std::clamp(mi, 0.0, log2q);
}

RateResult achievable_rate(double mi, double rho) {
    if (!(rho >= 0.0 && rho <= 100.0)) throw std::invalid_argument("achievable_rate: rho must lie in [0, 100]");
    return {mi, mi * (100.0 - rho) / 100.0, rho};
}

std::vector<double> range_profile_linear(const RGrid& image) {
    std::vector<double> prof(static_cast<std::size_t>(image.rows()));
    for (Eigen::Index p = 0; p < image.rows(); ++p) prof[static_cast<std::size_t>(p)] = image.row(p).maxCoeff();
    return prof;
}

std::vector<ProfilePoint> profile_to_db(const std::vector<double>& linear, const WaveformConfig& wf,
                                        int los_delay_bin) {
    constexpr double kFloorDb = -300.0;
    const int n = static_cast<int>(linear.size());
    const double peak = linear.empty() ? 0.0 : *std::max_element(linear.begin(), linear.end());
    const double bin_range = kSpeedOfLight * wf.delay_resolution();
    std::vector<ProfilePoint> out;
    out.reserve(linear.size());
    for (int p = 0; p < n; ++p) {
        int rel = ((p - los_delay_bin) % n + n) % n;
        if (rel >= (n + 1) / 2) rel -= n;
        double db = kFloorDb;
        if (peak > 0.0 && linear[static_cast<std::size_t>(p)] > 0.0)
            db = std::max(kFloorDb, 10.0 * std::log10(linear[static_cast<std::size_t>(p)] / peak));
        out.push_back({p, rel * bin_range, db});
    }
    return out;
}

std::vector<ProfilePoint> range_profile(const RGrid& image, const WaveformConfig& wf, int los_delay_bin) {
    return profile_to_db(range_profile_linear(image), wf, los_delay_bin);
}

}  // namespace isac
