#pragma once

#include <cstdint>
#include <vector>

#include "isac/channel.hpp"
#include "isac/grid.hpp"
#include "isac/ofdm.hpp"

namespace isac {

struct RateResult {
    double mi_per_symbol = 0.0;  ///< bits
    double rate = 0.0;           ///< bits per grid cell after the pilot discount
    double rho = 0.0;            ///< percent
};

/// Fraction of trials with a hit. Throws on an empty list.
double empirical_pd(const std::vector<bool>& trial_hits);

/// Binomial standard error sqrt(p(1-p)/n).
double pd_stderr(double pd, std::size_t trials);

/// Monte Carlo estimate of the constellation-constrained MI I(X;Y|H) for a
/// uniform input over the per-cell scalar channels y = h x + z, averaged over
/// uniformly drawn grid cells. Clamped to [0, log2 Q]; sigma2 == 0 returns
/// log2 Q.
double mutual_information(const Constellation& constellation, const ChannelMatrix& h, double sigma2,
                          std::size_t n_mc, std::uint64_t seed);

/// mi * (100 - rho) / 100.
RateResult achievable_rate(double mi, double rho);

struct ProfilePoint {
    int delay_bin = 0;
    double differential_range = 0.0;  ///< [m], 0 at the LOS bin
    double value_db = 0.0;            ///< relative to the profile maximum
};

/// Range profile: per delay bin, the maximum over Doppler bins, in dB relative
/// to the overall maximum (floored at -300 dB). Ranges are measured from
/// `los_delay_bin`, wrapped into [-N/2, N/2) bins.
std::vector<ProfilePoint> range_profile(const RGrid& image, const WaveformConfig& wf, int los_delay_bin);

/// Linear (un-normalised) max-over-Doppler profile; useful for averaging
/// profiles across trials before converting to dB.
std::vector<double> range_profile_linear(const RGrid& image);

/// dB conversion of a linear profile with the same normalisation and floor as
/// range_profile.
std::vector<ProfilePoint> profile_to_db(const std::vector<double>& linear, const WaveformConfig& wf,
                                        int los_delay_bin);

}  // namespace isac
