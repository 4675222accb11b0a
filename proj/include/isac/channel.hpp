#pragma once

#include <cstdint>
#include <string>

#include "isac/grid.hpp"
#include "isac/ofdm.hpp"
#include "isac/scenario.hpp"

namespace isac {

/// [b(tau)]_n = exp(-j 2 pi n df tau), n = 0..n-1.
CVector steering_freq(double tau, int n, double df);

/// [c(nu)]_m = exp(+j 2 pi m T_sym nu), m = 0..m-1.
CVector steering_time(double nu, int m, double t_sym);

struct ChannelMatrix {
    CGrid h;
};

struct RxFrame {
    CGrid y;
    PathSet truth;  ///< scoring only; receivers never read it
};

/// H = sum_k alpha_k b(tau_k) c(nu_k)^T.
ChannelMatrix synthesize_channel(const PathSet& paths, const WaveformConfig& wf);

/// Y = X .* H + Z with Z ~ CN(0, sigma2) i.i.d., drawn from `seed`.
RxFrame apply_channel(const TxFrame& x, const ChannelMatrix& h, double sigma2, std::uint64_t seed,
                      PathSet truth = {});

/// Binary grid dump: little-endian float64 (re, im) pairs, row-major N x M,
/// plus a JSON sidecar `<path>.json` with the dimensions.
void write_grid(const std::string& path, const CGrid& grid);
void write_grid(const std::string& path, const RGrid& grid);
CGrid read_grid(const std::string& path);

}  // namespace isac
