#pragma once

#include "isac/grid.hpp"

namespace isac {

/// Returns F_N^H * h * F_M with unitary DFT matrices: inverse DFT along the
/// subcarrier axis, forward DFT along the symbol axis. Thread-safe; FFTW plans
/// are built once per grid shape with FFTW_ESTIMATE so results are bit-stable
/// across runs.
CGrid delay_doppler_transform(const CGrid& h);

}  // namespace isac
