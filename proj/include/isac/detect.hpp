#pragma once

#include <string>
#include <vector>

#include "isac/grid.hpp"
#include "isac/scenario.hpp"

namespace isac {

/// Half-widths in (delay, Doppler) cells.
struct CellExtent {
    int delay = 0;
    int doppler = 0;
};

/// Two-dimensional cell-averaging CFAR.
///
/// The training ring is the (2*training+1) window minus the (2*guard+1) window
/// centred on the cell under test. The default ring has 60 cells: two Doppler
/// strips of 5x6 beside a 5x5 guard block.
struct CfarConfig {
    double pfa = 1e-4;
    CellExtent guard{2, 2};
    CellExtent training{2, 8};
    bool wrap = true;
    /// Cells below floor_rel * max(image) are never declared.
    double floor_rel = 1e-10;

    void validate() const;
};

struct Peak {
    int delay_bin = 0;
    int doppler_bin = 0;
    double value = 0.0;
    double threshold = 0.0;
};

/// Peaks sorted by descending value (ties: ascending linear index).
struct DetectionList {
    std::vector<Peak> peaks;

    std::size_t size() const { return peaks.size(); }
    bool empty() const { return peaks.empty(); }
};

/// alpha = N_t (P_fa^{-1/N_t} - 1).
double cfar_scale(int training_cells, double pfa);

/// Number of cells in the training ring (wrap assumed).
int training_cell_count(const CfarConfig& cfg);

/// Per-cell threshold alpha * mean(ring). Cells whose ring has no training
/// cells (only possible without wrap) get +inf.
RGrid cfar_threshold(const RGrid& image, const CfarConfig& cfg);

/// Exceedances reduced to local maxima over the 8-neighbourhood.
DetectionList cfar_2d(const RGrid& image, const CfarConfig& cfg);

/// True (delay, Doppler) bin of a path on the N x M grid.
struct Bin {
    int delay = 0;
    int doppler = 0;
};
Bin true_bin(const Path& p, const WaveformConfig& wf);

/// Per-path hit flags. A path is detected iff a peak lies within +-gate bins
/// (toroidal) of its true bin in both dimensions. Each peak claims at most
/// one path, greedily by descending peak value, then stronger path first.
std::vector<bool> associate(const DetectionList& detections, const PathSet& truth, int gate,
                            const WaveformConfig& wf);

/// Signed Doppler bin in [-M/2, M/2).
int signed_doppler_bin(int q, int m);

/// Peaks CSV: bin indices, differential range c*tau - d0, Doppler, value, threshold.
void write_peaks_csv(const std::string& path, const DetectionList& detections, const WaveformConfig& wf,
                     double los_distance);

}  // namespace isac
