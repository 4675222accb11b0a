#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "isac/grid.hpp"
#include "isac/scenario.hpp"

namespace isac {

enum class Modulation { qpsk, qam16, qam64, qam256, qam1024 };

Modulation parse_modulation(std::string_view name);
std::string to_string(Modulation m);

/// Gray-labelled square QAM alphabet with unit average energy.
///
/// points()[label] is the symbol for the bit label `label`, bits MSB first.
/// The upper half of the label selects the in-phase level and the lower half
/// the quadrature level, each Gray coded, so slicing is separable per axis.
class Constellation {
public:
    explicit Constellation(Modulation m);

    Modulation modulation() const { return mod_; }
    std::string name() const { return to_string(mod_); }
    int bits_per_symbol() const { return bits_; }
    std::size_t size() const { return points_.size(); }
    const std::vector<cdouble>& points() const { return points_; }

    cdouble map(unsigned label) const { return points_[label]; }
    /// Label of the nearest point. Exact ties resolve to the smaller label.
    unsigned slice(cdouble v) const;
    /// |point|^2 evaluated from the integer level grid, so unit-energy points
    /// (all of QPSK) give exactly 1.0.
    double energy(unsigned label) const { return energies_[label]; }

private:
    unsigned slice_axis(double v) const;

    Modulation mod_;
    int bits_;
    int levels_;            // per axis
    double scale_;          // 1 / sqrt((2/3)(Q-1))
    std::vector<unsigned> level_to_gray_;  // level index (descending amplitude) -> axis label
    std::vector<cdouble> points_;
    std::vector<double> energies_;
};

/// Fixed pilot placement on the N x M grid.
struct PilotPattern {
    int n_subc = 0;
    int n_sym = 0;
    double rho = 0.0;                 ///< requested pilot percentage
    std::vector<GridIndex> indices;   ///< sorted by linear index
    std::vector<std::uint8_t> mask;   ///< 1 at pilot cells, column-major

    std::size_t size() const { return indices.size(); }
    std::size_t cells() const { return mask.size(); }
    std::size_t data_cells() const { return cells() - size(); }
    bool is_pilot(std::size_t linear) const { return mask[linear] != 0; }
    bool is_pilot(int n, int m) const { return mask[static_cast<std::size_t>(n) + static_cast<std::size_t>(n_subc) * m] != 0; }
};

/// round-half-away-from-zero of rho * n * m / 100.
std::size_t pilot_count(int n, int m, double rho);

PilotPattern generate_pilot_pattern(int n, int m, double rho, std::uint64_t seed);

/// Pilot pattern from an explicit index list (e.g. read back from CSV).
PilotPattern make_pilot_pattern(int n, int m, std::vector<GridIndex> indices);

struct TxFrame {
    CGrid x;
    std::shared_ptr<const PilotPattern> pilots;
    std::shared_ptr<const Constellation> constellation;
    std::vector<std::uint8_t> payload_bits;  ///< one bit per byte, data cells in linear order
};

/// Assembles X. Pilot cells get unit-modulus QPSK-phase symbols drawn from
/// `pilot_seed`; data cells are Gray-mapped from `bits`.
TxFrame build_tx_frame(std::shared_ptr<const PilotPattern> pilots,
                       std::shared_ptr<const Constellation> constellation,
                       std::vector<std::uint8_t> bits, std::uint64_t pilot_seed);

/// Same, with payload bits drawn from `data_seed`.
TxFrame build_tx_frame(std::shared_ptr<const PilotPattern> pilots,
                       std::shared_ptr<const Constellation> constellation, std::uint64_t data_seed,
                       std::uint64_t pilot_seed);

struct HardDecisions {
    std::vector<cdouble> symbols;
    std::vector<std::uint8_t> bits;
};

HardDecisions demap_hard(const std::vector<cdouble>& symbols, const Constellation& constellation);

void write_pilot_csv(const std::string& path, const PilotPattern& pilots);
PilotPattern read_pilot_csv(const std::string& path, int n, int m);

}  // namespace isac
