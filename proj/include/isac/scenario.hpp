#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace isac {

using cdouble = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;

/// Raised for any physically or structurally invalid configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend bool operator==(Vec2 a, Vec2 b) = default;
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const;
};

/// OFDM numerology plus link-budget constants. All quantities linear SI.
struct WaveformConfig {
    double fc = 28e9;           ///< carrier frequency [Hz]
    double df = 120e3;          ///< subcarrier spacing [Hz]
    int n_subc = 400;           ///< N
    int n_sym = 60;             ///< M
    double cp_fraction = 0.07;  ///< T_cp * df
    double tx_power = 0.1;      ///< [W]
    double noise_psd = 3.9810717055349565e-21;  ///< [W/Hz], -174 dBm/Hz
    double noise_figure = 6.309573444801933;     ///< linear, 8 dB
    int n_tx = 8;

    void validate() const;

    double wavelength() const { return kSpeedOfLight / fc; }
    double elementary_duration() const { return 1.0 / df; }
    double cp_duration() const { return cp_fraction / df; }
    double symbol_duration() const { return cp_duration() + elementary_duration(); }
    double bandwidth() const { return n_subc * df; }
    /// Width of one delay bin of the N-point grid [s].
    double delay_resolution() const { return 1.0 / bandwidth(); }
    /// Width of one Doppler bin of the M-point grid [Hz].
    double doppler_resolution() const { return 1.0 / (n_sym * symbol_duration()); }
    std::size_t cells() const { return static_cast<std::size_t>(n_subc) * static_cast<std::size_t>(n_sym); }
};

struct TargetSpec {
    Vec2 position;  ///< [m]
    Vec2 velocity;  ///< [m/s]
    double rcs = 1.0;  ///< bistatic RCS [m^2], linear
};

struct ScenarioConfig {
    WaveformConfig waveform;
    Vec2 tx_pos{0.0, 0.0};
    Vec2 rx_pos{50.0, 0.0};
    double beam_angle = 10.0 * kPi / 180.0;  ///< radians from array boresight (+x)
    std::vector<TargetSpec> targets;
    double element_spacing_wavelengths = 0.5;
    /// Adds an i.i.d. uniform phase to every path gain (robustness studies only).
    bool random_phase = false;
    std::uint64_t phase_seed = 0;

    void validate() const;
};

struct Path {
    cdouble gain;   ///< includes the TX array factor
    double delay;   ///< [s]
    double doppler; ///< [Hz]
    double aod;     ///< [rad]
};

/// Ground-truth propagation paths; index 0 is the LOS.
struct PathSet {
    std::vector<Path> paths;

    std::size_t size() const { return paths.size(); }
    double total_power() const;
};

/// sigma^2 = N0 * N * df * NF.
double noise_variance(const WaveformConfig& wf);

/// Complex TX array factor a_T^T(theta) f_T for a beam steered to `beam_angle`
/// with ||f_T||^2 = P_T.
cdouble array_factor(const ScenarioConfig& cfg, double theta);

/// Converts scenario geometry into LOS + per-target path parameters.
/// Throws ConfigError when a distance vanishes or the delay spread exceeds
/// the cyclic prefix.
PathSet derive_paths(const ScenarioConfig& cfg);

/// Copy of `paths` with every delay and Doppler moved to the nearest bin
/// centre of the N x M grid (on-grid oracle scenarios).
PathSet snap_to_grid(const PathSet& paths, const WaveformConfig& wf);

/// Reference scenario with two targets.
ScenarioConfig reference_scenario();

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watt(double dbm) { return db_to_linear(dbm - 30.0); }

}  // namespace isac
