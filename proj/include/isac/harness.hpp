#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isac/config.hpp"
#include "isac/detect.hpp"
#include "isac/metrics.hpp"
#include "isac/ofdm.hpp"
#include "isac/receiver.hpp"
#include "isac/scenario.hpp"

namespace isac {

enum class ExperimentKind { rcs_sweep, pilot_sweep, tradeoff, iteration_study, range_profile, single_run };

ExperimentKind parse_kind(std::string_view s);
std::string to_string(ExperimentKind k);

/// Quantity varied across sweep points.
enum class SweepVariable { none, rcs_dbsm, rho, tx_power_dbm };

SweepVariable parse_sweep_variable(std::string_view s);
std::string to_string(SweepVariable v);

struct DumpFlags {
    bool grids = false;   ///< X, H, Y binaries
    bool peaks = false;   ///< per-receiver peak CSVs
    bool stages = false;  ///< per-stage estimate and image binaries
};

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::single_run;
    ScenarioConfig scenario = reference_scenario();
    SweepVariable sweep_variable = SweepVariable::none;
    std::vector<double> sweep_values;
    std::vector<Scheme> schemes{Scheme::pilot_only, Scheme::data_aided, Scheme::genie};
    std::vector<Estimator> estimators{Estimator::lmmse};
    std::vector<Modulation> modulations{Modulation::qpsk};
    double rho = 5.0;
    int n_trials = 200;
    std::uint64_t master_seed = 1;
    int max_iterations = 2;
    int scored_target = 2;  ///< path index; 0 is the LOS
    int gate = 1;
    CfarConfig cfar;
    bool redraw_data = false;
    std::size_t mi_samples = 2000;
    bool soft_feedback = false;
    bool estimate_snr = false;
    bool on_grid = false;    ///< snap all paths to bin centres
    bool noiseless = false;  ///< sigma^2 = 0 in the received grid
    DumpFlags dump;
    int threads = 0;  ///< 0: hardware concurrency

    void validate() const;
};

ExperimentSpec spec_from_json(const json& j);
json spec_to_json(const ExperimentSpec& spec);
/// Reads a spec file. A string "scenario" value names a scenario JSON file
/// resolved relative to the spec file.
ExperimentSpec load_spec(const std::string& path);

/// One CSV row: a (sweep point, modulation, scheme, estimator, iteration) cell.
struct ResultRow {
    std::string sweep_var;
    double sweep_value = 0.0;
    std::string modulation;
    std::string scheme;
    std::string estimator;
    int iteration = 0;
    double pd = 0.0;
    double pd_stderr = 0.0;
    double mi = 0.0;
    double rate = 0.0;
    int trials = 0;
};

struct ProfileRow {
    std::string scheme;
    std::string estimator;
    int delay_bin = 0;
    double differential_range = 0.0;
    double value_db = 0.0;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;
    std::vector<ProfileRow> profiles;  ///< range_profile kind only
};

/// Runs the Monte Carlo sweep in memory. Deterministic for a given spec,
/// independent of the thread count.
ExperimentResult run_sweep(const ExperimentSpec& spec);

/// run_sweep plus output files in `out_dir`: results.csv, profiles.csv (range
/// profiles), manifest.json, and dumps requested by spec.dump.
ExperimentResult run_experiment(const ExperimentSpec& spec, const std::string& out_dir);

std::string format_results_csv(const std::vector<ResultRow>& rows);
std::string format_profiles_csv(const std::vector<ProfileRow>& rows);

/// Build-time `git describe` of the source tree.
std::string build_version();

}  // namespace isac
