#include "isac/harness.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "isac/channel.hpp"
#include "isac/rng.hpp"

#ifndef ISACSIM_GIT_DESCRIBE
#define ISACSIM_GIT_DESCRIBE "unknown"
#endif

namespace isac {

std::string build_version() { return ISACSIM_GIT_DESCRIBE; }

ExperimentKind parse_kind(std::string_view s) {
    if (s == "rcs_sweep") return ExperimentKind::rcs_sweep;
    if (s == "pilot_sweep") return ExperimentKind::pilot_sweep;
    if (s == "tradeoff") return ExperimentKind::tradeoff;
    if (s == "iteration_study") return ExperimentKind::iteration_study;
    if (s == "range_profile") return ExperimentKind::range_profile;
    if (s == "single_run") return ExperimentKind::single_run;
    throw ConfigError("unknown experiment kind '" + std::string(s) + "'");
}

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::rcs_sweep: return "rcs_sweep";
        case ExperimentKind::pilot_sweep: return "pilot_sweep";
        case ExperimentKind::tradeoff: return "tradeoff";
        case ExperimentKind::iteration_study: return "iteration_study";
        case ExperimentKind::range_profile: return "range_profile";
        case ExperimentKind::single_run: return "single_run";
    }
    return "?";
}

SweepVariable parse_sweep_variable(std::string_view s) {
    if (s == "none") return SweepVariable::none;
    if (s == "rcs_dbsm") return SweepVariable::rcs_dbsm;
    if (s == "rho") return SweepVariable::rho;
    if (s == "tx_power_dbm") return SweepVariable::tx_power_dbm;
    throw ConfigError("invalid sweep variable '" + std::string(s) + "'");
}

std::string to_string(SweepVariable v) {
    switch (v) {
        case SweepVariable::none: return "none";
        case SweepVariable::rcs_dbsm: return "rcs_dbsm";
        case SweepVariable::rho: return "rho";
        case SweepVariable::tx_power_dbm: return "tx_power_dbm";
    }
    return "?";
}

namespace {

SweepVariable default_variable(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::rcs_sweep:
        case ExperimentKind::iteration_study: return SweepVariable::rcs_dbsm;
        case ExperimentKind::pilot_sweep:
        case ExperimentKind::tradeoff: return SweepVariable::rho;
        default: return SweepVariable::none;
    }
}

}  // namespace

void ExperimentSpec::validate() const {
    scenario.validate();
    cfar.validate();
    if (n_trials < 1) throw ConfigError("n_trials must be at least 1");
    if (sweep_variable != SweepVariable::none && sweep_values.empty())
        throw ConfigError("sweep grid is empty");
    if (schemes.empty()) throw ConfigError("no schemes selected");
    if (modulations.empty()) throw ConfigError("no modulations selected");
    if (std::find(schemes.begin(), schemes.end(), Scheme::data_aided) != schemes.end() && estimators.empty())
        throw ConfigError("data_aided scheme needs at least one estimator");
    if (max_iterations < 1) throw ConfigError("max_iterations must be at least 1");
    if (scored_target < 0 || scored_target > static_cast<int>(scenario.targets.size()))
        throw ConfigError("scored_target " + std::to_string(scored_target) + " is not a path index");
    if (sweep_variable == SweepVariable::rcs_dbsm && scored_target < 1)
        throw ConfigError("an RCS sweep needs scored_target >= 1");
    if (gate < 0) throw ConfigError("gate must be non-negative");
    if (mi_samples < 1) throw ConfigError("mi_samples must be at least 1");
    auto rho_ok = [](double r) { return r >= 0.0 && r <= 100.0; };
    if (!rho_ok(rho)) throw ConfigError("rho must lie in [0, 100]");
    if (sweep_variable == SweepVariable::rho)
        for (double r : sweep_values)
            if (!rho_ok(r)) throw ConfigError("rho sweep value outside [0, 100]");
    if (threads < 0) throw ConfigError("threads must be non-negative");
}

ExperimentSpec spec_from_json(const json& j) {
    check_keys(j,
               {"kind", "scenario", "sweep", "schemes", "estimators", "modulations", "rho_percent", "n_trials",
                "master_seed", "max_iterations", "scored_target", "gate_bins", "cfar", "redraw_data", "mi_samples",
                "soft_feedback", "estimate_snr", "on_grid", "noiseless", "dump", "threads", "description"},
               "experiment");
    ExperimentSpec s;
    try {
        s.kind = parse_kind(j.at("kind").get<std::string>());
        if (s.kind == ExperimentKind::single_run) s.n_trials = 1;
        s.sweep_variable = default_variable(s.kind);
        if (j.contains("scenario")) s.scenario = scenario_from_json(j.at("scenario"));
        if (j.contains("sweep")) {
            const json& sw = j.at("sweep");
            check_keys(sw, {"variable", "values"}, "sweep");
            if (sw.contains("variable")) s.sweep_variable = parse_sweep_variable(sw.at("variable").get<std::string>());
            if (sw.contains("values")) s.sweep_values = sw.at("values").get<std::vector<double>>();
        }
        if (j.contains("schemes")) {
            s.schemes.clear();
            for (const auto& v : j.at("schemes")) s.schemes.push_back(parse_scheme(v.get<std::string>()));
        }
        if (j.contains("estimators")) {
            s.estimators.clear();
            for (const auto& v : j.at("estimators")) s.estimators.push_back(parse_estimator(v.get<std::string>()));
        }
        if (j.contains("modulations")) {
            s.modulations.clear();
            for (const auto& v : j.at("modulations")) s.modulations.push_back(parse_modulation(v.get<std::string>()));
        }
        if (j.contains("rho_percent")) s.rho = j.at("rho_percent").get<double>();
        if (j.contains("n_trials")) s.n_trials = j.at("n_trials").get<int>();
        if (j.contains("master_seed")) s.master_seed = j.at("master_seed").get<std::uint64_t>();
        if (j.contains("max_iterations")) s.max_iterations = j.at("max_iterations").get<int>();
        if (j.contains("scored_target")) s.scored_target = j.at("scored_target").get<int>();
        if (j.contains("gate_bins")) s.gate = j.at("gate_bins").get<int>();
        if (j.contains("cfar")) s.cfar = cfar_from_json(j.at("cfar"));
        if (j.contains("redraw_data")) s.redraw_data = j.at("redraw_data").get<bool>();
        if (j.contains("mi_samples")) s.mi_samples = j.at("mi_samples").get<std::size_t>();
        if (j.contains("soft_feedback")) s.soft_feedback = j.at("soft_feedback").get<bool>();
        if (j.contains("estimate_snr")) s.estimate_snr = j.at("estimate_snr").get<bool>();
        if (j.contains("on_grid")) s.on_grid = j.at("on_grid").get<bool>();
        if (j.contains("noiseless")) s.noiseless = j.at("noiseless").get<bool>();
        if (j.contains("threads")) s.threads = j.at("threads").get<int>();
        if (j.contains("dump")) {
            const json& d = j.at("dump");
            check_keys(d, {"grids", "peaks", "stages"}, "dump");
            if (d.contains("grids")) s.dump.grids = d.at("grids").get<bool>();
            if (d.contains("peaks")) s.dump.peaks = d.at("peaks").get<bool>();
            if (d.contains("stages")) s.dump.stages = d.at("stages").get<bool>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("experiment: ") + e.what());
    }
    s.validate();
    return s;
}

json spec_to_json(const ExperimentSpec& s) {
    json schemes = json::array(), estimators = json::array(), mods = json::array();
    for (auto v : s.schemes) schemes.push_back(to_string(v));
    for (auto v : s.estimators) estimators.push_back(to_string(v));
    for (auto v : s.modulations) mods.push_back(to_string(v));
    return {
        {"kind", to_string(s.kind)},
        {"scenario", scenario_to_json(s.scenario)},
        {"sweep", {{"variable", to_string(s.sweep_variable)}, {"values", s.sweep_values}}},
        {"schemes", schemes},
        {"estimators", estimators},
        {"modulations", mods},
        {"rho_percent", s.rho},
        {"n_trials", s.n_trials},
        {"master_seed", s.master_seed},
        {"max_iterations", s.max_iterations},
        {"scored_target", s.scored_target},
        {"gate_bins", s.gate},
        {"cfar", cfar_to_json(s.cfar)},
        {"redraw_data", s.redraw_data},
        {"mi_samples", s.mi_samples},
        {"soft_feedback", s.soft_feedback},
        {"estimate_snr", s.estimate_snr},
        {"on_grid", s.on_grid},
        {"noiseless", s.noiseless},
        {"dump", {{"grids", s.dump.grids}, {"peaks", s.dump.peaks}, {"stages", s.dump.stages}}},
        {"threads", s.threads},
    };
}

ExperimentSpec load_spec(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    json j;
    try {
        j = json::parse(is);
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    // A string scenario names a scenario file relative to the spec file.
    if (j.contains("scenario") && j.at("scenario").is_string()) {
        const auto base = std::filesystem::path(path).parent_path();
        j["scenario"] = scenario_to_json(load_scenario((base / j.at("scenario").get<std::string>()).string()));
    }
    return spec_from_json(j);
}

namespace {

struct Combo {
    Scheme scheme;
    Estimator estimator;
    std::string estimator_label;
};

std::vector<Combo> combos_for(const ExperimentSpec& s) {
    std::vector<Combo> out;
    for (Scheme sc : s.schemes) {
        switch (sc) {
            case Scheme::pilot_only: out.push_back({sc, Estimator::lmmse, "none"}); break;
            case Scheme::genie: out.push_back({sc, Estimator::lmmse, "LMMSE"}); break;
            case Scheme::data_aided:
                for (Estimator e : s.estimators) out.push_back({sc, e, to_string(e)});
                break;
        }
    }
    return out;
}

/// Everything about one sweep point that is fixed across trials.
struct PointState {
    double sweep_value = 0.0;
    double rho = 0.0;
    ScenarioConfig scenario;
    PathSet paths;
    ChannelMatrix h;
    double sigma2 = 0.0;
    double snr_x = 0.0;
    double snr_h = 0.0;
    std::shared_ptr<const PilotPattern> pilots;
    std::vector<TxFrame> frames;  ///< per modulation
    std::vector<double> mi;       ///< per modulation
};

std::vector<PointState> prepare_points(const ExperimentSpec& spec) {
    std::vector<double> values = spec.sweep_values;
    if (spec.sweep_variable == SweepVariable::none) values = {0.0};

    std::vector<std::shared_ptr<const Constellation>> csts;
    for (auto m : spec.modulations) csts.push_back(std::make_shared<const Constellation>(m));

    std::vector<PointState> points;
    for (double v : values) {
        PointState p;
        p.sweep_value = v;
        p.rho = spec.rho;
        p.scenario = spec.scenario;
        switch (spec.sweep_variable) {
            case SweepVariable::rcs_dbsm:
                p.scenario.targets[static_cast<std::size_t>(spec.scored_target - 1)].rcs = db_to_linear(v);
                break;
            case SweepVariable::rho: p.rho = v; break;
            case SweepVariable::tx_power_dbm: p.scenario.waveform.tx_power = dbm_to_watt(v); break;
            case SweepVariable::none: break;
        }
        const WaveformConfig& wf = p.scenario.waveform;
        p.paths = derive_paths(p.scenario);
        if (spec.on_grid) p.paths = snap_to_grid(p.paths, wf);
        p.h = synthesize_channel(p.paths, wf);
        p.sigma2 = spec.noiseless ? 0.0 : noise_variance(wf);
        const double inf = std::numeric_limits<double>::infinity();
        p.snr_x = p.sigma2 > 0.0 ? 1.0 / p.sigma2 : inf;
        p.snr_h = p.sigma2 > 0.0 ? p.paths.total_power() / p.sigma2 : inf;
        p.pilots = std::make_shared<const PilotPattern>(
            generate_pilot_pattern(wf.n_subc, wf.n_sym, p.rho, spec.master_seed));
        for (std::size_t k = 0; k < csts.size(); ++k) {
            p.frames.push_back(build_tx_frame(p.pilots, csts[k], spec.master_seed, spec.master_seed));
            // Same MI seed for every point so rate differences across rho are exact.
            p.mi.push_back(mutual_information(*csts[k], p.h, p.sigma2, spec.mi_samples,
                                              derive_seed(spec.master_seed, Stream::mutual_information, k)));
        }
        points.push_back(std::move(p));
    }
    return points;
}

ReceiverConfig receiver_for(const ExperimentSpec& spec, const PointState& p, const Combo& c) {
    ReceiverConfig rc;
    rc.scheme = c.scheme;
    rc.estimator = c.estimator;
    rc.max_iterations = spec.max_iterations;
    rc.snr_x = p.snr_x;
    rc.snr_h = p.snr_h;
    rc.soft_feedback = spec.soft_feedback;
    rc.estimate_snr = spec.estimate_snr;
    return rc;
}

const TxFrame& frame_for_trial(const ExperimentSpec& spec, const PointState& p, std::size_t mod, int trial,
                               TxFrame& scratch) {
    if (!spec.redraw_data) return p.frames[mod];
    const TxFrame& fixed = p.frames[mod];
    scratch = build_tx_frame(fixed.pilots, fixed.constellation,
                             derive_seed(spec.master_seed, Stream::data, static_cast<std::uint64_t>(trial) + 1),
                             spec.master_seed);
    return scratch;
}

/// Per-task output: hit flags per slot and, for range profiles, the linear
/// profile per combo.
struct TaskResult {
    std::vector<std::uint8_t> hits;
    std::vector<std::vector<double>> profiles;
};

struct Layout {
    std::vector<Combo> combos;
    std::vector<int> slot_offset;  ///< first slot of each combo
    int slots = 0;
    bool per_iteration = false;
};

Layout make_layout(const ExperimentSpec& spec) {
    Layout l;
    l.combos = combos_for(spec);
    l.per_iteration = spec.kind == ExperimentKind::iteration_study;
    for (const auto& c : l.combos) {
        l.slot_offset.push_back(l.slots);
        l.slots += 1 + ((l.per_iteration && c.scheme == Scheme::data_aided) ? spec.max_iterations : 0);
    }
    return l;
}

TaskResult run_task(const ExperimentSpec& spec, const Layout& layout, const PointState& p, std::size_t mod,
                    int trial) {
    TaskResult r;
    r.hits.assign(static_cast<std::size_t>(layout.slots), 0);
    const bool want_profiles = spec.kind == ExperimentKind::range_profile;
    if (want_profiles) r.profiles.resize(layout.combos.size());

    TxFrame scratch;
    const TxFrame& frame = frame_for_trial(spec, p, mod, trial, scratch);
    const RxFrame rx = apply_channel(frame, p.h, p.sigma2,
                                     derive_seed(spec.master_seed, Stream::noise, static_cast<std::uint64_t>(trial)));
    const WaveformConfig& wf = p.scenario.waveform;
    const auto target = static_cast<std::size_t>(spec.scored_target);

    for (std::size_t c = 0; c < layout.combos.size(); ++c) {
        const Combo& combo = layout.combos[c];
        const auto base = static_cast<std::size_t>(layout.slot_offset[c]);
        try {
            const PipelineOutput out = run_pipeline(rx, frame, receiver_for(spec, p, combo), spec.cfar, wf);
            r.hits[base] = associate(out.detections, p.paths, spec.gate, wf)[target] ? 1 : 0;
            if (layout.per_iteration && combo.scheme == Scheme::data_aided) {
                for (int it = 0; it < spec.max_iterations; ++it) {
                    // A fallback run stops after Stage 1; later iterations keep its result.
                    const DetectionList& det = out.per_iteration.empty()
                                                   ? out.detections
                                                   : out.per_iteration[std::min<std::size_t>(
                                                         static_cast<std::size_t>(it), out.per_iteration.size() - 1)];
                    r.hits[base + 1 + static_cast<std::size_t>(it)] = associate(det, p.paths, spec.gate, wf)[target];
                }
            }
            if (want_profiles) r.profiles[c] = range_profile_linear(delay_doppler_image(out.h_hat_final));
        } catch (const EstimationError&) {
            // No pilots: the receiver cannot produce an estimate, counted as a miss.
            if (want_profiles) r.profiles[c].assign(static_cast<std::size_t>(wf.n_subc), 0.0);
        }
    }
    return r;
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string fmt9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace

ExperimentResult run_sweep(const ExperimentSpec& spec) {
    spec.validate();
    const std::vector<PointState> points = prepare_points(spec);
    const Layout layout = make_layout(spec);
    const std::size_t n_mod = spec.modulations.size();
    const auto n_trials = static_cast<std::size_t>(spec.n_trials);
    const std::size_t n_tasks = points.size() * n_mod * n_trials;

    std::vector<TaskResult> results(n_tasks);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= n_tasks) return;
            const std::size_t trial = t % n_trials;
            const std::size_t mod = (t / n_trials) % n_mod;
            const std::size_t point = t / (n_trials * n_mod);
            try {
                results[t] = run_task(spec, layout, points[point], mod, static_cast<int>(trial));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n_tasks);
                return;
            }
        }
    };
    const int n_threads = std::min<int>(resolve_threads(spec.threads), static_cast<int>(std::max<std::size_t>(n_tasks, 1)));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    ExperimentResult res;
    const std::string var = to_string(spec.sweep_variable);
    for (std::size_t pi = 0; pi < points.size(); ++pi) {
        const PointState& p = points[pi];
        for (std::size_t mod = 0; mod < n_mod; ++mod) {
            const std::size_t first = (pi * n_mod + mod) * n_trials;
            const double mi = p.mi[mod];
            const RateResult rate = achievable_rate(mi, p.rho);
            for (std::size_t c = 0; c < layout.combos.size(); ++c) {
                const Combo& combo = layout.combos[c];
                const int base = layout.slot_offset[c];
                const int n_iter_rows = (layout.per_iteration && combo.scheme == Scheme::data_aided) ? spec.max_iterations : 0;
                auto emit = [&](int slot, int iteration) {
                    std::size_t hits = 0;
                    for (std::size_t t = 0; t < n_trials; ++t) hits += results[first + t].hits[static_cast<std::size_t>(slot)];
                    const double pd = static_cast<double>(hits) / static_cast<double>(n_trials);
                    res.rows.push_back({var, p.sweep_value, to_string(spec.modulations[mod]), to_string(combo.scheme),
                                        combo.estimator_label, iteration, pd, pd_stderr(pd, n_trials), mi, rate.rate,
                                        spec.n_trials});
                };
                const int final_iteration = combo.scheme == Scheme::data_aided ? spec.max_iterations
                                            : combo.scheme == Scheme::genie    ? 1
                                                                               : 0;
                if (n_iter_rows > 0) {
                    for (int it = 1; it <= n_iter_rows; ++it) emit(base + it, it);
                } else {
                    emit(base, final_iteration);
                }

                if (spec.kind == ExperimentKind::range_profile) {
                    const int n = p.scenario.waveform.n_subc;
                    std::vector<double> avg(static_cast<std::size_t>(n), 0.0);
                    for (std::size_t t = 0; t < n_trials; ++t) {
                        const auto& prof = results[first + t].profiles[c];
                        for (int b = 0; b < n; ++b) avg[static_cast<std::size_t>(b)] += prof[static_cast<std::size_t>(b)];
                    }
                    for (double& v : avg) v /= static_cast<double>(n_trials);
                    const int los_bin = true_bin(p.paths.paths[0], p.scenario.waveform).delay;
                    for (const auto& pt : profile_to_db(avg, p.scenario.waveform, los_bin))
                        res.profiles.push_back({to_string(combo.scheme), combo.estimator_label, pt.delay_bin,
                                                pt.differential_range, pt.value_db});
                }
            }
        }
    }
    return res;
}

std::string format_results_csv(const std::vector<ResultRow>& rows) {
    std::string out = "sweep_var,sweep_value,modulation,scheme,estimator,iteration,pd,pd_stderr,mi,rate,trials\n";
    for (const auto& r : rows) {
        out += r.sweep_var + ',' + fmt9(r.sweep_value) + ',' + r.modulation + ',' + r.scheme + ',' + r.estimator + ',' +
               std::to_string(r.iteration) + ',' + fmt9(r.pd) + ',' + fmt9(r.pd_stderr) + ',' + fmt9(r.mi) + ',' +
               fmt9(r.rate) + ',' + std::to_string(r.trials) + '\n';
    }
    return out;
}

std::string format_profiles_csv(const std::vector<ProfileRow>& rows) {
    std::string out = "scheme,estimator,delay_bin,differential_range_m,value_db\n";
    for (const auto& r : rows)
        out += r.scheme + ',' + r.estimator + ',' + std::to_string(r.delay_bin) + ',' + fmt9(r.differential_range) +
               ',' + fmt9(r.value_db) + '\n';
    return out;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << text;
    if (!os) throw std::runtime_error("write failed for " + path.string());
}

/// Re-runs trial 0 of the first sweep point with tracing and writes the
/// requested grid, peak and stage dumps.
std::vector<std::string> write_dumps(const ExperimentSpec& spec, const std::filesystem::path& dir) {
    std::vector<std::string> files;
    if (!spec.dump.grids && !spec.dump.peaks && !spec.dump.stages) return files;

    ExperimentSpec first = spec;
    if (!first.sweep_values.empty()) first.sweep_values.resize(1);
    first.modulations.resize(1);
    const PointState p = std::move(prepare_points(first).front());
    const WaveformConfig& wf = p.scenario.waveform;
    TxFrame scratch;
    const TxFrame& frame = frame_for_trial(first, p, 0, 0, scratch);
    const RxFrame rx = apply_channel(frame, p.h, p.sigma2, derive_seed(spec.master_seed, Stream::noise, 0));

    auto add = [&](const std::string& name) {
        files.push_back(name);
        return (dir / name).string();
    };
    if (spec.dump.grids) {
        write_grid(add("X.bin"), frame.x);
        write_grid(add("H.bin"), p.h.h);
        write_grid(add("Y.bin"), rx.y);
        write_pilot_csv(add("pilots.csv"), *p.pilots);
    }
    const double d0 = (p.scenario.rx_pos - p.scenario.tx_pos).norm();
    for (const Combo& combo : combos_for(first)) {
        ReceiverConfig rc = receiver_for(first, p, combo);
        rc.keep_trace = spec.dump.stages;
        const std::string tag = to_string(combo.scheme) + "_" + combo.estimator_label;
        try {
            const PipelineOutput out = run_pipeline(rx, frame, rc, spec.cfar, wf);
            if (spec.dump.peaks) write_peaks_csv(add("peaks_" + tag + ".csv"), out.detections, wf, d0);
            for (const auto& st : out.stages) {
                write_grid(add("stage_" + tag + "_" + st.name + "_hhat.bin"), st.h_hat);
                write_grid(add("stage_" + tag + "_" + st.name + "_image.bin"), st.image);
            }
        } catch (const EstimationError&) {
            if (spec.dump.peaks) write_peaks_csv(add("peaks_" + tag + ".csv"), DetectionList{}, wf, d0);
        }
    }
    return files;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, const std::string& out_dir) {
    namespace fs = std::filesystem;
    const auto start = std::chrono::steady_clock::now();
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    ExperimentResult res = run_sweep(spec);
    std::vector<std::string> files{"results.csv"};
    write_text(dir / "results.csv", format_results_csv(res.rows));
    if (spec.kind == ExperimentKind::range_profile) {
        write_text(dir / "profiles.csv", format_profiles_csv(res.profiles));
        files.push_back("profiles.csv");
    }
    for (auto& f : write_dumps(spec, dir)) files.push_back(std::move(f));

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json manifest = {
        {"tool", "isacsim"},
        {"version", build_version()},
        {"spec", spec_to_json(spec)},
        {"seeds",
         {{"master", spec.master_seed},
          {"pilot_pattern", spec.master_seed},
          {"payload", spec.redraw_data ? "derived per trial from master" : "master"},
          {"noise", "derived per trial from master (shared by all sweep points and receivers)"}}},
        {"threads", resolve_threads(spec.threads)},
        {"wall_time_s", wall},
        {"files", files},
    };
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    return res;
}

}  // namespace isac
