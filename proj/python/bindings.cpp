#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "isac/config.hpp"
#include "isac/harness.hpp"
#include "isac/oracle.hpp"
#include "isac/rng.hpp"

namespace py = pybind11;
using namespace isac;

namespace {

ScenarioConfig scenario_arg(const std::string& doc) {
    return doc.empty() ? reference_scenario() : scenario_from_json(json::parse(doc));
}

py::list paths_to_list(const PathSet& ps) {
    py::list out;
    for (const auto& p : ps.paths) {
        py::dict d;
        d["gain"] = p.gain;
        d["delay"] = p.delay;
        d["doppler"] = p.doppler;
        d["aod"] = p.aod;
        out.append(d);
    }
    return out;
}

PathSet paths_from_list(const py::list& l) {
    PathSet ps;
    for (const auto& item : l) {
        const auto d = item.cast<py::dict>();
        ps.paths.push_back({d["gain"].cast<cdouble>(), d["delay"].cast<double>(), d["doppler"].cast<double>(),
                            d.contains("aod") ? d["aod"].cast<double>() : 0.0});
    }
    return ps;
}

py::list detections_to_list(const DetectionList& dl) {
    py::list out;
    for (const auto& p : dl.peaks) {
        py::dict d;
        d["delay_bin"] = p.delay_bin;
        d["doppler_bin"] = p.doppler_bin;
        d["value"] = p.value;
        d["threshold"] = p.threshold;
        out.append(d);
    }
    return out;
}

DetectionList detections_from_list(const py::list& l) {
    DetectionList dl;
    for (const auto& item : l) {
        const auto d = item.cast<py::dict>();
        dl.peaks.push_back({d["delay_bin"].cast<int>(), d["doppler_bin"].cast<int>(),
                            d.contains("value") ? d["value"].cast<double>() : 0.0, 0.0});
    }
    return dl;
}

py::dict rows_to_dict(const ExperimentResult& r) {
    py::dict out;
    out["results_csv"] = format_results_csv(r.rows);
    out["profiles_csv"] = format_profiles_csv(r.profiles);
    return out;
}

/// One trial of one receiver on the given scenario; noise and data follow the
/// harness seeding.
py::dict simulate_trial(const std::string& scenario_doc, const std::string& scheme, const std::string& estimator,
                        const std::string& modulation, double rho, std::uint64_t master_seed, std::uint64_t trial,
                        int max_iterations, bool noiseless) {
    const ScenarioConfig cfg = scenario_arg(scenario_doc);
    const WaveformConfig& wf = cfg.waveform;
    const PathSet paths = derive_paths(cfg);
    const ChannelMatrix h = synthesize_channel(paths, wf);
    auto pilots = std::make_shared<const PilotPattern>(generate_pilot_pattern(wf.n_subc, wf.n_sym, rho, master_seed));
    auto cst = std::make_shared<const Constellation>(parse_modulation(modulation));
    const TxFrame x = build_tx_frame(pilots, cst, master_seed, master_seed);
    const double sigma2 = noiseless ? 0.0 : noise_variance(wf);
    const RxFrame y = apply_channel(x, h, sigma2, derive_seed(master_seed, Stream::noise, trial), paths);
    ReceiverConfig rc;
    rc.scheme = parse_scheme(scheme);
    rc.estimator = parse_estimator(estimator);
    rc.max_iterations = max_iterations;
    rc.snr_x = noiseless ? std::numeric_limits<double>::infinity() : 1.0 / sigma2;
    rc.snr_h = noiseless ? std::numeric_limits<double>::infinity() : paths.total_power() / sigma2;
    const PipelineOutput out = run_pipeline(y, x, rc, CfarConfig{}, wf);

    py::dict d;
    d["h_true"] = h.h;
    d["h_hat"] = out.h_hat_final.h_hat;
    d["image"] = delay_doppler_image(out.h_hat_final);
    d["detections"] = detections_to_list(out.detections);
    d["hits"] = associate(out.detections, paths, 1, wf);
    d["fell_back"] = out.fell_back;
    d["sigma2"] = sigma2;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bistatic OFDM ISAC simulator core";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<EstimationError>(m, "EstimationError", PyExc_RuntimeError);

    m.def("version", &build_version);
    m.def("reference_scenario_json", [] { return scenario_to_json(reference_scenario()).dump(); });
    m.def(
        "derive_paths", [](const std::string& doc) { return paths_to_list(derive_paths(scenario_arg(doc))); },
        py::arg("scenario_json") = "");
    m.def(
        "noise_variance", [](const std::string& doc) { return noise_variance(scenario_arg(doc).waveform); },
        py::arg("scenario_json") = "");
    m.def(
        "synthesize_channel",
        [](const py::list& paths, const std::string& doc) {
            return synthesize_channel(paths_from_list(paths), scenario_arg(doc).waveform).h;
        },
        py::arg("paths"), py::arg("scenario_json") = "");
    m.def(
        "true_bins",
        [](const py::list& paths, const std::string& doc) {
            const WaveformConfig wf = scenario_arg(doc).waveform;
            std::vector<std::pair<int, int>> out;
            for (const auto& p : paths_from_list(paths).paths) {
                const Bin b = true_bin(p, wf);
                out.emplace_back(b.delay, b.doppler);
            }
            return out;
        },
        py::arg("paths"), py::arg("scenario_json") = "");
    m.def(
        "pilot_pattern",
        [](int n, int mm, double rho, std::uint64_t seed) {
            std::vector<std::pair<int, int>> out;
            for (const auto& idx : generate_pilot_pattern(n, mm, rho, seed).indices)
                out.emplace_back(idx.subcarrier, idx.symbol);
            return out;
        },
        py::arg("n_subc"), py::arg("n_sym"), py::arg("rho"), py::arg("seed"));
    m.def("pilot_count", &pilot_count, py::arg("n_subc"), py::arg("n_sym"), py::arg("rho"));
    m.def(
        "constellation",
        [](const std::string& name) { return Constellation(parse_modulation(name)).points(); }, py::arg("name"));
    m.def(
        "delay_doppler_image", [](const CGrid& h) { return delay_doppler_image(h); }, py::arg("h_hat"));
    m.def(
        "cfar",
        [](const RGrid& image, const std::string& cfg) {
            return detections_to_list(cfar_2d(image, cfg.empty() ? CfarConfig{} : cfar_from_json(json::parse(cfg))));
        },
        py::arg("image"), py::arg("cfar_json") = "");
    m.def(
        "ls_gains",
        [](const CGrid& h, const py::list& dets, const std::string& doc) {
            return ls_gains(ChannelEstimate{h, nullptr, Support::full_grid}, detections_from_list(dets),
                            scenario_arg(doc).waveform);
        },
        py::arg("h_hat"), py::arg("detections"), py::arg("scenario_json") = "");
    m.def("simulate_trial", &simulate_trial, py::arg("scenario_json") = "", py::arg("scheme") = "data_aided",
          py::arg("estimator") = "LMMSE", py::arg("modulation") = "QPSK", py::arg("rho") = 5.0,
          py::arg("master_seed") = 1, py::arg("trial") = 0, py::arg("max_iterations") = 2,
          py::arg("noiseless") = false);
    m.def(
        "mutual_information",
        [](const std::string& mod, const CGrid& h, double sigma2, std::size_t n_mc, std::uint64_t seed) {
            return mutual_information(Constellation(parse_modulation(mod)), ChannelMatrix{h}, sigma2, n_mc, seed);
        },
        py::arg("modulation"), py::arg("h"), py::arg("sigma2"), py::arg("n_mc") = 20000, py::arg("seed") = 1);
    m.def(
        "achievable_rate", [](double mi, double rho) { return achievable_rate(mi, rho).rate; }, py::arg("mi"),
        py::arg("rho"));
    m.def(
        "normalize_spec", [](const std::string& doc) { return spec_to_json(spec_from_json(json::parse(doc))).dump(); },
        py::arg("spec_json"));
    m.def(
        "run_sweep",
        [](const std::string& doc) {
            const ExperimentSpec spec = spec_from_json(json::parse(doc));
            ExperimentResult r;
            {
                py::gil_scoped_release release;
                r = run_sweep(spec);
            }
            return rows_to_dict(r);
        },
        py::arg("spec_json"));
    m.def(
        "run_experiment",
        [](const std::string& doc, const std::string& out_dir) {
            const ExperimentSpec spec = spec_from_json(json::parse(doc));
            ExperimentResult r;
            {
                py::gil_scoped_release release;
                r = run_experiment(spec, out_dir);
            }
            return rows_to_dict(r);
        },
        py::arg("spec_json"), py::arg("out_dir"));
    m.def("run_oracles", [] {
        std::vector<std::tuple<std::string, bool, std::string>> out;
        for (const auto& c : run_oracles()) out.emplace_back(c.name, c.passed, c.detail);
        return out;
    });
}
