"""Python front end to the bistatic OFDM ISAC simulator core.

Scenario and experiment specs are passed as dicts (or JSON strings) using the
same schema as the ``isacsim`` command line tool.
"""

from __future__ import annotations

import io
import json
from typing import Any, Mapping

from . import _core
from ._core import (
    ConfigError,
    EstimationError,
    achievable_rate,
    constellation,
    delay_doppler_image,
    pilot_count,
    pilot_pattern,
    run_oracles,
    version,
)

__all__ = [
    "ConfigError",
    "EstimationError",
    "achievable_rate",
    "cfar",
    "constellation",
    "delay_doppler_image",
    "derive_paths",
    "ls_gains",
    "mutual_information",
    "noise_variance",
    "normalize_spec",
    "pilot_count",
    "pilot_pattern",
    "reference_scenario",
    "run_experiment",
    "run_oracles",
    "run_sweep",
    "simulate_trial",
    "synthesize_channel",
    "true_bins",
    "version",
]


def _doc(obj: Mapping[str, Any] | str | None) -> str:
    if obj is None:
        return ""
    return obj if isinstance(obj, str) else json.dumps(obj)


def _table(csv_text: str):
    """Returns a pandas DataFrame when pandas is available, else a list of dicts."""
    try:
        import pandas as pd
    except ImportError:
        import csv

        return list(csv.DictReader(io.StringIO(csv_text)))
    return pd.read_csv(io.StringIO(csv_text))


def reference_scenario() -> dict:
    return json.loads(_core.reference_scenario_json())


def derive_paths(scenario=None) -> list[dict]:
    return _core.derive_paths(_doc(scenario))


def noise_variance(scenario=None) -> float:
    return _core.noise_variance(_doc(scenario))


def synthesize_channel(paths, scenario=None):
    return _core.synthesize_channel(list(paths), _doc(scenario))


def true_bins(paths, scenario=None) -> list[tuple[int, int]]:
    return _core.true_bins(list(paths), _doc(scenario))


def cfar(image, config=None) -> list[dict]:
    return _core.cfar(image, _doc(config))


def ls_gains(h_hat, detections, scenario=None):
    return _core.ls_gains(h_hat, list(detections), _doc(scenario))


def mutual_information(modulation: str, h, sigma2: float, n_mc: int = 20000, seed: int = 1) -> float:
    return _core.mutual_information(modulation, h, sigma2, n_mc, seed)


def simulate_trial(scenario=None, **kwargs) -> dict:
    return _core.simulate_trial(_doc(scenario), **kwargs)


def normalize_spec(spec) -> dict:
    return json.loads(_core.normalize_spec(_doc(spec)))


def run_sweep(spec) -> dict:
    """Runs a sweep in memory; returns ``results`` and ``profiles`` tables."""
    out = _core.run_sweep(_doc(spec))
    return {"results": _table(out["results_csv"]), "profiles": _table(out["profiles_csv"])}


def run_experiment(spec, out_dir: str) -> dict:
    """Runs a sweep and writes results.csv, manifest.json and dumps to ``out_dir``."""
    out = _core.run_experiment(_doc(spec), str(out_dir))
    return {"results": _table(out["results_csv"]), "profiles": _table(out["profiles_csv"])}
