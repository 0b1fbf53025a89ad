"""Python front end to the wncs simulation core."""

import json

from ._wncs import (
    ConfigError,
    ModelError,
    SolverError,
    __version__,
    dare_residual,
    offline_gains,
    preset_names,
    solve_dare,
    spectral_radius,
    steady_state_covariance,
)
from . import _wncs

__all__ = [
    "ConfigError",
    "ModelError",
    "SolverError",
    "__version__",
    "config_hash",
    "dare_residual",
    "offline_gains",
    "preset",
    "preset_names",
    "run",
    "run_trial",
    "solve_dare",
    "spectral_radius",
    "steady_state_covariance",
    "sweep",
]


def _text(scenario):
    return scenario if isinstance(scenario, str) else json.dumps(scenario)


def preset(name):
    """Built-in scenario as a dict in canonical form."""
    return json.loads(_wncs.preset_json(name))


def config_hash(scenario):
    return _wncs.config_hash(_text(scenario))


def _grid(scenario, sweep, schemes, thresholds, trials, horizon, seed, workers):
    text = _wncs.run_grid(
        _text(scenario),
        sweep=sweep,
        schemes=list(schemes or []),
        thresholds=[float(t) for t in (thresholds or [])],
        trials=trials,
        horizon=horizon,
        seed=seed,
        workers=workers,
    )
    return json.loads(text)


def run(scenario, schemes=None, thresholds=None, trials=None, horizon=None, seed=None, workers=1):
    """Monte Carlo with the configured policies, or a scheme/threshold grid."""
    return _grid(scenario, False, schemes, thresholds, trials, horizon, seed, workers)


def sweep(scenario, schemes=None, thresholds=None, trials=None, horizon=None, seed=None, workers=1):
    """Threshold sweep; defaults to the scenario's own sweep table."""
    return _grid(scenario, True, schemes, thresholds, trials, horizon, seed, workers)


def run_trial(scenario, trial_index=0, record_slots=False):
    return _wncs.run_trial(_text(scenario), trial_index, record_slots)
