"""Time-frequency analysis of doubly dispersive channels.

Arrays are numpy: channels and spreading/transfer grids are complex N x N
(spreading rows are delays, columns Dopplers), windows are complex length-N
vectors, scattering profiles are real N x N.
"""

import json as _json

from ._tfcomm import (
    ConfigError,
    Error,
    IdentifiabilityError,
    InfeasibleGrid,
    InvalidDimension,
    InvalidInput,
    NotAFrame,
    NumericalError,
    __version__,
    bandwidth_sweep,
    capacity_low_snr,
    centered_rectangle,
    commutation_defect,
    cp_ofdm_pulses,
    cross_ambiguity,
    design_pulses,
    dirac_train,
    dual_window,
    frame_bounds,
    frame_operator,
    identify,
    interference_power,
    inverse_tf_transfer,
    periodized_gaussian,
    simulate_observation,
    spread_metrics,
    spreading_function,
    synthesize_channel,
    tf_correlation,
    tf_shift_op,
    tf_transfer,
    tight_window,
    wssus_sample,
)
from ._tfcomm import preset_profile as _preset_profile
from ._tfcomm import run_experiment as _run_experiment


def preset_profile(kind, **params):
    """Scattering profile preset, e.g. preset_profile("flat_rect", n_dim=32, delay_max=2)."""
    return _preset_profile(_json.dumps(dict(kind=kind, **params)))


def run_experiment(kind, config, out_dir, seed=None, config_dir="."):
    """Runs a CLI experiment from a config dict; returns the manifest."""
    return _json.loads(_run_experiment(kind, _json.dumps(config), str(out_dir), seed, str(config_dir)))
