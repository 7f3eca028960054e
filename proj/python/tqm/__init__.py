"""Gaussian wave packets with coordinate time as an observable."""

import json

from ._tqm import (
    AxisKind,
    AxisPacket,
    ConfigError,
    ValidityError,
    absorption_rescale,
    bohr_time_scale,
    bound_state_estimate,
    clock_frequency_scale,
    convert_units,
    experiment_names,
    gaussian_product_rescale,
    head_on_crossing,
    loop_omega,
    loop_tau,
    slit_sweep,
    toa_sqm,
    toa_tqm,
    tqm_gate_rescale,
    wavelet_roundtrip,
    zero_d_kernel,
)
from ._tqm import run_experiment_json as _run_experiment_json


def run_experiment(name, seed=0, **params):
    """Run a named experiment and return its parsed JSON document."""
    return json.loads(_run_experiment_json(name, json.dumps(params), seed))


__all__ = [
    "AxisKind",
    "AxisPacket",
    "ConfigError",
    "ValidityError",
    "absorption_rescale",
    "bohr_time_scale",
    "bound_state_estimate",
    "clock_frequency_scale",
    "convert_units",
    "experiment_names",
    "gaussian_product_rescale",
    "head_on_crossing",
    "loop_omega",
    "loop_tau",
    "run_experiment",
    "slit_sweep",
    "toa_sqm",
    "toa_tqm",
    "tqm_gate_rescale",
    "wavelet_roundtrip",
    "zero_d_kernel",
]
