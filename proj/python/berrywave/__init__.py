"""Random plane-wave simulation, nodal statistics and fourth-chaos diagnostics."""

import json

from ._core import (
    ComplexWave,
    ConfigError,
    Domain,
    InvalidArgument,
    IoError,
    OutOfDomain,
    ParseError,
    ResolutionError,
    UnsupportedCase,
    Wave,
    a_rate,
    alpha_coeff,
    b_rate,
    bessel_j,
    beta_coeff,
    config_hash,
    covariance_rate_check,
    hermite,
    normalized_kernels,
    nodal_length,
    predictions,
    vortex_count,
    zeta_coeff,
)
from ._core import run_json as _run_json


def run(config, seed=None, jobs=1):
    """Runs an experiment from config text. Returns (summary dict, CSV text)."""
    summary, csv = _run_json(config, seed, jobs)
    return json.loads(summary), csv

