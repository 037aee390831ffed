"""
Embedded-error analysis of the heralded states.

A resource state is a comb of spikes under an envelope in both quadratures.
ErrorProfile collects the four (wavefunction) variances; the momentum spike
variance comes from the Hurwitz zeta closed form and is cross-checked against
direct quadrature of a single cos^(2J) peak.
"""
import math
import logging
from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Sequence

import numpy as np
from scipy import integrate, special

from errors import DomainError
from measurement import success_probability_from_db
from special import hurwitz_zeta2
from spin_algebra import TotalSpin, SpinValue
from squeezing import (db_conversions, db_from_j, db_from_r, db_from_sigma_sq, j_from_db,
                       r_from_db, sigma_sq_from_db)
from state_model import (EncodingParams, QuadratureGrid, covering_grid, envelope_variances, evaluate, fidelity,
                         l2_distance, matched_target, resource_state)

logger = logging.getLogger(__name__)

__all__ = [
    'ErrorProfile', 'error_profile', 'hurwitz_zeta2', 'peak_variance_oracle', 'peak_normalization',
    'symmetric_params', 'j_from_db', 'db_from_j', 'db_from_r', 'r_from_db', 'db_from_sigma_sq',
    'sigma_sq_from_db', 'db_conversions', 'variance_correction', 'requirements_table',
    'resource_fidelity', 'resource_l2_distance',
]

QUAD_OPTIONS = dict(epsabs=0.0, epsrel=1e-13, limit=500)


@dataclass(frozen=True)
class ErrorProfile:
    """Spike and envelope variances in position (q) and momentum (p), plus the squeezing in dB."""
    spike_var_q: float
    env_var_q: float
    spike_var_p: float
    env_var_p: float
    db: float
    measured: bool = False

    def as_dict(self) -> Dict[str, float]:
        return {
            'spike_var_q': self.spike_var_q,
            'env_var_q': self.env_var_q,
            'spike_var_p': self.spike_var_p,
            'env_var_p': self.env_var_p,
            'db': self.db,
        }


def error_profile(params: EncodingParams, measured: bool = False) -> ErrorProfile:
    """
    Variances of the x = +-J states. measured=True halves every variance (the
    variance of |psi|^2 rather than of psi); db always refers to the
    wavefunction spike variance.
    """
    spike_q, env_q, spike_p, env_p = envelope_variances(params)
    db = db_from_sigma_sq(spike_q)
    if measured:
        spike_q, env_q, spike_p, env_p = (v / 2 for v in (spike_q, env_q, spike_p, env_p))
    return ErrorProfile(spike_q, env_q, spike_p, env_p, db, measured)


def symmetric_params(j: SpinValue) -> EncodingParams:
    """r = log(pi J / 2) / 2 and g = sqrt(pi)."""
    return EncodingParams.symmetric_for(j)


def variance_correction(j: float, g: float) -> float:
    """J^2 (sigma_p^2 - 2/(g^2 J)); tends to -1/g^2 for large J."""
    j = float(j)
    spike_p = 2 * (j * j * hurwitz_zeta2(j) - 1) / (g * g * j * j)
    return j * j * (spike_p - 2 / (g * g * j))


# --- single-peak quadrature --------------------------------------------------

def _peak_density(j: float, g: float):
    """Normalized cos^(2J)(pg/2) on one period [-pi/g, pi/g]."""
    log_norm = math.log(g) + special.gammaln(j + 1) - math.log(2 * math.sqrt(math.pi)) - special.gammaln(j + 0.5)
    scale = math.exp(log_norm)
    return lambda p: scale * np.cos(p * g / 2) ** (2 * j)


def _peak_args(j, g: float):
    value = TotalSpin.from_value(j).value
    if value < 0.5:
        raise DomainError(f"Peak variance needs J >= 1/2, got {value}")
    if not (math.isfinite(g) and g > 0):
        raise DomainError(f"g must be positive, got {g}")
    return value, float(g)


def peak_normalization(j: SpinValue, g: float) -> float:
    """Integral of the normalized peak over one period; 1 up to quadrature error."""
    value, g = _peak_args(j, g)
    result, _ = integrate.quad(_peak_density(value, g), -math.pi / g, math.pi / g, **QUAD_OPTIONS)
    return result


def peak_variance_oracle(j: SpinValue, g: float) -> float:
    """Variance of a single momentum peak by adaptive quadrature, independent of the zeta form."""
    value, g = _peak_args(j, g)
    density = _peak_density(value, g)
    result, error = integrate.quad(lambda p: p * p * density(p), -math.pi / g, math.pi / g, **QUAD_OPTIONS)
    logger.debug(f"Peak variance quadrature J={value} g={g:.6g}: {result!r} (+-{error:.2g})")
    return result


# --- tables and quality ------------------------------------------------------

def _requirements_row(db: float) -> Dict[str, float]:
    return {
        'db': float(db),
        'j_required': j_from_db(db),
        'r': r_from_db(db),
        'p_success': success_probability_from_db(db),
    }


def requirements_table(dbs: Sequence[float], workers: int = 1) -> List[Dict[str, float]]:
    """Total spin, optical squeezing and asymptotic success probability needed for each target dB."""
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        return list(executor.map(_requirements_row, dbs))


def resource_fidelity(j: SpinValue, x: SpinValue = None) -> float:
    """Fidelity of the symmetric-encoding resource state (x = +J by default) with its matched target."""
    params = symmetric_params(j)
    x = params.j.fraction if x is None else x
    return fidelity(resource_state(params, x), matched_target(params, x))


def resource_l2_distance(j: SpinValue, x: SpinValue = None) -> float:
    """Grid L2 distance between the resource state and its matched target, on a grid covering both."""
    params = symmetric_params(j)
    x = params.j.fraction if x is None else x
    resource, target = resource_state(params, x), matched_target(params, x)
    a, b = covering_grid(resource), covering_grid(target)
    grid = QuadratureGrid(min(a.min, b.min), max(a.max, b.max), min(a.step, b.step))
    return l2_distance(evaluate(resource, grid), evaluate(target, grid), grid.step)
