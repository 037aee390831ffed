"""
Spin measurement after the controlled displacement: Kraus operators, outcome
probabilities and heralding (success) probabilities.

The measurement of J_x with outcome x acts on the light as
A_x = sum_m c_m d_{m,x} exp(-i g m p), a superposition of position shifts
weighted by the spin prior c_m.
"""
import math
import logging
from enum import Enum
from fractions import Fraction
from dataclasses import dataclass, replace
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from errors import DomainError, InvalidIndex, ZeroProbabilityOutcome
from spin_algebra import TotalSpin, SpinValue, check_index, d_matrix, m_values, outcomes, twice
from state_model import (EncodingParams, GaussianComb, SQRT_PI, PROBABILITY_FLOOR,
                         displace, make_comb, overlap)
from special import central_binomial_ratio, log_binom
from squeezing import db_from_j, j_from_db

logger = logging.getLogger(__name__)

PRIOR_TOLERANCE = 1e-12

# Symmetric encoding: g^2 e^(2r) / 4 = pi^2 J / 8
SYMMETRIC_DECAY = math.pi ** 2 / 8


@dataclass(frozen=True, eq=False)
class SpinPrior:
    """Spin state sum_m c_m |J, m> before the interaction."""
    j: TotalSpin
    coefficients: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'j', TotalSpin.from_value(self.j))
        coefficients = np.asarray(self.coefficients, dtype=complex)
        if coefficients.shape != (self.j.dimension,):
            raise InvalidIndex(f"Prior for J={self.j} needs {self.j.dimension} coefficients, "
                               f"got {coefficients.shape}")
        coefficients.setflags(write=False)
        object.__setattr__(self, 'coefficients', coefficients)
        self.validate()

    def validate(self):
        total = float(np.sum(np.abs(self.coefficients) ** 2))
        if abs(total - 1) > PRIOR_TOLERANCE:
            raise DomainError(f"Prior is not normalized: sum |c_m|^2 = {total!r}")

    @classmethod
    def normalized(cls, j: SpinValue, coefficients) -> 'SpinPrior':
        coefficients = np.asarray(coefficients, dtype=complex)
        total = np.sqrt(np.sum(np.abs(coefficients) ** 2))
        if total == 0:
            raise DomainError("Prior coefficients are all zero")
        return cls(j, coefficients / total)


def coherent_prior(j: SpinValue) -> SpinPrior:
    """Spin coherent state |J, m_x = J>: c_m = d_{m,J}."""
    j = TotalSpin.from_value(j)
    column = np.array(d_matrix(j)[:, -1], dtype=complex)
    # renormalize away float round-off in the table
    return SpinPrior.normalized(j, column)


def basis_prior(j: SpinValue, m: SpinValue) -> SpinPrior:
    """Prior concentrated on a single |J, m>."""
    j = TotalSpin.from_value(j)
    coefficients = np.zeros(j.dimension, dtype=complex)
    coefficients[j.index(m)] = 1.0
    return SpinPrior(j, coefficients)


class KrausTerm(NamedTuple):
    shift: float
    amplitude: complex


def kraus_amplitudes(prior: SpinPrior, x: SpinValue, g: float = SQRT_PI) -> List[KrausTerm]:
    """A_x as a list of (position shift g m, amplitude c_m d_{m,x}); zero terms are omitted."""
    two_x = check_index(prior.j, x)
    column = d_matrix(prior.j)[:, (two_x + prior.j.two_j) // 2]
    terms = []
    for m, c, d in zip(m_values(prior.j), prior.coefficients, column):
        amplitude = complex(c * d)
        if amplitude != 0:
            terms.append(KrausTerm(float(g * m), amplitude))
    return terms


def _apply_terms(terms: Sequence[KrausTerm], comb: GaussianComb) -> GaussianComb:
    components = []
    for term in terms:
        shifted = displace(comb, dq=term.shift)
        components.extend(replace(c, amplitude=c.amplitude * term.amplitude) for c in shifted.components)
    return make_comb(components, comb.quadrature)


def apply_kraus(prior: SpinPrior, x: SpinValue, comb: GaussianComb,
                g: float = SQRT_PI) -> Tuple[float, GaussianComb]:
    """Apply A_x to a pure optical state; returns (P(x), normalized conditional state)."""
    unnormalized = _apply_terms(kraus_amplitudes(prior, x, g), comb)
    input_norm = overlap(comb, comb).real
    if input_norm <= 0:
        raise DomainError("Cannot apply a Kraus operator to a zero state")

    probability = overlap(unnormalized, unnormalized).real / input_norm
    if not probability > PROBABILITY_FLOOR:
        raise ZeroProbabilityOutcome(f"Outcome x={x} has probability {probability:.3g}")
    conditioned = unnormalized.scaled(1 / math.sqrt(probability * input_norm))
    return probability, replace(conditioned, normalized=True)


def condition_mixture(prior: SpinPrior, x: SpinValue, branches: Sequence[Tuple[float, GaussianComb]],
                      g: float = SQRT_PI) -> Tuple[float, List[Tuple[float, GaussianComb]]]:
    """
    Condition a mixed optical input, given as weighted pure states, on outcome x.

    Returns P(x) = sum_i w_i P_i(x) and the surviving branches with weights
    w_i P_i(x) / P(x).
    """
    weights = np.array([w for w, _ in branches], dtype=float)
    if not len(branches) or np.any(weights < 0) or not math.isclose(weights.sum(), 1.0, rel_tol=0, abs_tol=1e-12):
        raise DomainError("Mixture weights must be non-negative and sum to 1")

    conditioned = []
    total = 0.0
    for weight, comb in branches:
        if weight == 0:
            continue
        try:
            p_branch, state = apply_kraus(prior, x, comb, g)
        except ZeroProbabilityOutcome:
            logger.debug(f"Mixture branch with weight {weight:.3g} cannot produce x={x}")
            continue
        total += weight * p_branch
        conditioned.append((weight * p_branch, state))

    if not total > PROBABILITY_FLOOR:
        raise ZeroProbabilityOutcome(f"Outcome x={x} has probability {total:.3g} for this mixture")
    return total, [(w / total, state) for w, state in conditioned]


def kraus_completeness_defect(j: SpinValue) -> float:
    """max |sum_x d_{m,x} d_{m',x} - delta_{m,m'}|, i.e. how far sum_x A_x^dag A_x is from 1."""
    table = d_matrix(TotalSpin.from_value(j))
    return float(np.abs(table @ table.T - np.eye(table.shape[0])).max())


# --- outcome probabilities ---------------------------------------------------

def _overlap_kernel(params: EncodingParams) -> np.ndarray:
    """<g m, r | g m', r> = exp[-g^2 e^(2r) (m - m')^2 / 4]."""
    ms = m_values(params.j)
    return np.exp(-(params.g ** 2) * math.exp(2 * params.r) * np.subtract.outer(ms, ms) ** 2 / 4)


def outcome_probability(params: EncodingParams, prior: Optional[SpinPrior], x: SpinValue) -> float:
    """P(x) = sum_{m,m'} c_m* c_m' d_{m,x} d_{m',x} <g m, r|g m', r> (coherent prior when prior is None)."""
    prior = prior or coherent_prior(params.j)
    if prior.j != params.j:
        raise InvalidIndex(f"Prior is for J={prior.j}, parameters for J={params.j}")
    two_x = check_index(params.j, x)
    weights = prior.coefficients * d_matrix(params.j)[:, (two_x + params.j.two_j) // 2]
    value = np.einsum('i,ij,j->', np.conj(weights), _overlap_kernel(params), weights).real
    return float(max(value, 0.0))


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    params: EncodingParams
    probs: np.ndarray

    @property
    def outcomes(self) -> Tuple[Fraction, ...]:
        return outcomes(self.params.j)

    def probability(self, x: SpinValue) -> float:
        return float(self.probs[self.params.j.index(x)])

    @property
    def total(self) -> float:
        return float(self.probs.sum())

    def most_probable(self, count: int = 2) -> Tuple[Fraction, ...]:
        """The count most probable outcomes, most probable first (ties resolved by lower x)."""
        order = np.argsort(-self.probs, kind='stable')[:count]
        return tuple(self.outcomes[i] for i in order)


def outcome_distribution(params: EncodingParams, prior: Optional[SpinPrior] = None) -> OutcomeDistribution:
    """P(x) for every x in -J..J."""
    prior = prior or coherent_prior(params.j)
    weights = prior.coefficients[:, None] * d_matrix(params.j)
    probs = np.einsum('ix,ij,jx->x', np.conj(weights), _overlap_kernel(params), weights).real
    probs = np.clip(probs, 0.0, None)
    probs.setflags(write=False)
    logger.debug(f"Outcome distribution for J={params.j}: total {probs.sum():.15f}")
    return OutcomeDistribution(params, probs)


# --- success probabilities (symmetric encoding) ------------------------------

class SuccessMethod(str, Enum):
    EXACT_SUM = 'exact_sum'
    CLOSED_BINOMIAL = 'closed_binomial'
    ASYMPTOTIC = 'asymptotic'


class EndpointMethod(str, Enum):
    EXACT = 'exact'
    NEIGHBOR = 'neighbor'


def _spin_value(j) -> float:
    """Float J from a TotalSpin or any real (continuous J from dB conversions)."""
    if isinstance(j, str):
        j = TotalSpin.from_value(j)
    value = j.value if isinstance(j, TotalSpin) else float(j)
    if not (math.isfinite(value) and value >= 0.5):
        raise DomainError(f"Success probabilities need J >= 1/2, got {value}")
    return value


def _half_integer(j) -> Optional[TotalSpin]:
    if isinstance(j, TotalSpin):
        return j
    try:
        return TotalSpin(twice(j))
    except InvalidIndex:
        return None


def _endpoint_double_sum(j: TotalSpin, sign: int) -> float:
    """P(+-J) for the symmetric encoding from the full double sum over m, m'."""
    two_ms = np.arange(-j.two_j, j.two_j + 1, 2)
    weights = np.exp(log_binom(j.two_j, (j.two_j - two_ms) // 2) - j.two_j * math.log(2))
    if sign < 0:
        weights = weights * np.where(((j.two_j + two_ms) // 2) % 2, -1.0, 1.0)
    params = EncodingParams.symmetric_for(j)
    return float(max(weights @ _overlap_kernel(params) @ weights, 0.0))


def _endpoint_series(j: float, sign: int, parity: Optional[int] = None) -> float:
    """
    P(+-J) grouped by Delta = m - m' (Chu-Vandermonde):
    2^(-4J) sum_Delta (+-1)^Delta exp(-pi^2 J Delta^2 / 8) C(4J, 2J + Delta).
    Binomials use log-gamma so non-half-integer J is a continuous extension.
    """
    top = math.floor(2 * j + 1e-12)
    deltas = np.arange(-top, top + 1)
    if parity is not None:
        deltas = deltas[deltas % 2 == parity]
    log_terms = log_binom(4 * j, 2 * j + deltas) - 4 * j * math.log(2) - SYMMETRIC_DECAY * j * deltas ** 2
    signs = np.where((deltas % 2 == 1) & (sign < 0), -1.0, 1.0)
    return float(np.sum(signs * np.exp(log_terms)))


def endpoint_probability(j, sign: int, method: Union[EndpointMethod, str] = EndpointMethod.EXACT) -> float:
    """P(+J) or P(-J) under symmetric encoding; NEIGHBOR keeps only |m - m'| <= 1."""
    if sign not in (1, -1):
        raise DomainError(f"sign must be +1 or -1, got {sign!r}")
    value = _spin_value(j)
    method = EndpointMethod(method)
    if method is EndpointMethod.NEIGHBOR:
        p0 = float(np.exp(log_binom(4 * value, 2 * value) - 4 * value * math.log(2)))
        p1 = float(np.exp(log_binom(4 * value, 2 * value + 1) - 4 * value * math.log(2)))
        return p0 + sign * 2 * math.exp(-SYMMETRIC_DECAY * value) * p1

    spin = _half_integer(j)
    if spin is not None:
        return _endpoint_double_sum(spin, sign)
    return _endpoint_series(value, sign)


def success_probability(j, method: Union[SuccessMethod, str] = SuccessMethod.EXACT_SUM) -> float:
    """P(+J) + P(-J) for the symmetric encoding."""
    value = _spin_value(j)
    method = SuccessMethod(method)
    if method is SuccessMethod.CLOSED_BINOMIAL:
        return float(2 * central_binomial_ratio(2 * value))
    if method is SuccessMethod.ASYMPTOTIC:
        return math.sqrt(2 / (math.pi * value)) * (1 - 1 / (16 * value))

    spin = _half_integer(j)
    if spin is not None:
        return _endpoint_double_sum(spin, 1) + _endpoint_double_sum(spin, -1)
    # odd Delta cancels between +J and -J
    return 2 * _endpoint_series(value, 1, parity=0)


def success_probability_from_db(db: float) -> float:
    """Asymptotic success probability in terms of the squeezing: 10^(-dB/20) - (pi/32) 10^(-3dB/20)."""
    db = float(db)
    return 10 ** (-db / 20) - math.pi / 32 * 10 ** (-3 * db / 20)


def iterated_scheme_probability(j) -> float:
    """2^(-2J+1), the success probability of building the comb one spin-1/2 at a time."""
    return 2.0 ** (-2 * _spin_value(j) + 1)


# --- sweeps ------------------------------------------------------------------

def _sweep_row(j: float) -> Dict[str, float]:
    return {
        'p_exact': success_probability(j, SuccessMethod.EXACT_SUM),
        'p_closed': success_probability(j, SuccessMethod.CLOSED_BINOMIAL),
        'p_asymptotic': success_probability(j, SuccessMethod.ASYMPTOTIC),
        'p_iterated': iterated_scheme_probability(j),
    }


def _j_row(j: float) -> Dict[str, float]:
    return {'j': float(j), 'db': db_from_j(float(j)), **_sweep_row(j)}


def _db_row(db: float) -> Dict[str, float]:
    j = j_from_db(db)
    return {'db': float(db), 'j': j, **_sweep_row(j)}


def probability_sweep(js: Optional[Sequence[float]] = None, dbs: Optional[Sequence[float]] = None,
                      workers: int = 1, progress: Optional[Callable[[], None]] = None) -> List[Dict[str, float]]:
    """Success probabilities by every method over a J or dB sweep, in input order.

    progress, when given, is called once per finished point (from worker threads).
    """
    if (js is None) == (dbs is None):
        raise DomainError("probability_sweep needs exactly one of js / dbs")
    values, compute = (js, _j_row) if js is not None else (dbs, _db_row)

    def row(value):
        result = compute(value)
        if progress:
            progress()
        return result

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        rows = list(executor.map(row, values))
    logger.info(f"Computed success probabilities for {len(rows)} sweep points")
    return rows
