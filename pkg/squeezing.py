"""
Squeezing units: spike variance sigma^2, decibels, optical squeezing r and the
total spin J that a symmetric encoding needs for a given squeezing.
"""
import math
from dataclasses import dataclass
from typing import Optional

from errors import DomainError

LN10 = math.log(10.0)


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be positive, got {value}")
    return value


def db_from_sigma_sq(sigma_sq: float) -> float:
    """Squeezing of the state, -10 log10 sigma^2."""
    return -10 * math.log10(_positive('sigma^2', sigma_sq))


def sigma_sq_from_db(db: float) -> float:
    return 10 ** (-float(db) / 10)


def db_from_r(r: float) -> float:
    """dB of the squeezed variance e^(-2r), i.e. about 8.686 r."""
    return 20 * float(r) / LN10


def r_from_db(db: float) -> float:
    return float(db) * LN10 / 20


def j_from_db(db: float) -> float:
    """Total spin whose symmetric encoding reaches db: J = (2/pi) 10^(dB/10)."""
    return 2 / math.pi * 10 ** (float(db) / 10)


def db_from_j(j: float) -> float:
    """Inverse of j_from_db: 10 log10(pi/2) + 10 log10 J."""
    return 10 * math.log10(math.pi * _positive('J', j) / 2)


@dataclass(frozen=True)
class SqueezingSummary:
    db: float
    sigma: float
    envelope_width: float


def db_conversions(sigma_sq: Optional[float] = None, r: Optional[float] = None,
                   j: Optional[float] = None) -> SqueezingSummary:
    """dB, spike width sigma and envelope width 1/sigma from exactly one of sigma^2, r or J."""
    given = [v is not None for v in (sigma_sq, r, j)]
    if sum(given) != 1:
        raise DomainError("db_conversions needs exactly one of sigma_sq, r, j")

    if sigma_sq is None:
        sigma_sq = math.exp(-2 * float(r)) if r is not None else 2 / (math.pi * _positive('J', j))
    sigma = math.sqrt(_positive('sigma^2', sigma_sq))
    return SqueezingSummary(db_from_sigma_sq(sigma_sq), sigma, 1 / sigma)
