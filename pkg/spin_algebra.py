"""
Wigner small d-matrix elements at beta = pi/2 for a collective spin J.

Spin values and magnetic indices are held exactly as twice-value integers, so
parity tests such as "J + m is an integer" never touch floating point.
Factorial ratios are evaluated in log domain; the alternating explicit sum is
accumulated as an exact integer before it is scaled.
"""
import math
import logging
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from errors import InvalidIndex, HalfIntegerUnsupported, DomainError
from special import log_binom, exact_binom

logger = logging.getLogger(__name__)

LOG2 = math.log(2.0)

SpinValue = Union[int, float, str, Fraction]


class DMethod(str, Enum):
    EXPLICIT_SUM = 'explicit_sum'
    JACOBI = 'jacobi'


def twice(value: SpinValue) -> int:
    """Return 2*value as an int, raising InvalidIndex unless value is a half-integer."""
    try:
        if isinstance(value, str):
            value = value.strip().replace('+', '')
        frac = Fraction(value)
    except (ValueError, TypeError, ZeroDivisionError):
        raise InvalidIndex(f"Not a number: {value!r}")
    doubled = 2 * frac
    if doubled.denominator != 1:
        raise InvalidIndex(f"{value!r} is not an integer or half-integer")
    return int(doubled)


@dataclass(frozen=True)
class TotalSpin:
    """Total collective spin J = two_j / 2 of an ensemble of N = 2J spin-1/2 atoms."""
    two_j: int

    def __post_init__(self):
        if not isinstance(self.two_j, (int, np.integer)) or self.two_j < 0:
            raise InvalidIndex(f"two_j must be a non-negative integer, got {self.two_j!r}")

    @classmethod
    def from_value(cls, value: SpinValue) -> 'TotalSpin':
        if isinstance(value, TotalSpin):
            return value
        return cls(twice(value))

    @property
    def value(self) -> float:
        return self.two_j / 2

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.two_j, 2)

    @property
    def is_integer(self) -> bool:
        return self.two_j % 2 == 0

    @property
    def dimension(self) -> int:
        return self.two_j + 1

    @property
    def n_atoms(self) -> int:
        return self.two_j

    def index(self, m: SpinValue) -> int:
        """Position of m in the ascending list -J..J."""
        return (check_index(self, m) + self.two_j) // 2

    def __str__(self):
        return str(self.fraction)


def check_index(j: TotalSpin, m: SpinValue) -> int:
    """Validate a magnetic index against j and return 2m."""
    two_m = twice(m)
    if abs(two_m) > j.two_j or (j.two_j + two_m) % 2:
        raise InvalidIndex(f"m={Fraction(two_m, 2)} is not a valid index for J={j}")
    return two_m


def outcomes(j: TotalSpin) -> Tuple[Fraction, ...]:
    """All magnetic indices (equivalently measurement outcomes) -J..J in ascending order."""
    return tuple(Fraction(two_m, 2) for two_m in range(-j.two_j, j.two_j + 1, 2))


def m_values(j: TotalSpin) -> np.ndarray:
    """Float array of -J..J."""
    return np.arange(-j.two_j, j.two_j + 1, 2) / 2.0


# --- general element -------------------------------------------------------

def _explicit_sum(two_j: int, two_m: int, two_mp: int) -> float:
    """Explicit alternating sum, accumulated exactly in integers."""
    jpm, jmm = (two_j + two_m) // 2, (two_j - two_m) // 2
    jpmp, jmmp = (two_j + two_mp) // 2, (two_j - two_mp) // 2
    delta = (two_m - two_mp) // 2

    k_first, k_last = max(0, -delta), min(jpmp, jmm)
    total = 0
    if k_first <= k_last:
        # C(n, k+1) = C(n, k) (n - k) / (k + 1), exact in integers
        left, right = exact_binom(jpmp, k_first), exact_binom(jmmp, k_first + delta)
        for k in range(k_first, k_last + 1):
            term = left * right
            total += -term if (k + delta) % 2 else term
            left = left * (jpmp - k) // (k + 1)
            right = right * (jmmp - k - delta) // (k + delta + 1)

    if total == 0:
        return 0.0

    log_prefactor = 0.5 * (math.lgamma(jpm + 1) + math.lgamma(jmm + 1)
                           - math.lgamma(jpmp + 1) - math.lgamma(jmmp + 1)) - 0.5 * two_j * LOG2
    magnitude = math.exp(log_prefactor + math.log(abs(total)))
    return magnitude if total > 0 else -magnitude


def jacobi_at_zero(n: int, a: int, b: int) -> float:
    """Jacobi polynomial P_n^(a,b)(0) from the three-term recurrence in the degree."""
    if n < 0:
        raise DomainError(f"Jacobi degree must be non-negative, got {n}")
    p_prev, p = 1.0, (a - b) / 2.0
    if n == 0:
        return p_prev
    for k in range(2, n + 1):
        c = 2 * k + a + b
        numerator = (c - 1) * (a * a - b * b) * p - 2 * (k + a - 1) * (k + b - 1) * c * p_prev
        p_prev, p = p, numerator / (2 * k * (k + a + b) * (c - 2))
    return p


def _jacobi_form(two_j: int, two_m: int, two_mp: int) -> float:
    """Closed form through P_s^(mu,nu)(0) with the piecewise sign of the analytic expression."""
    mu = abs(two_m - two_mp) // 2
    nu = abs(two_m + two_mp) // 2
    # s = J - max(|m|, |m'|)
    s = (two_j - max(abs(two_m), abs(two_mp))) // 2
    j = two_j / 2

    # varsigma: 1 when m' >= m, (-1)^(m'-m) otherwise
    sign = 1.0
    if two_mp < two_m and ((two_m - two_mp) // 2) % 2:
        sign = -1.0

    log_scale = 0.5 * (log_binom(two_j, s + mu) - log_binom(two_j, s)) + (s - j) * LOG2
    return sign * math.exp(float(log_scale)) * jacobi_at_zero(s, mu, nu)


def wigner_d(j: TotalSpin, m: SpinValue, m_prime: SpinValue,
             method: Union[DMethod, str] = DMethod.EXPLICIT_SUM) -> float:
    """d^(J)_{m,m'}(pi/2) = <J,m| exp(-i pi/2 J_y) |J,m'>."""
    j = TotalSpin.from_value(j)
    two_m = check_index(j, m)
    two_mp = check_index(j, m_prime)
    method = DMethod(method)
    if method is DMethod.EXPLICIT_SUM:
        return _explicit_sum(j.two_j, two_m, two_mp)
    return _jacobi_form(j.two_j, two_m, two_mp)


@lru_cache(maxsize=256)
def _d_table(two_j: int, method: DMethod) -> np.ndarray:
    element = _explicit_sum if method is DMethod.EXPLICIT_SUM else _jacobi_form
    twos = range(-two_j, two_j + 1, 2)
    table = np.array([[element(two_j, a, b) for b in twos] for a in twos], dtype=float)
    table.setflags(write=False)
    logger.debug(f"Built d-matrix table for 2J={two_j} ({method.value})")
    return table


def d_matrix(j: TotalSpin, method: Union[DMethod, str] = DMethod.JACOBI) -> np.ndarray:
    """Full (2J+1)x(2J+1) table, rows m and columns m' ascending; memoised and read-only."""
    j = TotalSpin.from_value(j)
    return _d_table(j.two_j, DMethod(method))


# --- special cases ---------------------------------------------------------

def _edge_sign(two_j: int, two_m: int, sign: int) -> float:
    if sign not in (1, -1):
        raise InvalidIndex(f"sign must be +1 or -1, got {sign!r}")
    return -1.0 if sign < 0 and ((two_j + two_m) // 2) % 2 else 1.0


def d_edge(j: TotalSpin, m: SpinValue, sign: int) -> float:
    """d_{m,+-J} = (+-1)^(J+m) 2^-J C(2J, J-m)^(1/2)."""
    j = TotalSpin.from_value(j)
    two_m = check_index(j, m)
    log_value = 0.5 * log_binom(j.two_j, (j.two_j - two_m) // 2) - j.value * LOG2
    return _edge_sign(j.two_j, two_m, sign) * math.exp(float(log_value))


def _re_i_power(n: int) -> int:
    """Re(i^n) for integer n."""
    return 0 if n % 2 else (1 if (n // 2) % 2 == 0 else -1)


def d_center(j: TotalSpin, m: SpinValue) -> float:
    """d_{m,0} = Re(i^(J+m)) 2^-J C(2J,J)^(1/2) C(2J,J-m)^(-1/2) C(J,(J-m)/2); integer J only."""
    j = TotalSpin.from_value(j)
    if not j.is_integer:
        raise HalfIntegerUnsupported(f"d_center needs integer J, got J={j}")
    two_m = check_index(j, m)
    jj, mm = j.two_j // 2, two_m // 2
    phase = _re_i_power(jj + mm)
    if phase == 0:
        return 0.0
    log_value = (-jj * LOG2 + 0.5 * log_binom(2 * jj, jj) - 0.5 * log_binom(2 * jj, jj - mm)
                 + log_binom(jj, (jj - mm) // 2))
    return phase * math.exp(float(log_value))


def _outcome_kind(j: TotalSpin, x: SpinValue) -> int:
    """Map x to +1 (x=+J), -1 (x=-J) or 0 (x=0); anything else is rejected."""
    two_x = twice(x)
    if two_x == j.two_j:
        return 1
    if two_x == -j.two_j:
        return -1
    if two_x == 0:
        if not j.is_integer:
            raise HalfIntegerUnsupported(f"x=0 is not an outcome for half-integer J={j}")
        return 0
    raise InvalidIndex(f"x must be +J, -J or 0 for J={j}, got {x!r}")


def envelope_product(j: TotalSpin, m: SpinValue, x: SpinValue) -> float:
    """Amplitude d_{m,J} d_{m,x} for x in {+J, -J, 0}."""
    j = TotalSpin.from_value(j)
    two_m = check_index(j, m)
    kind = _outcome_kind(j, x)
    if kind != 0:
        log_value = log_binom(j.two_j, (j.two_j - two_m) // 2) - j.two_j * LOG2
        return _edge_sign(j.two_j, two_m, kind) * math.exp(float(log_value))

    jj, mm = j.two_j // 2, two_m // 2
    phase = _re_i_power(jj + mm)
    if phase == 0:
        return 0.0
    log_value = -2 * jj * LOG2 + 0.5 * log_binom(2 * jj, jj) + log_binom(jj, (jj - mm) // 2)
    return phase * math.exp(float(log_value))


def gaussian_envelope_approx(j: TotalSpin, m: SpinValue, x: SpinValue) -> float:
    """Gaussian approximation of envelope_product, accurate away from the far tails."""
    j = TotalSpin.from_value(j)
    two_m = check_index(j, m)
    if j.two_j == 0:
        raise DomainError("Gaussian envelope approximation needs J >= 1/2")
    kind = _outcome_kind(j, x)
    jv, mv = j.value, two_m / 2
    if kind != 0:
        return _edge_sign(j.two_j, two_m, kind) * math.exp(-mv * mv / jv) / math.sqrt(math.pi * jv)

    phase = _re_i_power((j.two_j + two_m) // 2)
    return phase * math.sqrt(2.0) * (math.pi * jv) ** -0.75 * math.exp(-mv * mv / (2 * jv))
