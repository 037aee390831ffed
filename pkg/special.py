"""
Special functions shared by the spin, state and metric modules.

Binomials come in two flavours: exact integers (scipy.special.comb with exact=True)
for the alternating d-matrix sum, and log-gamma values for everything that is
exponentiated afterwards, including non-integer (continuous) arguments.
"""
import numpy as np
from scipy import special

from errors import DomainError

def log_binom(n, k):
    """log C(n, k) via log-gamma; valid for real n >= k >= 0."""
    n = np.asarray(n, dtype=float)
    k = np.asarray(k, dtype=float)
    return special.gammaln(n + 1) - special.gammaln(k + 1) - special.gammaln(n - k + 1)


def exact_binom(n: int, k: int) -> int:
    """C(n, k) as an exact Python integer (0 outside 0 <= k <= n)."""
    if k < 0 or k > n:
        return 0
    return int(special.comb(n, k, exact=True))


def central_binomial_ratio(n):
    """2^(-2n) C(2n, n) for real n >= 0, computed in log domain (continuous in n)."""
    n = np.asarray(n, dtype=float)
    return np.exp(log_binom(2 * n, n) - 2 * n * np.log(2.0))


def hurwitz_zeta2(a: float) -> float:
    """Hurwitz zeta ζ(2, a) = Σ_k (k + a)^-2 for a > 0."""
    a = float(a)
    if not np.isfinite(a) or a <= 0:
        raise DomainError(f"hurwitz_zeta2 requires a > 0, got {a}")
    return float(special.zeta(2.0, a))
