"""
Wavefunctions as finite sums of complex Gaussians (combs).

Every state in this project (squeezed meter states, conditional states after the
spin measurement, resource and target states and their approximations) is a
GaussianComb: a list of components a * exp[-(u-c)^2/(2v) + i k u] in one
quadrature. Overlaps, norms, displacements and the Fourier transform are all
evaluated in closed form; grid sampling is only used for output and as an
independent check.

Conventions: hbar = 1, vacuum variance <q^2> = 1/2, and
psi~(p) = (2 pi)^(-1/2) * integral dq exp(-i q p) psi(q).
"""
import math
import logging
from enum import Enum
from dataclasses import dataclass, replace
from typing import Dict, Iterable, Optional, Tuple

import numpy as np
from scipy.integrate import trapezoid

from errors import DomainError, GridTooCoarse, QuadratureMismatch, ZeroProbabilityOutcome, HalfIntegerUnsupported
from spin_algebra import TotalSpin, SpinValue, check_index, d_matrix, m_values, twice
from special import hurwitz_zeta2, log_binom

logger = logging.getLogger(__name__)

SQRT_PI = math.sqrt(math.pi)

# Envelope factors below this are dropped when truncating infinite combs
ENVELOPE_CUTOFF = 1e-12
ENVELOPE_RADIUS = math.sqrt(-2.0 * math.log(ENVELOPE_CUTOFF))  # ~7.434

# P(x) at or below this is treated as an outcome that cannot herald
PROBABILITY_FLOOR = 1e-300

POINTS_PER_STD = 8
COVERAGE_STDS = 6.0

# |psi| at the grid edges, relative to its peak, above which a transform is truncated
EDGE_TOLERANCE = 1e-6


class Quadrature(str, Enum):
    POSITION = 'position'
    MOMENTUM = 'momentum'

    @property
    def conjugate(self) -> 'Quadrature':
        return Quadrature.MOMENTUM if self is Quadrature.POSITION else Quadrature.POSITION


class Parity(str, Enum):
    PLUS = 'plus'
    MINUS = 'minus'

    @classmethod
    def parse(cls, value) -> 'Parity':
        if isinstance(value, Parity):
            return value
        text = str(value).strip().lower()
        if text in ('+', 'plus', '+1', '1'):
            return cls.PLUS
        if text in ('-', 'minus', '-1'):
            return cls.MINUS
        raise DomainError(f"Parity must be plus or minus, got {value!r}")

    @property
    def sign(self) -> int:
        return 1 if self is Parity.PLUS else -1


@dataclass(frozen=True)
class GaussianComponent:
    """a * exp[-(u - center)^2 / (2 variance) + i wavenumber u]."""
    center: float
    variance: float
    amplitude: complex
    wavenumber: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.variance) and self.variance > 0):
            raise DomainError(f"Component variance must be positive, got {self.variance}")
        if not (np.isfinite(self.center) and np.isfinite(self.wavenumber)):
            raise DomainError("Component center and wavenumber must be finite")
        if not np.isfinite(complex(self.amplitude)):
            raise DomainError(f"Component amplitude must be finite, got {self.amplitude}")

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        return self.amplitude * np.exp(-(u - self.center) ** 2 / (2 * self.variance) + 1j * self.wavenumber * u)

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


def _sort_key(component: GaussianComponent):
    return (component.center, component.wavenumber, component.variance)


@dataclass(frozen=True)
class GaussianComb:
    """
    Finite superposition of Gaussian components in one quadrature.

    Components are kept sorted by (center, wavenumber, variance) with no two
    sharing all three; for the wavenumber-free combs built from spin outcomes
    and targets this means strictly increasing centers.
    """
    components: Tuple[GaussianComponent, ...]
    quadrature: Quadrature = Quadrature.POSITION
    normalized: bool = False

    def __post_init__(self):
        keys = [_sort_key(c) for c in self.components]
        if any(a >= b for a, b in zip(keys, keys[1:])):
            raise DomainError("Comb components must be strictly ordered; build combs with make_comb")

    def __len__(self):
        return len(self.components)

    def __call__(self, u):
        return evaluate_points(self, u)

    @property
    def centers(self) -> np.ndarray:
        return np.array([c.center for c in self.components])

    @property
    def variances(self) -> np.ndarray:
        return np.array([c.variance for c in self.components])

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([c.amplitude for c in self.components], dtype=complex)

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.array([c.wavenumber for c in self.components])

    def scaled(self, factor: complex) -> 'GaussianComb':
        """Multiply every amplitude by a constant (the normalized flag survives only for |factor| = 1)."""
        factor = complex(factor)
        return GaussianComb(
            tuple(replace(c, amplitude=c.amplitude * factor) for c in self.components),
            self.quadrature,
            self.normalized and math.isclose(abs(factor), 1.0, rel_tol=1e-15, abs_tol=0.0),
        )


def make_comb(components: Iterable[GaussianComponent], quadrature=Quadrature.POSITION,
              normalized: bool = False) -> GaussianComb:
    """Sort components and merge exact duplicates (amplitudes add); zero amplitudes are dropped."""
    merged: Dict[tuple, GaussianComponent] = {}
    for comp in components:
        key = _sort_key(comp)
        if key in merged:
            merged[key] = replace(merged[key], amplitude=merged[key].amplitude + comp.amplitude)
        else:
            merged[key] = comp
    kept = tuple(merged[k] for k in sorted(merged) if merged[k].amplitude != 0)
    return GaussianComb(kept, Quadrature(quadrature), normalized)


def _arrays(comb: GaussianComb):
    return comb.centers, comb.variances, comb.amplitudes, comb.wavenumbers


# --- encoding parameters -----------------------------------------------------

@dataclass(frozen=True)
class EncodingParams:
    """One preparation run: total spin J, optical squeezing r and coupling (spike spacing) g."""
    j: TotalSpin
    r: float
    g: float

    def __post_init__(self):
        object.__setattr__(self, 'j', TotalSpin.from_value(self.j))
        if not (np.isfinite(self.g) and self.g > 0):
            raise DomainError(f"Coupling g must be positive, got {self.g}")
        if not np.isfinite(self.r):
            raise DomainError(f"Squeezing r must be finite, got {self.r}")

    @classmethod
    def symmetric_for(cls, j: SpinValue) -> 'EncodingParams':
        """g = sqrt(pi) and e^(2r) = pi J / 2, which balances spike and envelope variances."""
        j = TotalSpin.from_value(j)
        if j.two_j == 0:
            raise DomainError("Symmetric encoding needs J >= 1/2")
        return cls(j, 0.5 * math.log(math.pi * j.value / 2), SQRT_PI)

    @property
    def spike_variance(self) -> float:
        """Position variance e^(-2r) of each squeezed component."""
        return math.exp(-2 * self.r)

    @property
    def g_bar(self) -> float:
        """Coupling in coherent-amplitude units, g / sqrt(2)."""
        return self.g / math.sqrt(2)

    @property
    def symmetric(self) -> bool:
        if self.j.two_j == 0:
            return False
        return (math.isclose(math.exp(2 * self.r), math.pi * self.j.value / 2, rel_tol=1e-12)
                and math.isclose(self.g, SQRT_PI, rel_tol=1e-12))


# --- grids -------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureGrid:
    min: float
    max: float
    step: float

    def __post_init__(self):
        if not (np.isfinite(self.min) and np.isfinite(self.max) and self.max > self.min):
            raise DomainError(f"Grid needs min < max, got [{self.min}, {self.max}]")
        if not (np.isfinite(self.step) and self.step > 0):
            raise DomainError(f"Grid step must be positive, got {self.step}")

    @property
    def size(self) -> int:
        return int(math.floor((self.max - self.min) / self.step + 1e-9)) + 1

    @property
    def points(self) -> np.ndarray:
        return self.min + self.step * np.arange(self.size)

    def covers(self, low: float, high: float) -> bool:
        return self.min <= low and self.max >= high

    def check_resolves(self, comb: GaussianComb, strict: bool = False):
        """
        Raise GridTooCoarse unless step <= (narrowest std)/8. A component not covered to
        six std is a warning, or GridTooCoarse when strict (user-supplied ranges).
        """
        if not len(comb):
            return
        narrowest = float(np.sqrt(comb.variances.min()))
        if self.step > narrowest / POINTS_PER_STD * (1 + 1e-9):
            raise GridTooCoarse(
                f"Grid step {self.step:.4g} exceeds 1/{POINTS_PER_STD} of the narrowest component "
                f"std {narrowest:.4g}")
        reach = COVERAGE_STDS * np.sqrt(comb.variances)
        if not self.covers(float((comb.centers - reach).min()), float((comb.centers + reach).max())):
            message = (f"Grid [{self.min:.4g}, {self.max:.4g}] does not cover every component "
                       f"to {COVERAGE_STDS:g} std")
            if strict:
                raise GridTooCoarse(message)
            logger.warning(message)


def default_grid(params: EncodingParams) -> QuadratureGrid:
    """Position grid for the conditional and resource states of params."""
    std = math.exp(-params.r)
    half_width = params.g * params.j.value + COVERAGE_STDS * std
    if not params.j.is_integer:
        # room for the half-integer shift of resource states
        half_width += params.g / 2
    return QuadratureGrid(-half_width, half_width, std / POINTS_PER_STD)


def covering_grid(comb: GaussianComb) -> QuadratureGrid:
    """Grid covering every component to six std with eight points per narrowest std."""
    if not len(comb):
        raise DomainError("Cannot build a grid for an empty comb")
    stds = np.sqrt(comb.variances)
    return QuadratureGrid(float((comb.centers - COVERAGE_STDS * stds).min()),
                          float((comb.centers + COVERAGE_STDS * stds).max()),
                          float(stds.min()) / POINTS_PER_STD)


def conjugate_points(grid: QuadratureGrid) -> np.ndarray:
    """Points of the discrete Fourier transform of samples on grid, ascending."""
    return np.fft.fftshift(2 * np.pi * np.fft.fftfreq(grid.size, d=grid.step))


def conjugate_grid(grid: QuadratureGrid) -> QuadratureGrid:
    points = conjugate_points(grid)
    return QuadratureGrid(float(points[0]), float(points[-1]), float(points[1] - points[0]))


def momentum_grid(params: EncodingParams) -> QuadratureGrid:
    """Momentum grid covering the e^r envelope, with eight points per std of the narrowest peak."""
    _, _, spike_p, env_p = envelope_variances(params)
    envelope_std = math.sqrt(env_p)
    # x = 0 peaks are half as wide as the +-J ones
    narrowest = min(envelope_std, math.sqrt(spike_p / 2))
    half_width = COVERAGE_STDS * envelope_std
    return QuadratureGrid(-half_width, half_width, narrowest / POINTS_PER_STD)


# --- evaluation --------------------------------------------------------------

def evaluate_points(comb: GaussianComb, u) -> np.ndarray:
    """Sum of the components at arbitrary points (no resolution check)."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    centers, variances, amps, ks = _arrays(comb)
    if not len(centers):
        return np.zeros(u.shape, dtype=complex)
    exponent = (-(u[:, None] - centers) ** 2 / (2 * variances) + 1j * ks * u[:, None])
    return np.exp(exponent) @ amps


def evaluate(comb: GaussianComb, grid: QuadratureGrid, strict: bool = False) -> np.ndarray:
    """psi(u_k) on every grid point; strict makes incomplete coverage an error."""
    grid.check_resolves(comb, strict)
    return evaluate_points(comb, grid.points)


def fourier_numeric(samples: np.ndarray, grid: QuadratureGrid) -> Tuple[np.ndarray, np.ndarray]:
    """
    Discrete approximation of (2 pi)^(-1/2) * integral du exp(-i u p) psi(u).

    Returns (p, values) on the conjugate grid with ascending p. The samples must
    have decayed at both ends of the grid, otherwise the transform is truncated.
    """
    samples = np.asarray(samples, dtype=complex)
    if samples.shape != (grid.size,):
        raise DomainError(f"Expected {grid.size} samples, got {samples.shape}")
    peak = np.abs(samples).max()
    if peak > 0 and max(abs(samples[0]), abs(samples[-1])) > EDGE_TOLERANCE * peak:
        raise GridTooCoarse("Samples have not decayed at the grid edges; widen the grid")

    p = 2 * np.pi * np.fft.fftfreq(grid.size, d=grid.step)
    values = grid.step / np.sqrt(2 * np.pi) * np.exp(-1j * grid.min * p) * np.fft.fft(samples)
    return np.fft.fftshift(p), np.fft.fftshift(values)


def l2_distance(a: np.ndarray, b: np.ndarray, step: float) -> float:
    """Grid L2 distance (integral |a-b|^2)^(1/2) by the rectangle rule."""
    return float(np.sqrt(np.sum(np.abs(np.asarray(a) - np.asarray(b)) ** 2) * step))


def grid_norm(samples: np.ndarray, step: float) -> float:
    """Trapezoid estimate of integral |psi|^2."""
    return float(trapezoid(np.abs(samples) ** 2, dx=step))


# --- analytic operations -----------------------------------------------------

def overlap(a: GaussianComb, b: GaussianComb) -> complex:
    """<a|b> from the closed-form integral of each component pair."""
    if a.quadrature != b.quadrature:
        raise QuadratureMismatch(f"Cannot overlap a {a.quadrature.value} comb with a {b.quadrature.value} comb")
    if not len(a) or not len(b):
        return 0j

    c1, v1, a1, k1 = (x[:, None] for x in _arrays(a))
    c2, v2, a2, k2 = (x[None, :] for x in _arrays(b))

    # integral of exp(-A u^2 + B u - C) = sqrt(pi/A) exp(B^2/(4A) - C)
    big_a = 1 / (2 * v1) + 1 / (2 * v2)
    big_b = c1 / v1 + c2 / v2 + 1j * (k2 - k1)
    big_c = c1 ** 2 / (2 * v1) + c2 ** 2 / (2 * v2)
    pair = np.sqrt(np.pi / big_a) * np.exp(big_b ** 2 / (4 * big_a) - big_c)
    return complex(np.sum(np.conj(a1) * a2 * pair))


def norm(comb: GaussianComb) -> float:
    return math.sqrt(max(overlap(comb, comb).real, 0.0))


def normalize(comb: GaussianComb) -> GaussianComb:
    n = norm(comb)
    if not (n > 0 and np.isfinite(n)):
        raise DomainError("Cannot normalize a comb with zero norm")
    normalized = comb.scaled(1 / n)
    return replace(normalized, normalized=True)


def fidelity(a: GaussianComb, b: GaussianComb) -> float:
    """|<a|b>|^2 / (<a|a><b|b>); insensitive to global phases and scale."""
    denominator = overlap(a, a).real * overlap(b, b).real
    if denominator <= 0:
        raise DomainError("Fidelity needs two non-zero states")
    return abs(overlap(a, b)) ** 2 / denominator


def displace(comb: GaussianComb, dq: float = 0.0, dp: float = 0.0) -> GaussianComb:
    """Apply the position shift exp(-i dq p) followed by the momentum kick exp(i dp q)."""
    out = []
    for c in comb.components:
        if comb.quadrature is Quadrature.POSITION:
            # psi(q) -> exp(i dp q) psi(q - dq)
            c = replace(c, center=c.center + dq, amplitude=c.amplitude * np.exp(-1j * c.wavenumber * dq))
            c = replace(c, wavenumber=c.wavenumber + dp)
        else:
            # psi~(p) -> exp(-i dq p) psi~(p), then psi~(p - dp)
            c = replace(c, wavenumber=c.wavenumber - dq)
            c = replace(c, center=c.center + dp, amplitude=c.amplitude * np.exp(-1j * c.wavenumber * dp))
        out.append(c)
    return make_comb(out, comb.quadrature, comb.normalized)


def fourier(comb: GaussianComb) -> GaussianComb:
    """Exact transform to the conjugate quadrature (forward for position, inverse for momentum)."""
    out = []
    for c in comb.components:
        amp = c.amplitude * math.sqrt(c.variance) * np.exp(1j * c.wavenumber * c.center)
        if comb.quadrature is Quadrature.POSITION:
            out.append(GaussianComponent(c.wavenumber, 1 / c.variance, amp, -c.center))
        else:
            out.append(GaussianComponent(-c.wavenumber, 1 / c.variance, amp, c.center))
    return make_comb(out, comb.quadrature.conjugate, comb.normalized)


def squeezed_state(r: float, center: float = 0.0, quadrature=Quadrature.POSITION) -> GaussianComb:
    """Normalized squeezed vacuum with variance e^(-2r) in the given quadrature, displaced to center."""
    variance = math.exp(-2 * r)
    amp = (math.pi * variance) ** -0.25
    return make_comb([GaussianComponent(center, variance, amp)], quadrature, normalized=True)


# --- conditional states ------------------------------------------------------

def _i_power(n: int) -> complex:
    """i^n exactly."""
    return (1, 1j, -1, -1j)[n % 4]


def outcome_amplitudes(params: EncodingParams, x: SpinValue) -> np.ndarray:
    """d_{m,J} d_{m,x} for m = -J..J (coherent spin prior)."""
    two_x = check_index(params.j, x)
    table = d_matrix(params.j)
    return table[:, -1] * table[:, (two_x + params.j.two_j) // 2]


def _unnormalized_conditional(params: EncodingParams, x: SpinValue) -> GaussianComb:
    """Sum_m d_{m,J} d_{m,x} |gm, r>; its squared norm is P(x)."""
    variance = params.spike_variance
    amps = outcome_amplitudes(params, x) * (math.pi * variance) ** -0.25
    centers = params.g * m_values(params.j)
    return make_comb(GaussianComponent(float(c), variance, complex(a)) for c, a in zip(centers, amps))


def conditional_position_state(params: EncodingParams, x: SpinValue) -> GaussianComb:
    """Normalized optical state heralded by spin outcome x."""
    comb = _unnormalized_conditional(params, x)
    probability = overlap(comb, comb).real
    if not probability > PROBABILITY_FLOOR:
        raise ZeroProbabilityOutcome(f"Outcome x={x} has probability {probability:.3g} for J={params.j}")
    return normalize(comb)


def conditional_probability(params: EncodingParams, x: SpinValue) -> float:
    """P(x) as the squared analytic norm of the unnormalized conditional state."""
    comb = _unnormalized_conditional(params, x)
    return overlap(comb, comb).real


def conditional_momentum_sum(params: EncodingParams, x: SpinValue, p) -> np.ndarray:
    """Momentum wavefunction from the explicit sum over m."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    amps = outcome_amplitudes(params, x)
    probability = conditional_probability(params, x)
    if not probability > PROBABILITY_FLOOR:
        raise ZeroProbabilityOutcome(f"Outcome x={x} has probability {probability:.3g} for J={params.j}")
    prefactor = math.exp(-params.r / 2) / (math.sqrt(probability) * math.pi ** 0.25)
    ms = m_values(params.j)
    phases = np.exp(-1j * params.g * np.outer(p, ms))
    envelope = np.exp(-p ** 2 / (2 * math.exp(2 * params.r)))
    return prefactor * envelope * (phases @ amps)


def conditional_momentum_closed_form(params: EncodingParams, x: SpinValue, p) -> np.ndarray:
    """Product forms: cos^(2J)(gp/2) for +J, e^(i J pi) sin^(2J)(gp/2) for -J, sin^J(gp) for 0."""
    j = params.j
    two_x = check_index(j, x)
    p = np.atleast_1d(np.asarray(p, dtype=float))
    gp = params.g * p
    if two_x == j.two_j:
        shape = np.cos(gp / 2) ** j.two_j + 0j
    elif two_x == -j.two_j:
        shape = _i_power(j.two_j) * np.sin(gp / 2) ** j.two_j
    elif two_x == 0:
        if not j.is_integer:
            raise HalfIntegerUnsupported(f"x=0 needs integer J, got J={j}")
        jj = j.two_j // 2
        scale = math.exp(-jj * math.log(2) + 0.5 * float(log_binom(2 * jj, jj)))
        shape = _i_power(jj) * scale * np.sin(gp) ** jj
    else:
        raise DomainError(f"No closed momentum form for x={x}; use conditional_momentum_sum")

    probability = conditional_probability(params, x)
    if not probability > PROBABILITY_FLOOR:
        raise ZeroProbabilityOutcome(f"Outcome x={x} has probability {probability:.3g} for J={j}")
    prefactor = math.exp(-params.r / 2) / (math.sqrt(probability) * math.pi ** 0.25)
    return prefactor * np.exp(-p ** 2 / (2 * math.exp(2 * params.r))) * shape


def conditional_momentum_amplitude(params: EncodingParams, x: SpinValue, p) -> np.ndarray:
    """Momentum wavefunction at p; closed forms for x = +-J and 0, the explicit sum otherwise."""
    two_x = check_index(params.j, x)
    if abs(two_x) == params.j.two_j or (two_x == 0 and params.j.is_integer):
        return conditional_momentum_closed_form(params, x, p)
    return conditional_momentum_sum(params, x, p)


def _endpoint(params: EncodingParams, x: SpinValue) -> int:
    two_x = twice(x)
    if abs(two_x) != params.j.two_j:
        raise DomainError(f"Resource states need x = +-J, got x={x} for J={params.j}")
    return 1 if two_x > 0 else -1


def resource_state(params: EncodingParams, x: SpinValue) -> GaussianComb:
    """Conditional x = +-J state, shifted by -g/2 for half-integer J so one spike sits at q = 0."""
    _endpoint(params, x)
    state = conditional_position_state(params, x)
    if params.j.is_integer:
        return state
    return displace(state, dq=-params.g / 2)


def x0_logical_state(params: EncodingParams) -> GaussianComb:
    """x = 0 conditional state after the momentum kick exp(i pi q / 2g); approximates |0_L>."""
    if not params.j.is_integer:
        raise HalfIntegerUnsupported(f"x=0 is only an outcome for integer J, got J={params.j}")
    state = conditional_position_state(params, 0)
    return displace(state, dp=math.pi / (2 * params.g))


# --- target states -----------------------------------------------------------

def _check_target(sigma: float, q0: float):
    if not (np.isfinite(sigma) and sigma > 0):
        raise DomainError(f"Target sigma must be positive, got {sigma}")
    if abs(q0) > SQRT_PI / 2 * (1 + 1e-12):
        raise DomainError(f"|q0| must not exceed sqrt(pi)/2, got {q0}")
    if sigma > 0.5:
        logger.warning(f"Target sigma={sigma:.3g} is not small; the comb is a poor GKP approximation")


def _spike_range(sigma: float, truncation: Optional[int]) -> np.ndarray:
    if truncation is None:
        truncation = math.ceil(ENVELOPE_RADIUS / (sigma * SQRT_PI)) + 1
    elif truncation < 1:
        raise DomainError(f"truncation must be a positive integer, got {truncation}")
    return np.arange(-truncation, truncation + 1)


def target_state(parity, sigma: float, q0: float = 0.0, truncation: Optional[int] = None) -> GaussianComb:
    """
    Approximate |+-_L>: spikes at s sqrt(pi) with variance sigma^2 and phase (+-1)^s,
    weighted by the envelope exp[-sigma^2 (s sqrt(pi) - q0)^2 / 2] at each spike.
    """
    parity = Parity.parse(parity)
    _check_target(sigma, q0)
    components = []
    for s in _spike_range(sigma, truncation):
        center = s * SQRT_PI
        weight = math.exp(-sigma ** 2 * (center - q0) ** 2 / 2)
        if weight < ENVELOPE_CUTOFF:
            continue
        sign = -1.0 if parity is Parity.MINUS and s % 2 else 1.0
        components.append(GaussianComponent(float(center), sigma ** 2, complex(sign * weight)))
    return normalize(make_comb(components, Quadrature.POSITION))


def target_momentum_state(parity, sigma: float, q0: float = 0.0,
                          truncation: Optional[int] = None) -> GaussianComb:
    """
    Momentum-side approximation of the target: spikes at s sqrt(pi) (s even for +,
    odd for -) with variance sigma^2, phase exp[-i q0 (p - s sqrt(pi))] and envelope
    exp(-sigma^2 p^2 / 2) sampled at each spike.
    """
    parity = Parity.parse(parity)
    _check_target(sigma, q0)
    wanted = 0 if parity is Parity.PLUS else 1
    components = []
    for s in _spike_range(sigma, truncation):
        if s % 2 != wanted:
            continue
        center = s * SQRT_PI
        weight = math.exp(-sigma ** 2 * center ** 2 / 2)
        if weight < ENVELOPE_CUTOFF:
            continue
        amp = weight * np.exp(1j * q0 * center)
        components.append(GaussianComponent(float(center), sigma ** 2, complex(amp), -q0))
    return normalize(make_comb(components, Quadrature.MOMENTUM))


def matched_target(params: EncodingParams, x: SpinValue) -> GaussianComb:
    """Target state that resource_state(params, x) approximates."""
    sign = _endpoint(params, x)
    sigma = math.exp(-params.r)
    q0 = 0.0 if params.j.is_integer else -params.g / 2
    return target_state(Parity.PLUS if sign > 0 else Parity.MINUS, sigma, q0)


# --- Gaussian-envelope approximations ----------------------------------------

def envelope_variances(params: EncodingParams) -> Tuple[float, float, float, float]:
    """(spike q, envelope q, spike p, envelope p) wavefunction variances of the x = +-J states."""
    j = params.j.value
    if j <= 0:
        raise DomainError("Envelope variances need J >= 1/2")
    spike_p = 2 * (j * j * hurwitz_zeta2(j) - 1) / (params.g ** 2 * j * j)
    return params.spike_variance, params.g ** 2 * j / 2, spike_p, math.exp(2 * params.r)


def approximate_resource_state(params: EncodingParams, x: SpinValue) -> GaussianComb:
    """Position comb with the binomial weights replaced by a Gaussian envelope (approximate)."""
    sign = _endpoint(params, x)
    spike_q, env_q, _, _ = envelope_variances(params)
    components = []
    for two_m in range(-params.j.two_j, params.j.two_j + 1, 2):
        center = params.g * two_m / 2
        phase = -1.0 if sign < 0 and ((params.j.two_j + two_m) // 2) % 2 else 1.0
        components.append(GaussianComponent(center, spike_q, complex(phase * math.exp(-center ** 2 / (2 * env_q)))))
    state = normalize(make_comb(components, Quadrature.POSITION))
    return state if params.j.is_integer else displace(state, dq=-params.g / 2)


def _momentum_spikes(params: EncodingParams, spacing: float, offset: float, variance: float):
    """Integers n with center (n + offset) * spacing inside the momentum envelope."""
    reach = ENVELOPE_RADIUS * math.exp(params.r) + COVERAGE_STDS * math.sqrt(variance)
    n_max = math.ceil(reach / spacing) + 1
    return [n for n in range(-n_max, n_max + 1) if abs((n + offset) * spacing) <= reach]


def approximate_resource_momentum(params: EncodingParams, x: SpinValue) -> GaussianComb:
    """Momentum comb at s pi/g (s even for +J, odd for -J) with phase e^(i s J pi) and spike variance sigma_p^2."""
    sign = _endpoint(params, x)
    _, _, spike_p, env_p = envelope_variances(params)
    wanted = 0 if sign > 0 else 1
    components = []
    for s in _momentum_spikes(params, math.pi / params.g, 0.0, spike_p):
        if s % 2 != wanted:
            continue
        center = s * math.pi / params.g
        amp = _i_power(s * params.j.two_j) * math.exp(-center ** 2 / (2 * env_p))
        components.append(GaussianComponent(center, spike_p, complex(amp)))
    state = normalize(make_comb(components, Quadrature.MOMENTUM))
    return state if params.j.is_integer else displace(state, dq=-params.g / 2)


def approximate_x0_state(params: EncodingParams) -> GaussianComb:
    """Position comb Re(i^(J+m)) with twice the envelope variance of the +-J states, after the pi/2g kick."""
    if not params.j.is_integer:
        raise HalfIntegerUnsupported(f"x=0 needs integer J, got J={params.j}")
    spike_q, env_q, _, _ = envelope_variances(params)
    jj = params.j.two_j // 2
    components = []
    for m in range(-jj, jj + 1):
        if (jj + m) % 2:
            continue
        center = params.g * m
        phase = 1.0 if ((jj + m) // 2) % 2 == 0 else -1.0
        components.append(GaussianComponent(float(center), spike_q, complex(phase * math.exp(-center ** 2 / (4 * env_q)))))
    state = normalize(make_comb(components, Quadrature.POSITION))
    return displace(state, dp=math.pi / (2 * params.g))


def approximate_x0_momentum(params: EncodingParams) -> GaussianComb:
    """Momentum comb at (n + 1/2) pi/g with spike variance sigma_p^2 / 2 and sign (-1)^(J n), after the kick."""
    if not params.j.is_integer:
        raise HalfIntegerUnsupported(f"x=0 needs integer J, got J={params.j}")
    _, _, spike_p, env_p = envelope_variances(params)
    jj = params.j.two_j // 2
    spacing = math.pi / params.g
    components = []
    for n in _momentum_spikes(params, spacing, 0.5, spike_p / 2):
        center = (n + 0.5) * spacing
        sign = -1.0 if (jj * n) % 2 else 1.0
        components.append(GaussianComponent(center, spike_p / 2, complex(sign * math.exp(-center ** 2 / (2 * env_p)))))
    state = normalize(make_comb(components, Quadrature.MOMENTUM))
    return displace(state, dp=math.pi / (2 * params.g))


# --- serialization -----------------------------------------------------------

def comb_to_dict(comb: GaussianComb) -> dict:
    return {
        'quadrature': comb.quadrature.value,
        'normalized': comb.normalized,
        'components': [
            {
                'center': c.center,
                'variance': c.variance,
                'amp_re': float(np.real(c.amplitude)),
                'amp_im': float(np.imag(c.amplitude)),
                'wavenumber': c.wavenumber,
            }
            for c in comb.components
        ],
    }


def comb_from_dict(data: dict) -> GaussianComb:
    try:
        components = [
            GaussianComponent(float(c['center']), float(c['variance']),
                              complex(float(c['amp_re']), float(c['amp_im'])),
                              float(c.get('wavenumber', 0.0)))
            for c in data['components']
        ]
        quadrature = Quadrature(data['quadrature'])
    except (KeyError, TypeError, ValueError) as e:
        raise DomainError(f"Malformed comb data: {e}")
    return make_comb(components, quadrature, bool(data.get('normalized', False)))
