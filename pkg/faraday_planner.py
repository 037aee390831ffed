"""
Parameter planner for a Faraday-interaction implementation.

All quantities are ratios (detuning in units of the linewidth, optical density
per atom, rotation angle per photon); no unit system is embedded. Photon flux
and interaction time share whatever time unit the caller uses.
"""
import math
import logging
from dataclasses import dataclass, asdict
from typing import Optional

from errors import DomainError

logger = logging.getLogger(__name__)

# 4 sigma_M^2 / g^2 above this is reported as not projective (advisory only)
PROJECTIVITY_THRESHOLD = 0.1


def _check(name: str, value: float, allow_zero: bool = False) -> float:
    value = float(value)
    ok = value >= 0 if allow_zero else value > 0
    if not (math.isfinite(value) and ok):
        raise DomainError(f"{name} must be {'non-negative' if allow_zero else 'positive'}, got {value}")
    return value


@dataclass(frozen=True)
class FaradayParams:
    chi: float
    n_photons: float
    detuning_over_gamma: float
    eta: float
    photon_flux: float

    def __post_init__(self):
        for name in ('chi', 'n_photons', 'detuning_over_gamma', 'eta', 'photon_flux'):
            _check(name, getattr(self, name))
        expected = chi_from_optical_density(self.eta, self.detuning_over_gamma)
        if not math.isclose(self.chi, expected, rel_tol=1e-9):
            raise DomainError(f"chi={self.chi} is inconsistent with eta/(2 Delta/Gamma)={expected}")


def effective_coupling(chi: float, n_photons: float) -> float:
    """g = chi sqrt(N_L / 2)."""
    return _check('chi', chi, allow_zero=True) * math.sqrt(_check('n_photons', n_photons) / 2)


def chi_for_coupling(g: float, n_photons: float) -> float:
    """Rotation angle per photon needed for coupling g with N_L photons."""
    return _check('g', g, allow_zero=True) / math.sqrt(_check('n_photons', n_photons) / 2)


def chi_from_optical_density(eta: float, detuning_over_gamma: float) -> float:
    """chi = eta Gamma / (2 Delta)."""
    return _check('eta', eta, allow_zero=True) / (2 * _check('detuning_over_gamma', detuning_over_gamma))


def required_eta(n_photons: float, detuning_over_gamma: float, g_target: float) -> float:
    """Optical density per atom for coupling g_target: 2 (Delta/Gamma) g sqrt(2 / N_L)."""
    return (2 * _check('detuning_over_gamma', detuning_over_gamma) * _check('g_target', g_target, allow_zero=True)
            * math.sqrt(2 / _check('n_photons', n_photons)))


def interaction_time(chi: float, photon_flux: float) -> float:
    """t = 2 pi / (chi^2 N_L_dot)."""
    return 2 * math.pi / (_check('chi', chi) ** 2 * _check('photon_flux', photon_flux))


@dataclass(frozen=True)
class MeterDistinguishability:
    overlap: float
    figure_of_merit: float

    @property
    def is_projective(self) -> bool:
        return self.figure_of_merit < PROJECTIVITY_THRESHOLD


def meter_distinguishability(g: float, meter_variance: float, delta_m: float = 1.0) -> MeterDistinguishability:
    """
    Squared overlap exp[-(g / 2 sigma_M)^2 dm^2] of meter states dm apart, and
    the figure of merit 4 sigma_M^2 / g^2 (projective when well below 1).

    sigma_M^2 is the variance of the homodyne q distribution, i.e. e^(-2r)/2
    for a meter squeezed by r.
    """
    g = _check('g', g)
    variance = _check('meter_variance', meter_variance)
    overlap = math.exp(-(g * g / (4 * variance)) * float(delta_m) ** 2)
    return MeterDistinguishability(overlap, 4 * variance / (g * g))


def meter_squeezing(meter_variance: float) -> float:
    """Squeezing r of a meter whose homodyne variance is meter_variance."""
    return -0.5 * math.log(2 * _check('meter_variance', meter_variance))


@dataclass(frozen=True)
class FaradayReport:
    g: float
    chi: float
    eta: float
    interaction_time: float
    interaction_time_ratio: float
    projectivity_fom: float
    neighbor_overlap: float
    is_projective: bool

    def as_dict(self) -> dict:
        return asdict(self)


def plan(n_photons: float, detuning_over_gamma: float, g_target: float = math.sqrt(math.pi),
         meter_variance: float = 0.1, photon_flux: Optional[float] = None) -> FaradayReport:
    """
    Everything needed to reach coupling g_target with N_L photons at detuning
    Delta/Gamma. interaction_time_ratio is t * N_L_dot / N_L, which is 1 for
    g = sqrt(pi).
    """
    chi = chi_for_coupling(g_target, n_photons)
    eta = required_eta(n_photons, detuning_over_gamma, g_target)
    flux = n_photons if photon_flux is None else photon_flux
    t = interaction_time(chi, flux)
    meter = meter_distinguishability(g_target, meter_variance)

    if not meter.is_projective:
        logger.warning(f"Meter figure of merit 4 sigma_M^2/g^2 = {meter.figure_of_merit:.3g} is not "
                       f"below {PROJECTIVITY_THRESHOLD}; the spin measurement is not projective")

    return FaradayReport(
        g=g_target,
        chi=chi,
        eta=eta,
        interaction_time=t,
        interaction_time_ratio=t * flux / n_photons,
        projectivity_fom=meter.figure_of_merit,
        neighbor_overlap=meter.overlap,
        is_projective=meter.is_projective,
    )
