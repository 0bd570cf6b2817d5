"""Environment spectral densities and thermal functions.

The reservoirs are bosonic baths characterized by a spectral density
j(omega) with a cutoff scale omega_c, and by a temperature expressed as
the mean thermal photon number n_T at the system frequency omega0.
These objects feed the double integrals that produce the time-dependent
diffusion and damping coefficients.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

__all__ = [
    "SpectralKind",
    "SpectralDensity",
    "Environment",
    "evaluate_j",
    "thermal_weight",
    "thermal_occupation",
]

ArrayLike = Union[float, np.ndarray]


class SpectralKind(str, Enum):
    OHMIC = "ohmic"
    SUPER_OHMIC = "superohmic"
    WHITE_NOISE = "white"


@dataclass(frozen=True)
class SpectralDensity:
    """Spectral density j(omega) of a bosonic reservoir.

    kind selects one of

        ohmic       j(omega) = p * omega * omega_c^2 / (omega^2 + omega_c^2)
        superohmic  j(omega) = p * omega^2 * omega_c / (omega^2 + omega_c^2)
        white       j(omega) = p * omega_c

    with p the dimensionless prefactor.  ``ir_cutoff`` is the infrared
    regularization frequency used when integrating the white-noise
    spectrum against coth(omega*beta/2); ``None`` resolves to
    1e-6 * omega0 at quadrature time.
    """

    kind: SpectralKind
    omega_c: float
    prefactor: float = 1.0
    ir_cutoff: float | None = None

    def __post_init__(self):
        if self.omega_c <= 0:
            raise ValueError(f"omega_c must be > 0, got {self.omega_c}")
        if self.prefactor <= 0:
            raise ValueError(f"prefactor must be > 0, got {self.prefactor}")
        if self.ir_cutoff is not None and self.ir_cutoff <= 0:
            raise ValueError(f"ir_cutoff must be > 0, got {self.ir_cutoff}")

    def resolved_ir_cutoff(self, omega0: float) -> float:
        return self.ir_cutoff if self.ir_cutoff is not None else 1e-6 * omega0


@dataclass(frozen=True)
class Environment:
    """Thermal reservoir parameters for one oscillator of frequency omega0.

    Temperature is configured through n_T, the mean photon number of the
    bath at omega0; the inverse temperature follows from
    n_T = 1 / (exp(beta*omega0) - 1).  ``alpha`` is the dimensionless
    system-bath coupling (weak coupling, alpha << omega0, intended).
    """

    omega0: float
    alpha: float
    n_T: float

    def __post_init__(self):
        if self.omega0 <= 0:
            raise ValueError(f"omega0 must be > 0, got {self.omega0}")
        # alpha = 0 is admitted as the decoupled limit (all coefficients vanish)
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.n_T < 0:
            raise ValueError(f"n_T must be >= 0, got {self.n_T}")

    @property
    def beta(self) -> float:
        """Inverse temperature; infinite for a zero-temperature bath."""
        if self.n_T == 0:
            return math.inf
        return math.log1p(1.0 / self.n_T) / self.omega0

    @classmethod
    def from_beta(cls, omega0: float, alpha: float, beta: float) -> "Environment":
        if beta <= 0:
            raise ValueError(f"beta must be > 0, got {beta}")
        n_T = 0.0 if math.isinf(beta) else thermal_occupation(beta, omega0)
        return cls(omega0=omega0, alpha=alpha, n_T=n_T)


def evaluate_j(spec: SpectralDensity, omega: ArrayLike) -> ArrayLike:
    """Spectral density at frequency omega (>= 0)."""
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0):
        raise ValueError("evaluate_j requires omega >= 0")
    if spec.kind is SpectralKind.OHMIC:
        out = spec.prefactor * w * spec.omega_c**2 / (w**2 + spec.omega_c**2)
    elif spec.kind is SpectralKind.SUPER_OHMIC:
        out = spec.prefactor * w**2 * spec.omega_c / (w**2 + spec.omega_c**2)
    else:
        out = np.full_like(w, spec.prefactor * spec.omega_c)
    return float(out) if np.ndim(omega) == 0 else out


def _coth(y: np.ndarray) -> np.ndarray:
    """coth(y) for y > 0, via coth(y) = 1 + 2/(e^{2y} - 1).

    expm1 keeps the small-y branch accurate (coth(y) ~ 1/y) and the
    identity coth(beta*omega/2) = 2*n(beta,omega) + 1 exact in floats.
    """
    y = np.asarray(y, dtype=float)
    out = np.ones_like(y)
    small = y < 350.0  # beyond this 2/(e^{2y}-1) underflows anyway
    out[small] = 1.0 + 2.0 / np.expm1(2.0 * y[small])
    return out


def thermal_weight(env: Environment, omega: ArrayLike) -> ArrayLike:
    """coth(omega*beta/2) for omega > 0; identically 1 at zero temperature."""
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0):
        raise ValueError("thermal_weight is singular at omega = 0; requires omega > 0")
    beta = env.beta
    if math.isinf(beta):
        out = np.ones_like(w)
    else:
        out = _coth(0.5 * beta * w)
    return float(out) if np.ndim(omega) == 0 else out


def thermal_occupation(beta: float, omega: float) -> float:
    """Mean photon number (e^{beta*omega} - 1)^{-1}; zero for beta = inf."""
    if omega <= 0:
        raise ValueError(f"omega must be > 0, got {omega}")
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    if math.isinf(beta):
        return 0.0
    x = beta * omega
    if x > 700.0:
        return 0.0
    return 1.0 / math.expm1(x)
