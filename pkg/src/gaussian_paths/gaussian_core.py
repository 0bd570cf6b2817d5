"""Symmetric two-mode Gaussian states and their correlation measures.

A symmetric state is fixed by two numbers (a, c): its covariance matrix
is sigma = a*I_4 + c*(sigma_1 x sigma_3), i.e. equal local blocks a*I_2
and correlation blocks c*diag(1, -1).  The measures used as path
coordinates are the purity mu = 1/(4(a^2-c^2)), the minimum symplectic
eigenvalue of the partial transpose lambda = a - c (separable iff
lambda >= 1/2) and the Gaussian discord D(a, c).

Physicality (the uncertainty relation) is sqrt(a^2 - c^2) >= 1/2: the
symplectic eigenvalues of sigma itself are both sqrt(a^2 - c^2).  Note
a - |c| >= 1/2 is the separability threshold, not the uncertainty bound;
entangled states sit below it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "UnphysicalStateError",
    "SymmetricCM",
    "STSParams",
    "PathPoint",
    "from_sts",
    "to_sts",
    "mean_photons",
    "purity",
    "min_symplectic",
    "log_negativity",
    "entropic_h",
    "gaussian_discord",
    "path_point",
    "cm_from_mu_lambda",
]

ArrayLike = Union[float, np.ndarray]

# slack for uncertainty-relation checks on evolved states (map roundoff)
PHYS_TOL = 1e-9
# below 1/2 - this, entropic_h raises; inside [1/2 - eps, 1/2) it clamps
H_BOUNDARY_EPS = 1e-9

_EPS = float(np.finfo(float).eps)


class UnphysicalStateError(ValueError):
    """State parameters violate the two-mode uncertainty relation."""


@dataclass(frozen=True)
class SymmetricCM:
    """The (a, c) pair of a symmetric two-mode covariance matrix."""

    a: float
    c: float

    def __post_init__(self):
        if not (self.a > 0):
            raise UnphysicalStateError(f"a must be > 0, got {self.a}")
        if self.a < 0.5 - PHYS_TOL:
            raise UnphysicalStateError(f"a must be >= 1/2, got {self.a}")
        if self.nu_squared < 0.25 - self._nu2_slack():
            raise UnphysicalStateError(
                f"uncertainty relation violated: a^2 - c^2 = {self.nu_squared} < 1/4"
            )

    def _nu2_slack(self) -> float:
        # roundoff in a*a - c*c grows with a^2; keep the check meaningful at large a
        return PHYS_TOL + 8.0 * _EPS * self.a * self.a

    @property
    def nu_squared(self) -> float:
        """Squared symplectic eigenvalue of sigma (doubly degenerate)."""
        return self.a * self.a - self.c * self.c

    def to_json_dict(self) -> dict:
        return {"a": self.a, "c": self.c}

    @classmethod
    def from_json_dict(cls, d: dict) -> "SymmetricCM":
        return cls(a=float(d["a"]), c=float(d["c"]))


@dataclass(frozen=True)
class STSParams:
    """Two-mode squeezed thermal state: squeezing r applied to nu_T-photon thermal modes."""

    r: float
    nu_T: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError(f"r must be >= 0, got {self.r}")
        if self.nu_T < 0:
            raise ValueError(f"nu_T must be >= 0, got {self.nu_T}")


@dataclass(frozen=True)
class PathPoint:
    """One sample of a dynamical path: purity, PT symplectic eigenvalue, discord."""

    mu: float
    lam: float
    discord: float
    t: float

    def to_json_dict(self) -> dict:
        return {"t": self.t, "mu": self.mu, "lambda": self.lam, "discord": self.discord}

    @classmethod
    def from_json_dict(cls, d: dict) -> "PathPoint":
        return cls(mu=float(d["mu"]), lam=float(d["lambda"]),
                   discord=float(d["discord"]), t=float(d["t"]))


def from_sts(p: STSParams) -> SymmetricCM:
    """a = (nu_T + 1/2) cosh(2r),  c = (nu_T + 1/2) sinh(2r)."""
    nu = p.nu_T + 0.5
    return SymmetricCM(a=nu * math.cosh(2.0 * p.r), c=nu * math.sinh(2.0 * p.r))


def to_sts(cm: SymmetricCM) -> STSParams:
    """Invert from_sts: nu_T + 1/2 = sqrt(a^2 - c^2), tanh(2r) = c/a."""
    if cm.c < 0:
        raise UnphysicalStateError("to_sts requires the c >= 0 sign convention")
    nu2 = cm.nu_squared
    if nu2 < 0.25 - cm._nu2_slack():
        raise UnphysicalStateError("to_sts requires a physical covariance matrix")
    nu = math.sqrt(max(nu2, 0.25))
    return STSParams(r=0.5 * math.atanh(min(cm.c / cm.a, 1.0)), nu_T=nu - 0.5)


def mean_photons(p: STSParams) -> float:
    """Mean photon number per mode: sinh^2(r) (2 nu_T + 1) + nu_T."""
    return math.sinh(p.r) ** 2 * (2.0 * p.nu_T + 1.0) + p.nu_T


def purity(cm: SymmetricCM) -> float:
    """mu = 1/(4 sqrt(det sigma)) = 1/(4 (a^2 - c^2))."""
    nu2 = cm.nu_squared
    if nu2 <= 0:
        raise UnphysicalStateError(f"a^2 - c^2 = {nu2} <= 0: purity undefined")
    return 1.0 / (4.0 * nu2)


def min_symplectic(cm: SymmetricCM) -> float:
    """lambda = a - c, the minimum symplectic eigenvalue of the partial transpose."""
    if cm.c < 0:
        raise UnphysicalStateError("min_symplectic requires the c >= 0 sign convention")
    return cm.a - cm.c


def log_negativity(cm: SymmetricCM) -> float:
    """E_N = max(0, -ln(2 lambda))."""
    lam = cm.a - abs(cm.c)
    return max(0.0, -math.log(2.0 * lam))


def entropic_h(x: ArrayLike) -> ArrayLike:
    """h(x) = (x + 1/2) ln(x + 1/2) - (x - 1/2) ln(x - 1/2), for x >= 1/2.

    h(1/2) = 0 by continuity; values in [1/2 - 1e-9, 1/2) are clamped to
    1/2 so that roundoff at the purity boundary cannot raise spuriously.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.5 - H_BOUNDARY_EPS):
        bad = float(np.min(arr))
        raise UnphysicalStateError(f"entropic_h requires x >= 1/2, got {bad}")
    xc = np.maximum(arr, 0.5)
    xm = xc - 0.5
    safe = xm > 1e-300
    term = np.where(safe, xm * np.log(np.where(safe, xm, 1.0)), 0.0)
    out = (xc + 0.5) * np.log(xc + 0.5) - term
    return float(out) if np.ndim(x) == 0 else out


def gaussian_discord(cm: SymmetricCM) -> float:
    """D(a, c) = h(a) - 2 h(sqrt(a^2 - c^2)) + h(a - 2c^2/(1 + 2a)), natural log."""
    return float(_discord_arrays(np.asarray(cm.a), np.asarray(cm.c)))


def _discord_arrays(a: np.ndarray, c: np.ndarray) -> np.ndarray:
    nu = np.sqrt(np.maximum(a * a - c * c, 0.0))
    # at c = 0 all three arguments coincide; force the cancellation exact
    nu = np.where(c == 0.0, a, nu)
    cond = a - 2.0 * c * c / (1.0 + 2.0 * a)
    return entropic_h(a) - 2.0 * entropic_h(nu) + entropic_h(cond)


def path_point(cm: SymmetricCM, t: float) -> PathPoint:
    """Assemble the (mu, lambda, D) coordinates of a state at time t."""
    d = gaussian_discord(cm)
    if d < 0.0:
        if d < -1e-12:
            raise UnphysicalStateError(f"negative discord {d} beyond roundoff tolerance")
        d = 0.0
    return PathPoint(mu=purity(cm), lam=min_symplectic(cm), discord=d, t=t)


def cm_from_mu_lambda(mu: float, lam: float) -> SymmetricCM:
    """Invert (mu, lambda) -> (a, c) via a = (lam + v)/2, c = (v - lam)/2, v = 1/(4 mu lam)."""
    if mu <= 0 or lam <= 0:
        raise ValueError("mu and lambda must be > 0")
    v = 1.0 / (4.0 * mu * lam)
    return SymmetricCM(a=0.5 * (lam + v), c=0.5 * (v - lam))
