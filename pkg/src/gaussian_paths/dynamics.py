"""Secular evolution of symmetric states and derived dynamical quantities.

The covariance matrix map is sigma_t = e^{-Gamma(t)} sigma_0
+ (1/2) Delta_Gamma(t) I_4, which for symmetric states reduces to

    a(t) = a0 e^{-Gamma(t)} + Delta_Gamma(t)/2,   c(t) = c0 e^{-Gamma(t)}.

Its Markovian limit is the damping semigroup toward the thermal state
(n_T + 1/2) I_4, and the high-temperature short-time limit freezes c
while a is driven by the accumulated diffusion integral.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .coefficients import CoefficientGrid
from .gaussian_core import PHYS_TOL, PathPoint, SymmetricCM

__all__ = [
    "TrajectoryMode",
    "Trajectory",
    "MapUnphysicalError",
    "InconclusiveThresholdError",
    "DegenerateInputError",
    "evolve_cm",
    "evolve_markovian",
    "evolve_high_t",
    "simulate_trajectory",
    "separability_time",
    "ReachabilityDecision",
    "reachable_markovian",
    "SecularReachability",
    "reachable_secular",
    "MotionConstant",
    "constant_of_motion",
    "write_trajectory_csv",
]

SEPARABILITY_THRESHOLD = 0.5


class TrajectoryMode(str, Enum):
    NONMARKOVIAN = "nonmarkovian"
    MARKOVIAN = "markovian"
    HIGH_TEMPERATURE = "hight"


class MapUnphysicalError(RuntimeError):
    """The evolved covariance matrix violates the uncertainty relation.

    Signals coefficient-grid inaccuracy or secular-approximation breakdown.
    """


class InconclusiveThresholdError(RuntimeError):
    """lambda(t) stayed below 1/2 up to t_max but is still heading there."""


class DegenerateInputError(ValueError):
    """Input leaves the decision or coefficient undetermined."""


def _check_physical(a: float, c: float, context: str) -> None:
    nu2 = a * a - c * c
    slack = PHYS_TOL + 8.0 * np.finfo(float).eps * a * a
    if nu2 < 0.25 - slack or a <= 0:
        raise MapUnphysicalError(
            f"{context}: evolved state (a={a}, c={c}) has a^2 - c^2 = {nu2} < 1/4"
        )


def evolve_cm(cm0: SymmetricCM, big_gamma: float, delta_gamma: float) -> SymmetricCM:
    """Apply the secular map: a' = a0 e^{-Gamma} + Delta_Gamma/2, c' = c0 e^{-Gamma}.

    A transiently negative delta_gamma is accepted as long as the output
    stays physical within tolerance.
    """
    if big_gamma < 0:
        raise ValueError("big_gamma must be >= 0")
    x = math.exp(-big_gamma)
    a = cm0.a * x + 0.5 * delta_gamma
    c = cm0.c * x
    _check_physical(a, c, "evolve_cm")
    return SymmetricCM(a=a, c=c)


def evolve_markovian(cm0: SymmetricCM, gamma_m: float, n_T: float, t: float) -> SymmetricCM:
    """Closed-form Markovian relaxation toward the thermal state (n_T + 1/2) I."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return cm0
    x = math.exp(-gamma_m * t)
    lam_t = n_T + 0.5
    # relaxation form keeps the stationary state an exact fixed point
    return SymmetricCM(a=lam_t + (cm0.a - lam_t) * x, c=cm0.c * x)


def evolve_high_t(cm0: SymmetricCM, delta_integral: float) -> SymmetricCM:
    """High-temperature short-time map: a' = a0 + (1/2) int_0^t Delta, c frozen."""
    return evolve_cm(cm0, 0.0, delta_integral)


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered symmetric states under one of the three evolution modes."""

    mode: TrajectoryMode
    initial: SymmetricCM
    times: np.ndarray
    a: np.ndarray
    c: np.ndarray
    big_gamma: np.ndarray
    delta_gamma: np.ndarray
    n_T: float
    gamma_m: float | None = None
    label: str = ""

    def __post_init__(self):
        n = len(self.times)
        if n < 1 or self.times[0] != 0.0:
            raise ValueError("trajectory must start at t = 0")
        for name in ("a", "c", "big_gamma", "delta_gamma"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} length differs from times")
        if self.a[0] != self.initial.a or self.c[0] != self.initial.c:
            raise ValueError("points[0] must equal the initial state")

    @property
    def lam(self) -> np.ndarray:
        return self.a - self.c

    @property
    def points(self) -> list[tuple[float, SymmetricCM]]:
        return [(float(t), SymmetricCM(a=float(a), c=float(c)))
                for t, a, c in zip(self.times, self.a, self.c)]


def simulate_trajectory(cm0: SymmetricCM, *, mode: TrajectoryMode, t_max: float,
                        n_samples: int, grid: CoefficientGrid | None = None,
                        gamma_m: float | None = None, n_T: float | None = None,
                        label: str = "") -> Trajectory:
    """Sample the evolution of cm0 at n_samples uniform times on [0, t_max].

    Markovian mode uses the closed form and needs (gamma_m, n_T); the grid
    modes interpolate Gamma / Delta_Gamma (or the diffusion integral) from
    a CoefficientGrid covering [0, t_max].
    """
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    if t_max <= 0:
        raise ValueError("t_max must be > 0")
    if n_T is None:
        raise ValueError("n_T is required (environment summary of the trajectory)")
    times = np.linspace(0.0, t_max, n_samples)
    mode = TrajectoryMode(mode)
    if mode is TrajectoryMode.MARKOVIAN:
        if gamma_m is None or gamma_m <= 0:
            raise ValueError("markovian mode requires gamma_m > 0")
        big_gamma = gamma_m * times
        delta_gamma = -np.expm1(-big_gamma) * (2.0 * n_T + 1.0)
    else:
        if grid is None:
            raise ValueError(f"{mode.value} mode requires a coefficient grid")
        if not grid.covers(t_max):
            raise ValueError(f"grid covers [0, {grid.t_max}], need [0, {t_max}]")
        if mode is TrajectoryMode.NONMARKOVIAN:
            big_gamma = grid.interp_big_gamma(times)
            delta_gamma = grid.interp_delta_gamma(times)
        else:
            big_gamma = np.zeros_like(times)
            delta_gamma = grid.delta_integral(times)
    decay = np.exp(-big_gamma)
    a = cm0.a * decay + 0.5 * delta_gamma
    c = cm0.c * decay
    nu2 = a * a - c * c
    slack = PHYS_TOL + 8.0 * np.finfo(float).eps * np.max(a) ** 2
    bad = np.nonzero(nu2 < 0.25 - slack)[0]
    if len(bad):
        raise MapUnphysicalError(
            f"unphysical sample at t = {times[bad[0]]}: a^2 - c^2 = {nu2[bad[0]]}"
        )
    # exact map structure: times[0] = 0 gives decay 1, delta_gamma 0
    a[0], c[0] = cm0.a, cm0.c
    return Trajectory(mode=mode, initial=cm0, times=times, a=a, c=c,
                      big_gamma=big_gamma, delta_gamma=delta_gamma,
                      n_T=float(n_T), gamma_m=gamma_m, label=label)


def _refine_crossing(traj: Trajectory, i: int) -> float:
    """Monotone-cubic interpolation of lambda around samples [i-1, i], then root find."""
    lo = max(0, i - 3)
    hi = min(len(traj.times), i + 3)
    interp = PchipInterpolator(traj.times[lo:hi], traj.lam[lo:hi])
    f = lambda t: float(interp(t)) - SEPARABILITY_THRESHOLD
    t0, t1 = float(traj.times[i - 1]), float(traj.times[i])
    if f(t1) == 0.0:
        return t1
    return float(brentq(f, t0, t1, xtol=1e-30, rtol=1e-10))


def separability_time(traj: Trajectory) -> float | None:
    """First time lambda(t) reaches 1/2; None if it never will.

    A grid-mode trajectory that has not crossed by t_max while the
    asymptote n_T + 1/2 lies above threshold raises
    InconclusiveThresholdError (too short), distinct from None.
    """
    lam = traj.lam
    if lam[0] >= SEPARABILITY_THRESHOLD:
        return 0.0
    if traj.mode is TrajectoryMode.MARKOVIAN:
        lam_t = traj.n_T + 0.5
        if lam_t <= SEPARABILITY_THRESHOLD:
            return None
        t_sep = math.log((lam_t - lam[0]) / (lam_t - SEPARABILITY_THRESHOLD)) / traj.gamma_m
        if t_sep > traj.times[-1] * (1 + 1e-12):
            raise InconclusiveThresholdError(
                f"closed-form t_sep = {t_sep} exceeds the sampled window {traj.times[-1]}"
            )
        return t_sep
    crossed = np.nonzero(lam >= SEPARABILITY_THRESHOLD)[0]
    if len(crossed):
        return _refine_crossing(traj, int(crossed[0]))
    if traj.n_T + 0.5 > SEPARABILITY_THRESHOLD:
        raise InconclusiveThresholdError(
            f"lambda < 1/2 up to t_max = {traj.times[-1]} but the stationary value "
            f"{traj.n_T + 0.5} lies above threshold"
        )
    return None


def state_at(traj: Trajectory, t: float) -> SymmetricCM:
    """State at an off-sample time, monotone-cubic interpolated in (a, c)."""
    if t < traj.times[0] or t > traj.times[-1] * (1 + 1e-12):
        raise ValueError(f"t = {t} outside trajectory window")
    a = float(PchipInterpolator(traj.times, traj.a)(t))
    c = float(PchipInterpolator(traj.times, traj.c)(t))
    return SymmetricCM(a=a, c=c)


@dataclass(frozen=True)
class ReachabilityDecision:
    """Whether a Markovian channel connects two symmetric states."""

    reachable: bool
    gamma_m_t: float | None = None
    n_T: float | None = None
    violated: str | None = None

    def to_json_dict(self) -> dict:
        if self.reachable:
            return {"reachable": True, "gamma_m_t": self.gamma_m_t, "n_T": self.n_T}
        return {"reachable": False, "violated": self.violated}


def reachable_markovian(cm0: SymmetricCM, cm1: SymmetricCM) -> ReachabilityDecision:
    """Decide whether cm1 = Markovian-evolve(cm0; gamma_M t, n_T) has a solution.

    The correlation decay fixes e^{-gamma_M t} = c1/c0 (needs 0 < c1 <= c0);
    the diagonal then determines n_T + 1/2 = (a1 - a0 x)/(1 - x), which must
    be a temperature, i.e. n_T >= 0.  States failing either constraint are
    in the excluded region of cm0.
    """
    if cm0.c <= 0:
        raise DegenerateInputError("reachable_markovian requires c0 > 0")
    x = cm1.c / cm0.c
    if x <= 0 or x > 1 + 1e-12:
        return ReachabilityDecision(reachable=False, violated="c-growth")
    if x >= 1 - 1e-15:
        if abs(cm1.a - cm0.a) <= 1e-12 * max(1.0, cm0.a):
            return ReachabilityDecision(reachable=True, gamma_m_t=0.0, n_T=None)
        return ReachabilityDecision(reachable=False, violated="c-growth")
    nu = (cm1.a - cm0.a * x) / (1.0 - x)
    n_T = nu - 0.5
    if n_T < -1e-12:
        return ReachabilityDecision(reachable=False, violated="negative-temperature")
    return ReachabilityDecision(reachable=True, gamma_m_t=-math.log(x), n_T=max(n_T, 0.0))


@dataclass(frozen=True)
class SecularReachability:
    """Reachability under the wider family of maps with free Gamma >= 0, Delta_Gamma >= 0."""

    reachable: bool
    big_gamma: float | None = None
    delta_gamma: float | None = None
    violated: str | None = None


def reachable_secular(cm0: SymmetricCM, cm1: SymmetricCM) -> SecularReachability:
    """Same algebra as reachable_markovian without the n_T >= 0 sign constraint."""
    if cm0.c <= 0:
        raise DegenerateInputError("reachable_secular requires c0 > 0")
    x = cm1.c / cm0.c
    if x <= 0 or x > 1 + 1e-12:
        return SecularReachability(reachable=False, violated="c-growth")
    dg = 2.0 * (cm1.a - cm0.a * x)
    if dg < -1e-12:
        return SecularReachability(reachable=False, violated="negative-diffusion")
    return SecularReachability(reachable=True, big_gamma=-math.log(min(x, 1.0)),
                               delta_gamma=max(dg, 0.0))


@dataclass(frozen=True)
class MotionConstant:
    value: float
    degenerate: bool = False


def constant_of_motion(point: PathPoint, lambda0: float, mu0: float,
                       lambda_T: float) -> MotionConstant:
    """C = lambda + k/(4 lambda mu) with k = (lambda_T - lambda0)/(v0 - lambda_T).

    Both lambda = a - c and v = a + c = 1/(4 lambda mu) relax through the
    same factor e^{-Gamma(t)} toward lambda_T = n_T + 1/2, so this k makes
    C time-independent along the relaxation; when v0 = lambda_T the
    coefficient is undetermined and lambda itself is returned, flagged.
    """
    if lambda0 <= 0 or mu0 <= 0:
        raise ValueError("lambda0 and mu0 must be > 0")
    v0 = 1.0 / (4.0 * mu0 * lambda0)
    if abs(v0 - lambda_T) <= 1e-12 * max(1.0, abs(v0), abs(lambda_T)):
        return MotionConstant(value=point.lam, degenerate=True)
    k = (lambda_T - lambda0) / (v0 - lambda_T)
    return MotionConstant(value=point.lam + k / (4.0 * point.lam * point.mu))


def write_trajectory_csv(traj: Trajectory, stream) -> None:
    """CSV export: t,a,c,mu,lambda,discord,big_gamma,delta_gamma per sample."""
    from .gaussian_core import _discord_arrays

    mu = 1.0 / (4.0 * (traj.a**2 - traj.c**2))
    lam = traj.lam
    disc = _discord_arrays(traj.a, traj.c)
    stream.write("t,a,c,mu,lambda,discord,big_gamma,delta_gamma\n")
    for row in zip(traj.times, traj.a, traj.c, mu, lam, disc,
                   traj.big_gamma, traj.delta_gamma):
        stream.write(",".join("%.17g" % v for v in row) + "\n")
