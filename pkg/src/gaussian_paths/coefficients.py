"""Time-dependent diffusion and damping coefficients by numerical quadrature.

The two master-equation coefficients are double integrals

    Delta(t) = alpha^2 int_0^t ds int_0^inf dw j(w) coth(w*beta/2) cos(w s) cos(omega0 s)
    gamma(t) = alpha^2 int_0^t ds int_0^inf dw j(w) sin(w s) sin(omega0 s)

The frequency integral is done first (the omega0 oscillation factors out
of it), with composite Gauss-Legendre panels narrow enough to resolve
cos(w s) at the largest s requested; the remaining s integral is a
cumulative trapezoid.  From the sampled curves the accumulated damping
Gamma(t) = int_0^t gamma and the effective diffusion
Delta_Gamma(t) = e^{-Gamma(t)} int_0^t e^{Gamma(s)} Delta(s) ds follow by
further cumulative trapezoids on the same grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO

import numpy as np

from .spectral_env import Environment, SpectralDensity, SpectralKind, _coth, evaluate_j

__all__ = [
    "QuadratureConfig",
    "CoefficientGrid",
    "QuadratureError",
    "PlateauError",
    "ConfigError",
    "delta_at",
    "gamma_at",
    "build_coefficient_grid",
    "gamma_markov",
    "gamma_markov_info",
    "markovian_coefficients",
    "write_coefficients_csv",
]


class ConfigError(ValueError):
    """Invalid numerical configuration."""


class QuadratureError(RuntimeError):
    """Frequency quadrature failed to meet the requested tolerance.

    Carries the achieved error estimate in ``achieved``.
    """

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved error estimate {achieved:.3e})")
        self.achieved = achieved


class PlateauError(RuntimeError):
    """No Markovian plateau detected in the damping coefficient."""


@dataclass(frozen=True)
class QuadratureConfig:
    """Numerical knobs for the coefficient integrals.

    ``None`` fields are resolved from the spectrum/environment scales:
    omega_max = 50 * max(omega0, omega_c), s_step = 2*pi / (20 * omega_max)
    and t_step = s_step.  The output grid step t_step must not exceed
    s_step (the step whose oscillation resolution is validated).
    """

    omega_max: float | None = None
    abs_tol: float = 1e-12
    rel_tol: float = 1e-4
    s_step: float | None = None
    t_step: float | None = None
    gl_order: int = 8
    max_refine: int = 2

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ConfigError("tolerances must be > 0")
        if self.gl_order < 2:
            raise ConfigError("gl_order must be >= 2")

    def resolve(self, spec: SpectralDensity, env: Environment) -> "_ResolvedQuad":
        scale = max(env.omega0, spec.omega_c)
        omega_max = self.omega_max if self.omega_max is not None else 50.0 * scale
        if omega_max < 10.0 * scale:
            raise ConfigError(
                f"omega_max = {omega_max} violates omega_max >= 10*max(omega0, omega_c) = {10*scale}"
            )
        s_cap = 2.0 * math.pi / (20.0 * omega_max)
        s_step = self.s_step if self.s_step is not None else s_cap
        if s_step > s_cap * (1 + 1e-12):
            raise ConfigError(
                f"s_step = {s_step} too coarse for oscillation resolution; must be <= {s_cap}"
            )
        t_step = self.t_step if self.t_step is not None else s_step
        if t_step > s_step * (1 + 1e-12):
            raise ConfigError(f"grid too coarse: t_step = {t_step} exceeds s_step = {s_step}")
        if t_step <= 0 or s_step <= 0:
            raise ConfigError("steps must be > 0")
        return _ResolvedQuad(
            omega_max=omega_max,
            s_step=s_step,
            t_step=t_step,
            abs_tol=self.abs_tol,
            rel_tol=self.rel_tol,
            gl_order=self.gl_order,
            max_refine=self.max_refine,
        )


@dataclass(frozen=True)
class _ResolvedQuad:
    omega_max: float
    s_step: float
    t_step: float
    abs_tol: float
    rel_tol: float
    gl_order: int
    max_refine: int


@dataclass(frozen=True)
class CoefficientGrid:
    """Sampled Delta, gamma, Gamma and Delta_Gamma on a uniform time grid."""

    times: np.ndarray
    delta: np.ndarray
    gamma: np.ndarray
    big_gamma: np.ndarray
    delta_gamma: np.ndarray

    def __post_init__(self):
        n = len(self.times)
        for name in ("delta", "gamma", "big_gamma", "delta_gamma"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} length differs from times")
        if n < 2 or self.times[0] != 0.0 or np.any(np.diff(self.times) <= 0):
            raise ValueError("times must start at 0 and be strictly increasing")
        for name in ("delta", "gamma", "big_gamma", "delta_gamma"):
            if getattr(self, name)[0] != 0.0:
                raise ValueError(f"{name}[0] must be 0")
        # Gamma must accumulate monotonically wherever gamma >= 0
        g = self.gamma
        pos = (g[:-1] >= 0) & (g[1:] >= 0)
        slack = 1e-14 * max(1.0, float(np.max(np.abs(self.big_gamma))))
        if np.any(np.diff(self.big_gamma)[pos] < -slack):
            raise ValueError("big_gamma decreases on an interval where gamma >= 0")

    @property
    def t_max(self) -> float:
        return float(self.times[-1])

    def covers(self, t: float) -> bool:
        return 0.0 <= t <= self.t_max * (1 + 1e-12)

    def _require_cover(self, t: np.ndarray) -> None:
        if np.any(t < 0) or np.any(t > self.t_max * (1 + 1e-12)):
            raise ValueError(
                f"grid covers [0, {self.t_max}] but was asked for t in "
                f"[{float(np.min(t))}, {float(np.max(t))}]"
            )

    def interp_big_gamma(self, t):
        t = np.atleast_1d(np.asarray(t, float))
        self._require_cover(t)
        return np.interp(t, self.times, self.big_gamma)

    def interp_delta_gamma(self, t):
        t = np.atleast_1d(np.asarray(t, float))
        self._require_cover(t)
        return np.interp(t, self.times, self.delta_gamma)

    def delta_integral(self, t):
        """int_0^t Delta(s) ds, cumulative trapezoid of the sampled Delta."""
        t = np.atleast_1d(np.asarray(t, float))
        self._require_cover(t)
        return np.interp(t, self.times, _cumtrapz(self.delta, self.times))


def _cumtrapz(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(x))
    return out


def _panel_edges(spec: SpectralDensity, env: Environment, rq: _ResolvedQuad,
                 s_max: float, halvings: int) -> np.ndarray:
    """Composite panel edges on [ir_or_0, omega_max].

    Width bounded by the spectral structure scale min(omega0, omega_c)/4
    and by the oscillation bound pi/(4*s_max); the white-noise spectrum
    additionally gets geometrically refined panels above its infrared
    cutoff, where the integrand behaves like coth ~ 1/omega.
    """
    width = min(min(env.omega0, spec.omega_c) / 4.0,
                math.pi / (4.0 * max(s_max, 1e-12)))
    width /= 2.0 ** halvings
    lo = 0.0
    geo: list[float] = []
    if spec.kind is SpectralKind.WHITE_NOISE:
        lo = spec.resolved_ir_cutoff(env.omega0)
        if lo >= rq.omega_max:
            raise ConfigError("ir_cutoff must be below omega_max")
        geo = [lo]
        e = lo
        while e * 2.0 < width:
            e *= 2.0
            geo.append(e)
        lo = geo[-1]
    n = max(1, int(math.ceil((rq.omega_max - lo) / width)))
    uniform = np.linspace(lo, rq.omega_max, n + 1)
    if geo:
        return np.concatenate([np.asarray(geo[:-1]), uniform])
    return uniform


def _omega_rule(spec: SpectralDensity, env: Environment, rq: _ResolvedQuad,
                s_max: float, halvings: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes plus weighted integrand factors.

    Returns (nodes, wc, ws) with wc_i = w_i * j(w_i) * coth(w_i beta/2) * taper
    and ws_i = w_i * j(w_i) * taper, so the kernels are plain cosine/sine sums.
    """
    edges = _panel_edges(spec, env, rq, s_max, halvings)
    x, w = np.polynomial.legendre.leggauss(rq.gl_order)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    g = np.asarray(evaluate_j(spec, nodes), float)
    # saturating tails (super-Ohmic, white) decay only through oscillation:
    # linearly damp the last decade of the range to suppress truncation ringing
    if spec.kind in (SpectralKind.SUPER_OHMIC, SpectralKind.WHITE_NOISE):
        start = rq.omega_max / 10.0
        g = g * np.clip((rq.omega_max - nodes) / (rq.omega_max - start), 0.0, 1.0)
    beta = env.beta
    therm = np.ones_like(nodes) if math.isinf(beta) else _coth(0.5 * beta * nodes)
    return nodes, wts * g * therm, wts * g


def _kernels_on(nodes: np.ndarray, wc: np.ndarray, ws: np.ndarray, s: np.ndarray,
                need_cos: bool = True, need_sin: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """K_c(s) = sum wc_i cos(w_i s), K_s(s) = sum ws_i sin(w_i s), chunked."""
    Kc = np.zeros_like(s)
    Ks = np.zeros_like(s)
    chunk = max(1, int(8_000_000 // max(len(s), 1)))
    for i in range(0, len(nodes), chunk):
        ph = np.outer(s, nodes[i:i + chunk])
        if need_cos:
            Kc += np.cos(ph) @ wc[i:i + chunk]
        if need_sin:
            Ks += np.sin(ph) @ ws[i:i + chunk]
    return Kc, Ks


def _coefficient_curves(spec: SpectralDensity, env: Environment, s: np.ndarray,
                        rq: _ResolvedQuad, need_delta: bool = True,
                        need_gamma: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Delta(t), gamma(t) on the grid s, with panel-halving convergence control.

    The halving check probes the kernels on a thinned subset of s, which
    isolates the frequency-quadrature error from the fixed s-step.
    """
    if env.alpha == 0.0:
        z = np.zeros_like(s)
        return z, z.copy()
    a2 = env.alpha**2
    idx = np.unique(np.r_[np.arange(0, len(s), 8), len(s) - 1])
    s_sub = s[idx]

    def kernels(halvings: int, grid: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        nodes, wc, ws = _omega_rule(spec, env, rq, float(s[-1]), halvings)
        return _kernels_on(nodes, wc, ws, grid, need_cos=need_delta, need_sin=need_gamma)

    def kernel_err(full_sub: tuple[np.ndarray, np.ndarray],
                   probe: tuple[np.ndarray, np.ndarray]) -> float:
        err = 0.0
        for needed, a, b in zip((need_delta, need_gamma), full_sub, probe):
            if needed:
                scale = max(float(np.max(np.abs(b))), rq.abs_tol)
                err = max(err, float(np.max(np.abs(a - b))) / scale)
        return err

    level = 0
    Kc, Ks = kernels(level, s)
    while True:
        probe = kernels(level + 1, s_sub)
        err = kernel_err((Kc[idx], Ks[idx]), probe)
        if err <= rq.rel_tol:
            break
        level += 1
        if level > rq.max_refine:
            raise QuadratureError(
                "frequency quadrature did not converge at max refinement", err)
        Kc, Ks = kernels(level, s)
    d = a2 * _cumtrapz(np.cos(env.omega0 * s) * Kc, s) if need_delta else np.zeros_like(s)
    g = a2 * _cumtrapz(np.sin(env.omega0 * s) * Ks, s) if need_gamma else np.zeros_like(s)
    return d, g


def _s_grid(t: float, step: float) -> np.ndarray:
    n = max(1, int(math.ceil(t / step - 1e-9)))
    return np.linspace(0.0, t, n + 1)


def delta_at(spec: SpectralDensity, env: Environment, t: float, q: QuadratureConfig) -> float:
    """Diffusion coefficient Delta(t)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return 0.0
    rq = q.resolve(spec, env)
    d, _ = _coefficient_curves(spec, env, _s_grid(t, rq.s_step), rq, need_gamma=False)
    return float(d[-1])


def gamma_at(spec: SpectralDensity, env: Environment, t: float, q: QuadratureConfig) -> float:
    """Damping coefficient gamma(t); independent of temperature."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return 0.0
    rq = q.resolve(spec, env)
    _, g = _coefficient_curves(spec, env, _s_grid(t, rq.s_step), rq, need_delta=False)
    return float(g[-1])


def build_coefficient_grid(spec: SpectralDensity, env: Environment, t_max: float,
                           q: QuadratureConfig) -> CoefficientGrid:
    """Sample Delta, gamma, Gamma, Delta_Gamma on a uniform grid covering [0, t_max]."""
    if t_max <= 0:
        raise ValueError("t_max must be > 0")
    rq = q.resolve(spec, env)
    n = max(1, int(math.ceil(t_max / rq.t_step - 1e-9)))
    times = np.arange(n + 1) * rq.t_step
    delta, gamma = _coefficient_curves(spec, env, times, rq)
    big_gamma = _cumtrapz(gamma, times)
    delta_gamma = np.exp(-big_gamma) * _cumtrapz(np.exp(big_gamma) * delta, times)
    delta_gamma[0] = 0.0
    return CoefficientGrid(times=times, delta=delta, gamma=gamma,
                           big_gamma=big_gamma, delta_gamma=delta_gamma)


@dataclass(frozen=True)
class PlateauInfo:
    value: float
    rel_std: float
    window: float


def gamma_markov_info(spec: SpectralDensity, env: Environment, q: QuadratureConfig,
                      window_factor: float = 50.0) -> PlateauInfo:
    """Long-time plateau of gamma(t) with its flatness diagnostic.

    The plateau is the mean of gamma over the final 20% of the window
    t in [0, window_factor / min(omega0, omega_c)]; relative standard
    deviation >= 1% means no Markovian plateau was reached.
    """
    rq = q.resolve(spec, env)
    window = window_factor / min(env.omega0, spec.omega_c)
    s = _s_grid(window, rq.s_step)
    _, g = _coefficient_curves(spec, env, s, rq, need_delta=False)
    tail = g[int(0.8 * len(g)):]
    value = float(np.mean(tail))
    denom = abs(value) if value != 0.0 else 1.0
    rel_std = float(np.std(tail)) / denom
    return PlateauInfo(value=value, rel_std=rel_std, window=window)


def gamma_markov(spec: SpectralDensity, env: Environment, q: QuadratureConfig,
                 window_factor: float = 50.0) -> float:
    """Markovian damping rate gamma_M, the numerical plateau of gamma(t)."""
    info = gamma_markov_info(spec, env, q, window_factor)
    if env.alpha == 0.0:
        return 0.0
    if info.rel_std >= 0.01:
        raise PlateauError(
            f"gamma(t) has no plateau on window [0, {info.window:g}]: "
            f"relative std {info.rel_std:.3e} >= 1%"
        )
    return info.value


def markovian_coefficients(gamma_m: float, n_T: float, t: float) -> tuple[float, float]:
    """Markovian limits Gamma(t) = gamma_M t, Delta_Gamma(t) = (1-e^{-gamma_M t})(2 n_T + 1)."""
    if gamma_m <= 0:
        raise ValueError("gamma_m must be > 0")
    if t < 0:
        raise ValueError("t must be >= 0")
    big_gamma = gamma_m * t
    return big_gamma, -math.expm1(-big_gamma) * (2.0 * n_T + 1.0)


def write_coefficients_csv(grid: CoefficientGrid, stream: IO[str]) -> None:
    """CSV export: header t,delta,gamma,big_gamma,delta_gamma, full double precision."""
    stream.write("t,delta,gamma,big_gamma,delta_gamma\n")
    for row in zip(grid.times, grid.delta, grid.gamma, grid.big_gamma, grid.delta_gamma):
        stream.write(",".join("%.17g" % v for v in row) + "\n")
