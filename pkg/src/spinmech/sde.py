"""Langevin kinematics: drift specs, Euler-Maruyama ensembles, momentum limit.

The scalar SDE integrated here is ``dx = b(x, t) dt + sigma dw`` with the
noise increment discretized as ``sigma * sqrt(dt) * z``, ``z`` standard
normal.  Each particle consumes its own counter-based stream (see
:mod:`spinmech.rng`), so ensembles are bit-reproducible for a fixed seed no
matter how the particles are partitioned across workers.

Drift variants:

* ``DriftSpec.linear(omega)`` -- restoring drift ``-omega * x`` (the
  Ornstein-Uhlenbeck process once noise is added).
* :func:`drift_from_density` -- ``0.5 * sigma**2 * (log rho0)'``, the drift
  that makes a given positive density stationary.
* ``DriftSpec.time_scaled(t_floor)`` -- ``x / max(t, t_floor)``, the
  long-time ballistic drift whose paths have a limiting velocity ``x_t/t``.
* ``DriftSpec.tabulated(xs, bs)`` -- linear interpolation of sampled drift
  values.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Union

import numpy as np

from .errors import InvalidInputError, NumericalOverflowError
from .rng import particle_stream

#: Paths whose |x| crosses this bound abort with an overflow error.
OVERFLOW_LIMIT = 1e12

#: Target byte budget for one chunk's noise buffer.
_CHUNK_NOISE_BYTES = 64 * 1024 * 1024


@dataclass(frozen=True)
class DriftSpec:
    """A drift function ``b(x, t)``; callables must accept ndarray ``x``."""

    kind: str
    fn: Callable[[np.ndarray, float], np.ndarray] = field(repr=False)
    params: dict = field(default_factory=dict)

    def __call__(self, x, t):
        return self.fn(x, t)

    @staticmethod
    def linear(omega: float) -> "DriftSpec":
        """Restoring drift ``b(x, t) = -omega * x``."""
        return DriftSpec("linear", lambda x, t: -omega * x, {"omega": omega})

    @staticmethod
    def time_scaled(t_floor: float = 1e-3) -> "DriftSpec":
        """Drift ``b(x, t) = x / max(t, t_floor)``, finite for all t >= 0."""
        if t_floor <= 0:
            raise InvalidInputError(f"t_floor must be positive, got {t_floor}")
        return DriftSpec(
            "time_scaled",
            lambda x, t: x / max(t, t_floor),
            {"t_floor": t_floor},
        )

    @staticmethod
    def tabulated(xs, bs) -> "DriftSpec":
        """Piecewise-linear drift through samples ``(xs, bs)``."""
        xs = np.asarray(xs, dtype=float)
        bs = np.asarray(bs, dtype=float)
        if xs.ndim != 1 or xs.shape != bs.shape or xs.size < 2:
            raise InvalidInputError("tabulated drift needs matching 1-d samples")
        if np.any(np.diff(xs) <= 0):
            raise InvalidInputError("tabulated drift grid must be increasing")
        return DriftSpec(
            "tabulated",
            lambda x, t: np.interp(x, xs, bs),
            {"x_min": float(xs[0]), "x_max": float(xs[-1])},
        )


def drift_from_density(
    rho0: Callable[[np.ndarray], np.ndarray],
    sigma: float,
    rho0_prime: Callable[[np.ndarray], np.ndarray] | None = None,
) -> DriftSpec:
    """Drift ``u(x) = 0.5 * sigma**2 * rho0'(x) / rho0(x)`` of a stationary density.

    ``rho0`` must be strictly positive wherever it is evaluated; violations
    raise at evaluation time.  When ``rho0_prime`` is omitted the
    log-derivative is taken by central differences with a step scaled to x.
    """
    if sigma <= 0:
        raise InvalidInputError(f"sigma must be positive, got {sigma}")
    half_s2 = 0.5 * sigma * sigma

    def check_positive(vals):
        if np.any(np.asarray(vals) <= 0.0):
            raise InvalidInputError("density must be strictly positive on the domain")

    if rho0_prime is not None:

        def u(x, t, _=None):
            x = np.asarray(x, dtype=float)
            r = rho0(x)
            check_positive(r)
            return half_s2 * rho0_prime(x) / r

    else:

        def u(x, t, _=None):
            x = np.asarray(x, dtype=float)
            h = 1e-6 * (1.0 + np.abs(x))
            lo, hi = rho0(x - h), rho0(x + h)
            check_positive(lo)
            check_positive(hi)
            return half_s2 * (np.log(hi) - np.log(lo)) / (2.0 * h)

    return DriftSpec("from_density", u, {"sigma": sigma})


@dataclass(frozen=True)
class SdeConfig:
    """Numerical parameters of one ensemble integration.

    ``x0`` is either a scalar start position or a callable
    ``sampler(generator) -> float`` drawn once per particle from that
    particle's own stream (before any step noise), which keeps sampled
    initial conditions inside the reproducibility contract.
    ``record_every`` thins the stored samples; it must divide ``n_steps``.
    """

    dt: float
    n_steps: int
    sigma: float
    n_particles: int
    seed: int
    x0: Union[float, Callable[[np.random.Generator], float]] = 0.0
    t0: float = 0.0
    record_every: int = 1

    def __post_init__(self):
        problems = []
        if not (self.dt > 0 and np.isfinite(self.dt)):
            problems.append(f"dt must be positive, got {self.dt}")
        if self.n_steps < 1:
            problems.append(f"n_steps must be >= 1, got {self.n_steps}")
        if self.sigma < 0:
            problems.append(f"sigma must be >= 0, got {self.sigma}")
        if self.n_particles < 1:
            problems.append(f"n_particles must be >= 1, got {self.n_particles}")
        if self.record_every < 1 or self.n_steps % self.record_every != 0:
            problems.append(
                f"record_every must be >= 1 and divide n_steps, got "
                f"{self.record_every} for {self.n_steps} steps"
            )
        if not np.isfinite(self.t0):
            problems.append(f"t0 must be finite, got {self.t0}")
        if problems:
            raise InvalidInputError("; ".join(problems))

    @property
    def t_final(self) -> float:
        return self.t0 + self.n_steps * self.dt

    def recorded_times(self) -> np.ndarray:
        ks = np.arange(0, self.n_steps + 1, self.record_every)
        return self.t0 + ks * self.dt


@dataclass(frozen=True)
class TrajectoryBatch:
    """Recorded positions of an ensemble, one row per particle."""

    times: np.ndarray
    paths: np.ndarray
    seed_used: int

    def __post_init__(self):
        if self.paths.ndim != 2 or self.paths.shape[1] != self.times.size:
            raise InvalidInputError(
                f"paths shape {self.paths.shape} inconsistent with "
                f"{self.times.size} recorded times"
            )
        if np.any(np.diff(self.times) <= 0):
            raise InvalidInputError("recorded times must be strictly increasing")

    @property
    def n_particles(self) -> int:
        return self.paths.shape[0]

    def means(self) -> np.ndarray:
        return self.paths.mean(axis=0)

    def variances(self, ddof: int = 1) -> np.ndarray:
        return self.paths.var(axis=0, ddof=ddof)


def euler_maruyama_step(x, drift: DriftSpec, t: float, dt: float, dw):
    """One explicit step ``x + b(x, t) dt + dw``; deterministic in its inputs."""
    if dt <= 0:
        raise InvalidInputError(f"dt must be positive, got {dt}")
    x = np.asarray(x, dtype=float)
    dw = np.asarray(dw, dtype=float)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(dw))):
        raise NumericalOverflowError("non-finite position or noise increment")
    out = x + drift(x, t) * dt + dw
    return float(out) if out.ndim == 0 else out


def _integrate_chunk(drift, cfg, first, x, noise, out_rows):
    """Advance one chunk of particles; writes recorded samples into out_rows."""
    dt = cfg.dt
    rec = 0
    out_rows[:, rec] = x
    rec += 1
    for k in range(cfg.n_steps):
        t = cfg.t0 + k * dt
        x = x + drift(x, t) * dt + noise[k]
        bad = ~np.isfinite(x) | (np.abs(x) > OVERFLOW_LIMIT)
        if bad.any():
            idx = int(np.argmax(bad))
            raise NumericalOverflowError(
                f"particle {first + idx} overflowed at step {k + 1} "
                f"(x={x[idx]!r}, |x| bound {OVERFLOW_LIMIT:g})"
            )
        if (k + 1) % cfg.record_every == 0:
            out_rows[:, rec] = x
            rec += 1
    return x


def _run_range(drift, cfg, lo, hi, paths):
    """Simulate particles [lo, hi); fills the corresponding rows of paths."""
    m = hi - lo
    x = np.empty(m)
    sdt = cfg.sigma * math.sqrt(cfg.dt)
    block = np.empty((m, cfg.n_steps))
    for i in range(m):
        gen = particle_stream(cfg.seed, lo + i)
        if callable(cfg.x0):
            x[i] = cfg.x0(gen)
        else:
            x[i] = cfg.x0
        block[i] = gen.standard_normal(cfg.n_steps)
    noise = np.ascontiguousarray(block.T)
    del block
    if sdt != 0.0:
        noise *= sdt
    else:
        noise[:] = 0.0
    _integrate_chunk(drift, cfg, lo, x, noise, paths[lo:hi])


def simulate_ensemble(
    drift: DriftSpec, cfg: SdeConfig, n_workers: int = 1
) -> TrajectoryBatch:
    """Integrate ``cfg.n_particles`` independent paths of ``dx = b dt + sigma dw``.

    Results are identical for any ``n_workers`` because every particle's
    noise comes from its own ``(seed, particle)`` stream and the update is
    elementwise.
    """
    times = cfg.recorded_times()
    paths = np.empty((cfg.n_particles, times.size))
    chunk = int(_CHUNK_NOISE_BYTES // (8 * max(cfg.n_steps, 1)))
    chunk = max(256, min(chunk, 16384, cfg.n_particles))
    ranges = [
        (lo, min(lo + chunk, cfg.n_particles))
        for lo in range(0, cfg.n_particles, chunk)
    ]
    if n_workers > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            futures = [
                pool.submit(_run_range, drift, cfg, lo, hi, paths)
                for lo, hi in ranges
            ]
            for f in futures:
                f.result()
    else:
        for lo, hi in ranges:
            _run_range(drift, cfg, lo, hi, paths)
    return TrajectoryBatch(times=times, paths=paths, seed_used=cfg.seed)


@dataclass(frozen=True)
class MomentumEstimate:
    """Tail-window estimate of the limiting velocity ``x_t / t``."""

    p_hat: float
    converged: bool
    window_variance: float


def momentum_estimate(
    times,
    positions,
    tail_fraction: float = 0.25,
    variance_threshold: float = 1e-3,
) -> MomentumEstimate:
    """Mean of ``x_t / t`` over the trailing ``tail_fraction`` of one path.

    The estimate is flagged converged when the variance of ``x_t / t``
    across the window is below ``variance_threshold``.
    """
    times = np.asarray(times, dtype=float)
    positions = np.asarray(positions, dtype=float)
    if times.shape != positions.shape or times.ndim != 1:
        raise InvalidInputError("times and positions must be matching 1-d arrays")
    if not 0.0 < tail_fraction <= 1.0:
        raise InvalidInputError(f"tail_fraction must be in (0, 1], got {tail_fraction}")
    n_tail = int(math.ceil(times.size * tail_fraction))
    if n_tail < 10:
        raise InvalidInputError(
            f"tail window has {n_tail} samples; need at least 10"
        )
    tw = times[-n_tail:]
    xw = positions[-n_tail:]
    if tw[0] <= 0.0:
        raise InvalidInputError("tail window must contain strictly positive times")
    ratio = xw / tw
    wvar = float(ratio.var())
    return MomentumEstimate(
        p_hat=float(ratio.mean()),
        converged=wvar <= variance_threshold,
        window_variance=wvar,
    )


def ou_analytic_moments(x0: float, omega: float, sigma: float, t):
    """Closed-form mean and variance of the restoring-drift diffusion.

    ``mean = x0 * exp(-omega t)``,
    ``variance = sigma^2 (1 - exp(-2 omega t)) / (2 omega)``.
    """
    if omega <= 0:
        raise InvalidInputError(f"omega must be positive, got {omega}")
    t = np.asarray(t, dtype=float)
    mean = x0 * np.exp(-omega * t)
    var = sigma * sigma * (1.0 - np.exp(-2.0 * omega * t)) / (2.0 * omega)
    if t.ndim == 0:
        return float(mean), float(var)
    return mean, var


def with_x0(cfg: SdeConfig, x0) -> SdeConfig:
    """Copy of ``cfg`` with a different initial condition."""
    return replace(cfg, x0=x0)
