"""Open-loop velocity tracking for the first-order stochastic plant.

The plant is ``dv = (-omega v + u + eta) dt + sigma dw``.  Its velocity is a
flat output: choosing ``y = v`` gives the state as ``y`` itself and the
input as ``u = y' + omega y - eta``, so any smooth reference can be tracked
by the precomputed law ``u(t) = omega v_r(t) + v_r'(t) - eta_hat(t)`` with
no feedback.  With a correct disturbance estimate the tracking error obeys
``e' + omega e = 0`` and decays at the plant rate; for an ensemble whose
per-particle disturbances average to zero, the same law with
``eta_hat = 0`` steers the ensemble-mean velocity.

The disturbance enters in two forms matching its two roles: a deterministic
callable (compensable, used for exact-decay checks) and white noise through
the SDE integrator (ensemble statistics).  No estimator is constructed
here; ``eta_hat`` is always caller-supplied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import FitWindowError, InvalidInputError
from .sde import DriftSpec, SdeConfig, TrajectoryBatch, simulate_ensemble

#: Relative agreement required between v_r_dot and a central difference of v_r.
DERIVATIVE_CONSISTENCY_TOL = 1e-6
#: Default decay-fit window as fractions of the horizon (skips transients/floor).
FIT_WINDOW = (0.1, 0.9)


@dataclass(frozen=True)
class ReferenceTrajectory:
    """Reference velocity ``v_r(t)`` with its derivative on ``[0, duration]``.

    A missing derivative is replaced by a central difference with step
    ``1e-5 * duration``; either way the pair is cross-checked on a probe
    grid at construction, so an inconsistent analytic derivative is
    rejected immediately rather than corrupting a run.
    """

    v_r: Callable[[float], float]
    v_r_dot: Optional[Callable[[float], float]]
    duration: float

    def __post_init__(self):
        if not (np.isfinite(self.duration) and self.duration > 0):
            raise InvalidInputError(f"duration must be positive, got {self.duration}")
        if self.v_r_dot is None:
            h = 1e-5 * self.duration
            v = self.v_r
            object.__setattr__(
                self, "v_r_dot", lambda t, _v=v, _h=h: (_v(t + _h) - _v(t - _h)) / (2 * _h)
            )
        self._check_consistency()

    def _check_consistency(self):
        h = 1e-5 * self.duration
        probe = np.linspace(2 * h, self.duration - 2 * h, 33)
        for t in probe:
            fd = (self.v_r(t + h) - self.v_r(t - h)) / (2 * h)
            stated = self.v_r_dot(t)
            if abs(fd - stated) > DERIVATIVE_CONSISTENCY_TOL * (1.0 + abs(stated)):
                raise InvalidInputError(
                    f"v_r_dot({t:g}) = {stated:g} disagrees with the central "
                    f"difference {fd:g} of v_r"
                )

    @classmethod
    def constant(cls, level: float, duration: float) -> "ReferenceTrajectory":
        return cls(lambda t: level, lambda t: 0.0, duration)

    @classmethod
    def ramp(cls, rate: float, duration: float, start: float = 0.0) -> "ReferenceTrajectory":
        return cls(lambda t: start + rate * t, lambda t: rate, duration)

    @classmethod
    def sine(
        cls, amplitude: float, angular_freq: float, duration: float, offset: float = 0.0
    ) -> "ReferenceTrajectory":
        return cls(
            lambda t: offset + amplitude * math.sin(angular_freq * t),
            lambda t: amplitude * angular_freq * math.cos(angular_freq * t),
            duration,
        )


@dataclass(frozen=True)
class ControlLaw:
    """Open-loop law ``u(t) = omega v_r(t) + v_r'(t) - eta_hat(t)``."""

    omega: float
    reference: ReferenceTrajectory
    eta_hat: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        if not (np.isfinite(self.omega) and self.omega > 0):
            raise InvalidInputError(
                f"omega must be positive for stable error dynamics, got {self.omega}"
            )


def openloop_control(law: ControlLaw, t: float) -> float:
    """Evaluate the tracking law at ``t`` within the reference's horizon."""
    if not 0.0 <= t <= law.reference.duration * (1 + 1e-12):
        raise InvalidInputError(
            f"t={t:g} outside the reference horizon [0, {law.reference.duration:g}]"
        )
    u = law.omega * law.reference.v_r(t) + law.reference.v_r_dot(t)
    if law.eta_hat is not None:
        u -= law.eta_hat(t)
    return u


def flat_state_and_input(
    y: Callable[[float], float],
    omega: float,
    eta: Optional[Callable[[float], float]] = None,
    y_dot: Optional[Callable[[float], float]] = None,
    fd_step: float = 1e-6,
):
    """Recover the state and input trajectories from a flat output.

    For this plant the state equals the flat output and the input is
    ``u = y' + omega y - eta``; applying the returned input to the
    noiseless plant from ``y(0)`` reproduces ``y``.
    """
    if y_dot is None:
        y_dot = lambda t: (y(t + fd_step) - y(t - fd_step)) / (2 * fd_step)

    def input_fn(t):
        u = y_dot(t) + omega * y(t)
        if eta is not None:
            u -= eta(t)
        return u

    return y, input_fn


def ensemble_mean_control(
    reference: ReferenceTrajectory, omega: float
) -> Callable[[float], float]:
    """Mean-velocity law ``t -> omega E[v_r](t) + E[v_r'](t)``.

    The disturbance term drops because per-particle disturbances are
    assumed zero-mean; the functional form is the single-particle law with
    a zero disturbance estimate.
    """
    law = ControlLaw(omega=omega, reference=reference, eta_hat=None)
    return lambda t: openloop_control(law, t)


@dataclass(frozen=True)
class TrackingReport:
    """Error trace of a tracking run (per particle or ensemble mean)."""

    times: np.ndarray
    errors: np.ndarray
    error_std: np.ndarray
    control: np.ndarray
    fitted_decay_rate: Optional[float]
    terminal_error: float
    fit_window: tuple[float, float]


def error_dynamics_fit(errors, times, window: tuple[float, float] | None = None) -> float:
    """Least-squares slope of ``ln|e(t)|`` over a window of the run.

    ``window`` is a time interval; the default spans the central
    ``[0.1 T, 0.9 T]`` to avoid initial transients and terminal floors.
    Windows containing zeros or sign changes are rejected.
    """
    times = np.asarray(times, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if times.shape != errors.shape or times.ndim != 1:
        raise InvalidInputError("times and errors must be matching 1-d arrays")
    span = times[-1] - times[0]
    if window is None:
        window = (times[0] + FIT_WINDOW[0] * span, times[0] + FIT_WINDOW[1] * span)
    lo, hi = window
    mask = (times >= lo) & (times <= hi)
    e = errors[mask]
    t = times[mask]
    if e.size < 2:
        raise FitWindowError(f"fit window [{lo:g}, {hi:g}] holds {e.size} samples")
    if np.any(e == 0.0):
        raise FitWindowError("fit window contains zero errors")
    if np.any(np.sign(e) != np.sign(e[0])):
        raise FitWindowError("fit window contains sign changes")
    slope, _ = np.polyfit(t, np.log(np.abs(e)), 1)
    return float(slope)


def _report_from_batch(
    batch: TrajectoryBatch, law_u: Callable[[float], float], v_ref: Callable[[float], float]
) -> TrackingReport:
    times = batch.times
    refs = np.array([v_ref(t) for t in times])
    per_particle_errors = batch.paths - refs
    mean_err = per_particle_errors.mean(axis=0)
    std_err = (
        per_particle_errors.std(axis=0, ddof=1)
        if batch.n_particles > 1
        else np.zeros_like(mean_err)
    )
    control = np.array([law_u(t) for t in times])
    try:
        rate = error_dynamics_fit(mean_err, times)
    except FitWindowError:
        rate = None
    span = times[-1] - times[0]
    return TrackingReport(
        times=times,
        errors=mean_err,
        error_std=std_err,
        control=control,
        fitted_decay_rate=rate,
        terminal_error=float(mean_err[-1]),
        fit_window=(times[0] + FIT_WINDOW[0] * span, times[0] + FIT_WINDOW[1] * span),
    )


def simulate_controlled_particle(
    law: ControlLaw,
    v0: float,
    cfg: SdeConfig,
    disturbance: Optional[Callable[[float], float]] = None,
    n_workers: int = 1,
) -> TrackingReport:
    """Track one particle (or a noiseless copy) under the open-loop law.

    ``disturbance`` is the true deterministic disturbance acting on the
    plant; stochastic disturbance enters through ``cfg.sigma``.  With
    ``eta_hat`` matching the disturbance and ``sigma = 0`` the error decays
    as ``e(0) exp(-omega t)`` up to integrator error.
    """
    horizon = cfg.t0 + cfg.n_steps * cfg.dt
    if horizon > law.reference.duration * (1 + 1e-12):
        raise InvalidInputError(
            f"simulation horizon {horizon:g} exceeds the reference duration "
            f"{law.reference.duration:g}"
        )
    omega = law.omega

    def plant_drift(v, t):
        b = -omega * v + openloop_control(law, t)
        if disturbance is not None:
            b = b + disturbance(t)
        return b

    drift = DriftSpec("controlled", plant_drift, {"omega": omega})
    batch = simulate_ensemble(drift, replace(cfg, x0=v0), n_workers=n_workers)
    return _report_from_batch(batch, lambda t: openloop_control(law, t), law.reference.v_r)


def simulate_controlled_ensemble(
    reference: ReferenceTrajectory,
    omega: float,
    cfg: SdeConfig,
    n_workers: int = 1,
) -> TrackingReport:
    """Steer an ensemble's mean velocity along the reference.

    Per-particle disturbances are the zero-mean white noise of ``cfg.sigma``;
    every particle receives the same mean-law input.  ``cfg.x0`` sets the
    initial velocities (scalar or per-particle sampler), so the initial mean
    error is ``E[v(0)] - v_r(0)``.
    """
    horizon = cfg.t0 + cfg.n_steps * cfg.dt
    if horizon > reference.duration * (1 + 1e-12):
        raise InvalidInputError(
            f"simulation horizon {horizon:g} exceeds the reference duration "
            f"{reference.duration:g}"
        )
    u_mean = ensemble_mean_control(reference, omega)

    def plant_drift(v, t):
        return -omega * v + u_mean(t)

    drift = DriftSpec("controlled_mean", plant_drift, {"omega": omega})
    batch = simulate_ensemble(drift, cfg, n_workers=n_workers)
    return _report_from_batch(batch, u_mean, reference.v_r)
