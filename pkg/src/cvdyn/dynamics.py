"""Entanglement trajectories, event detection and exact/secular comparison."""

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError
from .gaussian import eof_symmetric, min_symplectic_eigenvalue
from .propagator import (
    MemoryKernels,
    PropagationMode,
    TimeGrid,
    evolve_covariance,
    initial_twb,
    kernels_on_grid,
)
from .reservoir import CouplingParams, QuadratureConfig, SpectralModel

__all__ = [
    "RunConfig",
    "Trajectory",
    "Classification",
    "EventReport",
    "Comparison",
    "run",
    "detect_events",
    "compare",
]


@dataclass(frozen=True)
class RunConfig:
    model: SpectralModel
    params: CouplingParams
    r: float
    grid: TimeGrid
    eps_death: float = 1e-9
    source: str = "analytic"
    quadrature: Optional[QuadratureConfig] = None

    def __post_init__(self):
        if not (np.isfinite(self.r) and self.r >= 0):
            raise ConfigurationError(f"squeezing r must be >= 0, got {self.r}")
        if not (np.isfinite(self.eps_death) and self.eps_death > 0):
            raise ConfigurationError(f"eps_death must be > 0, got {self.eps_death}")
        if self.source not in ("analytic", "quadrature"):
            raise ConfigurationError(f"source must be 'analytic' or 'quadrature', got {self.source!r}")
        self.grid.check_resolves(self.params.omega0)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    ef_exact: np.ndarray
    ef_secular: np.ndarray
    nu_min_exact: np.ndarray
    nu_min_secular: np.ndarray
    kernels: MemoryKernels
    warnings: tuple = ()


class Classification(str, enum.Enum):
    ALWAYS_ALIVE = "AlwaysAlive"
    ESD = "ESD"
    ESD_WITH_REVIVAL = "ESDWithRevival"
    BORN_DEAD = "BornDeadOrSeparable"


@dataclass(frozen=True)
class EventReport:
    death_times: tuple
    revival_times: tuple
    classification: Classification
    horizon: float

    @property
    def first_death(self):
        return self.death_times[0] if self.death_times else None

    def as_dict(self):
        return {
            "classification": self.classification.value,
            "death_times": list(self.death_times),
            "revival_times": list(self.revival_times),
            "horizon": self.horizon,
        }


@dataclass(frozen=True)
class Comparison:
    max_abs_diff: float
    t_at_max: float
    death_time_exact: Optional[float]
    death_time_secular: Optional[float]
    # secular minus exact first death; None unless both curves die
    death_time_difference: Optional[float] = field(default=None)

    def as_dict(self):
        return {
            "max_abs_diff": self.max_abs_diff,
            "t_at_max": self.t_at_max,
            "death_time_exact": self.death_time_exact,
            "death_time_secular": self.death_time_secular,
        }


def run(config):
    """Propagate the twin-beam state and return exact and secular EoF curves."""
    kernels = kernels_on_grid(
        config.model,
        config.params,
        config.grid,
        PropagationMode.EXACT,
        source=config.source,
        cfg=config.quadrature,
    )
    sigma0 = initial_twb(config.r)
    w0 = config.params.omega0
    out = {}
    notes = []
    for mode in PropagationMode:
        sig = evolve_covariance(sigma0, kernels, w0, mode)
        eof = eof_symmetric(sig)
        nu = min_symplectic_eigenvalue(sig)
        out[mode] = (eof.value, nu)
        for msg in eof.warnings:
            notes.append(f"{mode.value}: {msg}")
    return Trajectory(
        times=kernels.t,
        ef_exact=out[PropagationMode.EXACT][0],
        ef_secular=out[PropagationMode.SECULAR][0],
        nu_min_exact=out[PropagationMode.EXACT][1],
        nu_min_secular=out[PropagationMode.SECULAR][1],
        kernels=kernels,
        warnings=tuple(notes),
    )


def _crossings(times, ef, eps):
    alive = ef >= eps
    deaths, revivals = [], []
    idx = np.flatnonzero(alive[:-1] != alive[1:])
    for i in idx:
        e0, e1 = ef[i], ef[i + 1]
        frac = (e0 - eps) / (e0 - e1)
        tc = float(times[i] + frac * (times[i + 1] - times[i]))
        (deaths if alive[i] else revivals).append(tc)
    return tuple(deaths), tuple(revivals)


def _report(times, ef, eps):
    horizon = float(times[-1])
    deaths, revivals = _crossings(times, ef, eps)
    if ef[0] < eps:
        cls = Classification.BORN_DEAD
        deaths, revivals = (), ()
    elif not deaths:
        cls = Classification.ALWAYS_ALIVE
    elif revivals:
        cls = Classification.ESD_WITH_REVIVAL
    else:
        cls = Classification.ESD
    return EventReport(deaths, revivals, cls, horizon)


def detect_events(traj, eps_death=1e-9):
    """Deaths and revivals of both curves; crossing times are linearly interpolated."""
    if len(traj.times) == 0:
        raise ValueError("detect_events: empty trajectory")
    times = np.asarray(traj.times, dtype=float)
    return (
        _report(times, np.asarray(traj.ef_exact), eps_death),
        _report(times, np.asarray(traj.ef_secular), eps_death),
    )


def compare(traj, eps_death=1e-9):
    diff = np.abs(np.asarray(traj.ef_exact) - np.asarray(traj.ef_secular))
    i = int(np.argmax(diff))
    exact, secular = detect_events(traj, eps_death)
    de, ds = exact.first_death, secular.first_death
    return Comparison(
        max_abs_diff=float(diff[i]),
        t_at_max=float(traj.times[i]),
        death_time_exact=de,
        death_time_secular=ds,
        death_time_difference=(ds - de) if (de is not None and ds is not None) else None,
    )
