r"""Memory kernels and evolved first and second moments of the two-mode state.

Covariance matrices use the ordering ``(x1, p1, x2, p2)`` and the convention
in which the vacuum is ``I/2``. With isotropic damping the single-mode
covariance obeys

.. math::

    \sigma_t = e^{-\Gamma} R \sigma_0 R^T + e^{-\Gamma(t)} \int_0^t
               e^{\Gamma(s)} R(t-s) D(s) R(t-s)^T ds,
    \qquad D = \begin{pmatrix} 0 & \Pi \\ \Pi & 2\Delta \end{pmatrix},

with :math:`R(t) = ((\cos\omega_0 t, \sin\omega_0 t), (-\sin\omega_0 t,
\cos\omega_0 t))`. Expanding the rotation gives the six cumulative kernels
collected in :class:`MemoryKernels`.
"""

import enum
import math
from dataclasses import dataclass, fields

import numpy as np
from scipy.integrate import cumulative_simpson

from .errors import ConfigurationError, ContractError, DomainError
from .reservoir import coefficient_series

__all__ = [
    "PropagationMode",
    "TimeGrid",
    "MemoryKernels",
    "kernels_on_grid",
    "initial_twb",
    "evolve_mean",
    "evolve_covariance",
    "rotation",
]


class PropagationMode(str, enum.Enum):
    EXACT = "exact"
    SECULAR = "secular"  # drops the 2*omega0 oscillating kernels


@dataclass(frozen=True)
class TimeGrid:
    t_max: float
    n_steps: int

    def __post_init__(self):
        if not (math.isfinite(self.t_max) and self.t_max > 0):
            raise ConfigurationError(f"t_max must be > 0, got {self.t_max}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 2:
            raise ConfigurationError(f"n_steps must be an integer >= 2, got {self.n_steps}")
        object.__setattr__(self, "n_steps", int(self.n_steps))

    @property
    def dt(self):
        return self.t_max / self.n_steps

    @property
    def times(self):
        return np.linspace(0.0, self.t_max, self.n_steps + 1)

    def check_resolves(self, omega0):
        """The fastest kernel phase 2*omega0*t must advance <= pi/4 per step."""
        if 2.0 * omega0 * self.dt > math.pi / 4 * (1 + 1e-12):
            raise ConfigurationError(
                f"dt={self.dt:g} does not resolve 2*omega0={2 * omega0:g}; "
                f"need n_steps >= {math.ceil(8 * omega0 * self.t_max / math.pi)}"
            )


@dataclass(frozen=True)
class MemoryKernels:
    """Cumulative kernels on a time grid (array fields, or floats for one time).

    Index with ``kernels[i]`` to get the snapshot at one grid point.
    """

    t: np.ndarray
    Gamma: np.ndarray
    DeltaGamma: np.ndarray
    DeltaCo: np.ndarray
    DeltaSi: np.ndarray
    PiCo: np.ndarray
    PiSi: np.ndarray

    def __len__(self):
        return np.size(self.t)

    def __getitem__(self, i):
        return MemoryKernels(**{f.name: np.asarray(getattr(self, f.name))[i] for f in fields(self)})

    def secular(self):
        z = np.zeros_like(np.asarray(self.DeltaCo, dtype=float))
        return MemoryKernels(self.t, self.Gamma, self.DeltaGamma, z, z, z, z)

    @classmethod
    def zeros(cls, t=0.0):
        return cls(t, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


def _cumulative(y, t):
    return cumulative_simpson(y, x=t, initial=0.0)


def kernels_on_grid(model, params, grid, mode=PropagationMode.EXACT, source="analytic", cfg=None):
    """Compute Gamma, Delta_Gamma and the four oscillating kernels on ``grid``.

    Each ``e^{-Gamma(t)} int_0^t e^{Gamma(s)} f(s) trig(2 w0 (t-s)) ds`` is split
    by angle subtraction into two running Simpson sums over ``s`` that are
    recombined at every ``t``, so the whole grid costs O(n).
    """
    mode = PropagationMode(mode)
    grid.check_resolves(params.omega0)
    t = grid.times
    delta, pi, gamma = coefficient_series(model, params, t, source=source, cfg=cfg)
    big_gamma = 2.0 * _cumulative(gamma, t)
    # e^{Gamma(s) - Gamma_ref} keeps the running sums representable.
    ref = float(np.max(big_gamma))
    w = np.exp(big_gamma - ref)
    inv_w = np.exp(ref - big_gamma)
    delta_gamma = inv_w * _cumulative(w * delta, t)
    if mode is PropagationMode.SECULAR:
        z = np.zeros_like(t)
        return MemoryKernels(t, big_gamma, delta_gamma, z, z, z, z)
    phase = 2.0 * params.omega0 * t
    c2, s2 = np.cos(phase), np.sin(phase)

    def split(f):
        ic = _cumulative(w * f * c2, t)
        is_ = _cumulative(w * f * s2, t)
        co = inv_w * (c2 * ic + s2 * is_)
        si = inv_w * (s2 * ic - c2 * is_)
        return co, si

    d_co, d_si = split(delta)
    p_co, p_si = split(pi)
    return MemoryKernels(t, big_gamma, delta_gamma, d_co, d_si, p_co, p_si)


def initial_twb(r):
    """Covariance of the twin-beam state S(r)|0,0>, vacuum = I/2, phase 0."""
    if not (math.isfinite(r) and r >= 0):
        raise DomainError(f"squeezing r must be >= 0, got {r}")
    a = 0.5 * math.cosh(2 * r)
    c = 0.5 * math.sinh(2 * r)
    return np.array(
        [
            [a, 0.0, c, 0.0],
            [0.0, a, 0.0, -c],
            [c, 0.0, a, 0.0],
            [0.0, -c, 0.0, a],
        ]
    )


def rotation(omega0, t):
    """Free single-mode rotation R(t) with shape ``t.shape + (2, 2)``."""
    th = omega0 * np.asarray(t, dtype=float)
    c, s = np.cos(th), np.sin(th)
    return np.stack([np.stack([c, s], -1), np.stack([-s, c], -1)], -2)


def evolve_mean(mean_in, Gamma, t, omega0):
    """Damped rotation of the first moments, ``e^{-Gamma/2} (R + R) x``."""
    mean_in = np.asarray(mean_in, dtype=float)
    R = rotation(omega0, t)
    out = np.concatenate([R @ mean_in[:2], R @ mean_in[2:]])
    return math.exp(-0.5 * Gamma) * out if math.isfinite(Gamma) else np.zeros(4)


def _check_symmetric_blocks(sigma0):
    sigma0 = np.asarray(sigma0, dtype=float)
    if sigma0.shape != (4, 4):
        raise ContractError(f"expected a 4x4 covariance, got shape {sigma0.shape}")
    scale = max(1.0, float(np.max(np.abs(sigma0))))
    if not np.allclose(sigma0, sigma0.T, rtol=0, atol=1e-12 * scale):
        raise ContractError("covariance matrix is not symmetric")
    if not np.allclose(sigma0[:2, :2], sigma0[2:, 2:], rtol=0, atol=1e-12 * scale):
        raise ContractError("evolve_covariance requires equal local blocks A0 = B0")
    return sigma0


def evolve_covariance(sigma0, kernels, omega0, mode=PropagationMode.EXACT):
    """Covariance at the kernel times, shape ``(..., 4, 4)``.

    ``A_t = e^{-Gamma} R A0 R^T + N`` with the noise block

    ``N = [[DG - (Dco - Psi), Pco + Dsi], [Pco + Dsi, DG + (Dco - Psi)]]``

    and ``C_t = e^{-Gamma} R C0 R^T``. In secular mode the four oscillating
    kernels are dropped.
    """
    mode = PropagationMode(mode)
    sigma0 = _check_symmetric_blocks(sigma0)
    if mode is PropagationMode.SECULAR:
        kernels = kernels.secular()
    t = np.asarray(kernels.t, dtype=float)
    damp = np.exp(-np.asarray(kernels.Gamma, dtype=float))[..., None, None]
    R = rotation(omega0, t)
    Rt = np.swapaxes(R, -1, -2)
    A = damp * (R @ sigma0[:2, :2] @ Rt)
    C = damp * (R @ sigma0[:2, 2:] @ Rt)

    dg = np.asarray(kernels.DeltaGamma, dtype=float)
    u = np.asarray(kernels.DeltaCo, dtype=float) - np.asarray(kernels.PiSi, dtype=float)
    v = np.asarray(kernels.PiCo, dtype=float) + np.asarray(kernels.DeltaSi, dtype=float)
    noise = np.stack([np.stack([dg - u, v], -1), np.stack([v, dg + u], -1)], -2)
    A = A + noise
    A = 0.5 * (A + np.swapaxes(A, -1, -2))  # remove rounding asymmetry
    top = np.concatenate([A, C], -1)
    bottom = np.concatenate([np.swapaxes(C, -1, -2), A], -1)
    return np.concatenate([top, bottom], -2)
