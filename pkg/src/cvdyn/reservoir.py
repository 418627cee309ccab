r"""Lorentzian reservoirs and the second-order master-equation coefficients.

The diffusion, damping and frequency-shift coefficients are

.. math::

    \Delta(t) = \alpha^2 \int_0^t ds \int_0^\infty d\omega\, J(\omega) w(\omega)
                \cos\omega s \cos\omega_0 s,

and analogously for :math:`\Pi` (``cos ws sin w0s``, thermally weighted),
:math:`\gamma` (``sin ws sin w0s``) and :math:`r` (``sin ws cos w0s``), where
``w`` is the thermal weight ``2N+1`` in the zero-T or high-T limit.

Two independent routes are provided: :func:`coeff_analytic` (closed forms
built on :mod:`cvdyn.specfun`) and :func:`coeff_quadrature` (nested adaptive
quadrature, used as ground truth).
"""

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from .errors import ConfigurationError, ConvergenceError, DomainError
from .specfun import ei_scaled_pair, si

__all__ = [
    "SpectralKind",
    "SpectralModel",
    "CouplingParams",
    "CoefficientSample",
    "QuadratureConfig",
    "spectral_density",
    "thermal_weight",
    "coeff_quadrature",
    "coeff_analytic",
    "gamma_legacy_form",
    "coefficient_series",
]


class SpectralKind(str, enum.Enum):
    ZERO_T = "zero_t"  # J = 1/(w^2+l^2), 2N+1 -> 1
    HIGH_T = "high_t"  # J = w/(w^2+l^2), 2N+1 -> beta/w


@dataclass(frozen=True)
class SpectralModel:
    """Reservoir kind, Lorentzian width ``lam`` and thermal scale ``beta``.

    ``beta`` is ``2 k_B T / hbar`` and is only meaningful for the high-T kind.
    """

    kind: SpectralKind
    lam: float
    beta: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", SpectralKind(self.kind))
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise ConfigurationError(f"reservoir width must be > 0, got {self.lam}")
        if self.kind is SpectralKind.HIGH_T:
            if self.beta is None or not (math.isfinite(self.beta) and self.beta > 0):
                raise ConfigurationError("high-T reservoir needs beta > 0")
        elif self.beta is not None:
            object.__setattr__(self, "beta", None)

    @property
    def weight_scale(self):
        return self.beta if self.kind is SpectralKind.HIGH_T else 1.0


@dataclass(frozen=True)
class CouplingParams:
    alpha: float
    omega0: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ConfigurationError(f"coupling alpha must be > 0, got {self.alpha}")
        if not (math.isfinite(self.omega0) and self.omega0 > 0):
            raise ConfigurationError(f"omega0 must be > 0, got {self.omega0}")
        if self.alpha > 0.3:
            warnings.warn(
                f"alpha={self.alpha} is outside the weak-coupling regime", stacklevel=2
            )


@dataclass(frozen=True)
class CoefficientSample:
    """Coefficients at one time (or, with array fields, on a set of times)."""

    t: float
    delta: float
    pi: float
    gamma: float
    rshift: Optional[float] = None


@dataclass(frozen=True)
class QuadratureConfig:
    """Targets handed to the adaptive rules, and the looser error estimate
    above which a result is rejected with :class:`ConvergenceError`."""

    abs_tol: float = 1e-14
    rel_tol: float = 1e-10
    omega_cutoff: Optional[float] = None  # default 200 * max(omega0, lam)
    max_subdivisions: int = 500
    accept_abs: float = 1e-12
    accept_rel: float = 1e-8

    def __post_init__(self):
        if min(self.abs_tol, self.rel_tol, self.accept_abs, self.accept_rel) <= 0:
            raise ConfigurationError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ConfigurationError("max_subdivisions must be >= 1")

    def cutoff(self, model, params):
        floor = max(params.omega0, model.lam)
        w = 200.0 * floor if self.omega_cutoff is None else self.omega_cutoff
        if w <= 10.0 * floor:
            raise ConfigurationError(
                f"omega_cutoff={w} too small for omega0={params.omega0}, lambda={model.lam}"
            )
        return w


def spectral_density(model, omega):
    """J(omega) for the model kind; raises for negative frequency."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise DomainError("spectral_density: omega must be >= 0")
    lam2 = model.lam**2
    if model.kind is SpectralKind.ZERO_T:
        out = 1.0 / (omega**2 + lam2)
    else:
        out = omega / (omega**2 + lam2)
    return float(out) if out.ndim == 0 else out


def thermal_weight(model, omega):
    """2N(omega)+1 in the limit the model represents (1, or beta/omega)."""
    omega = np.asarray(omega, dtype=float)
    if model.kind is SpectralKind.ZERO_T:
        out = np.ones_like(omega)
    else:
        if np.any(omega <= 0):
            raise DomainError("thermal_weight: high-T weight beta/omega is singular at omega <= 0")
        out = model.beta / omega
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# quadrature route

def _quad(f, a, b, cfg, label, t, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(
            f, a, b, epsabs=cfg.abs_tol, epsrel=cfg.rel_tol, limit=cfg.max_subdivisions, **kw
        )
    # QUADPACK estimates are pessimistic for QAWO/QAWF, hence the separate
    # acceptance threshold
    requested = max(cfg.accept_abs, cfg.accept_rel * abs(val))
    if not math.isfinite(val) or err > requested:
        raise ConvergenceError(label, t, err, requested)
    return val


def _weighted_density(model):
    """omega -> J(omega) * (2N+1), used in Delta and Pi."""
    lam2 = model.lam**2
    # J*(2N+1) = scale/(w^2+l^2) for both kinds.
    scale = model.weight_scale
    return lambda w: scale / (w * w + lam2)


def _cos_transform_weighted(model, s):
    """int_0^inf J (2N+1) cos(ws) dw, closed form for both kinds."""
    return model.weight_scale * math.pi / (2.0 * model.lam) * math.exp(-model.lam * s)


def _sin_transform_bare(model, params, s, cfg, t):
    """int_0^inf J sin(ws) dw; closed form only for the high-T kernel."""
    if s == 0.0:
        return 0.0
    if model.kind is SpectralKind.HIGH_T:
        return 0.5 * math.pi * math.exp(-model.lam * s)
    lam2 = model.lam**2
    w_cut = cfg.cutoff(model, params)
    g = lambda w: 1.0 / (w * w + lam2)
    head = _quad(g, 0.0, w_cut, cfg, "sin-transform of J", t, weight="sin", wvar=s)
    tail = _quad(g, w_cut, np.inf, cfg, "sin-transform tail of J", t, weight="sin", wvar=s)
    return head + tail


def coeff_quadrature(model, params, t, cfg=None, with_rshift=True):
    """Evaluate the four coefficients at time ``t`` by nested quadrature.

    The inner frequency integral uses its closed form where one exists and
    oscillatory adaptive quadrature (finite part plus Fourier tail) otherwise;
    the outer time integral is adaptive with the ``omega0`` oscillation as a
    quadrature weight. Raises :class:`ConvergenceError` when a tolerance is
    not met.
    """
    cfg = cfg or QuadratureConfig()
    t = float(t)
    if t < 0 or not math.isfinite(t):
        raise DomainError("coeff_quadrature: t must be finite and >= 0")
    if t == 0.0:
        return CoefficientSample(0.0, 0.0, 0.0, 0.0, 0.0 if with_rshift else None)
    a2 = params.alpha**2
    w0 = params.omega0
    cos_w = lambda s: _cos_transform_weighted(model, s)
    sin_b = lambda s: _sin_transform_bare(model, params, s, cfg, t)
    delta = a2 * _quad(cos_w, 0.0, t, cfg, "Delta", t, weight="cos", wvar=w0)
    pi = a2 * _quad(cos_w, 0.0, t, cfg, "Pi", t, weight="sin", wvar=w0)
    gamma = a2 * _quad(sin_b, 0.0, t, cfg, "gamma", t, weight="sin", wvar=w0)
    rshift = None
    if with_rshift:
        rshift = a2 * _quad(sin_b, 0.0, t, cfg, "r", t, weight="cos", wvar=w0)
    return CoefficientSample(t, delta, pi, gamma, rshift)


# ---------------------------------------------------------------------------
# closed forms

def _ei_combinations(lam_t):
    """exp(u)Ei(-u) and exp(-u)Ei(u), set to 0 at u = 0 (their products with
    the vanishing trig factors are 0 there)."""
    u = np.asarray(lam_t, dtype=float)
    a = np.zeros_like(u)
    b = np.zeros_like(u)
    pos = u > 0
    if pos.any():
        a[pos], b[pos] = ei_scaled_pair(u[pos])
    return a, b


def _zero_t_gamma_bracket(params, lam, t):
    """Si(w0 t) + (w0/2l) cos(w0 t)(A - B) - (1/2) sin(w0 t)(A + B)."""
    w0 = params.omega0
    a, b = _ei_combinations(lam * t)
    cw, sw = np.cos(w0 * t), np.sin(w0 * t)
    return si(w0 * t) + 0.5 * (w0 / lam) * cw * (a - b) - 0.5 * sw * (a + b)


def coeff_analytic(model, params, t):
    """Closed-form Delta, Pi and gamma at ``t`` (scalar or array).

    ``rshift`` is not provided. For the high-T kind gamma is the closed form
    of the ``w/(w^2+l^2)`` kernel, which has no thermal weight.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or not np.all(np.isfinite(t_arr)):
        raise DomainError("coeff_analytic: t must be finite and >= 0")
    lam = model.lam
    w0 = params.omega0
    a2 = params.alpha**2
    d2 = w0 * w0 + lam * lam
    decay = np.exp(-lam * t_arr)
    cw, sw = np.cos(w0 * t_arr), np.sin(w0 * t_arr)
    pref = math.pi * a2 / (2.0 * d2) * model.weight_scale
    delta = pref * (decay * (w0 / lam * sw - cw) + 1.0)
    pi = pref * (w0 / lam * (1.0 - cw * decay) - sw * decay)
    if model.kind is SpectralKind.ZERO_T:
        gamma = a2 / d2 * _zero_t_gamma_bracket(params, lam, t_arr)
    else:
        gamma = 0.5 * math.pi * a2 * (w0 - decay * (w0 * cw + lam * sw)) / d2
    if t_arr.ndim == 0:
        return CoefficientSample(float(t_arr), float(delta), float(pi), float(gamma))
    return CoefficientSample(t_arr, delta, pi, gamma)


def gamma_legacy_form(model, params, t):
    """Legacy closed form of the damping coefficient, kept as a diagnostic.

    It adds ``pi/2`` inside the bracket and, for the high-T kind, multiplies
    by ``beta``. It therefore does not vanish at ``t = 0`` and disagrees with
    quadrature; propagation never uses it.
    """
    t_arr = np.asarray(t, dtype=float)
    lam = model.lam
    d2 = params.omega0**2 + lam**2
    bracket = _zero_t_gamma_bracket(params, lam, t_arr) + 0.5 * math.pi
    out = params.alpha**2 * model.weight_scale / d2 * bracket
    return float(out) if out.ndim == 0 else out


def coefficient_series(model, params, times, source="analytic", cfg=None):
    """Delta, Pi, gamma on a uniform time grid as three arrays.

    ``source="quadrature"`` evaluates the inner frequency transforms by
    quadrature at every node and accumulates the time integral with the
    cumulative Simpson rule on the grid, which is what a propagation run
    needs; pointwise checks should call :func:`coeff_quadrature` instead.
    """
    times = np.asarray(times, dtype=float)
    if source == "analytic":
        c = coeff_analytic(model, params, times)
        return c.delta, c.pi, c.gamma
    if source != "quadrature":
        raise ConfigurationError(f"unknown coefficient source {source!r}")
    cfg = cfg or QuadratureConfig()
    w0 = params.omega0
    a2 = params.alpha**2
    t_end = float(times[-1])
    cos_w = np.array([_cos_transform_weighted(model, s) for s in times])
    sin_b = np.array([_sin_transform_bare(model, params, s, cfg, t_end) for s in times])
    cw, sw = np.cos(w0 * times), np.sin(w0 * times)
    acc = lambda y: a2 * integrate.cumulative_simpson(y, x=times, initial=0.0)
    return acc(cos_w * cw), acc(cos_w * sw), acc(sin_b * sw)
