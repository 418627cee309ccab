r"""Sine integral and exponential integral on real arguments.

All public functions accept a float or an array and return the same shape.
Two regimes are used for each function:

* ``si``: Taylor series for ``|x| <= 4``; above that the complex continued
  fraction for :math:`E_1(ix)`, from which :math:`\mathrm{Si}(x) = \pi/2 +
  \mathrm{Im}\,E_1(ix)`.
* ``ei``: for ``x > 0`` the power series :math:`\gamma + \ln x + \sum x^k/(k\,k!)`
  up to ``x = 40`` and the asymptotic series beyond; a shifted expansion around
  the positive root keeps relative accuracy there. For ``x < 0`` we use
  :math:`\mathrm{Ei}(x) = -E_1(-x)` with the series below 1 and the Lentz
  continued fraction above.
"""

import numpy as np

from .errors import DomainError, RangeError, SingularityError

__all__ = ["si", "ei", "ei_scaled_pair", "EULER_GAMMA", "EI_ROOT"]

EULER_GAMMA = 0.5772156649015329
# Positive zero of Ei, split as hi + lo so shifts around it keep full precision.
_EI_ROOT_HI = 0.3725074107813666
_EI_ROOT_LO = 1.3140183414386028e-17
EI_ROOT = _EI_ROOT_HI

_EPS = 1e-16
_FPMIN = 1e-300
_MAXIT = 10_000
_SI_SERIES_MAX = 4.0
_EI_SERIES_MAX = 40.0
_EI_ROOT_WINDOW = 0.05
_EI_OVERFLOW = 709.782712893384  # log(DBL_MAX)


def _as_array(x, name):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name}: non-finite argument")
    return arr


def _restore(out, like):
    if np.ndim(like) == 0:
        return float(out)
    return out


def _si_series(x):
    x2 = x * x
    p = x.copy()  # x^(2k+1)/(2k+1)! with alternating sign
    total = x.copy()
    k = 0
    while True:
        p = -p * x2 / ((2 * k + 2) * (2 * k + 3))
        k += 1
        term = p / (2 * k + 1)
        total += term
        if np.all(np.abs(term) <= _EPS * np.abs(total)):
            return total
        if k > _MAXIT:
            raise RuntimeError("si series failed to converge")


def _e1_imaginary(x):
    """E1(i x) for real x >= 2 by the modified Lentz continued fraction."""
    b = 1.0 + 1j * x
    c = np.full(x.shape, 1.0 / _FPMIN, dtype=complex)
    d = 1.0 / b
    h = d.copy()
    done = np.zeros(x.shape, dtype=bool)
    for i in range(2, _MAXIT):
        a = -float((i - 1) ** 2)
        b = b + 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h = np.where(done, h, h * delta)
        done |= np.abs(delta - 1.0) < _EPS
        if done.all():
            break
    else:
        raise RuntimeError("E1(ix) continued fraction failed to converge")
    return (np.cos(x) - 1j * np.sin(x)) * h


def si(x):
    r"""Sine integral :math:`\int_0^x \sin t / t\, dt`.

    Odd in ``x``; tends to :math:`\pm\pi/2`. Raises :class:`DomainError` for
    non-finite input.
    """
    arr = _as_array(x, "si")
    ax = np.abs(arr)
    out = np.empty_like(ax)
    small = ax <= _SI_SERIES_MAX
    if small.any():
        out[small] = _si_series(ax[small])
    if (~small).any():
        big = ax[~small]
        out[~small] = 0.5 * np.pi + _e1_imaginary(big).imag
    out = np.copysign(out, arr)
    return _restore(out, x)


def _ei_power_series(x):
    """gamma + ln x + sum x^k/(k k!), for 0 < x <= 40."""
    p = np.ones_like(x)
    total = np.zeros_like(x)
    k = 0
    while True:
        k += 1
        p = p * x / k
        term = p / k
        total += term
        if np.all(term <= _EPS * total):
            break
        if k > _MAXIT:
            raise RuntimeError("Ei series failed to converge")
    return EULER_GAMMA + np.log(x) + total


def _ei_near_root(x):
    # Ei(x) - Ei(x0) = log(x/x0) + sum_k (x^k - x0^k)/(k k!), with Ei(x0) = 0.
    x0 = _EI_ROOT_HI
    delta = (x - _EI_ROOT_HI) - _EI_ROOT_LO
    q = np.ones_like(x)  # (x^k - x0^k)/delta
    x0k = x0  # x0^k
    fact = 1.0
    total = np.zeros_like(x)
    for k in range(1, 60):
        fact *= k
        term = q / (k * fact)
        total += term
        if np.all(np.abs(term) <= _EPS * np.abs(total)):
            break
        q = x * q + x0k
        x0k *= x0
    return np.log1p(delta / x0) + delta * total


def _asymptotic_sum(x):
    """sum_k k!/x^k truncated at its smallest term (x > 40)."""
    term = np.ones_like(x)
    total = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, 200):
        nxt = term * k / x
        active &= (nxt < term) & (nxt > _EPS * total)
        if not active.any():
            break
        term = np.where(active, nxt, term)
        total = np.where(active, total + nxt, total)
    return total


def _e1_scaled(y):
    """exp(y) * E1(y) for y > 0."""
    out = np.empty_like(y)
    small = y <= 1.0
    if small.any():
        ys = y[small]
        p = np.ones_like(ys)
        s = np.zeros_like(ys)
        k = 0
        while True:
            k += 1
            p = -p * ys / k
            term = p / k
            s += term
            if np.all(np.abs(term) <= _EPS * np.abs(s)):
                break
        out[small] = np.exp(ys) * (-EULER_GAMMA - np.log(ys) - s)
    if (~small).any():
        yb = y[~small]
        b = yb + 1.0
        c = np.full(yb.shape, 1.0 / _FPMIN)
        d = 1.0 / b
        h = d.copy()
        done = np.zeros(yb.shape, dtype=bool)
        for i in range(1, _MAXIT):
            an = -float(i * i)
            b = b + 2.0
            d = 1.0 / (an * d + b)
            c = b + an / c
            delta = c * d
            h = np.where(done, h, h * delta)
            done |= np.abs(delta - 1.0) < _EPS
            if done.all():
                break
        else:
            raise RuntimeError("E1 continued fraction failed to converge")
        out[~small] = h
    return out


def _ei_positive(x):
    out = np.empty_like(x)
    root = np.abs(x - _EI_ROOT_HI) < _EI_ROOT_WINDOW
    series = (x <= _EI_SERIES_MAX) & ~root
    asym = x > _EI_SERIES_MAX
    if root.any():
        out[root] = _ei_near_root(x[root])
    if series.any():
        out[series] = _ei_power_series(x[series])
    if asym.any():
        xa = x[asym]
        out[asym] = np.exp(xa) / xa * _asymptotic_sum(xa)
    return out


def ei(x):
    r"""Exponential integral :math:`\mathrm{Ei}(x) = -\mathrm{PV}\int_{-x}^\infty e^{-t}/t\,dt`.

    Raises :class:`SingularityError` at ``x == 0`` and :class:`RangeError`
    when ``x`` exceeds ``log(DBL_MAX)``; use :func:`ei_scaled_pair` for large
    arguments.
    """
    arr = _as_array(x, "ei")
    if np.any(arr == 0.0):
        raise SingularityError("ei: logarithmic singularity at x = 0")
    if np.any(arr > _EI_OVERFLOW):
        raise RangeError("ei: overflow for x > 709.78; use ei_scaled_pair for exp(-x)*Ei(x)")
    out = np.empty_like(arr)
    pos = arr > 0
    if pos.any():
        out[pos] = _ei_positive(arr[pos])
    if (~pos).any():
        y = -arr[~pos]
        with np.errstate(under="ignore"):
            out[~pos] = -_e1_scaled(y) * np.exp(-y)
    return _restore(out, x)


def ei_scaled_pair(u):
    r"""Return ``(exp(u) * Ei(-u), exp(-u) * Ei(u))`` without overflow.

    Valid for any finite ``u > 0``; for large ``u`` the two components behave
    like ``-1/u`` and ``+1/u``.
    """
    arr = _as_array(u, "ei_scaled_pair")
    if np.any(arr <= 0.0):
        raise DomainError("ei_scaled_pair: requires u > 0")
    first = -_e1_scaled(arr)
    second = np.empty_like(arr)
    mid = arr <= _EI_SERIES_MAX
    if mid.any():
        second[mid] = np.exp(-arr[mid]) * _ei_positive(arr[mid])
    if (~mid).any():
        ub = arr[~mid]
        second[~mid] = _asymptotic_sum(ub) / ub
    return _restore(first, u), _restore(second, u)
