"""Two-mode Gaussian state algebra in the vacuum = I/2 convention.

Every function accepts a single ``(4, 4)`` covariance or a stack
``(..., 4, 4)``; results broadcast over the leading axes.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .errors import ContractError, NotApplicableError

__all__ = [
    "SymplecticInvariants",
    "EofResult",
    "blocks",
    "from_blocks",
    "invariants",
    "eof_symmetric",
    "eof_from_kappa",
    "min_symplectic_eigenvalue",
    "partial_transpose",
    "symplectic_form",
]

log = logging.getLogger(__name__)

PHYSICALITY_TOL = 1e-6


@dataclass(frozen=True)
class SymplecticInvariants:
    I1: np.ndarray  # det A
    I2: np.ndarray  # det B
    I3: np.ndarray  # det C
    I4: np.ndarray  # det sigma


@dataclass(frozen=True)
class EofResult:
    kappa_minus: np.ndarray
    x_m: np.ndarray
    value: np.ndarray  # nats
    separable: np.ndarray
    physical: np.ndarray
    warnings: tuple = ()


def symplectic_form(n_modes=2):
    omega = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(n_modes), omega)


def _as_cov(sigma):
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape[-2:] != (4, 4):
        raise ContractError(f"expected (..., 4, 4) covariance, got {sigma.shape}")
    scale = np.maximum(1.0, np.max(np.abs(sigma), axis=(-2, -1)))
    asym = np.max(np.abs(sigma - np.swapaxes(sigma, -1, -2)), axis=(-2, -1))
    if np.any(asym > 1e-12 * scale):
        raise ContractError("covariance matrix is not symmetric")
    return sigma


def blocks(sigma):
    """Return the local blocks A, B and the correlation block C."""
    sigma = np.asarray(sigma, dtype=float)
    return sigma[..., :2, :2], sigma[..., 2:, 2:], sigma[..., :2, 2:]


def from_blocks(A, B, C):
    A, B, C = (np.asarray(m, dtype=float) for m in (A, B, C))
    top = np.concatenate([A, C], -1)
    bottom = np.concatenate([np.swapaxes(C, -1, -2), B], -1)
    return np.concatenate([top, bottom], -2)


def _det2(m):
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def invariants(sigma):
    """Block determinants det A, det B, det C and det sigma."""
    sigma = _as_cov(sigma)
    A, B, C = blocks(sigma)
    return SymplecticInvariants(_det2(A), _det2(B), _det2(C), np.linalg.det(sigma))


def _nu_min_hermitian(sigma):
    # i * sqrt(sigma) Omega sqrt(sigma) is Hermitian with eigenvalues +-nu_k,
    # which avoids the sqrt-sensitivity of the invariant formula near pure states.
    w, v = np.linalg.eigh(sigma)
    out = np.empty(sigma.shape[:-2])
    good = np.all(w > 0, axis=-1)
    omega = symplectic_form()
    if np.any(good):
        vg, wg = v[good], w[good]
        half = (vg * np.sqrt(wg)[..., None, :]) @ np.swapaxes(vg, -1, -2)
        h = 1j * (half @ omega @ half)
        out[good] = np.min(np.abs(np.linalg.eigvalsh(h)), axis=-1)
    if np.any(~good):
        ev = np.linalg.eigvals(1j * (omega @ sigma[~good]))
        out[~good] = np.min(np.abs(ev), axis=-1)
    return out


def min_symplectic_eigenvalue(sigma):
    """Smallest symplectic eigenvalue of ``sigma`` (1/2 for pure states)."""
    out = _nu_min_hermitian(_as_cov(sigma))
    return float(out) if np.ndim(out) == 0 else out


def partial_transpose(sigma):
    """Flip the momentum of mode 2."""
    flip = np.diag([1.0, 1.0, 1.0, -1.0])
    return flip @ np.asarray(sigma, dtype=float) @ flip


def eof_from_kappa(kappa):
    """Entanglement of formation as a function of the PT eigenvalue; 0 if kappa >= 1/2."""
    kappa = np.asarray(kappa, dtype=float)
    entangled = kappa < 0.5
    k = np.where(entangled, kappa, 0.5)
    with np.errstate(divide="ignore"):
        x = (k * k + 0.25) / (2.0 * k)
    value = np.where(entangled, xlogy(x + 0.5, x + 0.5) - xlogy(x - 0.5, x - 0.5), 0.0)
    return x, np.maximum(value, 0.0)


def eof_symmetric(sigma, tol_sym=1e-9):
    """Entanglement of formation (nats) of a symmetric two-mode Gaussian state.

    The PT eigenvalue is built from the invariants as
    ``kappa = sqrt((a - c_+)(a - s c_-))`` with ``a = sqrt(I1)``, ``s = -sign(I3)`` and

    ``c_pm^2 = (I1^2 + I3^2 - I4 +- sqrt((I1^2 + I3^2 - I4)^2 - 4 I1^2 I3^2)) / (2 I1)``.

    States with ``kappa >= 1/2`` are separable and get ``value = 0``. Raises
    :class:`NotApplicableError` when ``det A`` and ``det B`` differ by more
    than ``tol_sym`` relative.
    """
    sigma = _as_cov(sigma)
    inv = invariants(sigma)
    if np.any(np.abs(inv.I1 - inv.I2) > tol_sym * np.maximum(inv.I1, inv.I2)):
        raise NotApplicableError("eof_symmetric: state is not symmetric (det A != det B)")
    i1, i3, i4 = inv.I1, inv.I3, inv.I4
    x = i1 * i1 + i3 * i3 - i4
    disc = x * x - (2.0 * i1 * i3) ** 2
    # x cancels from O(I1^2) terms, so its rounding error scales with those
    scale = np.maximum(np.abs(x) * (i1 * i1 + i3 * i3 + np.abs(i4)), 1e-300)
    if np.any(disc < -1e-12 * scale):
        raise ContractError("eof_symmetric: negative discriminant; covariance is not a valid state")
    root = np.sqrt(np.maximum(disc, 0.0))
    c_plus = np.sqrt((x + root) / (2.0 * i1))
    c_minus = np.sqrt(np.maximum(x - root, 0.0) / (2.0 * i1))
    a_n = np.sqrt(i1)
    # c_pm are |c1|, |c2| of the standard form; partial transposition flips
    # the sign of c2, so c_minus enters with the sign of -det C.
    signed_minus = np.where(i3 > 0, -c_minus, c_minus)
    kappa = np.sqrt(np.maximum((a_n - c_plus) * (a_n - signed_minus), 0.0))
    x_m, value = eof_from_kappa(kappa)

    nu = _nu_min_hermitian(sigma)
    physical = nu >= 0.5 - PHYSICALITY_TOL
    msgs = ()
    if not np.all(physical):
        n_bad = int(np.size(physical) - np.count_nonzero(physical))
        msg = f"{n_bad} covariance(s) violate the uncertainty relation (min nu = {np.min(nu):.9g})"
        log.warning(msg)
        msgs = (msg,)
    return EofResult(kappa, x_m, value, kappa >= 0.5, physical, msgs)
