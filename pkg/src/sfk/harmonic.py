"""Axisymmetric harmonic functions on the half-plane ``{(H, r) : r > 0}``.

The building blocks solve ``f_HH + f_rr + f_r / r = 0``: affine functions of
``H``, ``log r`` and ``1/2 log(H + a + sqrt((H + a)^2 + r^2))``.  The pair
``xi = (xi_1, xi_2)`` assembled from them by :func:`build_xi` is the gradient
of the symplectic potential written in half-plane coordinates.

All functions broadcast over array-valued ``H`` and ``r``.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, InadmissibleNut, NonIncreasingA
from .polygon import det2

__all__ = [
    "HalfPlanePoint", "NutParameter", "XiJet", "log_solution",
    "log_solution_reflected", "pde_residual", "fd_partials", "harmonic_residual",
    "half_plane_terms", "build_xi", "extra_det_terms",
]


class HalfPlanePoint(NamedTuple):
    H: float
    r: float


@dataclass(frozen=True)
class NutParameter:
    """The vector ``nu = (alpha, beta)``; zero selects the ALE metric."""

    alpha: float = 0.0
    beta: float = 0.0

    @classmethod
    def of(cls, value):
        if value is None:
            return cls()
        if isinstance(value, cls):
            return value
        alpha, beta = value
        return cls(float(alpha), float(beta))

    @property
    def vector(self):
        return np.array([self.alpha, self.beta])

    @property
    def is_zero(self):
        return self.alpha == 0.0 and self.beta == 0.0

    def cone_dets(self, P):
        """``(det(nu, nu_1), det(nu, nu_d))``."""
        nu = (self.alpha, self.beta)
        return float(det2(nu, P.normals[0])), float(det2(nu, P.normals[-1]))

    def is_admissible(self, P):
        first, last = self.cone_dets(P)
        return first >= 0 and last >= 0

    def is_interior(self, P):
        first, last = self.cone_dets(P)
        return self.is_zero or (first > 0 and last > 0)

    def check(self, P):
        if not self.is_admissible(P):
            raise InadmissibleNut((self.alpha, self.beta), *self.cone_dets(P))

    def as_list(self):
        return [self.alpha, self.beta]


@dataclass(frozen=True)
class XiJet:
    """``xi`` and its first derivatives at one or many half-plane points.

    ``dxi[..., k, 0]`` is ``d xi_k / dH`` and ``dxi[..., k, 1]`` is
    ``d xi_k / dr``.
    """

    xi: np.ndarray
    dxi: np.ndarray
    det: np.ndarray
    V: np.ndarray


def _positive_branch(x):
    return np.asarray(x) >= 0


def log_solution(a, H, r):
    """``1/2 log(H + a + sqrt((H + a)^2 + r^2))``.

    For ``H + a < 0`` the equivalent form
    ``log r - 1/2 log(-(H + a) + sqrt((H + a)^2 + r^2))`` is used, which keeps
    full precision when ``r`` is small compared with ``|H + a|``.
    """
    H = np.asarray(H, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("r must be non-negative")
    Ha = H + a
    if np.any((r == 0) & (Ha <= 0)):
        raise DomainError("log solution is singular on the ray r = 0, H + a <= 0")
    rho = np.hypot(Ha, r)
    pos = _positive_branch(Ha)
    with np.errstate(divide="ignore"):
        direct = 0.5 * np.log(np.where(pos, Ha + rho, 1.0))
        safe = np.log(np.where(pos, 1.0, r)) - 0.5 * np.log(np.where(pos, 1.0, rho - Ha))
    out = np.where(pos, direct, safe)
    return out if out.ndim else float(out)


def log_solution_reflected(a, H, r):
    """``1/2 log(-(H + a) + sqrt((H + a)^2 + r^2))``, the mirror image solution."""
    return log_solution(-a, -np.asarray(H, dtype=float), r)


def pde_residual(f_HH, f_rr, f_r, r):
    """``f_HH + f_rr + f_r / r`` from supplied second partials."""
    return f_HH + f_rr + f_r / r


def fd_partials(f, H, r, h=1e-4, absolute=False, order=2):
    """Central-difference ``(f_HH, f_rr, f_r)`` of a callable ``f(H, r)``.

    ``h`` is relative to ``max(1, |H|)`` and ``max(1, r)`` unless ``absolute``
    is set; it may be an array matching the points.  ``order`` is 2 (three
    points per axis) or 4 (five points).  The ``r`` step is capped so that no
    stencil point gets closer than ``r / 2`` to the boundary ``r = 0``.
    """
    H = np.asarray(H, dtype=float)
    r = np.asarray(r, dtype=float)
    reach = {2: 1, 4: 2}[order]
    hH = h if absolute else h * np.maximum(1.0, np.abs(H))
    hr = np.minimum(h if absolute else h * np.maximum(1.0, r), 0.5 * r / reach)
    f0 = f(H, r)
    if order == 2:
        f_HH = (f(H + hH, r) - 2 * f0 + f(H - hH, r)) / hH**2
        fp, fm = f(H, r + hr), f(H, r - hr)
        return f_HH, (fp - 2 * f0 + fm) / hr**2, (fp - fm) / (2 * hr)
    g = [f(H + k * hH, r) for k in (2, 1, -1, -2)]
    f_HH = (-g[0] + 16 * g[1] - 30 * f0 + 16 * g[2] - g[3]) / (12 * hH**2)
    g = [f(H, r + k * hr) for k in (2, 1, -1, -2)]
    f_rr = (-g[0] + 16 * g[1] - 30 * f0 + 16 * g[2] - g[3]) / (12 * hr**2)
    f_r = (-g[0] + 8 * g[1] - 8 * g[2] + g[3]) / (12 * hr)
    return f_HH, f_rr, f_r


def harmonic_residual(f, H, r, h=1e-4, absolute=False, order=2):
    """Finite-difference residual of the axisymmetric Laplace equation."""
    return pde_residual(*fd_partials(f, H, r, h, absolute, order), np.asarray(r, dtype=float))


def half_plane_terms(a, H, r):
    """Per-parameter quantities shared by ``xi``, its Jacobian and ``x``.

    Returns a dict of arrays with a trailing axis of length ``len(a)``:
    ``L = log(H_i + rho_i)``, ``inv_rho = 1 / rho_i``,
    ``q = r / (H_i + rho_i)`` and ``m = H_i - rho_i``, each evaluated in a
    cancellation-free form.  ``r = 0`` is allowed for ``m`` only.
    """
    a = np.asarray(a, dtype=float)
    H = np.asarray(H, dtype=float)[..., None]
    r = np.asarray(r, dtype=float)[..., None]
    Hi = H + a
    rho = np.hypot(Hi, r)
    pos = Hi >= 0
    plus = np.where(pos, Hi + rho, 1.0)        # H_i + rho_i where it is safe
    minus = np.where(pos, 1.0, rho - Hi)       # rho_i - H_i where it is safe
    with np.errstate(divide="ignore", invalid="ignore"):
        L = np.where(pos, np.log(plus), 2.0 * np.log(r) - np.log(minus))
        q = np.where(pos, r / plus, minus / r)
        m = np.where(pos, -r * np.where(plus > 0, r / plus, 0.0), Hi - rho)
        inv_rho = 1.0 / rho
    return {"Hi": Hi, "rho": rho, "L": L, "q": q, "m": m, "inv_rho": inv_rho}


def _check_a(a, d):
    a = np.asarray(a, dtype=float)
    if a.shape != (d - 1,):
        raise NonIncreasingA(f"expected {d - 1} a-parameters, got {a.size}")
    if np.any(np.diff(a) <= 0):
        raise NonIncreasingA(f"a-parameters must be strictly increasing: {tuple(a)}")
    return a


def build_xi(P, nu, a, H, r, terms=None):
    """Evaluate ``xi``, ``D xi``, ``det D xi`` and ``V = r det D xi``.

    Parameters
    ----------
    P : MomentPolygon
    nu : NutParameter or pair
        Must satisfy ``det(nu, nu_1) >= 0`` and ``det(nu, nu_d) >= 0``.
    a : sequence of float
        The ``d - 1`` strictly increasing chart parameters.
    H, r : array_like
        Half-plane coordinates, ``r > 0``.
    terms : dict, optional
        Precomputed :func:`half_plane_terms` for the same points.
    """
    nu = NutParameter.of(nu)
    nu.check(P)
    a = _check_a(a, P.d)
    H = np.asarray(H, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("xi is only defined for r > 0")
    t = half_plane_terms(a, H, r) if terms is None else terms
    N = P.normal_array
    delta = np.diff(N, axis=0)                  # nu_{i+1} - nu_i, shape (d-1, 2)
    logr = np.log(r)[..., None]
    Hx = H[..., None]
    xi = N[0] * logr + 0.5 * t["L"] @ delta + nu.vector * Hx
    xi_H = 0.5 * t["inv_rho"] @ delta + nu.vector
    xi_r = N[0] / r[..., None] + 0.5 * (t["q"] * t["inv_rho"]) @ delta
    dxi = np.stack([xi_H, xi_r], axis=-1)
    det = dxi[..., 0, 0] * dxi[..., 1, 1] - dxi[..., 0, 1] * dxi[..., 1, 0]
    return XiJet(xi=xi, dxi=dxi, det=det, V=r * det)


def extra_det_terms(P, nu, a, H, r):
    """The additive pieces of ``det D xi(nu) - det D xi(0)``.

    Returns an array with trailing axis of length ``d``::

        det(nu, nu_1) (1/r - w_1),
        det(nu, nu_i) (w_{i-1} - w_i)   for i = 2 .. d-1,
        det(nu, nu_d) w_{d-1},

    where ``w_i = r / (2 rho_i (H_i + rho_i))``.  Each piece is non-negative
    when ``nu`` is admissible.
    """
    nu = NutParameter.of(nu)
    a = _check_a(a, P.d)
    H = np.asarray(H, dtype=float)
    r = np.asarray(r, dtype=float)
    t = half_plane_terms(a, H, r)
    dets = np.array([det2((nu.alpha, nu.beta), n) for n in P.normals], dtype=float)
    w = 0.5 * t["q"] * t["inv_rho"]
    H1, rho1 = t["Hi"][..., 0], t["rho"][..., 0]
    # 1/r - w_1 = (rho_1 + H_1) / (2 r rho_1), rewritten for H_1 < 0
    first = np.where(H1 >= 0,
                     (rho1 + np.maximum(H1, 0)) / (2 * r * rho1),
                     r / (2 * rho1 * (rho1 - np.minimum(H1, 0))))
    pieces = [dets[0] * first]
    pieces += [dets[i] * (w[..., i - 1] - w[..., i]) for i in range(1, P.d - 1)]
    pieces.append(dets[-1] * w[..., -1])
    return np.stack(pieces, axis=-1)
