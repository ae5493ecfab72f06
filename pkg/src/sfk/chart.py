"""Action coordinates ``x(H, r)`` on the moment polygon and their inverse.

A :class:`Chart` couples a polygon with a nut vector and the parameters
``a_1 < ... < a_{d-1}`` that place the preimages of the vertices on the
boundary line ``r = 0``.  The map

    x_1 =  beta_1 H + 1/2 sum_i (beta_{i+1} - beta_i) (H_i - rho_i) - beta r^2 / 2
    x_2 = -alpha_1 H - 1/2 sum_i (alpha_{i+1} - alpha_i) (H_i - rho_i) + alpha r^2 / 2

is a diffeomorphism from the open half-plane onto the interior of the polygon
and sends ``r = 0`` onto the boundary, edge by edge.
"""

from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np
from scipy.spatial import cKDTree

from .errors import NoConvergence, NonMonotoneA, PointNotInterior, SFKError
from .harmonic import HalfPlanePoint, NutParameter, build_xi, half_plane_terms
from .polygon import det2, edge_values

__all__ = [
    "Chart", "solve_a", "make_chart", "action_coords", "action_jacobian",
    "edge_interval", "boundary_image", "edge_distances", "invert", "invert_many",
]

INVERT_TOL = 1e-10
# iterate down to rounding level: curvature stencils difference inverted points
_NEWTON_TARGET = 0.0
_NEAR_CONVERGED = 1e-12
_BOUNDARY_TOL = 1e-9


def _alt_reading(P):
    # the same triangular system with nu_j in place of nu_{j+1}; diagnostics only
    nus = P.normals
    a = []
    for j in range(1, P.d):
        acc = P.offsets[j]
        for i in range(1, j):
            diff = (nus[i][0] - nus[i - 1][0], nus[i][1] - nus[i - 1][1])
            acc -= a[i - 1] * det2(diff, nus[j - 1])
        a.append(acc)
    return a


def solve_a(P):
    """Chart parameters ``(a_1, ..., a_{d-1})`` for a validated polygon.

    Forward substitution on the unit lower-triangular system

        sum_{i <= j} a_i det(nu_{i+1} - nu_i, nu_{j+1}) = lambda_{j+1},
        j = 1, ..., d-1,

    which expresses ``l_{j+1}(x(H, 0)) = 0`` on the ``(j+1)``-th boundary
    interval.  ``a_1 = 0`` follows from the gauge ``lambda_2 = 0``.  The
    result is checked against the boundary map before it is returned.
    """
    nus = P.normals
    a = []
    for j in range(1, P.d):
        acc = P.offsets[j]
        for i in range(1, j):
            diff = (nus[i][0] - nus[i - 1][0], nus[i][1] - nus[i - 1][1])
            acc -= a[i - 1] * det2(diff, nus[j])
        # diagonal coefficient det(nu_{j+1} - nu_j, nu_{j+1}) = det(nu_{j+1}, nu_j) = 1
        a.append(float(acc))
    if any(b <= c for c, b in zip(a, a[1:])):
        raise NonMonotoneA(a)
    failures = _boundary_failures(P, a)
    if failures:
        raise SFKError(
            f"boundary-map verification failed for a = {a} on edges {failures}; "
            f"alternative reading gives a = {_alt_reading(P)}")
    return tuple(a)


@dataclass(frozen=True)
class Chart:
    """Polygon, nut vector, chart parameters and the potential's gauge anchor."""

    polygon: object
    nu: NutParameter
    a: tuple
    anchor: HalfPlanePoint = HalfPlanePoint(0.0, 1.0)

    @property
    def d(self):
        return self.polygon.d

    @property
    def scale(self):
        return 1.0 + (self.a[-1] - self.a[0])

    @property
    def center(self):
        return -0.5 * (self.a[0] + self.a[-1])

    def xi(self, H, r):
        return build_xi(self.polygon, self.nu, self.a, H, r)

    def x(self, H, r):
        return action_coords(self, H, r)

    def with_nu(self, nu):
        return make_chart(self.polygon, nu)

    @cached_property
    def _seed_table(self):
        rho = self.scale * np.logspace(-4, 5, 181)
        s = np.linspace(-10, 10, 161)
        phi = np.pi / (1 + np.exp(-s))
        R, PHI = np.meshgrid(rho, phi, indexing="ij")
        H = (self.center + R * np.cos(PHI)).ravel()
        r = (R * np.sin(PHI)).ravel()
        X = action_coords(self, H, r)
        keep = np.all(np.isfinite(X), axis=1)
        return cKDTree(X[keep]), H[keep], r[keep]


def _boundary_failures(P, a):
    chart = Chart(P, NutParameter(), tuple(a))
    bad = []
    for j in range(1, P.d + 1):
        lo, hi = edge_interval(chart, j)
        Hs = _sample_interval(lo, hi, 7)
        X = action_coords(chart, Hs, np.zeros_like(Hs))
        ell = edge_values(P, X)
        scale = 1.0 + np.abs(X).max()
        if np.max(np.abs(ell[:, j - 1])) > _BOUNDARY_TOL * scale:
            bad.append(j)
    return bad


def _sample_interval(lo, hi, n):
    if np.isfinite(lo) and np.isfinite(hi):
        return lo + (hi - lo) * np.linspace(0.05, 0.95, n)
    if np.isfinite(lo):
        return lo + np.logspace(-2, 3, n)
    return hi - np.logspace(-2, 3, n)


def make_chart(P, nu=None):
    """Solve for ``a`` and fix the anchor point of the potential's gauge.

    The anchor is the preimage of ``v_1 + sum_i nu_i / |nu_i|`` when that point
    is comfortably inside the polygon, otherwise ``(-mean(a), 1 + span(a))``.
    """
    nu = NutParameter.of(nu)
    nu.check(P)
    a = solve_a(P)
    chart = Chart(P, nu, a)
    anchor = HalfPlanePoint(float(-np.mean(a)), float(chart.scale))
    N = P.normal_array
    proxy = np.array(P.vertices()[0]) + np.sum(N / np.linalg.norm(N, axis=1)[:, None], axis=0)
    if np.min(edge_values(P, proxy)) > 1e-2:
        anchor = invert(chart, proxy, hint=anchor)
    return replace(chart, anchor=anchor)


def action_coords(c, H, r):
    """``x(H, r)``; defined and continuous for ``r >= 0``."""
    H = np.asarray(H, dtype=float)
    r = np.asarray(r, dtype=float)
    t = half_plane_terms(c.a, H, r)
    N = c.polygon.normal_array
    delta = np.diff(N, axis=0)
    mix = 0.5 * t["m"] @ delta                   # (.., 2): alpha part, beta part
    (alpha1, beta1) = N[0]
    x1 = beta1 * H + mix[..., 1] - 0.5 * c.nu.beta * r * r
    x2 = -alpha1 * H - mix[..., 0] + 0.5 * c.nu.alpha * r * r
    return np.stack([x1, x2], axis=-1)


def _jacobian_from_xi(jet, r):
    xi1_H, xi1_r = jet.dxi[..., 0, 0], jet.dxi[..., 0, 1]
    xi2_H, xi2_r = jet.dxi[..., 1, 0], jet.dxi[..., 1, 1]
    row1 = np.stack([r * xi2_r, -r * xi2_H], axis=-1)
    row2 = np.stack([-r * xi1_r, r * xi1_H], axis=-1)
    return np.stack([row1, row2], axis=-2)


def action_jacobian(c, H, r):
    """``d(x_1, x_2) / d(H, r)`` in closed form, shape ``(..., 2, 2)``."""
    r = np.asarray(r, dtype=float)
    return _jacobian_from_xi(c.xi(H, r), r)


def edge_interval(c, j):
    """Open interval of ``H`` whose boundary image is the edge ``E_j``."""
    a = c.a
    lo = -a[j - 1] if j < c.d else -np.inf
    hi = -a[j - 2] if j > 1 else np.inf
    return lo, hi


def boundary_image(c, H):
    """Edge label(s) and boundary point ``x(H, 0)``.

    At ``H = -a_j`` the point is the vertex ``E_j cap E_{j+1}`` and both
    indices are returned.
    """
    H = float(H)
    x = action_coords(c, H, 0.0)
    for j, aj in enumerate(c.a, start=1):
        if H == -aj:
            return (j, j + 1), x
    for j in range(1, c.d + 1):
        lo, hi = edge_interval(c, j)
        if lo < H < hi:
            return (j,), x
    raise AssertionError("unreachable: intervals cover the line")


def edge_distances(c, H, r):
    """``l_i(x(H, r))`` for all edges without cancellation near ``r = 0``.

    The displacement ``x(H, r) - x(H, 0)`` is assembled from
    ``-r^2 / (|H_i| + rho_i)``, so ``l_j`` keeps full relative precision as the
    point approaches edge ``E_j``.  Shape ``(..., d)``.
    """
    H = np.asarray(H, dtype=float)
    r = np.asarray(r, dtype=float)
    t = half_plane_terms(c.a, H, r)
    dm = -(r * r)[..., None] / (np.abs(t["Hi"]) + t["rho"])
    N = c.polygon.normal_array
    mix = 0.5 * dm @ np.diff(N, axis=0)
    dx = np.stack([mix[..., 1] - 0.5 * c.nu.beta * r * r,
                   -mix[..., 0] + 0.5 * c.nu.alpha * r * r], axis=-1)
    ell0 = edge_values(c.polygon, action_coords(c, H, np.zeros_like(r)))
    # on the closure of its interval the boundary value of l_j is exactly zero
    for j in range(1, c.d + 1):
        lo, hi = edge_interval(c, j)
        ell0[..., j - 1] = np.where((H >= lo) & (H <= hi), 0.0, ell0[..., j - 1])
    return ell0 + dx @ N.T


def _solve2(J, F):
    det = J[..., 0, 0] * J[..., 1, 1] - J[..., 0, 1] * J[..., 1, 0]
    s0 = (J[..., 1, 1] * F[..., 0] - J[..., 0, 1] * F[..., 1]) / det
    s1 = (-J[..., 1, 0] * F[..., 0] + J[..., 0, 0] * F[..., 1]) / det
    return s0, s1


def _newton(c, X, H, r, max_iter=80):
    """Damped Newton on ``x(H, r) = X``; returns (H, r, scaled residual, iterations)."""
    H = H.copy()
    r = r.copy()
    scale = 1.0 + np.linalg.norm(X, axis=-1)
    res = np.linalg.norm(action_coords(c, H, r) - X, axis=-1) / scale
    active = res > _NEWTON_TARGET
    it = 0
    while np.any(active) and it < max_iter:
        it += 1
        idx = np.nonzero(active)[0]
        Ha, ra, Xa = H[idx], r[idx], X[idx]
        F = action_coords(c, Ha, ra) - Xa
        J = action_jacobian(c, Ha, ra)
        dH, dr = _solve2(J, -F)
        t = np.ones_like(Ha)
        accepted = np.zeros(idx.size, dtype=bool)
        # a converged point whose full step does not help is at the rounding floor
        budget = np.where(res[idx] < _NEAR_CONVERGED, 2, 60)
        for k in range(60):
            todo = ~accepted & (k < budget)
            if not np.any(todo):
                break
            Hc = Ha + t * dH
            rc = ra + t * dr
            ok = rc > 0
            rc_safe = np.where(ok, rc, ra)
            resc = np.linalg.norm(action_coords(c, Hc, rc_safe) - Xa, axis=-1) / scale[idx]
            ok &= resc < res[idx] * (1 - 1e-4 * t)
            ok &= todo & np.isfinite(resc)
            H[idx[ok]] = Hc[ok]
            r[idx[ok]] = rc[ok]
            res[idx[ok]] = resc[ok]
            accepted |= ok
            t = np.where(accepted, t, 0.5 * t)
        # points that cannot decrease any further are stagnant
        active[idx[~accepted]] = False
        active &= res > _NEWTON_TARGET
    return H, r, res, it


def invert_many(c, X, hint=None, tol=INVERT_TOL):
    """Invert the chart at many interior points at once.

    Parameters
    ----------
    X : array_like, shape (n, 2)
    hint : tuple of arrays (H, r), optional
        Starting points; by default the nearest entry of a precomputed
        log-polar table of the map is used.
    tol : float
        Required ``|x(H, r) - X| <= tol (1 + |X|)``.

    Returns
    -------
    H, r : ndarray

    Raises
    ------
    PointNotInterior
        If some ``X`` is not in the interior of the polygon.
    NoConvergence
        If some point cannot be inverted to ``tol``; the worst point is reported.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    outside = np.any(edge_values(c.polygon, X) <= 0, axis=-1)
    if np.any(outside):
        raise PointNotInterior(f"x = {tuple(X[np.argmax(outside)])} is not an interior point")
    if hint is None:
        tree, Ht, rt = c._seed_table
        _, nearest = tree.query(X)
        H0, r0 = Ht[nearest], rt[nearest]
    else:
        H0 = np.broadcast_to(np.asarray(hint[0], dtype=float), X.shape[:1]).copy()
        r0 = np.broadcast_to(np.asarray(hint[1], dtype=float), X.shape[:1]).copy()
    H, r, res, it = _newton(c, X, H0, r0)
    bad = res > tol
    if np.any(bad) and not c.nu.is_zero:
        H[bad], r[bad], res[bad] = _continuation(c, X[bad])
        bad = res > tol
    if np.any(bad):
        worst = int(np.argmax(np.where(bad, res, -1)))
        raise NoConvergence(it, float(res[worst]), X[worst])
    return H, r


def _continuation(c, X, steps=8):
    # start from the ALE chart and walk the nut vector out in equal steps
    base = Chart(c.polygon, NutParameter(), c.a)
    tree, Ht, rt = base._seed_table
    _, nearest = tree.query(X)
    H, r, res, _ = _newton(base, X, Ht[nearest], rt[nearest])
    for k in range(1, steps + 1):
        nu_k = NutParameter(c.nu.alpha * k / steps, c.nu.beta * k / steps)
        H, r, res, _ = _newton(Chart(c.polygon, nu_k, c.a), X, H, r)
    return H, r, res


def invert(c, x, hint=None, tol=INVERT_TOL):
    """Half-plane point ``(H, r)`` with ``x(H, r) = x`` for one interior ``x``."""
    if hint is not None:
        hint = (np.array([hint[0]]), np.array([hint[1]]))
    H, r = invert_many(c, np.asarray(x, dtype=float)[None, :], hint=hint, tol=tol)
    return HalfPlanePoint(float(H[0]), float(r[0]))
