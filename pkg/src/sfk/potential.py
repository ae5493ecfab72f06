"""Symplectic potential and the metric blocks it determines.

``u`` is the primitive of the closed form ``xi_1 dx_1 + xi_2 dx_2`` with
``u(anchor) = 0``.  It is integrated along straight segments of the
half-plane, where the integrand is explicit, so no chart inversion is needed.
The half-plane is convex, so such a segment never reaches ``r = 0``.
"""

import csv
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec

from .chart import action_coords, edge_distances, edge_interval
from .errors import DomainError, QuadratureFailure
from .harmonic import HalfPlanePoint
from .polygon import guillemin_potential

__all__ = [
    "MetricSample", "MetricGrid", "potential_values", "potential_value",
    "hessian", "metric_sample", "metric_grid", "write_grid_csv", "CSV_COLUMNS",
    "RegularityReport", "boundary_regularity", "vertex_regularity",
    "guillemin_difference",
]

QUAD_EPSABS = 1e-10
QUAD_EPSREL = 1e-13
QUAD_LIMIT = 2 ** 14
CSV_COLUMNS = ("H", "r", "x1", "x2", "u", "h11", "h12", "h22", "det", "V")


def _segment_integrand(c, H0, r0, dH, dr):
    def f(t):
        H = H0 + t * dH
        r = r0 + t * dr
        jet = c.xi(H, r)
        g = jet.dxi
        # dx/dt = J (dH, dr) with J = [[r xi2_r, -r xi2_H], [-r xi1_r, r xi1_H]]
        dx1 = r * (g[..., 1, 1] * dH - g[..., 1, 0] * dr)
        dx2 = -r * (g[..., 0, 1] * dH - g[..., 0, 0] * dr)
        return jet.xi[..., 0] * dx1 + jet.xi[..., 1] * dx2
    return f


def _integrate_segments(c, start, H, r):
    H = np.asarray(H, dtype=float)
    r = np.asarray(r, dtype=float)
    H0 = np.broadcast_to(np.asarray(start[0], dtype=float), H.shape)
    r0 = np.broadcast_to(np.asarray(start[1], dtype=float), H.shape)
    f = _segment_integrand(c, H0, r0, H - H0, r - r0)
    value, err, info = quad_vec(f, 0.0, 1.0, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL,
                                norm="max", limit=QUAD_LIMIT, full_output=True)
    tol = max(QUAD_EPSABS, QUAD_EPSREL * float(np.max(np.abs(value), initial=0.0)))
    if info.status != 0 and err > tol:
        raise QuadratureFailure(
            f"quadrature stopped with error estimate {err:.3e} > {tol:.3e} "
            f"after {info.intervals.shape[0]} subintervals")
    return value


def potential_values(c, H, r, path=None):
    """``u`` at many half-plane points at once.

    Parameters
    ----------
    c : Chart
    H, r : array_like
        Points with ``r > 0``.
    path : sequence of HalfPlanePoint, optional
        Intermediate points of a polyline from ``c.anchor``; the default is
        the straight segment.
    """
    H = np.asarray(H, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("the potential is evaluated at interior points r > 0")
    total = np.zeros(np.broadcast(H, r).shape)
    start = c.anchor
    for node in path or ():
        total = total + _integrate_segments(c, start, np.full_like(total, node[0]),
                                            np.full_like(total, node[1]))
        start = node
    return total + _integrate_segments(c, start, H + 0 * total, r + 0 * total)


def potential_value(c, p, path=None):
    """``u`` at one half-plane point, gauge ``u(c.anchor) = 0``."""
    H, r = p
    return float(potential_values(c, np.array([H]), np.array([r]), path=path)[0])


def hessian(c, H, r):
    """``(Hess u, Hess^{-1} u, det Hess u)`` in closed form.

    With ``D xi`` the Jacobian of ``xi`` in ``(H, r)``::

        Hess u     = D xi (D xi)^T / (r det D xi)
        Hess^{-1} u = r / det D xi * [[xi2_r^2 + xi2_H^2, -(xi1_r xi2_r + xi1_H xi2_H)],
                                      [ . , xi1_r^2 + xi1_H^2]]
    """
    r = np.asarray(r, dtype=float)
    jet = c.xi(H, r)
    g = jet.dxi
    det = jet.det[..., None, None]
    rr = r[..., None, None]
    hess = g @ np.swapaxes(g, -1, -2) / (rr * det)
    xi1H, xi1r, xi2H, xi2r = g[..., 0, 0], g[..., 0, 1], g[..., 1, 0], g[..., 1, 1]
    off = -(xi1r * xi2r + xi1H * xi2H)
    inv = np.stack([np.stack([xi2r ** 2 + xi2H ** 2, off], -1),
                    np.stack([off, xi1r ** 2 + xi1H ** 2], -1)], -2) * (rr / det)
    det_hess = hess[..., 0, 0] * hess[..., 1, 1] - hess[..., 0, 1] * hess[..., 1, 0]
    return hess, inv, det_hess


@dataclass(frozen=True)
class MetricSample:
    x: np.ndarray
    hr: HalfPlanePoint
    u: float
    hess: np.ndarray
    hess_inv: np.ndarray
    det_hess: float
    V: float


def metric_sample(c, p):
    H, r = p
    hess, inv, det = hessian(c, H, r)
    return MetricSample(x=action_coords(c, H, r), hr=HalfPlanePoint(float(H), float(r)),
                        u=potential_value(c, p), hess=hess, hess_inv=inv,
                        det_hess=float(det), V=float(c.xi(H, r).V))


@dataclass(frozen=True)
class MetricGrid:
    """Metric data on a list of half-plane points, one row per point."""

    H: np.ndarray
    r: np.ndarray
    x: np.ndarray
    u: np.ndarray
    hess: np.ndarray
    hess_inv: np.ndarray
    det_hess: np.ndarray
    V: np.ndarray

    def __len__(self):
        return self.H.size

    def rows(self):
        for k in range(len(self)):
            h = self.hess[k]
            yield (self.H[k], self.r[k], self.x[k, 0], self.x[k, 1], self.u[k],
                   h[0, 0], h[0, 1], h[1, 1], self.det_hess[k], self.V[k])

    def positive_definite(self):
        return (self.hess[:, 0, 0] > 0) & (self.det_hess > 0)


def metric_grid(c, H, r):
    H = np.ravel(np.asarray(H, dtype=float))
    r = np.ravel(np.asarray(r, dtype=float))
    hess, inv, det = hessian(c, H, r)
    return MetricGrid(H=H, r=r, x=action_coords(c, H, r), u=potential_values(c, H, r),
                      hess=hess, hess_inv=inv, det_hess=det, V=c.xi(H, r).V)


def write_grid_csv(grid, path):
    """CSV with the fixed column order; floats use shortest round-trip repr."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in grid.rows():
            w.writerow([repr(float(v)) for v in row])


@dataclass(frozen=True)
class RegularityReport:
    """Approach of a boundary edge or vertex along shrinking ``r``."""

    kind: str
    index: tuple
    H: tuple
    r: tuple
    u_minus_model: tuple
    hess_minus_model: tuple
    delta: tuple
    bounded: bool
    delta_in_bracket: bool

    @property
    def passed(self):
        return self.bounded and self.delta_in_bracket

    def as_dict(self):
        return {"kind": self.kind, "index": list(self.index), "H": list(self.H),
                "r": list(self.r), "u_minus_model": list(self.u_minus_model),
                "hess_minus_model": list(self.hess_minus_model),
                "delta": list(self.delta), "bounded": self.bounded,
                "delta_in_bracket": self.delta_in_bracket, "passed": self.passed}


def _model_terms(c, ell, edges):
    N = c.polygon.normal_array[list(edges)]
    ell = ell[..., list(edges)]
    u = 0.5 * np.sum(ell * np.log(ell), axis=-1)
    hess = 0.5 * np.einsum("...i,ij,ik->...jk", 1.0 / ell, N, N)
    return u, hess


def _approach(c, kind, index, edges, H, r):
    H = np.asarray(H, dtype=float)
    r = np.asarray(r, dtype=float)
    ell = edge_distances(c, H, r)
    u = potential_values(c, H, r)
    u_model, hess_model = _model_terms(c, ell, edges)
    hess = hessian(c, H, r)[0]
    du = u - u_model
    dh = np.max(np.abs(hess - hess_model), axis=(-1, -2))
    delta = r * r / np.prod(ell, axis=-1)
    # smooth remainder: successive changes of u - u_model shrink, Hessian gap stays O(1)
    steps = np.abs(np.diff(du))
    bounded = bool(np.all(np.isfinite(du)) and np.all(np.isfinite(dh))
                   and np.all(steps[1:] <= 3 * steps[:-1] + 1e-9)
                   and dh[-1] <= 3 * max(dh[0], 1.0))
    in_bracket = bool(np.all(delta > 0) and np.all(np.isfinite(delta))
                      and delta.max() <= 4 * delta.min())
    return RegularityReport(kind=kind, index=tuple(index), H=tuple(map(float, H)),
                            r=tuple(map(float, r)), u_minus_model=tuple(map(float, du)),
                            hess_minus_model=tuple(map(float, dh)),
                            delta=tuple(map(float, delta)), bounded=bounded,
                            delta_in_bracket=in_bracket)


def _edge_midpoint(c, j):
    lo, hi = edge_interval(c, j)
    if np.isfinite(lo) and np.isfinite(hi):
        return 0.5 * (lo + hi)
    return lo + 1.0 if np.isfinite(lo) else hi - 1.0


def boundary_regularity(c, j, H=None, rs=(1e-2, 1e-3, 1e-4)):
    """Compare ``u`` with the Guillemin potential while approaching edge ``E_j``.

    Reports ``u - u_P`` and ``|Hess u - Hess u_P|`` (both must stay bounded)
    and ``delta = r^2 / prod_i l_i`` (must stay in a positive bracket).
    """
    H0 = _edge_midpoint(c, j) if H is None else float(H)
    rs = np.asarray(rs, dtype=float)
    return _approach(c, "edge", (j,), range(c.d), np.full_like(rs, H0), rs)


def vertex_regularity(c, j, rs=(1e-2, 1e-3, 1e-4), angle=np.pi / 3):
    """Approach the vertex ``E_j cap E_{j+1}`` (image of ``H = -a_j``) along a ray.

    The model is ``1/2 (l_j log l_j + l_{j+1} log l_{j+1})``; ``delta`` still
    uses all edge functions.
    """
    rs = np.asarray(rs, dtype=float)
    Hv = -c.a[j - 1]
    return _approach(c, "vertex", (j, j + 1), (j - 1, j),
                     Hv + rs * np.cos(angle), rs * np.sin(angle))


def guillemin_difference(c, H, r):
    """``u - u_P`` at interior points, for gauge-aware comparisons."""
    return potential_values(c, H, r) - guillemin_potential(c.polygon, action_coords(c, H, r))
