"""Numerical checks of the metric's curvature, Ricci and asymptotic properties."""

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .chart import action_coords, action_jacobian, invert_many
from .errors import NotStrictlyUnbounded
from .harmonic import NutParameter, half_plane_terms
from .polygon import classify, det2, edge_values
from .potential import hessian

__all__ = [
    "CurvatureReport", "fd_steps", "scalar_curvature", "curvature_report", "interior_grid",
    "RicciClassification", "ricci_classify", "ricci_numeric_check",
    "AsymptoticReport", "v_model", "asymptotic_V", "killing_norm", "KillingReport",
    "killing_report", "XiRangeReport", "xi_range_probe", "to_json",
]

FD_STEP = 1e-2
CURVATURE_TOL = 1e-5
_EPS = np.finfo(float).eps


def interior_grid(c, n_H=5, n_r=5):
    """Half-plane grid around the chart parameters, scaled by ``1 + span(a)``."""
    H = c.center + c.scale * np.linspace(-1.5, 1.5, n_H)
    r = c.scale * np.geomspace(0.3, 2.5, n_r)
    HH, RR = np.meshgrid(H, r, indexing="ij")
    return HH.ravel(), RR.ravel()


# ---------------------------------------------------------------- curvature

def _hess_inv_at(c, X, seed):
    H, r = invert_many(c, X, hint=seed)
    return hessian(c, H, r)[1]


_DIRECTIONS = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, -1.0]])
_TAPS = (2, 1, -1, -2)
_WEIGHTS = np.array([-1.0, 16.0, 16.0, -1.0]) / 12.0


def _s_with_step(c, x, H, r, h):
    """``-(d11 u^11 + 2 d12 u^12 + d22 u^22)`` by fourth-order central differences.

    Second directional derivatives use the five-point rule along ``e_1``,
    ``e_2`` and the diagonals; ``d12 = (D_{e1+e2} - D_{e1-e2}) / 4``.
    """
    n = x.shape[0]
    offsets = [k * h[:, None] * v for v in _DIRECTIONS for k in _TAPS]
    stencil = np.concatenate([x + o for o in offsets])
    # seed each stencil point with a first-order Newton prediction from the centre
    Jinv = np.linalg.inv(action_jacobian(c, H, r))
    dhr = np.concatenate([np.einsum("nij,nj->ni", Jinv, o) for o in offsets])
    m = len(offsets)
    seed = (np.tile(H, m) + dhr[:, 0], np.maximum(np.tile(r, m) + dhr[:, 1], 0.5 * np.tile(r, m)))
    U = _hess_inv_at(c, stencil, seed).reshape(len(_DIRECTIONS), len(_TAPS), n, 2, 2)
    U0 = hessian(c, H, r)[1]

    def second(direction, j, k):
        ring = np.tensordot(_WEIGHTS, U[direction, :, :, j, k], axes=1)
        return (ring - 2.5 * U0[:, j, k]) / h ** 2

    d11 = second(0, 0, 0)
    d22 = second(1, 1, 1)
    d12 = (second(2, 0, 1) - second(3, 0, 1)) / 4
    return -(d11 + 2 * d12 + d22)


def fd_steps(c, x, H, r, fd_step=FD_STEP):
    """Per-point step ``fd_step * min(min_i l_i, L sigma_min(J))``.

    ``L = min(r, min_i rho_i)`` is the length on which the closed-form
    entries vary in the half-plane and ``sigma_min(J)`` converts it to the
    shortest corresponding displacement in ``x``; with a nut the map is
    strongly anisotropic far out, and ``l_i`` alone overestimates the scale.
    """
    ell = np.min(edge_values(c.polygon, x), axis=-1)
    sigma = np.linalg.svd(action_jacobian(c, H, r), compute_uv=False)[..., -1]
    L = np.minimum(r, np.min(half_plane_terms(c.a, H, r)["rho"], axis=-1))
    return fd_step * np.minimum(ell, L * sigma)


def scalar_curvature(c, x, h=None, fd_step=FD_STEP):
    """Scalar curvature at interior points ``x`` (shape ``(n, 2)``).

    ``h`` defaults to :func:`fd_steps`.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    H, r = invert_many(c, x)
    if h is None:
        h = fd_steps(c, x, H, r, fd_step)
    h = np.broadcast_to(np.asarray(h, dtype=float), H.shape).copy()
    return _s_with_step(c, x, H, r, h)


@dataclass(frozen=True)
class CurvatureReport:
    points: np.ndarray
    s_values: np.ndarray
    s_coarse: np.ndarray
    max_abs_s: float
    max_richardson_gap: float
    fd_step: float
    tol: float = CURVATURE_TOL

    @property
    def passed(self):
        return self.max_abs_s < self.tol and self.max_richardson_gap < self.tol

    def as_dict(self):
        return {"max_abs_s": self.max_abs_s, "max_richardson_gap": self.max_richardson_gap,
                "fd_step": self.fd_step, "tol": self.tol, "passed": self.passed,
                "points": self.points.tolist(), "s_values": self.s_values.tolist()}


def curvature_report(c, x=None, fd_step=FD_STEP, tol=CURVATURE_TOL):
    """Scalar curvature at step ``h`` and ``h/2`` with the Richardson gap.

    Reported values are the ``h/2`` estimates.
    """
    if x is None:
        x = action_coords(c, *interior_grid(c))
    x = np.atleast_2d(np.asarray(x, dtype=float))
    H, r = invert_many(c, x)
    h = fd_steps(c, x, H, r, fd_step)
    s1 = _s_with_step(c, x, H, r, h)
    s2 = _s_with_step(c, x, H, r, h / 2)
    return CurvatureReport(points=x, s_values=s2, s_coarse=s1,
                           max_abs_s=float(np.max(np.abs(s2))),
                           max_richardson_gap=float(np.max(np.abs(s1 - s2))),
                           fd_step=fd_step, tol=tol)


# ---------------------------------------------------------------- Ricci

@dataclass(frozen=True)
class RicciClassification:
    """``eta`` is the unique candidate fixed by ``eta . nu_1 = eta . nu_2 = 1``;
    ``ricci_flat`` says whether it satisfies every constraint."""

    ricci_flat: bool
    eta: tuple
    reason: str

    def as_dict(self):
        return {"ricci_flat": self.ricci_flat, "eta": [float(t) for t in self.eta],
                "reason": self.reason}


def ricci_classify(P, nu=None, tol=1e-12):
    nu = NutParameter.of(nu)
    nu.check(P)
    (a1, b1), (a2, b2) = P.normals[0], P.normals[1]
    det = Fraction(a1 * b2 - b1 * a2)
    # solve [[a1, b1], [a2, b2]] eta = (1, 1) exactly
    eta = (Fraction(b2 - b1) / det, Fraction(a1 - a2) / det)
    for j, (a, b) in enumerate(P.normals, start=1):
        val = eta[0] * a + eta[1] * b
        if val != 1:
            return RicciClassification(False, eta, f"eta . nu_{j} = {val} != 1")
    dot = float(eta[0]) * nu.alpha + float(eta[1]) * nu.beta
    if abs(dot) > tol:
        return RicciClassification(False, eta, f"eta . nu = {dot:g} != 0")
    return RicciClassification(True, eta, "eta . nu_j = 1 for all j and eta . nu = 0")


def ricci_numeric_check(c, eta, H=None, r=None):
    """``max |grad_(H, r) (eta . xi - log r)|`` over a grid; zero iff Ricci-flat."""
    if H is None:
        H, r = interior_grid(c, 7, 7)
    H = np.atleast_1d(np.asarray(H, dtype=float))
    r = np.atleast_1d(np.asarray(r, dtype=float))
    g = c.xi(H, r).dxi
    eta = np.array([float(t) for t in eta])
    dH = g[..., 0] @ eta
    dr = g[..., 1] @ eta - 1.0 / r
    return float(np.max(np.hypot(dH, dr)))


# ---------------------------------------------------------------- asymptotics

def v_model(c, H, r):
    """Large-distance model of ``V`` and its label.

    ``nu = 0``: ``det(nu_d, nu_1) / (2 rho)``.  Otherwise
    ``det(nu, nu_1)(1 - w) + det(nu, nu_d) w + det(nu_d, nu_1) / (2 rho)`` with
    ``w = r^2 / (2 rho (H + rho)) = (rho - H) / (2 rho)``.
    """
    H = np.asarray(H, dtype=float)
    r = np.asarray(r, dtype=float)
    P = c.polygon
    rho = np.hypot(H, r)
    base = det2(P.normals[-1], P.normals[0]) / (2 * rho)
    if c.nu.is_zero:
        return "Euclidean", base
    first, last = c.nu.cone_dets(P)
    w = (rho - H) / (2 * rho)
    return "TaubNUT", first * (1 - w) + last * w + base


@dataclass(frozen=True)
class AsymptoticReport:
    model: str
    samples: list                # (angle, rho, V, V_model) per sample
    scaled_residuals: list
    noise_floor: list
    bounded: bool
    lower_bound_ok: bool
    growth: list = field(default_factory=list)

    @property
    def passed(self):
        return self.bounded and self.lower_bound_ok

    def as_dict(self):
        return {"model": self.model,
                "samples": [list(map(float, s)) for s in self.samples],
                "scaled_residuals": [float(t) for t in self.scaled_residuals],
                "growth": [float(t) for t in self.growth],
                "bounded": self.bounded, "lower_bound_ok": self.lower_bound_ok,
                "passed": self.passed}


DEFAULT_ANGLES = (np.pi / 8, np.pi / 4, 3 * np.pi / 8, np.pi / 2)
DEFAULT_RHOS = (1e2, 1e3, 1e4)


def asymptotic_V(c, angles=DEFAULT_ANGLES, rhos=DEFAULT_RHOS):
    """Compare ``V = r det D xi`` with its model along rays ``H = rho cos t``, ``r = rho sin t``.

    ``bounded``: on every ray the last ``rho^2 |V - V_model|`` is at most 3
    times the first (or the rounding floor).  ``lower_bound_ok``: for an
    interior nut, ``V`` stays positive and above a third of its first value.
    """
    P = c.polygon
    if not classify(P).strictly_unbounded:
        raise NotStrictlyUnbounded(f"{P.name or 'polygon'} has parallel unbounded edges")
    angles = np.asarray(angles, dtype=float)
    rhos = np.asarray(rhos, dtype=float)
    T, R = np.meshgrid(angles, rhos, indexing="ij")
    H, r = R * np.cos(T), R * np.sin(T)
    V = c.xi(H, r).V
    model, Vm = v_model(c, H, r)
    scaled = R ** 2 * np.abs(V - Vm)
    floor = 64 * _EPS * R ** 2 * np.maximum.reduce([np.abs(V), np.abs(Vm), 1 / R])
    first = np.maximum(scaled[:, 0], floor[:, 0])
    last = scaled[:, -1]
    # rounding alone grows with rho, so anything under the floor counts as bounded
    bounded = bool(np.all((last <= 3 * first) | (last <= floor[:, -1])))
    if c.nu.is_interior(P) and not c.nu.is_zero:
        lower = bool(np.all(V > 0) and np.all(V[:, -1] >= V[:, 0] / 3))
    else:
        lower = True
    samples = [(t, rho, v, vm) for t, rho, v, vm in
               zip(T.ravel(), R.ravel(), V.ravel(), Vm.ravel())]
    return AsymptoticReport(model=model, samples=samples,
                            scaled_residuals=list(scaled.ravel()),
                            noise_floor=list(floor.ravel()), bounded=bounded,
                            lower_bound_ok=lower, growth=list(np.maximum(last, floor[:, -1]) / first))


# ---------------------------------------------------------------- Killing fields

def killing_norm(c, v, H, rs):
    """``v^T Hess^{-1}(u) v`` at ``(H, r)`` for each ``r``."""
    v = np.asarray(v, dtype=float)
    rs = np.asarray(rs, dtype=float)
    inv = hessian(c, np.full_like(rs, float(H)), rs)[1]
    return [float(t) for t in np.einsum("i,nij,j->n", v, inv, v)]


@dataclass(frozen=True)
class KillingReport:
    v: tuple
    r: tuple
    norms: tuple
    parallel_to_nu: bool
    passed: bool

    def as_dict(self):
        return {"v": list(self.v), "r": list(self.r), "norms": list(self.norms),
                "parallel_to_nu": self.parallel_to_nu, "passed": self.passed}


def killing_report(c, v, H=1.0, rs=DEFAULT_RHOS):
    """Bounded (within a 3x bracket) for ``v`` parallel to ``nu``; otherwise
    growth ``norm(r_last)/norm(r_first)`` within 20% of ``(r_last/r_first)^2``."""
    norms = killing_norm(c, v, H, rs)
    parallel = abs(det2(tuple(map(float, v)), (c.nu.alpha, c.nu.beta))) < 1e-12
    if parallel:
        lo, hi = min(norms), max(norms)
        ok = lo >= 0 and (hi == 0 or (lo > 0 and hi <= 3 * lo))
    else:
        ratio = norms[-1] / norms[0]
        expect = (rs[-1] / rs[0]) ** 2
        ok = abs(ratio / expect - 1) <= 0.2
    return KillingReport(tuple(map(float, v)), tuple(map(float, rs)), tuple(norms),
                         parallel, bool(ok))


# ---------------------------------------------------------------- xi range

@dataclass(frozen=True)
class XiRangeReport:
    slope: tuple
    expected: tuple
    drift_nonzero: bool
    strictly_unbounded: bool

    @property
    def complete(self):
        return self.drift_nonzero

    @property
    def consistent(self):
        return self.drift_nonzero == self.strictly_unbounded

    def as_dict(self):
        return {"slope": list(self.slope), "expected": list(self.expected),
                "drift_nonzero": self.drift_nonzero,
                "strictly_unbounded": self.strictly_unbounded,
                "complete": self.complete, "consistent": self.consistent}


def xi_range_probe(c, rs=DEFAULT_RHOS, Hs=(-1.0, 0.0, 1.0), tol=0.25):
    """Least-squares slope of ``xi`` against ``log r`` at fixed ``H``.

    The expected drift is ``(nu_1 + nu_d) / 2``; it vanishes exactly when the
    unbounded edges are parallel and otherwise has norm at least ``1/2``, so
    the default threshold sits halfway.
    """
    rs = np.asarray(rs, dtype=float)
    slopes = []
    for H in Hs:
        xi = c.xi(np.full_like(rs, H), rs).xi
        A = np.stack([np.log(rs), np.ones_like(rs)], axis=-1)
        coef = np.linalg.lstsq(A, xi, rcond=None)[0]
        slopes.append(coef[0])
    slope = np.mean(slopes, axis=0)
    N = c.polygon.normal_array
    expected = 0.5 * (N[0] + N[-1])
    return XiRangeReport(tuple(map(float, slope)), tuple(map(float, expected)),
                         bool(np.linalg.norm(slope) > tol),
                         classify(c.polygon).strictly_unbounded)


def to_json(report):
    """Serialize a report (or dict of reports) with stable key order."""
    def conv(obj):
        if hasattr(obj, "as_dict"):
            return conv(obj.as_dict())
        if isinstance(obj, dict):
            return {k: conv(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [conv(v) for v in obj]
        if isinstance(obj, (np.floating, np.integer)):
            return obj.item()
        if isinstance(obj, np.ndarray):
            return conv(obj.tolist())
        if isinstance(obj, np.bool_):
            return bool(obj)
        if isinstance(obj, Fraction):
            return float(obj)
        return obj
    return json.dumps(conv(report), indent=2)
