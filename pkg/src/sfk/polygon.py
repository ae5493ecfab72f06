"""Unbounded moment polygons.

A polygon is stored as its ordered primitive inward normals
``nu_1, ..., nu_d`` together with offsets ``lambda_i`` so that

    P = {x : <x, nu_i> + lambda_i >= 0 for all i}.

Edges ``E_1`` and ``E_d`` are the unbounded ones and consecutive normals
satisfy ``det(nu_{i-1}, nu_i) = -1``.  Edge indices in the public API are
1-based, matching the usual ``nu_1 ... nu_d`` labelling.
"""

from dataclasses import dataclass
from math import gcd

import numpy as np

from .errors import (BadAdjacentDeterminant, BadGauge, EmptyOrDegenerateRegion,
                     NonPrimitiveNormal, NotStrictlyUnbounded, PointNotInterior,
                     SFKError)

__all__ = [
    "MomentPolygon", "PolygonClass", "det2", "validate", "classify",
    "edge_function", "edge_values", "guillemin_potential", "normalize_sl2z",
    "transform_normals",
]

# relative slack when testing that a vertex lies strictly inside the other half-planes
_VERTEX_RTOL = 1e-12


def det2(u, v):
    """Determinant of the 2x2 matrix with columns ``u`` and ``v``.

    Integer inputs give an exact (arbitrary precision) integer.
    """
    return u[0] * v[1] - u[1] * v[0]


@dataclass(frozen=True)
class MomentPolygon:
    """A validated unbounded moment polygon.

    Use :func:`validate` to construct one.  ``shift`` records the translation
    that was applied to bring the first vertex to the origin, i.e. the
    validated polygon is the input polygon in coordinates ``x - shift``.
    """

    normals: tuple
    offsets: tuple
    name: str = ""
    shift: tuple = (0.0, 0.0)

    @property
    def d(self):
        return len(self.normals)

    @property
    def normal_array(self):
        return np.array(self.normals, dtype=float)

    @property
    def offset_array(self):
        return np.array(self.offsets, dtype=float)

    def vertices(self):
        """Vertices ``v_j = E_j cap E_{j+1}`` for ``j = 1, ..., d-1``."""
        return [_vertex(self.normals[j], self.normals[j + 1],
                        self.offsets[j], self.offsets[j + 1])
                for j in range(self.d - 1)]

    def contains(self, x, strict=True):
        vals = edge_values(self, x)
        return bool(np.all(vals > 0)) if strict else bool(np.all(vals >= 0))

    def __str__(self):
        label = self.name or "polygon"
        return f"{label}: normals={list(self.normals)} offsets={list(self.offsets)}"


@dataclass(frozen=True)
class PolygonClass:
    unbounded: bool
    strictly_unbounded: bool
    c1_zero: bool

    def describe(self):
        kind = "strictly_unbounded" if self.strictly_unbounded else "unbounded"
        return f"{kind}, c1_zero={'true' if self.c1_zero else 'false'}"


def _vertex(n1, n2, lam1, lam2):
    # solves <v, n1> = -lam1, <v, n2> = -lam2; det(n1, n2) = -1 makes this exact
    return (n2[1] * lam1 - n1[1] * lam2, -n2[0] * lam1 + n1[0] * lam2)


def _as_normal(n, index):
    try:
        a, b = n
    except (TypeError, ValueError):
        raise SFKError(f"normal {index} must be a pair of integers, got {n!r}") from None
    if int(a) != a or int(b) != b:
        raise SFKError(f"normal {index} must have integer entries, got {n!r}")
    return int(a), int(b)


def validate(normals, offsets, *, name="", translate=False):
    """Check the polygon invariants and return a :class:`MomentPolygon`.

    Parameters
    ----------
    normals : sequence of integer pairs
        Inward primitive normals ``nu_1, ..., nu_d`` in boundary order.
    offsets : sequence of float
        ``lambda_1, ..., lambda_d``.
    name : str
        Optional label carried along for reports.
    translate : bool
        If true, arbitrary offsets are accepted and the polygon is translated
        so that the first vertex sits at the origin (``lambda_1 = lambda_2 = 0``).
        Otherwise non-zero ``lambda_1`` or ``lambda_2`` raise :class:`BadGauge`.

    Raises
    ------
    NonPrimitiveNormal, BadAdjacentDeterminant, BadGauge, EmptyOrDegenerateRegion
    """
    normals = list(normals)
    offsets = [float(t) for t in offsets]
    if not normals or len(normals) != len(offsets):
        raise SFKError("normals and offsets must be nonempty lists of equal length")
    normals = [_as_normal(n, i + 1) for i, n in enumerate(normals)]
    if len(normals) < 2:
        raise EmptyOrDegenerateRegion("an unbounded moment polygon needs at least two edges")

    for i, (a, b) in enumerate(normals, start=1):
        if gcd(abs(a), abs(b)) != 1:
            raise NonPrimitiveNormal(i, (a, b))
    for i in range(1, len(normals)):
        value = det2(normals[i - 1], normals[i])
        if value != -1:
            raise BadAdjacentDeterminant(i + 1, value)

    shift = (0.0, 0.0)
    if translate:
        v1 = _vertex(normals[0], normals[1], offsets[0], offsets[1])
        offsets = [n[0] * v1[0] + n[1] * v1[1] + lam for n, lam in zip(normals, offsets)]
        offsets[0] = offsets[1] = 0.0
        shift = (float(v1[0]), float(v1[1]))
    elif offsets[0] != 0.0 or offsets[1] != 0.0:
        raise BadGauge(offsets)

    _check_region(normals, offsets)
    return MomentPolygon(tuple(normals), tuple(offsets), name=name, shift=shift)


def _check_region(normals, offsets):
    d = len(normals)
    scale = 1.0 + max(abs(t) for t in offsets)
    for j in range(d - 1):
        v = _vertex(normals[j], normals[j + 1], offsets[j], offsets[j + 1])
        for i, (n, lam) in enumerate(zip(normals, offsets)):
            if i in (j, j + 1):
                continue
            val = n[0] * v[0] + n[1] * v[1] + lam
            if not val > _VERTEX_RTOL * scale:
                raise EmptyOrDegenerateRegion(
                    f"vertex E_{j + 1} cap E_{j + 2} = {v} violates edge {i + 1} "
                    f"(l_{i + 1} = {val:g}); bounded edges must have positive length")
    # the unbounded edges must be rays inside every half-plane
    first = (normals[0][1], -normals[0][0])
    last = (-normals[-1][1], normals[-1][0])
    for label, t in (("E_1", first), (f"E_{d}", last)):
        for i, n in enumerate(normals):
            if n[0] * t[0] + n[1] * t[1] < 0:
                raise EmptyOrDegenerateRegion(
                    f"edge {label} is not unbounded: its ray leaves half-plane {i + 1} "
                    "(compact polygons are not supported)")


def classify(P):
    """Unboundedness type and first-Chern-class test of a valid polygon."""
    nus = P.normals
    strictly = det2(nus[-1], nus[0]) != 0
    c1_zero = all(det2(nus[j - 1], nus[j + 1]) == -2 for j in range(1, P.d - 1))
    return PolygonClass(unbounded=True, strictly_unbounded=strictly, c1_zero=c1_zero)


def edge_function(P, i, x):
    """``l_i(x) = <x, nu_i> + lambda_i`` for the 1-based edge index ``i``."""
    if not 1 <= i <= P.d:
        raise IndexError(f"edge index {i} out of range 1..{P.d}")
    a, b = P.normals[i - 1]
    return a * x[0] + b * x[1] + P.offsets[i - 1]


def edge_values(P, x):
    """All ``l_i(x)`` at once; ``x`` has shape ``(..., 2)``, result ``(..., d)``."""
    x = np.asarray(x, dtype=float)
    return x @ P.normal_array.T + P.offset_array


def guillemin_potential(P, x):
    """Canonical potential ``1/2 sum_i l_i log l_i`` at an interior point."""
    ell = edge_values(P, x)
    if np.any(ell <= 0):
        raise PointNotInterior(f"point {tuple(np.ravel(x))} is not in the interior of P")
    return 0.5 * np.sum(ell * np.log(ell), axis=-1)


def _ext_gcd(a, b):
    if b == 0:
        return (1 if a >= 0 else -1), 0
    x, y = _ext_gcd(b, a % b)
    return y, x - (a // b) * y


def transform_normals(P, M, name=None):
    """Apply ``M`` in SL(2, Z) to every normal.

    The region is mapped by ``x -> M^{-T} x`` which fixes the origin, so the
    offsets are unchanged.
    """
    (m11, m12), (m21, m22) = M
    if m11 * m22 - m12 * m21 != 1:
        raise SFKError("transformation must lie in SL(2, Z)")
    new = [(m11 * a + m12 * b, m21 * a + m22 * b) for a, b in P.normals]
    return validate(new, P.offsets, name=P.name if name is None else name)


def normalize_sl2z(P):
    """Bring a strictly unbounded polygon to ``nu_1 = (0, 1)``, ``nu_2 = (1, 0)``.

    Returns the normalized polygon and the integer matrix ``M`` with
    ``nu_i' = M nu_i``.
    """
    if not classify(P).strictly_unbounded:
        raise NotStrictlyUnbounded(f"{P.name or 'polygon'} has parallel unbounded edges")
    alpha, beta = P.normals[0]
    p, q = _ext_gcd(alpha, beta)
    if p * alpha + q * beta == -1:
        p, q = -p, -q
    # rows (beta, -alpha), (p, q): sends nu_1 to (0, 1) with det 1
    M = [[beta, -alpha], [p, q]]
    a2, b2 = P.normals[1]
    k = -(p * a2 + q * b2)
    M = [M[0], [M[1][0] + k * M[0][0], M[1][1] + k * M[0][1]]]
    return transform_normals(P, M), ((M[0][0], M[0][1]), (M[1][0], M[1][1]))
