"""Reference polygons and nut vectors used by the tests, demos and CLI."""

from dataclasses import dataclass

from .polygon import det2, validate

__all__ = ["CorpusEntry", "quadrant", "o_minus", "a_series", "five_edge", "s2r2",
           "offsets_from_a", "interior_nuts", "corpus", "NUT_WEIGHTS"]

# (s, t) in nu = s (-nu_1) + t nu_d; both weights positive keeps nu interior
NUT_WEIGHTS = ((1.0, 1.0), (0.3, 0.7), (0.8, 0.2))


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    polygon: object
    nuts: tuple


def offsets_from_a(normals, a):
    """Offsets ``lambda`` whose chart parameters are ``a`` (with ``a_1 = 0``)."""
    lam = [0.0, 0.0]
    for j in range(2, len(normals)):
        total = 0.0
        for i in range(j):
            diff = (normals[i + 1][0] - normals[i][0], normals[i + 1][1] - normals[i][1])
            total += a[i] * det2(diff, normals[j])
        lam.append(total)
    return lam


def quadrant():
    return validate([(0, 1), (1, 0)], [0, 0], name="quadrant")


def o_minus(p, a=1.0):
    """Total space of ``O(-p)``; ``a`` is the length parameter of the bounded edge."""
    return validate([(0, 1), (1, 0), (p, -1)], [0, 0, a], name=f"O(-{p})")


def a_series(p, a=None):
    """Minimal resolution of the ``A_{p-1}`` singularity; ``d = p + 1`` edges."""
    normals = [(j - 1, -(j - 2)) for j in range(1, p + 2)]
    a = [float(i) for i in range(p)] if a is None else list(a)
    return validate(normals, offsets_from_a(normals, a), name=f"A_{p}")


def five_edge(a=(0.0, 1.0, 2.0, 3.5)):
    """Five edges built from ``nu_{j+1} = b_j nu_j - nu_{j-1}``, ``b = (2, 3, 2)``;
    the middle self-intersection ``-3`` makes ``c_1 != 0``."""
    normals = [(0, 1), (1, 0), (2, -1), (5, -3), (8, -5)]
    return validate(normals, offsets_from_a(normals, a), name="five-edge")


def s2r2(a=1.0):
    """``S^2 x R^2``: parallel unbounded edges, strip of width ``2a``."""
    return validate([(0, 1), (1, 0), (0, -1)], [0, 0, 2 * a], name="S2xR2")


def interior_nuts(P, weights=NUT_WEIGHTS):
    n1, nd = P.normals[0], P.normals[-1]
    return tuple((t * nd[0] - s * n1[0], t * nd[1] - s * n1[1]) for s, t in weights)


def corpus():
    """Quadrant, ``O(-p)`` for ``p = 1..4``, ``A_p`` for ``p = 2..4`` and the
    five-edge polygon, each with ``nu = 0`` and three interior nuts."""
    polys = [quadrant()] + [o_minus(p) for p in range(1, 5)]
    polys += [a_series(p) for p in range(2, 5)] + [five_edge()]
    return [CorpusEntry(P.name, P, (None,) + interior_nuts(P)) for P in polys]
