"""Closed-form potentials of the worked example families.

Each oracle is written in action coordinates and solves its own auxiliary
algebraic system, independently of the generic chart, so that gradients
can be compared with ``xi`` obtained by chart inversion.

Families (normals in standard position ``nu_1 = (0,1)``, ``nu_2 = (1,0)``):

* flat: the quadrant, ``d = 2``;
* ``O(-p)``: third normal ``(p, -1)``, offset ``lambda_3 = a``;
* ``A_p``: normals ``(j-1, -(j-2))``, ``j = 1 .. p+1``, chart parameters
  ``0 = a_1 < a_2 < ... < a_p``;
* Taub-NUT on ``O(-2)`` with parameters ``(alpha, beta)`` entering as
  ``2 xi = ... + (alpha, beta) H``;
* ``S^2 x R^2``: normals ``(0,1), (1,0), (0,-1)``, strip width ``2a``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, NoOracleForPolygon, RootNotFound
from .polygon import classify, normalize_sl2z

__all__ = [
    "QuarticAux", "flat_potential", "flat_gradient", "op_potential", "op_gradient",
    "ap_solve", "ap_solve_polynomial", "ap_potential", "ap_gradient",
    "taubnut_solve", "taubnut_solve_newton", "taubnut_potential", "taubnut_gradient",
    "s2r2_potential", "s2r2_gradient", "fd_gradient", "OracleMatch", "detect_oracle",
    "detect_oracle_any",
]


@dataclass(frozen=True)
class QuarticAux:
    """Auxiliary variables ``2u = H + rho``, ``2v = -H + rho`` and, per bounded
    edge parameter ``a_i``, ``A_i = S_i + (u - v + a_i)``, ``B_i = S_i - (u - v + a_i)``
    with ``S_i = sqrt((u - v + a_i)^2 + 4uv)``."""

    u: float
    v: float
    A: tuple = ()
    B: tuple = ()

    @classmethod
    def build(cls, u, v, a=()):
        k = [u - v + ai for ai in a]
        S = [np.sqrt(ki * ki + 4 * u * v) for ki in k]
        # B_i = 4uv / A_i avoids cancellation when k_i > 0
        A = [s + ki if ki >= 0 else 4 * u * v / (s - ki) for s, ki in zip(S, k)]
        B = [4 * u * v / (s + ki) if ki >= 0 else s - ki for s, ki in zip(S, k)]
        return cls(float(u), float(v), tuple(map(float, A)), tuple(map(float, B)))

    @property
    def H(self):
        return self.u - self.v

    @property
    def r(self):
        return 2.0 * np.sqrt(self.u * self.v)

    def identity_residual(self, a=()):
        """Largest violation of the defining identities (scaled)."""
        res = [abs(4 * self.u * self.v - self.r ** 2) / (1 + self.r ** 2)]
        for ai, A, B in zip(a, self.A, self.B):
            k = self.u - self.v + ai
            S = np.sqrt(k * k + 4 * self.u * self.v)
            res.append(abs(A - B - 2 * k) / (1 + abs(k)))
            res.append(abs(A + B - 2 * S) / (1 + S))
            res.append(abs(A * B - 4 * self.u * self.v) / (1 + 4 * self.u * self.v))
        return max(res)


def _xlogx(t):
    return t * np.log(t)


def _require(cond, what):
    if not np.all(cond):
        raise DomainError(f"point outside the oracle's domain: {what}")


def flat_potential(x):
    x1, x2 = np.asarray(x, dtype=float)
    _require((x1 > 0) & (x2 > 0), "x_1, x_2 > 0")
    return 0.5 * (x1 * np.log(2 * x1) + x2 * np.log(2 * x2) - x1 - x2)


def flat_gradient(x):
    x1, x2 = np.asarray(x, dtype=float)
    _require((x1 > 0) & (x2 > 0), "x_1, x_2 > 0")
    return np.array([0.5 * np.log(2 * x1), 0.5 * np.log(2 * x2)])


def op_potential(p, a, x):
    """Potential on ``O(-p)``: half of

    ``x_1 log x_1 + x_2 log x_2 + (p x_1 - x_2 + a) log(p x_1 - x_2 + a)
    + (p - 1)(x_1 + a) log(x_1 + a) - (p x_1 + a) log(p x_1 + a) - p x_1 + p x_1 log 2``.
    """
    x1, x2 = np.asarray(x, dtype=float)
    ell3 = p * x1 - x2 + a
    _require((x1 > 0) & (x2 > 0) & (ell3 > 0), "x_1, x_2, p x_1 - x_2 + a > 0")
    two_u = (_xlogx(x1) + _xlogx(x2) + _xlogx(ell3) + (p - 1) * _xlogx(x1 + a)
             - _xlogx(p * x1 + a) - p * x1 + p * x1 * np.log(2))
    return 0.5 * two_u


def op_gradient(p, a, x):
    x1, x2 = np.asarray(x, dtype=float)
    ell3 = p * x1 - x2 + a
    _require((x1 > 0) & (x2 > 0) & (ell3 > 0), "x_1, x_2, p x_1 - x_2 + a > 0")
    g1 = (np.log(x1) + (p - 1) * np.log(x1 + a) + p * np.log(ell3)
          - p * np.log(p * x1 + a) + p * np.log(2))
    g2 = np.log(x2) - np.log(ell3)
    return 0.5 * np.array([g1, g2])


# ---------------------------------------------------------------- A_p family

def _ap_residual(v, c, x2, a):
    # 2v + sum_i (S_i - k_i) - 2 x_2 with u = v + c
    w = 4 * v * (v + c)
    total = 2 * v - 2 * x2
    for ai in a:
        k = c + ai
        S = np.sqrt(k * k + w)
        if k >= 0:
            total += w / (S + k) if S + k > 0 else 0.0
        else:
            total += S - k
    return total


def ap_solve(a, x):
    """``(u, v)`` for the ``A_p`` family by bracketed root finding in ``v``.

    With ``c = u - v = x_1 - x_2`` the second equation is strictly increasing
    in ``v`` on ``v > max(0, -c)``, so the root is unique and bracketed.
    """
    x1, x2 = map(float, x)
    c = x1 - x2
    lo = max(0.0, -c)
    if _ap_residual(lo, c, x2, a) >= 0:
        raise RootNotFound(f"no positive root for x = {(x1, x2)}; point not interior")
    hi = max(lo, x2) + 1.0
    while _ap_residual(hi, c, x2, a) <= 0:
        hi = 2 * hi
    v = brentq(_ap_residual, lo, hi, args=(c, x2, a), xtol=1e-15, rtol=4 * np.finfo(float).eps,
               maxiter=200)
    return QuarticAux.build(v + c, v, a)


def ap_solve_polynomial(a, x):
    """Polynomial path for ``p = 2`` (linear in ``v``) and ``p = 3`` (quartic).

    Returns the aux data and the number of admissible roots found; more than
    one means root selection was ambiguous.
    """
    x1, x2 = map(float, x)
    c = x1 - x2
    P = np.polynomial.Polynomial
    vpoly = P([0.0, 1.0])
    w = 4 * vpoly * (vpoly + c)
    if len(a) == 1:
        k2 = c + a[0]
        R = 2 * x2 + k2 - 2 * vpoly
        poly = R * R - (k2 * k2 + w)
    elif len(a) == 2:
        k2, k3 = c + a[0], c + a[1]
        R = 2 * x2 - 2 * vpoly + k2 + k3
        poly = 4 * R * R * (k3 * k3 + w) - (R * R + k3 * k3 - k2 * k2) ** 2
    else:
        raise NotImplementedError("polynomial path only for p = 2, 3")
    candidates = _real_roots(poly)
    good = []
    for v in candidates:
        if v > max(0.0, -c):
            res = abs(_ap_residual(v, c, x2, a)) / (1 + abs(x2))
            if res < 1e-8:
                good.append((res, v))
    if not good:
        raise RootNotFound(f"no admissible polynomial root for x = {(x1, x2)}")
    good.sort()
    v = _polish(lambda t: _ap_residual(t, c, x2, a), good[0][1])
    return QuarticAux.build(v + c, v, a), len(good)


def _real_roots(poly):
    poly = poly.trim(tol=0)
    roots = poly.roots()                 # companion-matrix eigenvalues
    scale = 1 + np.abs(roots)
    return sorted(float(z.real) for z in roots if abs(z.imag) <= 1e-7 * scale.max())


def _polish(f, v, steps=3):
    # a few secant refinements to remove eigenvalue round-off
    h = 1e-7 * max(1.0, abs(v))
    for _ in range(steps):
        fv = f(v)
        if fv == 0:
            break
        d = (f(v + h) - f(v - h)) / (2 * h)
        if d == 0:
            break
        v = v - fv / d
    return v


def ap_potential(a, x, aux=None):
    """Potential of the ``A_p`` family, ``a = (a_2, ..., a_p)``: half of

    ``x_1 log 2u + x_2 log 2v - (u + v)
    + sum_i [(u - v + a_i) log A_i - S_i]``.
    """
    x1, x2 = map(float, x)
    q = ap_solve(a, x) if aux is None else aux
    two_u = x1 * np.log(2 * q.u) + x2 * np.log(2 * q.v) - (q.u + q.v)
    for ai, A, B in zip(a, q.A, q.B):
        k = q.u - q.v + ai
        two_u += k * np.log(A) - 0.5 * (A + B)
    return 0.5 * two_u


def ap_gradient(a, x, aux=None):
    """From ``2 du = log(2u) dx_1 + log(2v) dx_2 + sum_i log A_i (dx_1 - dx_2)``."""
    q = ap_solve(a, x) if aux is None else aux
    s = sum(np.log(A) for A in q.A)
    return 0.5 * np.array([np.log(2 * q.u) + s, np.log(2 * q.v) - s])


# ------------------------------------------------------- Taub-NUT on O(-2)

def _tn_equations(u, v, a, alpha, beta):
    k = u - v + a
    S = np.sqrt(k * k + 4 * u * v)
    return (S + u + v - a - 2 * beta * u * v, S - u + 3 * v - a + 2 * alpha * u * v)


def _tn_residual(u, v, a, alpha, beta, x):
    e1, e2 = _tn_equations(u, v, a, alpha, beta)
    return max(abs(e1 - 2 * x[0]), abs(e2 - 2 * x[1])) / (1 + abs(x[0]) + abs(x[1]))


def taubnut_solve(a, alpha, beta, x):
    """``(u, v)`` from the quartic in ``v``.

    ``u = (x_1 - x_2 + v) / (1 - (alpha + beta) v)``; squaring
    ``S = 2x_1 + a - v - u (1 - 2 beta v)`` against
    ``S^2 = (u - v + a)^2 + 4uv`` and clearing the denominator gives a
    quartic.  The admissible root has ``u, v > 0``, ``S >= 0`` and solves
    the unsquared system.  Returns the aux data and the number of admissible
    roots.
    """
    x1, x2 = map(float, x)
    P = np.polynomial.Polynomial
    v = P([0.0, 1.0])
    D = 1 - (alpha + beta) * v
    N = x1 - x2 + v
    T = 2 * x1 + a - v
    lhs = (T * D - N * (1 - 2 * beta * v)) ** 2
    rhs = (N - v * D + a * D) ** 2 + 4 * N * v * D
    good = []
    for vr in _real_roots(lhs - rhs):
        Dv = 1 - (alpha + beta) * vr
        if vr <= 0 or Dv == 0:
            continue
        ur = (x1 - x2 + vr) / Dv
        if ur <= 0:
            continue
        res = _tn_residual(ur, vr, a, alpha, beta, (x1, x2))
        if res < 1e-8:
            good.append((res, ur, vr))
    if not good:
        raise RootNotFound(f"no admissible quartic root for x = {(x1, x2)}")
    good.sort()
    _, u0, v0 = good[0]
    u0, v0 = _tn_newton(a, alpha, beta, (x1, x2), u0, v0)
    return QuarticAux.build(u0, v0, (a,)), len(good)


def _tn_newton(a, alpha, beta, x, u, v, max_iter=100):
    x = np.asarray(x, dtype=float)
    target = 2 * x
    for _ in range(max_iter):
        F = np.array(_tn_equations(u, v, a, alpha, beta)) - target
        if np.max(np.abs(F)) <= 1e-15 * (1 + np.abs(target).max()):
            break
        k = u - v + a
        S = np.sqrt(k * k + 4 * u * v)
        Su, Sv = (k + 2 * v) / S, (-k + 2 * u) / S
        J = np.array([[Su + 1 - 2 * beta * v, Sv + 1 - 2 * beta * u],
                      [Su - 1 + 2 * alpha * v, Sv + 3 + 2 * alpha * u]])
        du, dv = np.linalg.solve(J, -F)
        t = 1.0
        norm0 = np.max(np.abs(F))
        while t > 1e-12:
            un, vn = u + t * du, v + t * dv
            if un > 0 and vn > 0:
                Fn = np.array(_tn_equations(un, vn, a, alpha, beta)) - target
                if np.max(np.abs(Fn)) < norm0:
                    break
            t *= 0.5
        else:
            break
        u, v = un, vn
    return u, v


def taubnut_solve_newton(a, alpha, beta, x):
    """Damped Newton in ``(u, v)`` seeded from the ``alpha = beta = 0`` solution."""
    seed = ap_solve((a,), x)
    u, v = _tn_newton(a, alpha, beta, x, seed.u, seed.v)
    if _tn_residual(u, v, a, alpha, beta, x) > 1e-10:
        raise RootNotFound(f"Newton did not converge for x = {tuple(x)}")
    return QuarticAux.build(u, v, (a,))


def taubnut_potential(a, alpha, beta, x, aux=None):
    """Taub-NUT type potential on ``O(-2)``: half of

    ``x_1 log 2u + x_2 log 2v + (alpha u^2 - beta v^2)/2 + (beta - alpha) u v - (u + v)
    + (u - v + a) log A - S - (alpha + beta) [u v (log A - 1) + B^2/8 + a B/2]``.
    """
    x1, x2 = map(float, x)
    q = taubnut_solve(a, alpha, beta, x)[0] if aux is None else aux
    u, v, A, B = q.u, q.v, q.A[0], q.B[0]
    k = u - v + a
    S = 0.5 * (A + B)
    two_u = (x1 * np.log(2 * u) + x2 * np.log(2 * v) + 0.5 * (alpha * u * u - beta * v * v)
             + (beta - alpha) * u * v - (u + v) + k * np.log(A) - S
             - (alpha + beta) * (u * v * (np.log(A) - 1) + B * B / 8 + a * B / 2))
    return 0.5 * two_u


def taubnut_gradient(a, alpha, beta, x, aux=None):
    """``2 xi = (log 2u + log A + alpha H, log 2v - log A + beta H)``, ``H = u - v``."""
    q = taubnut_solve(a, alpha, beta, x)[0] if aux is None else aux
    H = q.u - q.v
    LA = np.log(q.A[0])
    return 0.5 * np.array([np.log(2 * q.u) + LA + alpha * H, np.log(2 * q.v) - LA + beta * H])


# ---------------------------------------------------------------- S^2 x R^2

def s2r2_potential(a, x):
    """Half of ``x log x + y log y + (2a - y) log(2a - y) - (x + 2a) log(x + 2a)``."""
    X, Y = map(float, x)
    _require((X > 0) & (Y > 0) & (Y < 2 * a), "x > 0, 0 < y < 2a")
    return 0.5 * (_xlogx(X) + _xlogx(Y) + _xlogx(2 * a - Y) - _xlogx(X + 2 * a))


def s2r2_gradient(a, x):
    X, Y = map(float, x)
    _require((X > 0) & (Y > 0) & (Y < 2 * a), "x > 0, 0 < y < 2a")
    return 0.5 * np.array([np.log(X) - np.log(X + 2 * a), np.log(Y) - np.log(2 * a - Y)])


def fd_gradient(f, x, h=1e-4):
    """Fourth-order central-difference gradient of a scalar function.

    ``h`` is the absolute step; keep it well below the distance to the
    boundary of the oracle's domain.
    """
    x = np.asarray(x, dtype=float)
    g = np.empty(2)
    for k in range(2):
        e = np.zeros(2)
        e[k] = h
        g[k] = (-f(x + 2 * e) + 8 * f(x + e) - 8 * f(x - e) + f(x - 2 * e)) / (12 * h)
    return g


# ---------------------------------------------------------------- detection

@dataclass(frozen=True)
class OracleMatch:
    """An oracle family recognized from the normalized polygon."""

    family: str
    params: dict
    potential: object
    gradient: object


def detect_oracle(P, nu=None):
    """Match a polygon (and nut) against the closed-form families.

    ``P`` must already be in standard position; use :func:`normalize_sl2z`
    first otherwise.  ``nu`` is the chart's nut vector.
    """
    nu = (0.0, 0.0) if nu is None else tuple(map(float, nu))
    nus = P.normals
    lam = P.offsets
    if nus[:2] != ((0, 1), (1, 0)):
        raise NoOracleForPolygon("normals must start with (0, 1), (1, 0)")
    zero = nu == (0.0, 0.0)
    d = P.d
    if d == 2 and zero:
        return OracleMatch("flat", {}, flat_potential, flat_gradient)
    if d == 3 and nus[2] == (0, -1) and zero:
        a = lam[2] / 2
        return OracleMatch("s2r2", {"a": a}, lambda x: s2r2_potential(a, x),
                           lambda x: s2r2_gradient(a, x))
    if d == 3 and nus[2] == (2, -1) and not zero:
        # the family's (alpha, beta) is twice the chart's nut vector
        a, al, be = lam[2], 2 * nu[0], 2 * nu[1]
        return OracleMatch("taubnut", {"a": a, "alpha": al, "beta": be},
                           lambda x: taubnut_potential(a, al, be, x),
                           lambda x: taubnut_gradient(a, al, be, x))
    if d == 3 and nus[2][1] == -1 and nus[2][0] >= 1 and zero:
        p, a = nus[2][0], lam[2]
        return OracleMatch("op", {"p": p, "a": a}, lambda x: op_potential(p, a, x),
                           lambda x: op_gradient(p, a, x))
    if d >= 3 and zero and all(n == (j, 1 - j) for j, n in enumerate(nus)) and classify(P).c1_zero:
        from .chart import solve_a
        a = solve_a(P)[1:]
        return OracleMatch(f"A_{d - 1}", {"a": list(a)}, lambda x: ap_potential(a, x),
                           lambda x: ap_gradient(a, x))
    raise NoOracleForPolygon(
        f"no closed-form potential known for {P.name or 'polygon'!r} and nut {nu}")


def detect_oracle_any(P, nu=None):
    """Like :func:`detect_oracle` after bringing ``P`` to standard position.

    Returns ``(match, P_normalized, M)``; the nut is transformed with ``M``.
    """
    if P.normals[:2] == ((0, 1), (1, 0)):
        Pn, M = P, ((1, 0), (0, 1))
    else:
        Pn, M = normalize_sl2z(P)
    nun = None
    if nu is not None:
        nun = (M[0][0] * nu[0] + M[0][1] * nu[1], M[1][0] * nu[0] + M[1][1] * nu[1])
    return detect_oracle(Pn, nun), Pn, M
