"""Frobenius manifold data of the A_n singularity built from its superpotential.

At a parameter point ``t`` the superpotential is

    lambda(z) = z**(n+1) + t_n z**(n-1) + ... + t_2 z + t_1,

so ``t_a`` multiplies ``z**(a-1)``.  Its critical points ``z_i`` give the
canonical coordinates ``u_i = lambda(z_i)``, the Lame coefficients
``h_i = lambda''(z_i)**-1/2`` and the rotation coefficients
``gamma_ij = h_i h_j / (z_i - z_j)**2``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Sequence

import mpmath
from mpmath import mp

from .mp_series import (
    TruncatedSeries,
    big,
    from_decimal_pair,
    precision,
    series_pow,
    to_decimal_pair,
)
from .polynomial import (
    CAUSTIC_DELTA,
    NonConvergence,
    Poly,
    RootCluster,
    find_roots,
    poly_derive,
    poly_eval,
)

C_TABLE_MIN = 8


class CausticError(ValueError):
    """The parameter point lies on (or too close to) the caustic."""


class SingularJacobian(ArithmeticError):
    pass


class RejectionExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class ParamPoint:
    n: int
    t: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if len(self.t) != self.n:
            raise ValueError(f"expected {self.n} parameters, got {len(self.t)}")
        object.__setattr__(self, "t", tuple(big(x) for x in self.t))

    def to_json(self) -> dict:
        return {"n": self.n, "t": [to_decimal_pair(x) for x in self.t]}

    @classmethod
    def from_json(cls, data) -> "ParamPoint":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(int(data["n"]), tuple(_parse_scalar(x) for x in data["t"]))


def _parse_scalar(x):
    if isinstance(x, (list, tuple)):
        return from_decimal_pair(x)
    if isinstance(x, str):
        return mpmath.mpc(mpmath.mpf(x))
    return big(x)


@dataclass(frozen=True)
class Jet2:
    """First and second x-derivatives of the canonical coordinates."""

    ux: tuple
    uxx: tuple

    def __post_init__(self):
        if len(self.ux) != len(self.uxx):
            raise ValueError("ux and uxx must have equal length")
        object.__setattr__(self, "ux", tuple(big(x) for x in self.ux))
        object.__setattr__(self, "uxx", tuple(big(x) for x in self.uxx))

    def check_nonzero(self) -> None:
        for i, v in enumerate(self.ux):
            if v == 0:
                raise ZeroDivisionError(f"jet component u_{i + 1},x vanishes")

    def scaled(self, c) -> "Jet2":
        return Jet2(tuple(c * v for v in self.ux), self.uxx)

    def to_json(self) -> dict:
        return {"ux": [to_decimal_pair(v) for v in self.ux],
                "uxx": [to_decimal_pair(v) for v in self.uxx]}

    @classmethod
    def from_json(cls, data) -> "Jet2":
        return cls(tuple(_parse_scalar(x) for x in data["ux"]),
                   tuple(_parse_scalar(x) for x in data["uxx"]))


def random_jet(n: int, rng: random.Random, min_abs: float = 0.1) -> Jet2:
    """Jet with components uniform in the unit complex box, ``|u_x| >= min_abs``."""
    ux = []
    while len(ux) < n:
        v = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        if abs(v) >= min_abs:
            ux.append(mpmath.mpc(v))
    uxx = [mpmath.mpc(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(n)]
    return Jet2(tuple(ux), tuple(uxx))


def build_superpotential(p: ParamPoint) -> Poly:
    coeffs = list(p.t) + [0, 1]
    lam = Poly(coeffs)
    assert lam.degree == p.n + 1 and lam.coeffs[-1] == 1 and lam.coeffs[p.n] == 0
    return lam


@dataclass(frozen=True, eq=False)
class FrobeniusPoint:
    n: int
    t: tuple
    lam: Poly
    z: tuple
    u: tuple
    hsq: tuple
    h: tuple
    C: tuple  # C[i][k] = lambda^(k)(z_i) / lambda''(z_i), k = 0..kmax
    gamma: tuple
    H: tuple
    precision_bits: int = field(default=0)

    @property
    def kmax(self) -> int:
        return len(self.C[0]) - 1 if self.C else C_TABLE_MIN

    def zd(self, i: int, j: int):
        return self.z[i] - self.z[j]

    def ud(self, i: int, j: int):
        return self.u[i] - self.u[j]

    def c(self, i: int, k: int):
        if k > self.kmax:
            return mpmath.mpc(0)
        return self.C[i][k]

    @property
    def param(self) -> ParamPoint:
        return ParamPoint(self.n, self.t)

    def with_flipped_branch(self, m: int) -> "FrobeniusPoint":
        """Same point with ``h_m`` replaced by ``-h_m``."""
        h = list(self.h)
        h[m] = -h[m]
        return replace(self, h=tuple(h), gamma=_gamma_table(self.z, h))

    @cached_property
    def dh(self) -> tuple:
        """``dh[i][k]`` = dh_i/du_k from the closed forms."""
        return tuple(tuple(lame_partial(self, i, k) for k in range(self.n)) for i in range(self.n))

    @cached_property
    def dgamma(self) -> tuple:
        """``dgamma[i][j][k]`` = dgamma_ij/du_k, zero on the diagonal i == j."""
        n = self.n
        zero = mpmath.mpc(0)
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                if i == j:
                    row.append((zero,) * n)
                elif j < i:
                    row.append(out[j][i])
                else:
                    row.append(tuple(rotation_partial(self, i, j, k) for k in range(n)))
            out.append(tuple(row))
        return tuple(out)


def _gamma_table(z, h) -> tuple:
    n = len(z)
    zero = mpmath.mpc(0)
    rows = [[zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            g = h[i] * h[j] / (z[i] - z[j]) ** 2
            rows[i][j] = rows[j][i] = g
    return tuple(tuple(r) for r in rows)


def build_point(p: ParamPoint, precision_bits: int | None = None,
                delta=CAUSTIC_DELTA) -> FrobeniusPoint:
    """Critical data of the superpotential at ``p``.

    Raises :class:`CausticError` when two critical points are closer than
    ``delta``.
    """
    if precision_bits is not None:
        with precision(precision_bits):
            return build_point(p, None, delta)
    n = p.n
    lam = build_superpotential(p)
    dlam = poly_derive(lam, 1)
    try:
        z = find_roots(dlam, cluster_threshold=delta)
    except RootCluster as exc:
        raise CausticError(f"critical points collide: {exc}") from exc
    return _assemble(p, lam, z)


def _assemble(p: ParamPoint, lam: Poly, z: Sequence) -> FrobeniusPoint:
    n = p.n
    kmax = max(C_TABLE_MIN, n + 1)
    derivs = [poly_derive(lam, k) for k in range(kmax + 1)]
    u = tuple(poly_eval(lam, zi) for zi in z)
    lam2 = [poly_eval(derivs[2], zi) for zi in z]
    hsq = tuple(1 / v for v in lam2)
    h = tuple(mpmath.sqrt(v) for v in hsq)
    C = tuple(
        tuple(poly_eval(derivs[k], zi) / l2 if k <= n + 1 else mpmath.mpc(0) for k in range(kmax + 1))
        for zi, l2 in zip(z, lam2)
    )
    gamma = _gamma_table(z, h)
    H = tuple(hsq[i] * (C[i][3] ** 2 - C[i][4]) / 48 for i in range(n))
    fp = FrobeniusPoint(n, tuple(p.t), lam, tuple(z), u, hsq, h, C, gamma, H, mp.prec)
    _self_check_H(fp)
    return fp


def H_definitional(fp: FrobeniusPoint) -> list:
    """``H_i = 1/2 sum_{j != i} u_ij gamma_ij**2`` paired with its term scale."""
    out = []
    for i in range(fp.n):
        s = mpmath.mpc(0)
        scale = mpmath.mpf(0)
        for j in range(fp.n):
            if j == i:
                continue
            term = fp.ud(i, j) * fp.gamma[i][j] ** 2 / 2
            s += term
            scale += abs(term)
        out.append((s, scale))
    return out


def compute_H(fp: FrobeniusPoint) -> list:
    """Closed form ``H_i = h_i**2 (C_i3**2 - C_i4) / 48``."""
    return [fp.hsq[i] * (fp.C[i][3] ** 2 - fp.C[i][4]) / 48 for i in range(fp.n)]


def _self_check_H(fp: FrobeniusPoint) -> None:
    tol = mpmath.ldexp(mpmath.mpf(1), -(mp.prec // 2))
    for i, (val, scale) in enumerate(H_definitional(fp)):
        if abs(val - fp.H[i]) > tol * max(scale, abs(fp.H[i])):
            raise ArithmeticError(f"H_{i + 1}: definitional and closed forms disagree")


def lame_partial(fp: FrobeniusPoint, i: int, k: int):
    """dh_i/du_k."""
    if k != i:
        return fp.h[i] * fp.hsq[k] / fp.zd(i, k) ** 2
    c3, c4 = fp.C[i][3], fp.C[i][4]
    return fp.h[i] * fp.hsq[i] * (c3 ** 2 / 4 - c4 / 6)


def _dgamma_own(fp: FrobeniusPoint, i: int, j: int):
    # dgamma_ij/du_i
    zij = fp.zd(i, j)
    c3, c4 = fp.C[i][3], fp.C[i][4]
    return (fp.h[i] * fp.hsq[i] * fp.h[j] / zij ** 2
            * (3 / zij ** 2 + c3 / zij + c3 ** 2 / 4 - c4 / 6))


def rotation_partial(fp: FrobeniusPoint, i: int, j: int, k: int):
    """dgamma_ij/du_k for i != j."""
    if i == j:
        raise ValueError("rotation_partial needs i != j")
    if k == i:
        return _dgamma_own(fp, i, j)
    if k == j:
        return _dgamma_own(fp, j, i)
    return fp.h[i] * fp.h[j] * fp.hsq[k] / (fp.zd(i, k) ** 2 * fp.zd(j, k) ** 2)


def flat_coordinates(p: ParamPoint) -> list:
    """Flat coordinates ``v^a`` from the z**-1 coefficient of lambda**((n+1-a)/(n+1)) at infinity."""
    n = p.n
    order = n + 3
    # in y = 1/z: lambda = z**(n+1) * (1 + w(y)), w = sum_b t_b y**(n+2-b)
    w = [mpmath.mpc(0)] * order
    for b in range(1, n + 1):
        w[n + 2 - b] += p.t[b - 1]
    w[0] = mpmath.mpc(1)
    base = TruncatedSeries.from_coeffs(w, order)
    out = []
    for a in range(1, n + 1):
        s = mpmath.mpf(n + 1 - a) / (n + 1)
        expanded = series_pow(base, s)
        out.append(expanded[n + 2 - a] * mpmath.mpf(n + 1) / (n + 1 - a))
    return out


def _match_labels(reference: Sequence, roots: Sequence) -> list:
    """Reorder ``roots`` so that ``roots[i]`` is the one nearest ``reference[i]``."""
    remaining = list(roots)
    out = []
    for r in reference:
        idx = min(range(len(remaining)), key=lambda m: abs(remaining[m] - r))
        out.append(remaining.pop(idx))
    return out


def _track_roots(dlam: Poly, z_ref: Sequence, max_iter: int = 60):
    """Newton-continue each root of ``dlam`` from ``z_ref``; None if the labels get confused."""
    ddlam = poly_derive(dlam, 1)
    tol = mpmath.ldexp(dlam.max_coeff(), -(mp.prec - 8))
    out = []
    for z0 in z_ref:
        zk = z0
        for _ in range(max_iter):
            val = poly_eval(dlam, zk)
            if abs(val) <= tol * max(1, abs(zk)) ** dlam.degree:
                break
            zk = zk - val / poly_eval(ddlam, zk)
        else:
            return None
        out.append(zk)
    n = len(out)
    for a in range(n):
        for b in range(a + 1, n):
            if abs(out[a] - out[b]) < abs(out[a] - z_ref[a]) + abs(out[b] - z_ref[b]) + CAUSTIC_DELTA / 4:
                return None
    return out


def critical_values(p: ParamPoint, z_ref: Sequence | None = None) -> tuple:
    """``(z, u)`` at ``p`` with critical points labelled to follow ``z_ref``."""
    lam = build_superpotential(p)
    dlam = poly_derive(lam, 1)
    z = _track_roots(dlam, z_ref) if z_ref is not None else None
    if z is None:
        z = find_roots(dlam, cluster_threshold=0)
        if z_ref is not None:
            z = _match_labels(z_ref, z)
    return z, [poly_eval(lam, zi) for zi in z]


def invert_u_to_t(n: int, u_target: Sequence, t_guess: Sequence, max_iter: int = 80,
                  return_roots: bool = False):
    """Solve ``u(t) = u_target`` by Newton's method starting from ``t_guess``.

    Critical points are tracked by continuation from the guess, so the labels
    of ``u_target`` are those of the guess point.  The Jacobian is
    ``du_i/dt_a = z_i**(a-1)``.
    """
    u_target = [big(x) for x in u_target]
    t = [big(x) for x in t_guess]
    z, u = critical_values(ParamPoint(n, t))
    scale = max([mpmath.mpf(1)] + [abs(x) for x in u_target])
    tol = mpmath.ldexp(scale, -(mp.prec - 16))
    sep_floor = mpmath.ldexp(mpmath.mpf(1), -(mp.prec // 4))
    for _ in range(max_iter):
        resid = [a - b for a, b in zip(u, u_target)]
        if max(abs(r) for r in resid) <= tol:
            p = ParamPoint(n, t)
            return (p, z) if return_roots else p
        if n > 1 and min(abs(z[a] - z[b]) for a in range(n) for b in range(a + 1, n)) < sep_floor:
            raise SingularJacobian("critical points coalesced during inversion")
        J = mpmath.matrix([[z[i] ** a for a in range(n)] for i in range(n)])
        try:
            step = mpmath.lu_solve(J, mpmath.matrix(resid))
        except ZeroDivisionError as exc:
            raise SingularJacobian(str(exc)) from exc
        t = [t[a] - step[a] for a in range(n)]
        z, u = critical_values(ParamPoint(n, t), z)
    raise NonConvergence("u -> t inversion did not converge")


def admissible(fp: FrobeniusPoint, delta=CAUSTIC_DELTA) -> bool:
    n = fp.n
    if any(abs(zi) > 10 for zi in fp.z):
        return False
    for a in range(n):
        for b in range(a + 1, n):
            if abs(fp.zd(a, b)) < delta or abs(fp.ud(a, b)) < delta * 0.01:
                return False
    return True


def sample_admissible(n: int, seed: int, count: int, delta=CAUSTIC_DELTA,
                      max_attempts: int = 10_000) -> list:
    """Deterministic admissible parameter points, ``t_a`` uniform in the unit complex box.

    The draws are binary floats, so the same points come out at every
    working precision.
    """
    if n < 1:
        raise ValueError("n must be positive")
    rng = random.Random(f"sample:{seed}:{n}")
    out = []
    attempts = 0
    while len(out) < count:
        if attempts >= max_attempts:
            raise RejectionExhausted(f"only {len(out)} of {count} points after {attempts} draws")
        attempts += 1
        t = tuple(mpmath.mpc(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(n))
        p = ParamPoint(n, t)
        try:
            fp = build_point(p, delta=delta)
        except (CausticError, NonConvergence):
            continue
        if admissible(fp, delta):
            out.append(p)
    return out
