"""Residues of rational functions with poles at critical points.

:func:`residue_at` is a series-expansion oracle that works from the
polynomial form of ``lambda'``; the ``closed_R*`` functions are the tabulated
closed forms in terms of ``C_ik``, ``h_i**2``, ``z_ij`` and ``u_ik``.  The two
are kept independent so each can be checked against the other.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import mpmath
from mpmath import mp

from .frobenius_an import FrobeniusPoint
from .mp_series import TruncatedSeries, big, series_mul, series_reciprocal
from .polynomial import Poly, poly_derive, poly_eval

GUARD_TERMS = 2


class ResidueError(ValueError):
    pass


@dataclass(frozen=True)
class RationalAtPoles:
    """``numerator / (prod (z - b)**m  *  lambda'(z))``, the last factor optional."""

    numerator: Poly
    pole_factors: tuple = ()
    lambda_prime: Poly | None = None

    def __post_init__(self):
        locs = [big(b) for b, _ in self.pole_factors]
        for a, b in itertools.combinations(locs, 2):
            if a == b:
                raise ValueError("pole locations must be distinct")
        object.__setattr__(self, "pole_factors",
                           tuple((big(b), int(m)) for b, m in self.pole_factors))

    @property
    def include_lambda_prime_in_denominator(self) -> bool:
        return self.lambda_prime is not None

    def multiplicity(self, a) -> int:
        for b, m in self.pole_factors:
            if b == a:
                return m
        return 0


def residue_at(f: RationalAtPoles, a, total_order: int, guard: int = GUARD_TERMS):
    """Residue of ``f`` at ``a`` by Taylor expansion of the regular part.

    ``total_order`` is the full pole order at ``a``.  When it exceeds the
    explicit multiplicity by one, ``a`` is taken to be a simple zero of
    ``lambda'`` and ``(z - a)`` is factored out of it.
    """
    a = big(a)
    m_a = f.multiplicity(a)
    extra = total_order - m_a
    if total_order < 1 or extra not in (0, 1):
        raise ResidueError("total_order does not match the pole structure at a")
    if extra == 1 and f.lambda_prime is None:
        raise ResidueError("a is not a pole of f")
    order = total_order + guard
    num = f.numerator.taylor(a, order)
    den = TruncatedSeries.one(order, a)
    for b, m in f.pole_factors:
        if b == a:
            continue
        factor = TruncatedSeries.from_coeffs([a - b, 1], order, a)
        for _ in range(m):
            den = series_mul(den, factor)
    if f.lambda_prime is not None:
        lp = f.lambda_prime.taylor(a, order + 1)
        if extra == 1:
            scale = f.lambda_prime.max_coeff() * max(mpmath.mpf(1), abs(a)) ** max(f.lambda_prime.degree, 0)
            if abs(lp[0]) > mpmath.ldexp(scale, -(mp.prec // 2)):
                raise ResidueError("claimed zero of lambda' is not a zero")
            lp_series = TruncatedSeries(a, lp.coeffs[1:order + 1])
            if lp_series[0] == 0:
                raise ResidueError("zero of lambda' at a is not simple")
        else:
            lp_series = TruncatedSeries(a, lp.coeffs[:order])
            if lp_series[0] == 0:
                raise ResidueError("lambda' vanishes at a but it was not counted in total_order")
        den = series_mul(den, lp_series)
    g = series_mul(num, series_reciprocal(den))
    return g[total_order - 1]


def _signed_factors(fp: FrobeniusPoint, powers: Sequence) -> tuple:
    """``prod (z_b - z)**p`` rewritten as ``sign * prod (z - z_b)**p``."""
    sign = 1
    factors = []
    for idx, p in powers:
        if p:
            factors.append((fp.z[idx], p))
            sign *= (-1) ** p
    return sign, tuple(factors)


def oracle(fp: FrobeniusPoint, numerator: Poly, powers: Sequence, at: Sequence):
    """Sum of residues at the critical points ``at`` of
    ``numerator / (prod_{(b, p) in powers} (z_b - z)**p * lambda'(z))``."""
    sign, factors = _signed_factors(fp, powers)
    f = RationalAtPoles(numerator * sign, factors, poly_derive(fp.lam, 1))
    total = mpmath.mpc(0)
    for idx in at:
        m = dict((b, p) for b, p in powers).get(idx, 0)
        total += residue_at(f, fp.z[idx], m + 1)
    return total


def _lam_shift(fp: FrobeniusPoint, k: int) -> Poly:
    # lambda(z_k) - lambda(z)
    return fp.u[k] - fp.lam


def oracle_R1(fp, i, p):
    return oracle(fp, poly_derive(fp.lam, 2), [(i, p)], [i])


def oracle_R2(fp, i, p):
    return oracle(fp, Poly([1]), [(i, p)], [i])


def oracle_R3(fp, i, p):
    return oracle(fp, _lam_shift(fp, i), [(i, p)], [i])


def oracle_R4(fp, i, p, q):
    return oracle(fp, poly_derive(fp.lam, q), [(i, p)], [i])


def oracle_R5(fp, i, j, p, q):
    return oracle(fp, poly_derive(fp.lam, 2), [(i, p), (j, q)], [i, j])


def oracle_R6(fp, i, k, p, q):
    return oracle(fp, _lam_shift(fp, k), [(i, p), (k, q)], [i, k])


# Closed forms.  ``c`` is the row C[i]; c[3]..c[8] are used.

def closed_R1(fp: FrobeniusPoint, i: int, p: int):
    c = fp.C[i]
    if p == 2:
        return -c[3] ** 2 / 4 + c[4] / 3
    if p == 3:
        return -(c[3] ** 3 - 2 * c[3] * c[4] + c[5]) / 8
    if p == 4:
        return -(45 * c[3] ** 4 - 120 * c[3] ** 2 * c[4] + 40 * c[4] ** 2
                 + 60 * c[3] * c[5] - 24 * c[6]) / 720
    if p == 5:
        return -(9 * c[3] ** 5 - 30 * c[3] ** 3 * c[4] + 20 * c[3] * c[4] ** 2
                 + 15 * c[3] ** 2 * c[5] - 10 * c[4] * c[5] - 6 * c[3] * c[6] + 2 * c[7]) / 288
    if p == 6:
        return -(945 * c[3] ** 6 - 3780 * c[3] ** 4 * c[4] + 3780 * c[3] ** 2 * c[4] ** 2
                 - 560 * c[4] ** 3 + 1890 * c[3] ** 3 * c[5] - 2520 * c[3] * c[4] * c[5]
                 + 315 * c[5] ** 2 - 756 * c[3] ** 2 * c[6] + 504 * c[4] * c[6]
                 + 252 * c[3] * c[7] - 72 * c[8]) / 60480
    raise ValueError(f"R1({p}) is not tabulated")


def closed_R2(fp: FrobeniusPoint, i: int, p: int):
    c = fp.C[i]
    hs = fp.hsq[i]
    if p == 2:
        return hs * (3 * c[3] ** 2 - 2 * c[4]) / 12
    if p == 3:
        return hs * (3 * c[3] ** 3 - 4 * c[3] * c[4] + c[5]) / 24
    if p == 4:
        return hs * (45 * c[3] ** 4 - 90 * c[3] ** 2 * c[4] + 20 * c[4] ** 2
                     + 30 * c[3] * c[5] - 6 * c[6]) / 720
    if p == 5:
        return hs * (45 * c[3] ** 5 - 120 * c[3] ** 3 * c[4] + 60 * c[3] * c[4] ** 2
                     + 45 * c[3] ** 2 * c[5] - 20 * c[4] * c[5] - 12 * c[3] * c[6] + 2 * c[7]) / 1440
    if p == 6:
        return hs * (945 * c[3] ** 6 - 3150 * c[3] ** 4 * c[4] + 2520 * c[3] ** 2 * c[4] ** 2
                     - 280 * c[4] ** 3 + 1260 * c[3] ** 3 * c[5] - 1260 * c[3] * c[4] * c[5]
                     + 105 * c[5] ** 2 - 378 * c[3] ** 2 * c[6] + 168 * c[4] * c[6]
                     + 84 * c[3] * c[7] - 12 * c[8]) / 60480
    raise ValueError(f"R2({p}) is not tabulated")


def closed_R3(fp: FrobeniusPoint, i: int, p: int):
    c = fp.C[i]
    if p == 4:
        return -(c[3] ** 2 - c[4]) / 24
    if p == 5:
        return -(15 * c[3] ** 3 - 25 * c[3] * c[4] + 9 * c[5]) / 720
    if p == 6:
        return -(15 * c[3] ** 4 - 35 * c[3] ** 2 * c[4] + 10 * c[4] ** 2
                 + 14 * c[3] * c[5] - 4 * c[6]) / 1440
    if p == 7:
        return -(315 * c[3] ** 5 - 945 * c[3] ** 3 * c[4] + 560 * c[3] * c[4] ** 2
                 + 399 * c[3] ** 2 * c[5] - 231 * c[4] * c[5] - 126 * c[3] * c[6] + 30 * c[7]) / 60480
    if p == 8:
        return -(315 * c[3] ** 6 - 1155 * c[3] ** 4 * c[4] + 1050 * c[3] ** 2 * c[4] ** 2
                 - 140 * c[4] ** 3 + 504 * c[3] ** 3 * c[5] - 602 * c[3] * c[4] * c[5]
                 + 63 * c[5] ** 2 - 168 * c[3] ** 2 * c[6] + 98 * c[4] * c[6]
                 + 44 * c[3] * c[7] - 9 * c[8]) / 120960
    raise ValueError(f"R3({p}) is not tabulated")


def closed_R4(fp: FrobeniusPoint, i: int, p: int, q: int):
    c = fp.C[i]
    if (p, q) == (5, 3):
        return (45 * c[3] ** 6 - 210 * c[3] ** 4 * c[4] + 240 * c[3] ** 2 * c[4] ** 2
                - 40 * c[4] ** 3 + 135 * c[3] ** 3 * c[5] - 200 * c[3] * c[4] * c[5]
                + 30 * c[5] ** 2 - 72 * c[3] ** 2 * c[6] + 52 * c[4] * c[6]
                + 32 * c[3] * c[7] - 12 * c[8]) / 1440
    if (p, q) == (2, 4):
        return (3 * c[3] ** 2 * c[4] - 2 * c[4] ** 2 - 6 * c[3] * c[5] + 6 * c[6]) / 12
    if (p, q) == (3, 4):
        return (3 * c[3] ** 3 * c[4] - 4 * c[3] * c[4] ** 2 - 6 * c[3] ** 2 * c[5]
                + 5 * c[4] * c[5] + 6 * c[3] * c[6] - 4 * c[7]) / 24
    if (p, q) == (4, 4):
        return (45 * c[3] ** 4 * c[4] - 90 * c[3] ** 2 * c[4] ** 2 + 20 * c[4] ** 3
                - 90 * c[3] ** 3 * c[5] + 150 * c[3] * c[4] * c[5] - 30 * c[5] ** 2
                + 90 * c[3] ** 2 * c[6] - 66 * c[4] * c[6] - 60 * c[3] * c[7] + 30 * c[8]) / 720
    raise ValueError(f"R4({p},{q}) is not tabulated")


def closed_R5(fp: FrobeniusPoint, i: int, j: int, p: int, q: int):
    ci, cj = fp.C[i], fp.C[j]
    z = fp.zd(i, j)
    if (p, q) == (2, 2):
        return (6 / z ** 4 - (ci[3] - cj[3]) / z ** 3
                - (3 * ci[3] ** 2 + 3 * cj[3] ** 2 - 4 * ci[4] - 4 * cj[4]) / (12 * z ** 2))
    if (p, q) == (2, 4):
        return (15 / z ** 6 - (2 * ci[3] - 2 * cj[3]) / z ** 5
                - (3 * ci[3] ** 2 + 9 * cj[3] ** 2 - 4 * ci[4] - 12 * cj[4]) / (12 * z ** 4)
                + (cj[3] ** 3 - 2 * cj[3] * cj[4] + cj[5]) / (4 * z ** 3)
                - (45 * cj[3] ** 4 - 120 * cj[3] ** 2 * cj[4] + 40 * cj[4] ** 2
                   + 60 * cj[3] * cj[5] - 24 * cj[6]) / (720 * z ** 2))
    if (p, q) == (4, 2):
        return (15 / z ** 6 - (2 * ci[3] - 2 * cj[3]) / z ** 5
                - (3 * cj[3] ** 2 + 9 * ci[3] ** 2 - 4 * cj[4] - 12 * ci[4]) / (12 * z ** 4)
                - (ci[3] ** 3 - 2 * ci[3] * ci[4] + ci[5]) / (4 * z ** 3)
                - (45 * ci[3] ** 4 - 120 * ci[3] ** 2 * ci[4] + 40 * ci[4] ** 2
                   + 60 * ci[3] * ci[5] - 24 * ci[6]) / (720 * z ** 2))
    raise ValueError(f"R5({p},{q}) is not tabulated")


def closed_R6(fp: FrobeniusPoint, i: int, k: int, p: int, q: int):
    ci, ck = fp.C[i], fp.C[k]
    z = fp.zd(i, k)
    w = fp.hsq[i] * fp.ud(i, k)
    b = ci[3] ** 2 / 4 - ci[4] / 6
    if (p, q) == (2, 2):
        return -1 / z ** 2 - w / z ** 2 * (3 / z ** 2 + ci[3] / z + b)
    if (p, q) == (2, 3):
        return (3 / (2 * z ** 3) - ck[3] / (12 * z ** 2)
                + w / z ** 3 * (6 / z ** 2 + 3 * ci[3] / (2 * z) + b))
    if (p, q) == (2, 4):
        return (-2 / z ** 4 + ck[3] / (6 * z ** 3) - (ck[3] ** 2 - ck[4]) / (24 * z ** 2)
                - w / z ** 4 * (10 / z ** 2 + 2 * ci[3] / z + b))
    if (p, q) == (3, 2):
        return (-3 / (2 * z ** 3) - ci[3] / (12 * z ** 2)
                - w / z ** 2 * (4 / z ** 3 + 3 * ci[3] / (2 * z ** 2) + 2 / z * b
                                + (3 * ci[3] ** 3 - 4 * ci[3] * ci[4] + ci[5]) / 24))
    if (p, q) == (4, 2):
        return (-2 / z ** 4 - ci[3] / (6 * z ** 3) - (ci[3] ** 2 - ci[4]) / (24 * z ** 2)
                - w / z ** 2 * (5 / z ** 4 + 2 * ci[3] / z ** 3 + 3 / z ** 2 * b
                                + (3 * ci[3] ** 3 - 4 * ci[3] * ci[4] + ci[5]) / (12 * z)
                                + (45 * ci[3] ** 4 - 90 * ci[3] ** 2 * ci[4] + 20 * ci[4] ** 2
                                   + 30 * ci[3] * ci[5] - 6 * ci[6]) / 720))
    raise ValueError(f"R6({p},{q}) is not tabulated")


R1_TABLE = (2, 3, 4, 5, 6)
R2_TABLE = (2, 3, 4, 5, 6)
R3_TABLE = (4, 5, 6, 7, 8)
R4_TABLE = ((5, 3), (2, 4), (3, 4), (4, 4))
R5_TABLE = ((2, 2), (2, 4), (4, 2))
R6_TABLE = ((2, 2), (2, 3), (2, 4), (3, 2), (4, 2))

CLOSED = {"R1": closed_R1, "R2": closed_R2, "R3": closed_R3,
          "R4": closed_R4, "R5": closed_R5, "R6": closed_R6}
ORACLE = {"R1": oracle_R1, "R2": oracle_R2, "R3": oracle_R3,
          "R4": oracle_R4, "R5": oracle_R5, "R6": oracle_R6}


def residue_rows(fp: FrobeniusPoint):
    """Every tabulated (formula, args) instance at ``fp``.

    Yields ``(name, args)`` where ``args`` is the positional tail after
    ``fp`` for both the closed form and the oracle.
    """
    n = fp.n
    for i in range(n):
        for p in R1_TABLE:
            yield "R1", (i, p)
        for p in R2_TABLE:
            yield "R2", (i, p)
        for p in R3_TABLE:
            yield "R3", (i, p)
        for p, q in R4_TABLE:
            yield "R4", (i, p, q)
    for i, j in itertools.permutations(range(n), 2):
        for p, q in R5_TABLE:
            yield "R5", (i, j, p, q)
        for p, q in R6_TABLE:
            yield "R6", (i, j, p, q)


SUM_KINDS = ("inv_z", "hsq_inv_z", "C_inv_z", "hsq_u_inv_z",
             "two_pole_inv", "two_pole_C3", "u_weighted_two_pole")


def decays_at_infinity(n: int, kind: str, p: int, q: int = 0) -> bool:
    """True when the integrand is O(z**-2) at infinity, so the residue sum closes."""
    # degree of numerator minus degree of denominator, counting lambda' as z**n
    excess = {
        "inv_z": (n - 1) - n - p,
        "hsq_inv_z": -n - p,
        "C_inv_z": (n + 1 - q) - n - p,
        "hsq_u_inv_z": (n + 1) - n - p,
        "two_pole_inv": (n - 1) - n - p - q,
        "two_pole_C3": (n - 2) - n - p - q,
        "u_weighted_two_pole": (n + 1) - n - p - q,
    }
    if kind not in excess:
        raise ValueError(f"unknown kind {kind!r}")
    return excess[kind] <= -2


def sum_vs_residue(fp: FrobeniusPoint, i: int, kind: str, p: int, q: int = 0, j: int | None = None):
    """Direct sum over critical points and minus the residue(s) at the excluded points.

    ``inv_z``          sum_{k!=i} 1/z_ik^p
    ``hsq_inv_z``      sum_{k!=i} h_k^2/z_ik^p
    ``C_inv_z``        sum_{k!=i} C_kq/z_ik^p
    ``hsq_u_inv_z``    sum_{k!=i} h_k^2 u_ik/z_ik^p
    ``two_pole_inv``   sum_{k!=i,j} 1/(z_ik^p z_jk^q)
    ``two_pole_C3``    sum_{k!=i,j} C_k3/(z_ik^p z_jk^q)
    ``u_weighted_two_pole``  sum_{l!=i,j} u_jl h_l^2/(z_il^p z_jl^q)
    """
    direct, resid, _ = sum_vs_residue_scaled(fp, i, kind, p, q, j)
    return direct, resid


def sum_vs_residue_scaled(fp: FrobeniusPoint, i: int, kind: str, p: int, q: int = 0,
                          j: int | None = None):
    """As :func:`sum_vs_residue`, plus a magnitude for judging the difference.

    The magnitude is the larger of the sum of |direct terms|, the sum of the
    |residue| at each excluded pole, and 1.  Both sides can be empty or
    exactly zero for small n, so a plain max(|a|, |b|) would turn rounding
    noise into a relative error of one.
    """
    if not decays_at_infinity(fp.n, kind, p, q):
        raise ValueError(f"{kind} with p={p}, q={q} has a residue at infinity")
    n = fp.n
    lam = fp.lam
    if kind in ("inv_z", "hsq_inv_z", "C_inv_z", "hsq_u_inv_z"):
        others = [k for k in range(n) if k != i]
        if kind == "inv_z":
            terms = [1 / fp.zd(i, k) ** p for k in others]
            num = poly_derive(lam, 2)
        elif kind == "hsq_inv_z":
            terms = [fp.hsq[k] / fp.zd(i, k) ** p for k in others]
            num = Poly([1])
        elif kind == "C_inv_z":
            terms = [fp.c(k, q) / fp.zd(i, k) ** p for k in others]
            num = poly_derive(lam, q)
        else:
            terms = [fp.hsq[k] * fp.ud(i, k) / fp.zd(i, k) ** p for k in others]
            num = _lam_shift(fp, i)
        powers, poles = [(i, p)], [i]
    else:
        if j is None or j == i:
            raise ValueError("two-pole kinds need a second index j != i")
        others = [k for k in range(n) if k not in (i, j)]
        if kind == "two_pole_inv":
            terms = [1 / (fp.zd(i, k) ** p * fp.zd(j, k) ** q) for k in others]
            num = poly_derive(lam, 2)
        elif kind == "two_pole_C3":
            terms = [fp.C[k][3] / (fp.zd(i, k) ** p * fp.zd(j, k) ** q) for k in others]
            num = poly_derive(lam, 3)
        elif kind == "u_weighted_two_pole":
            terms = [fp.ud(j, k) * fp.hsq[k] / (fp.zd(i, k) ** p * fp.zd(j, k) ** q)
                     for k in others]
            num = _lam_shift(fp, j)
        else:
            raise ValueError(f"unknown kind {kind!r}")
        powers, poles = [(i, p), (j, q)], [i, j]
    parts = [oracle(fp, num, powers, [a]) for a in poles]
    direct = sum(terms, mpmath.mpc(0))
    resid = -sum(parts, mpmath.mpc(0))
    scale = max(sum((abs(t) for t in terms), mpmath.mpf(0)),
                sum((abs(r) for r in parts), mpmath.mpf(0)), mpmath.mpf(1))
    return direct, resid, scale


def elementary_direct(values: Sequence, p: int):
    """Elementary symmetric polynomial e_p by explicit enumeration."""
    if p == 0:
        return mpmath.mpc(1)
    total = mpmath.mpc(0)
    for combo in itertools.combinations(values, p):
        prod = mpmath.mpc(1)
        for v in combo:
            prod *= v
        total += prod
    return total


def elementary_from_power_sums(A: Sequence, p: int):
    """e_p from power sums ``A[1..p]`` (``A[0]`` unused), written out for p <= 6."""
    if p == 0:
        return mpmath.mpc(1)
    if p == 1:
        return A[1]
    if p == 2:
        return (A[1] ** 2 - A[2]) / 2
    if p == 3:
        return (A[1] ** 3 - 3 * A[1] * A[2] + 2 * A[3]) / 6
    if p == 4:
        return (A[1] ** 4 - 6 * A[1] ** 2 * A[2] + 8 * A[1] * A[3] + 3 * A[2] ** 2 - 6 * A[4]) / 24
    if p == 5:
        return (A[1] ** 5 - 10 * A[1] ** 3 * A[2] + 20 * A[1] ** 2 * A[3] + 15 * A[1] * A[2] ** 2
                - 30 * A[1] * A[4] - 20 * A[2] * A[3] + 24 * A[5]) / 120
    if p == 6:
        return (A[1] ** 6 - 15 * A[1] ** 4 * A[2] + 40 * A[1] ** 3 * A[3] + 45 * A[1] ** 2 * A[2] ** 2
                - 90 * A[1] ** 2 * A[4] + 144 * A[1] * A[5] - 120 * A[1] * A[2] * A[3]
                - 15 * A[2] ** 3 + 90 * A[2] * A[4] + 40 * A[3] ** 2 - 120 * A[6]) / 720
    raise ValueError("written-out conversion only up to p = 6")


@dataclass
class PowerSumReport:
    A: list            # A[p] for p = 0..pmax, A[0] = number of terms
    elementary: list   # e_p from the power-sum formulas, p = 0..pmax
    elementary_direct: list
    identities: dict   # name -> (lhs, rhs, magnitude)


def power_sums_and_symmetric(fp: FrobeniusPoint, i: int, k: int, pmax: int = 6) -> PowerSumReport:
    """Power sums ``A_p = sum_{j != i,k} z_kj**-p`` and the identities built on them."""
    if i == k:
        raise ValueError("need i != k")
    if pmax > 6:
        raise ValueError("pmax <= 6")
    n = fp.n
    inv = [1 / fp.zd(k, j) for j in range(n) if j not in (i, k)]
    A = [mpmath.mpc(len(inv))] + [sum((v ** p for v in inv), mpmath.mpc(0)) for p in range(1, pmax + 1)]
    e = [elementary_from_power_sums(A, p) for p in range(pmax + 1)]
    e_direct = [elementary_direct(inv, p) for p in range(pmax + 1)]
    # monomial bounds: e_p of the |values| dominates every product in e_p
    e_abs = [abs(elementary_direct([abs(v) for v in inv], p)) for p in range(pmax + 1)]
    zik = fp.zd(i, k)
    az = abs(zik)
    ids = {}

    def put(name, lhs, rhs, bound):
        ids[name] = (lhs, rhs, max(abs(lhs), abs(rhs), bound))

    for p in range(2, pmax + 1):
        put(f"newton.e{p}", e_direct[p], e[p], e_abs[p] if p <= len(inv) else e_abs[1] ** p + 1)
    put("c3.power_sum", zik * fp.C[k][3], 2 * (-1 + A[1] * zik), 2 * (1 + e_abs[1] * az))
    put("c4.power_sums", zik ** 2 * fp.C[k][4], 3 * (A[1] ** 2 - A[2]) * zik ** 2 - 6 * A[1] * zik,
        6 * e_abs[1] ** 2 * az ** 2 + 6 * e_abs[1] * az)
    # z_ik^p C_{k,p+2} = (p+1)! (z_ik^p e_p - z_ik^{p-1} e_{p-1})
    for p in range(1, pmax + 1):
        if p + 2 > fp.kmax:
            break
        lhs = zik ** p * fp.c(k, p + 2)
        rhs = math.factorial(p + 1) * (zik ** p * e_direct[p] - zik ** (p - 1) * e_direct[p - 1])
        put(f"ck.elementary.p{p}", lhs, rhs,
            math.factorial(p + 1) * (az ** p * e_abs[p] + az ** (p - 1) * e_abs[p - 1]))
    prod = mpmath.mpc(1)
    for j in range(n):
        if j not in (i, k):
            prod *= fp.zd(i, j) / fp.zd(k, j)
    ratio = fp.hsq[k] / fp.hsq[i]
    series = -1 - sum((e_direct[p] * zik ** p for p in range(1, n - 1)), mpmath.mpc(0))
    put("hsq_ratio.product", ratio, -prod, 0)
    put("hsq_ratio.expansion", ratio, series,
        1 + sum((e_abs[p] * az ** p for p in range(1, n - 1)), mpmath.mpf(0)))
    return PowerSumReport(A, e, e_direct, ids)
