"""The genus-two G-function of the A_n Frobenius manifold.

Coefficients are written in terms of the Lame coefficients ``h_i`` and the
rotation coefficients ``gamma_ij`` exactly as they appear in the formula for

    G2 = sum_i G_i u_i,xx + sum_{i!=j} G_ij u_j,x**3 / u_i,x
         + 1/2 sum_{i,j} P_ij u_i,x u_j,x + sum_i Q_i u_i,x**2.

Partial derivatives always come from the closed forms on
:class:`~frobenius_g2.frobenius_an.FrobeniusPoint`.  Sums run over all
indices; ``gamma_aa`` and its derivatives are identically zero, and a summand
is skipped only when an explicit ``u_ab`` in its denominator has ``a == b``.

Every evaluator accumulates into a :class:`TermSum`, which tracks the sum of
absolute values of the monomials alongside the value.  Since the theorem says
these quantities vanish, that magnitude is the scale residuals are measured
against.  Terms are added in a fixed order so results are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath

from .frobenius_an import FrobeniusPoint, Jet2


class TermSum:
    __slots__ = ("value", "scale")

    def __init__(self, value=None, scale=None):
        self.value = mpmath.mpc(0) if value is None else value
        self.scale = mpmath.mpf(0) if scale is None else scale

    def add(self, x) -> None:
        self.value += x
        self.scale += abs(x)

    def __iadd__(self, other: "TermSum") -> "TermSum":
        self.value += other.value
        self.scale += other.scale
        return self

    def times(self, c) -> "TermSum":
        return TermSum(self.value * c, self.scale * abs(c))

    @property
    def rel(self):
        if self.scale == 0:
            return mpmath.mpf(0)
        return abs(self.value) / self.scale

    def __repr__(self):
        return f"TermSum({mpmath.nstr(self.value, 8)}, scale={mpmath.nstr(self.scale, 8)})"


def _dg(fp: FrobeniusPoint, a: int, b: int, c: int):
    # d gamma_ab / d u_c with gamma_aa == 0
    return fp.dgamma[a][b][c]


def _check_jet(fp: FrobeniusPoint, jet: Jet2) -> None:
    if len(jet.ux) != fp.n:
        raise ValueError("jet length does not match n")
    jet.check_nonzero()


def Gi_terms(fp: FrobeniusPoint, jet: Jet2, i: int) -> TermSum:
    _check_jet(fp, jet)
    n = fp.n
    h, g, H, dh = fp.h, fp.gamma, fp.H, fp.dh
    hi = h[i]
    r = [jet.ux[k] / jet.ux[i] for k in range(n)]
    dii = dh[i][i]
    # d_x h_i / u_i,x
    Dxh = mpmath.mpc(0)
    for m in range(n):
        Dxh += r[m] * dh[i][m]
    s = TermSum()
    s.add(Dxh * H[i] / (60 * hi ** 3))
    s.add(-3 * dii * H[i] / (40 * hi ** 3))
    s.add(19 * dii ** 2 / (2880 * hi ** 4))
    s.add(-7 * dii * Dxh / (5760 * hi ** 4))
    for k in range(n):
        if k == i:
            continue
        hk, gik, dkk = h[k], g[i][k], dh[k][k]
        dg_i = _dg(fp, i, k, i)
        dg_k = _dg(fp, i, k, k)
        Dxg = mpmath.mpc(0)
        for m in range(n):
            Dxg += r[m] * _dg(fp, i, k, m)
        s.add(gik * H[i] / (120 * hi * hk))
        s.add(gik * H[k] / (120 * hi * hk) * (7 + r[k]))
        s.add(-gik / (5760 * hi ** 2 * hk) * (4 * dii + Dxh))
        s.add(-gik * dkk / (hi * hk ** 2) * (r[k] / 1152 + mpmath.mpf(7) / 2880))
        s.add(gik * dkk / (384 * hi ** 3))
        s.add(-dg_k * hk / (384 * hi ** 3))
        s.add(dg_i * hk * r[k] / (1920 * hi ** 3))
        s.add(dg_i / (2880 * hi * hk))
        s.add(Dxg / (5760 * hi * hk))
        s.add(dg_k / (hi * hk) * (r[k] / 2880 + mpmath.mpf(7) / 2880))
        s.add(gik * hi * dkk / (2880 * hk ** 4))
        s.add(-gik ** 2 / hi ** 2 * (7 * r[k] / 1152 + mpmath.mpf(19) / 720))
        s.add(gik ** 2 / (1440 * hk ** 2))
    for k in range(n):
        for l in range(n):
            if l == i or l == k:
                continue
            hl2 = h[l] ** 2
            s.add(-hi * g[i][l] * g[k][l] / (2880 * h[k] * hl2))
            s.add(-r[k] * h[k] * g[i][l] * g[k][l] / (1920 * hi * hl2))
    return s


def g2_Gi(fp: FrobeniusPoint, jet: Jet2, i: int):
    return Gi_terms(fp, jet, i).value


def Gij_terms(fp: FrobeniusPoint, i: int, j: int) -> TermSum:
    if i == j:
        raise ValueError("G_ij needs i != j")
    h, g, H, dh = fp.h, fp.gamma, fp.H, fp.dh
    hi, hj, gij = h[i], h[j], g[i][j]
    s = TermSum()
    s.add(-gij ** 2 * H[j] / (120 * hj ** 2))
    s.add(gij ** 3 / (480 * hi * hj))
    s.add(-gij / 5760 * (_dg(fp, i, j, i) / hi ** 2 + _dg(fp, i, j, j) / hj ** 2))
    s.add(gij ** 2 / 5760 * (dh[i][i] / hi ** 3 + 3 * dh[j][j] / hj ** 3))
    for k in range(fp.n):
        hk = h[k]
        s.add(gij * g[i][k] * g[j][k] / (5760 * hk ** 2))
        s.add(gij ** 2 / (5760 * hk) * (g[j][k] / hj - g[i][k] / hi))
    return s


def g2_Gij(fp: FrobeniusPoint, i: int, j: int):
    return Gij_terms(fp, i, j).value


def Gij_closed_terms(fp: FrobeniusPoint, i: int, j: int) -> TermSum:
    """Reduced form of G_ij in terms of z_ij, C and a single sum over k."""
    if i == j:
        raise ValueError("G_ij needs i != j")
    z = fp.zd(i, j)
    ci, cj = fp.C[i], fp.C[j]
    pref = fp.hsq[i] * fp.hsq[j]
    s = TermSum()
    s.add(pref / (5760 * z ** 4) * 6 / z ** 2)
    s.add(-pref / (5760 * z ** 4) * (ci[3] - cj[3]) / z)
    s.add(-pref / (5760 * z ** 4) * cj[3] ** 2 / 2)
    s.add(pref / (5760 * z ** 4) * 2 * cj[4] / 3)
    for k in range(fp.n):
        if k in (i, j):
            continue
        s.add(pref / (2880 * z ** 3) / (fp.zd(i, k) * fp.zd(j, k) ** 2))
    return s


def g2_Gij_closed(fp: FrobeniusPoint, i: int, j: int):
    return Gij_closed_terms(fp, i, j).value


def Pij_terms(fp: FrobeniusPoint, i: int, j: int) -> TermSum:
    """P_ij for any i, j; with i == j the gamma_ii = 0 convention leaves only the surviving terms."""
    n = fp.n
    h, g, H, dh = fp.h, fp.gamma, fp.H, fp.dh
    hi, hj, gij = h[i], h[j], g[i][j]
    Hi, Hj = H[i], H[j]
    dii, djj = dh[i][i], dh[j][j]
    dgiji = _dg(fp, i, j, i)
    s = TermSum()
    s.add(-2 * gij * Hi * Hj / (5 * hi * hj))
    s.add(gij * djj * Hi / (20 * hi * hj ** 2))
    s.add(gij * hi * djj * Hj / (20 * hj ** 4))
    s.add(-19 * gij ** 2 * Hj / (30 * hj ** 2))
    s.add(-dgiji * Hj / (60 * hi * hj))
    s.add(41 * gij ** 3 / (240 * hi * hj))
    s.add(-41 * gij * dgiji / (1440 * hi ** 2))
    s.add(dgiji * djj / (1440 * hi * hj ** 2))
    s.add(79 * gij ** 2 * djj / (1440 * hj ** 3))
    s.add(-gij * dii * djj / (720 * hi ** 2 * hj ** 2))
    s.add(-gij * hi * djj ** 2 / (288 * hj ** 5))
    for k in range(n):
        hk, gik, gjk, Hk, dkk = h[k], g[i][k], g[j][k], H[k], dh[k][k]
        dgiki = _dg(fp, i, k, i)
        # d_k (gamma_ik / h_k)
        d_gik_over_hk = _dg(fp, i, k, k) / hk - gik * dkk / hk ** 2
        s.add(gij * gik * Hj / (60 * hj * hk))
        s.add(-gik * gjk * hi * hj * Hk / (30 * hk ** 4))
        s.add(-gij * gjk * hi * Hj / (60 * hj ** 2 * hk))
        s.add(gik * gjk * hi * Hj / (60 * hj * hk ** 2))
        s.add(-7 * gij * gjk * hi * Hk / (60 * hj ** 2 * hk))
        s.add(-gij * gik * djj / (720 * hj ** 2 * hk))
        s.add(gij * gjk * hi * djj / (240 * hj ** 3 * hk))
        s.add(-gik * gjk * hi * djj / (1440 * hj ** 2 * hk ** 2))
        s.add(gij * gjk * hi * dkk / (720 * hk ** 4))
        s.add(gik * gjk * hi * hj * dkk / (288 * hk ** 5))
        s.add(gjk * dgiji / (1440 * hi * hk))
        s.add(-hj * hk * gij * dgiki / (360 * hi ** 4))
        s.add(-hj * (3 * gik * dgiji + 2 * gij * dgiki) / (1440 * hi ** 2 * hk))
        s.add(-7 * hj * gij * d_gik_over_hk / (1440 * hi ** 2))
        s.add(-hi * hj * gik * _dg(fp, j, k, k) / (480 * hk ** 4))
        s.add(gij ** 2 * gjk / (120 * hj * hk))
        s.add(7 * hi * gij * gjk ** 2 / (160 * hj ** 3))
        s.add(11 * gij * gik * gjk / (2880 * hk ** 2))
        s.add(hj * gik ** 2 * gjk / (96 * hk ** 3))
    for k in range(n):
        hk = h[k]
        for l in range(n):
            hl = h[l]
            gil, gjl, gkl = g[i][l], g[j][l], g[k][l]
            if gjl == 0:
                continue
            s.add(hi * hj * gil * gjl / (720 * hk * hl ** 2) * (gkl / hl - g[j][k] / (2 * hj)))
            s.add(-hi * gij * gjl * gkl / (720 * hk * hl ** 2))
    return s


def g2_Pij(fp: FrobeniusPoint, i: int, j: int):
    return Pij_terms(fp, i, j).value


def half_Pii_closed_terms(fp: FrobeniusPoint, i: int) -> TermSum:
    """Reduced form of P_ii / 2 as a single sum over k."""
    s = TermSum()
    pref = fp.hsq[i] ** 2 / 480
    for k in range(fp.n):
        if k == i:
            continue
        z = fp.zd(i, k)
        s.add(pref / z ** 6)
        s.add(pref * fp.C[k][3] / (2 * z ** 5))
    return s


def Qi_terms(fp: FrobeniusPoint, i: int) -> TermSum:
    n = fp.n
    h, g, H, dh = fp.h, fp.gamma, fp.H, fp.dh
    hi, Hi, dii = h[i], H[i], dh[i][i]
    s = TermSum()
    s.add(4 * Hi ** 3 / (5 * hi ** 2))
    s.add(-7 * dii * Hi ** 2 / (10 * hi ** 3))
    s.add(7 * dii ** 2 * Hi / (48 * hi ** 4))
    s.add(-dii ** 3 / (120 * hi ** 5))
    for k in range(n):
        if k == i:
            continue
        hk, gik, Hk, dkk = h[k], g[i][k], H[k], dh[k][k]
        uik = fp.ud(i, k)
        dgi = _dg(fp, i, k, i)
        dgk = _dg(fp, i, k, k)
        d_gik_over_hk = dgk / hk - gik * dkk / hk ** 2
        d_hi_gik = dii * gik + hi * dgi
        s.add(7 * gik * Hi * Hk / (10 * hi * hk))
        s.add(-gik * dii * Hi / (120 * hi ** 2 * hk))
        s.add(7 * d_gik_over_hk * Hi / (240 * hi))
        s.add(-7 * gik * dii * Hk / (80 * hi ** 2 * hk))
        s.add(gik * Hk / (576 * uik * hi * hk))
        s.add((2 * Hi + 7 * Hk) * dgi / (240 * hi * hk))
        s.add(gik * hk * Hi / (576 * uik * hi ** 3))
        s.add(-31 * gik ** 2 * Hi / (144 * hi ** 2))
        s.add(gik * dii ** 2 / (720 * hi ** 3 * hk))
        s.add(253 * gik ** 2 * dii / (5760 * hi ** 3))
        s.add(-dgi * dii / (960 * hi ** 2 * hk))
        s.add(-gik ** 2 * dkk / (2880 * hk ** 3))
        s.add(-7 * d_gik_over_hk * dii / (1920 * hi ** 2))
        s.add(-7 * dgi * dkk / (5760 * hi * hk ** 2))
        s.add(-41 * dgi * dii * hk / (5760 * hi ** 4))
        s.add(d_hi_gik * dkk / (2880 * hk ** 4))
        s.add(-113 * gik * dgi / (5760 * hi ** 2))
        s.add((3 * dgi + dgk) * gik / (1440 * hk ** 2))
        s.add(-dgi * hk / (576 * uik * hi ** 3))
        s.add(-dgk / (576 * uik * hi * hk))
        s.add(-gik ** 3 / (240 * hi * hk))
    for k in range(n):
        hk = h[k]
        gik = g[i][k]
        dgiki = _dg(fp, i, k, i)
        for l in range(n):
            hl = h[l]
            gil, gkl = g[i][l], g[k][l]
            dgili = _dg(fp, i, l, i)
            s.add(-gkl * (dii * gil + hi * dgili) / (2880 * hk * hl ** 2))
            s.add(gil ** 2 * gkl / (2880 * hk * hl))
            s.add(-gik * gil ** 2 / (240 * hi * hk))
            s.add(-gkl * dgiki / (2880 * hi * hl))
            if l != i:
                s.add(fp.ud(l, k) * gik * _dg(fp, k, l, l) / (1152 * fp.ud(i, l) * hi * hl))
            s.add(fp.ud(k, l) * gik * gkl * dgili / (144 * hi ** 2))
            s.add(hl * gik * dgili / (1440 * hi ** 2 * hk))
            if k != i:
                s.add(hk * fp.ud(k, l) * gkl * dgili / (1152 * fp.ud(i, k) * hi ** 3))
            s.add(hl * fp.ud(i, k) * gik ** 2 * dgili / (40 * hi ** 3))
    return s


def g2_Qi(fp: FrobeniusPoint, i: int):
    return Qi_terms(fp, i).value


@dataclass
class G2Coefficients:
    """All four coefficient families at one point, as TermSums.

    ``Gij[i][i]`` is None; the G_ij sum runs over i != j only.
    """

    Gi: list
    Gij: list
    Pij: list
    Qi: list


def g2_coefficients(fp: FrobeniusPoint, jet: Jet2) -> G2Coefficients:
    _check_jet(fp, jet)
    n = fp.n
    rng = range(n)
    return G2Coefficients(
        Gi=[Gi_terms(fp, jet, i) for i in rng],
        Gij=[[Gij_terms(fp, i, j) if i != j else None for j in rng] for i in rng],
        Pij=[[Pij_terms(fp, i, j) for j in rng] for i in rng],
        Qi=[Qi_terms(fp, i) for i in rng],
    )


def g2_total_terms(fp: FrobeniusPoint, jet: Jet2, coeffs: G2Coefficients | None = None) -> TermSum:
    _check_jet(fp, jet)
    if coeffs is None:
        coeffs = g2_coefficients(fp, jet)
    n = fp.n
    ux, uxx = jet.ux, jet.uxx
    s = TermSum()
    for i in range(n):
        s += coeffs.Gi[i].times(uxx[i])
    for i in range(n):
        for j in range(n):
            if i != j:
                s += coeffs.Gij[i][j].times(ux[j] ** 3 / ux[i])
    for i in range(n):
        for j in range(n):
            s += coeffs.Pij[i][j].times(ux[i] * ux[j] / 2)
    for i in range(n):
        s += coeffs.Qi[i].times(ux[i] ** 2)
    return s


def g2_total(fp: FrobeniusPoint, jet: Jet2):
    return g2_total_terms(fp, jet).value


def t_coefficient_terms(fp: FrobeniusPoint, i: int, k: int) -> TermSum:
    """Sum of the coefficients of u_k,x / u_i,x in G_i."""
    if i == k:
        raise ValueError("T needs i != k")
    n = fp.n
    h, g, H, dh = fp.h, fp.gamma, fp.H, fp.dh
    hi, hk = h[i], h[k]
    dik = dh[i][k]
    s = TermSum()
    s.add(dik * H[i] / (60 * hi ** 3))
    s.add(-7 * dh[i][i] * dik / (5760 * hi ** 4))
    s.add(g[i][k] * H[k] / (120 * hi * hk))
    for l in range(n):
        if l != i:
            s.add(-g[i][l] * dik / (5760 * hi ** 2 * h[l]))
    s.add(-g[i][k] * dh[k][k] / (1152 * hi * hk ** 2))
    s.add(_dg(fp, i, k, i) * hk / (1920 * hi ** 3))
    for l in range(n):
        if l not in (i, k):
            s.add(_dg(fp, i, l, k) / (5760 * hi * h[l]))
    s.add(_dg(fp, i, k, k) / (5760 * hi * hk))
    s.add(_dg(fp, i, k, k) / (2880 * hi * hk))
    s.add(-7 * g[i][k] ** 2 / (1152 * hi ** 2))
    for l in range(n):
        if l not in (i, k):
            s.add(-hk * g[i][l] * g[k][l] / (1920 * hi * h[l] ** 2))
    return s


def t_coefficient(fp: FrobeniusPoint, i: int, k: int):
    return t_coefficient_terms(fp, i, k).value


def lemma31_check(fp: FrobeniusPoint, i: int, which: int):
    """Both sides of one of the four single-sum identities at index ``i``."""
    n = fp.n
    c = fp.C[i]
    hs = fp.hsq[i]
    lhs = mpmath.mpc(0)
    for l in range(n):
        if l == i:
            continue
        z = fp.zd(i, l)
        cl = fp.C[l]
        if which == 1:
            lhs += fp.hsq[l] / z ** 2 * (cl[3] ** 2 - cl[4] - 2 * cl[3] / z)
        elif which == 2:
            lhs += fp.hsq[l] ** 2 / z ** 2 * (3 / z ** 2 - cl[3] / z)
        elif which == 3:
            lhs += fp.hsq[l] / z ** 3 * (cl[3] ** 2 - cl[4] - 3 * cl[3] / z)
        elif which == 4:
            lhs += fp.hsq[l] / z ** 4 * (cl[3] ** 2 - cl[4] - 4 * cl[3] / z)
        else:
            raise ValueError("which must be 1..4")
    if which == 1:
        rhs = -hs / 12 * (6 * c[3] ** 4 - 15 * c[3] ** 2 * c[4] + 4 * c[4] ** 2
                          + 7 * c[3] * c[5] - 2 * c[6])
    elif which == 2:
        rhs = hs ** 2 / 240 * (75 * c[3] ** 4 - 120 * c[3] ** 2 * c[4] + 20 * c[4] ** 2
                               + 30 * c[3] * c[5] - 4 * c[6])
    elif which == 3:
        rhs = -hs / 240 * (75 * c[3] ** 5 - 240 * c[3] ** 3 * c[4] + 140 * c[3] * c[4] ** 2
                           + 120 * c[3] ** 2 * c[5] - 60 * c[4] * c[5] - 44 * c[3] * c[6]
                           + 10 * c[7])
    elif which == 4:
        rhs = -hs / 720 * (135 * c[3] ** 6 - 525 * c[3] ** 4 * c[4] + 480 * c[3] ** 2 * c[4] ** 2
                           - 60 * c[4] ** 3 + 270 * c[3] ** 3 * c[5] - 300 * c[3] * c[4] * c[5]
                           + 30 * c[5] ** 2 - 108 * c[3] ** 2 * c[6] + 52 * c[4] * c[6]
                           + 32 * c[3] * c[7] - 6 * c[8])
    else:
        raise ValueError("which must be 1..4")
    return lhs, rhs


def _Y(fp: FrobeniusPoint, i: int, j: int):
    z = fp.zd(i, j)
    ci, cj = fp.C[i], fp.C[j]
    bracket = (-22 * ci[3] / z ** 3
               + (19 * ci[3] ** 2 - 104 * ci[4]) / (2 * z ** 2)
               + (15 * ci[3] ** 3 - 34 * ci[3] * ci[4] + 21 * ci[5]) / z
               + mpmath.mpf(45) / 4 * ci[3] ** 4 - 22 * ci[3] ** 2 * ci[4]
               - cj[3] ** 2 * ci[4] / 6 + 5 * ci[4] ** 2
               + mpmath.mpf(49) / 6 * ci[3] * ci[5] - mpmath.mpf(23) / 10 * ci[6])
    return fp.hsq[i] * fp.hsq[j] / (5760 * z ** 2) * bracket


def pij_antisymmetric_form(fp: FrobeniusPoint, i: int, j: int):
    """Antisymmetric rewriting of P_ij as residue sums plus Y_ij - Y_ji."""
    if i == j:
        raise ValueError("needs i != j")
    n = fp.n
    zij = fp.zd(i, j)
    a = mpmath.mpc(0)
    for k in range(n):
        if k != i:
            a += 2 * fp.hsq[j] * fp.hsq[k] * fp.C[k][3] / fp.zd(i, k) ** 3
    b = mpmath.mpc(0)
    for k in range(n):
        if k != j:
            b += 2 * fp.hsq[i] * fp.hsq[k] * fp.C[k][3] / fp.zd(j, k) ** 3
    return 7 / (2880 * zij ** 2) * (a - b) + _Y(fp, i, j) - _Y(fp, j, i)


def pij_decomposition_check(fp: FrobeniusPoint, i: int, j: int):
    return g2_Pij(fp, i, j), pij_antisymmetric_form(fp, i, j)
