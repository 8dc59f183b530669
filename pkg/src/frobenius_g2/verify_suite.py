"""Named checks, the randomized sweep driver and the JSON report.

Every check is evaluated on each (n, trial) work unit.  A work unit is one
admissible parameter point from :func:`sample_admissible` plus a random jet;
a check turns it into a list of ``(residual, magnitude)`` pairs and the
entry records the worst ratio.  Work units share nothing, so the report is
the same for any number of worker processes.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from functools import partial
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import mpmath

from . import g2_function as g2
from . import residue_engine as re_
from .frobenius_an import (
    CausticError,
    FrobeniusPoint,
    ParamPoint,
    H_definitional,
    admissible,
    build_point,
    build_superpotential,
    compute_H,
    flat_coordinates,
    invert_u_to_t,
    lame_partial,
    random_jet,
    rotation_partial,
    sample_admissible,
)
from .mp_series import precision
from .polynomial import CAUSTIC_DELTA, Poly, poly_derive, poly_eval

MIN_SUITE_PRECISION = 128
REPORT_DIGITS = 40
DEFAULT_N = tuple(range(1, 9))
DEFAULT_TRIALS = 20


class SuiteError(ValueError):
    pass


@dataclass(frozen=True)
class CheckSpec:
    check_id: str
    evaluate: Callable
    tolerance: float
    n_range: tuple = DEFAULT_N
    trials: int = DEFAULT_TRIALS
    gating: bool = True
    covers: tuple = ()

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError(f"{self.check_id}: tolerance must be positive")


def effective_tolerance(base: float, precision_bits: int) -> float:
    """Tolerance of a check whose nominal threshold at 256 bits is ``base``.

    Below 256 bits the threshold is relaxed to ``10**-floor(12 * bits / 128)``
    (1e-12 at 128 bits) whenever that is looser.
    """
    if precision_bits >= 256:
        return base
    return max(base, 10.0 ** -math.floor(12 * precision_bits / 128))


# ---------------------------------------------------------------- work units

class Sample:
    """One admissible point, its jet and a private random stream for a trial."""

    def __init__(self, n: int, seed: int, trial: int, param: ParamPoint):
        self.n = n
        self.seed = seed
        self.trial = trial
        self.param = param
        self.fp = build_point(param)
        self.jet = random_jet(n, random.Random(f"jet:{seed}:{n}:{trial}"))
        self._memo = {}

    def rng(self, tag: str) -> random.Random:
        return random.Random(f"{tag}:{self.seed}:{self.n}:{self.trial}")

    def memo(self, key, fn):
        if key not in self._memo:
            self._memo[key] = fn()
        return self._memo[key]

    def coefficients(self) -> g2.G2Coefficients:
        return self.memo("g2", lambda: g2.g2_coefficients(self.fp, self.jet))


def _cmp(a, b, floor=1):
    """``(|a - b|, max(|a|, |b|, floor))``."""
    return abs(a - b), max(abs(a), abs(b), mpmath.mpf(floor))


def _ts(t: g2.TermSum):
    return abs(t.value), t.scale


def _pairs(n):
    return itertools.permutations(range(n), 2)


# ---------------------------------------------------------------- derivative oracle

def fd_partials(fp: FrobeniusPoint, k: int, step=None):
    """Central differences of every ``h_i`` and ``gamma_ij`` along ``u_k``.

    Each side is found by Newton inversion of t -> u starting from ``fp.t``,
    with the critical points continued from ``fp.z`` so labels line up, and
    the sign of each perturbed ``h_i`` chosen nearest the base value.
    """
    n = fp.n
    if step is None:
        step = mpmath.ldexp(mpmath.mpf(1), -(mpmath.mp.prec // 3))
    sides = []
    for sgn in (1, -1):
        target = list(fp.u)
        target[k] += sgn * step
        p, z = invert_u_to_t(n, target, fp.t, return_roots=True)
        lam2 = poly_derive(build_superpotential(p), 2)
        h = []
        for i in range(n):
            hi = mpmath.sqrt(1 / poly_eval(lam2, z[i]))
            if abs(hi + fp.h[i]) < abs(hi - fp.h[i]):
                hi = -hi
            h.append(hi)
        g = [[h[i] * h[j] / (z[i] - z[j]) ** 2 if i != j else mpmath.mpc(0) for j in range(n)]
             for i in range(n)]
        sides.append((h, g))
    (hp, gp), (hm, gm) = sides
    dh = [(hp[i] - hm[i]) / (2 * step) for i in range(n)]
    dg = [[(gp[i][j] - gm[i][j]) / (2 * step) for j in range(n)] for i in range(n)]
    return dh, dg


def derivative_oracle(fp: FrobeniusPoint, i: int, k_or_pair, kind: str, step=None):
    """Finite-difference dh_i/du_k (``kind="lame"``, ``k_or_pair=k``) or
    dgamma_ij/du_k (``kind="rotation"``, ``k_or_pair=(j, k)``)."""
    if kind == "lame":
        dh, _ = fd_partials(fp, k_or_pair, step)
        return dh[i]
    if kind == "rotation":
        j, k = k_or_pair
        if i == j:
            raise ValueError("rotation coefficient needs i != j")
        _, dg = fd_partials(fp, k, step)
        return dg[i][j]
    raise ValueError(f"unknown kind {kind!r}")


def _fd(s: Sample, k: int):
    return s.memo(("fd", k), lambda: fd_partials(s.fp, k))


# ---------------------------------------------------------------- frobenius_an checks

def chk_superpotential_layout(s: Sample):
    lam = s.fp.lam
    n = s.n
    expect = list(s.param.t) + [0, 1]
    got = list(lam.coeffs) + [0] * (n + 2 - len(lam.coeffs))
    return [(sum((abs(a - b) for a, b in zip(got, expect)), mpmath.mpf(0)), mpmath.mpf(1))]


def chk_critical_residual(s: Sample):
    fp = s.fp
    dlam = poly_derive(fp.lam, 1)
    return [(abs(poly_eval(dlam, z)), dlam.max_coeff() * max(1, abs(z)) ** dlam.degree) for z in fp.z]


def chk_hsq_inverse(s: Sample):
    lam2 = poly_derive(s.fp.lam, 2)
    out = []
    for i in range(s.n):
        out.append((abs(s.fp.hsq[i] * poly_eval(lam2, s.fp.z[i]) - 1), mpmath.mpf(1)))
        out.append((abs(s.fp.h[i] ** 2 - s.fp.hsq[i]), abs(s.fp.hsq[i])))
    return out


def chk_gamma_symmetric(s: Sample):
    fp = s.fp
    out = [(abs(fp.gamma[i][i]), mpmath.mpf(1)) for i in range(s.n)]
    for i, j in _pairs(s.n):
        out.append((abs(fp.gamma[i][j] - fp.gamma[j][i]), abs(fp.gamma[i][j])))
    for i in range(s.n):
        for k in range(s.n + 2, fp.kmax + 1):
            out.append((abs(fp.C[i][k]), mpmath.mpf(1)))
    return out


def chk_H_two_forms(s: Sample):
    closed = compute_H(s.fp)
    return [(abs(c - val), max(mag, abs(c)))
            for c, (val, mag) in zip(closed, H_definitional(s.fp))]


def chk_lame_fd_offdiag(s: Sample):
    out = []
    for k in range(s.n):
        dh, _ = _fd(s, k)
        for i in range(s.n):
            if i != k:
                out.append(_cmp(dh[i], lame_partial(s.fp, i, k), 0))
    return out


def chk_lame_fd_diag(s: Sample):
    out = []
    for i in range(s.n):
        dh, _ = _fd(s, i)
        out.append(_cmp(dh[i], lame_partial(s.fp, i, i), 0))
    return out


def chk_rotation_fd_distinct(s: Sample):
    out = []
    for k in range(s.n):
        _, dg = _fd(s, k)
        for i, j in _pairs(s.n):
            if k not in (i, j):
                out.append(_cmp(dg[i][j], rotation_partial(s.fp, i, j, k), 0))
    return out


def chk_rotation_fd_own(s: Sample):
    out = []
    for i, j in _pairs(s.n):
        _, dg = _fd(s, i)
        out.append(_cmp(dg[i][j], rotation_partial(s.fp, i, j, i), 0))
    return out


def chk_de_lame(s: Sample):
    fp = s.fp
    out = []
    for i in range(s.n):
        for k in range(s.n):
            if k != i:
                out.append(_cmp(fp.dh[i][k], fp.gamma[i][k] * fp.h[k], 0))
        terms = [fp.gamma[i][k] * fp.h[k] for k in range(s.n)]
        rhs = -sum(terms, mpmath.mpc(0))
        out.append((abs(fp.dh[i][i] - rhs),
                    max(abs(fp.dh[i][i]), sum((abs(t) for t in terms), mpmath.mpf(0)))))
    return out


def chk_de_rotation(s: Sample):
    fp = s.fp
    n = s.n
    out = []
    for i, j in _pairs(n):
        for k in range(n):
            if k not in (i, j):
                out.append(_cmp(fp.dgamma[i][j][k], fp.gamma[i][k] * fp.gamma[k][j], 0))
        terms = [fp.ud(j, k) * fp.gamma[i][k] * fp.gamma[k][j] for k in range(n)] + [-fp.gamma[i][j]]
        rhs = sum(terms, mpmath.mpc(0)) / fp.ud(i, j)
        mag = sum((abs(t) for t in terms), mpmath.mpf(0)) / abs(fp.ud(i, j))
        out.append((abs(fp.dgamma[i][j][i] - rhs), max(mag, abs(fp.dgamma[i][j][i]))))
    return out


def chk_e_invariance(s: Sample):
    fp = s.fp
    n = s.n
    out = []
    for i in range(n):
        row = fp.dh[i]
        out.append((abs(sum(row, mpmath.mpc(0))), sum((abs(x) for x in row), mpmath.mpf(0))))
    for i, j in _pairs(n):
        row = fp.dgamma[i][j]
        out.append((abs(sum(row, mpmath.mpc(0))), sum((abs(x) for x in row), mpmath.mpf(0))))
    return out


def chk_euler(s: Sample):
    # h_i has weight -(n-1)/(2(n+1)) and gamma_ij weight -1 in units of u
    fp = s.fp
    n = s.n
    w = mpmath.mpf(-(n - 1)) / (2 * (n + 1))
    out = []
    for i in range(n):
        terms = [fp.u[k] * fp.dh[i][k] for k in range(n)]
        out.append((abs(sum(terms, mpmath.mpc(0)) - w * fp.h[i]),
                    sum((abs(t) for t in terms), abs(w * fp.h[i]))))
    for i, j in _pairs(n):
        terms = [fp.u[k] * fp.dgamma[i][j][k] for k in range(n)]
        out.append((abs(sum(terms, mpmath.mpc(0)) + fp.gamma[i][j]),
                    sum((abs(t) for t in terms), abs(fp.gamma[i][j]))))
    return out


def _nearest(z, pool):
    return min(range(len(pool)), key=lambda m: abs(pool[m] - z))


def chk_quasihomogeneity(s: Sample):
    """t_a -> c**(n+2-a) t_a rescales z by c, u by c**(n+1), hsq by c**(1-n),
    C_ik by c**(2-k) and H by c**(-1-n)."""
    n = s.n
    rng = s.rng("qh")
    c = mpmath.mpc(rng.uniform(0.7, 1.3), rng.uniform(-0.3, 0.3))
    t2 = tuple(c ** (n + 2 - a) * s.param.t[a - 1] for a in range(1, n + 1))
    fp2 = build_point(ParamPoint(n, t2))
    fp = s.fp
    out = []
    for i in range(n):
        m = _nearest(c * fp.z[i], fp2.z)
        out.append(_cmp(fp2.z[m], c * fp.z[i]))
        out.append(_cmp(fp2.u[m], c ** (n + 1) * fp.u[i]))
        out.append(_cmp(fp2.hsq[m], c ** (1 - n) * fp.hsq[i]))
        for k in range(3, n + 2):
            out.append(_cmp(fp2.C[m][k], c ** (2 - k) * fp.C[i][k]))
        out.append(_cmp(fp2.H[m], c ** (-1 - n) * fp.H[i], 0))
    return out


def chk_flat_examples(s: Sample):
    t = s.param.t
    v = flat_coordinates(s.param)
    expect = list(t)
    if s.n == 3:
        expect[0] = t[0] - t[2] ** 2 / 8
    return [_cmp(a, b) for a, b in zip(v, expect)]


def chk_flat_weights(s: Sample):
    n = s.n
    rng = s.rng("flat")
    c = mpmath.mpc(rng.uniform(0.7, 1.3), rng.uniform(-0.3, 0.3))
    t2 = tuple(c ** (n + 2 - a) * s.param.t[a - 1] for a in range(1, n + 1))
    v = flat_coordinates(s.param)
    v2 = flat_coordinates(ParamPoint(n, t2))
    out = [_cmp(v2[a - 1], c ** (n + 2 - a) * v[a - 1]) for a in range(1, n + 1)]
    # the top two flat coordinates coincide with t
    for a in (n, n - 1):
        if a >= 1:
            out.append(_cmp(v[a - 1], s.param.t[a - 1]))
    return out


def chk_invert_roundtrip(s: Sample):
    rng = s.rng("inv")
    guess = [x + mpmath.mpc(rng.uniform(-1, 1), rng.uniform(-1, 1)) * mpmath.mpf("1e-6")
             for x in s.param.t]
    p = invert_u_to_t(s.n, s.fp.u, guess)
    return [_cmp(a, b) for a, b in zip(p.t, s.param.t)]


def chk_sample_admissible(s: Sample):
    fp = s.fp
    ok = admissible(fp, CAUSTIC_DELTA)
    return [(mpmath.mpf(0 if ok else 1), mpmath.mpf(1))]


# ---------------------------------------------------------------- residue_engine checks

def chk_global_residue(s: Sample):
    """Residues of a random function decaying at infinity sum to zero."""
    fp = s.fp
    n = s.n
    rng = s.rng("grt")
    mult = [rng.randint(0, 3) for _ in range(n)]
    deg = sum(mult) + n - 2
    if deg < 0:
        return [(mpmath.mpf(0), mpmath.mpf(0))]
    num = Poly([mpmath.mpc(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(deg + 1)])
    f = re_.RationalAtPoles(num, tuple((fp.z[i], mult[i]) for i in range(n) if mult[i]),
                            poly_derive(fp.lam, 1))
    parts = [re_.residue_at(f, fp.z[i], mult[i] + 1) for i in range(n)]
    return [(abs(sum(parts, mpmath.mpc(0))), sum((abs(r) for r in parts), mpmath.mpf(0)))]


def chk_guard_robustness(s: Sample):
    fp = s.fp
    out = []
    for i in range(s.n):
        f = re_.RationalAtPoles(poly_derive(fp.lam, 2), ((fp.z[i], 3),), poly_derive(fp.lam, 1))
        out.append(_cmp(re_.residue_at(f, fp.z[i], 4, guard=2),
                        re_.residue_at(f, fp.z[i], 4, guard=4), 0))
    return out


def _appb_eval(name: str, args: tuple, s: Sample):
    closed = re_.CLOSED[name]
    oracle = re_.ORACLE[name]
    fp = s.fp
    out = []
    if name in ("R5", "R6"):
        for i, j in _pairs(s.n):
            out.append(_cmp(closed(fp, i, j, *args), oracle(fp, i, j, *args)))
    else:
        for i in range(s.n):
            out.append(_cmp(closed(fp, i, *args), oracle(fp, i, *args)))
    return out


def _appb(name: str, args: tuple):
    return partial(_appb_eval, name, args)


SUM_SINGLE_P = tuple(range(1, 7))
SUM_C_Q = (3, 4, 5)
SUM_TWO_POLE = ((1, 2), (2, 2), (3, 2), (2, 3))


def _sums_eval(kind: str, s: Sample):
    fp = s.fp
    n = s.n
    out = []
    if kind in ("inv_z", "hsq_inv_z", "hsq_u_inv_z", "C_inv_z"):
        qs = SUM_C_Q if kind == "C_inv_z" else (0,)
        for i in range(n):
            for p in SUM_SINGLE_P:
                for q in qs:
                    if re_.decays_at_infinity(n, kind, p, q):
                        d, r, mag = re_.sum_vs_residue_scaled(fp, i, kind, p, q)
                        out.append((abs(d - r), mag))
    else:
        for i, j in _pairs(n):
            for p, q in SUM_TWO_POLE:
                if re_.decays_at_infinity(n, kind, p, q):
                    d, r, mag = re_.sum_vs_residue_scaled(fp, i, kind, p, q, j)
                    out.append((abs(d - r), mag))
    return out


def _sums(kind: str):
    return partial(_sums_eval, kind)


def _symmetric_eval(prefix: str, s: Sample):
    out = []
    for i, k in _pairs(s.n):
        rep = s.memo(("ps", i, k), partial(re_.power_sums_and_symmetric, s.fp, i, k))
        for name, (a, b, mag) in rep.identities.items():
            if name.startswith(prefix):
                out.append((abs(a - b), mag))
    return out


def _symmetric(prefix: str):
    return partial(_symmetric_eval, prefix)


# ---------------------------------------------------------------- g2_function checks

def chk_Gi(s: Sample):
    return [_ts(t) for t in s.coefficients().Gi]


def chk_Gij(s: Sample):
    return [_ts(s.coefficients().Gij[i][j]) for i, j in _pairs(s.n)]


def chk_Gij_closed(s: Sample):
    return [_ts(g2.Gij_closed_terms(s.fp, i, j)) for i, j in _pairs(s.n)]


def chk_Gij_consistency(s: Sample):
    out = []
    for i, j in _pairs(s.n):
        a = s.coefficients().Gij[i][j]
        b = g2.Gij_closed_terms(s.fp, i, j)
        out.append((abs(a.value - b.value), a.scale + b.scale))
    return out


def chk_Pij_skew(s: Sample):
    P = s.coefficients().Pij
    out = []
    for i in range(s.n):
        for j in range(i + 1, s.n):
            out.append((abs(P[i][j].value + P[j][i].value), P[i][j].scale + P[j][i].scale))
    return out


def chk_Pii_closed(s: Sample):
    out = []
    for i in range(s.n):
        a = s.coefficients().Pij[i][i].times(mpmath.mpf(1) / 2)
        b = g2.half_Pii_closed_terms(s.fp, i)
        out.append((abs(a.value - b.value), a.scale + b.scale))
    return out


def chk_PQ_endpoint(s: Sample):
    c = s.coefficients()
    out = []
    for i in range(s.n):
        t = c.Pij[i][i].times(mpmath.mpf(1) / 2)
        t += c.Qi[i]
        out.append(_ts(t))
    return out


def chk_T(s: Sample):
    return [_ts(g2.t_coefficient_terms(s.fp, i, k)) for i, k in _pairs(s.n)]


def chk_total(s: Sample):
    return [_ts(g2.g2_total_terms(s.fp, s.jet, s.coefficients()))]


def chk_jet_covariance(s: Sample):
    rng = s.rng("jet-scale")
    c = mpmath.mpc(rng.uniform(0.5, 2), rng.uniform(-1, 1))
    scaled = s.jet.scaled(c)
    out = []
    for i in range(s.n):
        a = s.coefficients().Gi[i]
        b = g2.Gi_terms(s.fp, scaled, i)
        out.append((abs(a.value - b.value), a.scale + b.scale))
    return out


def chk_branch_flip(s: Sample):
    m = s.rng("flip").randrange(s.n)
    fp2 = s.fp.with_flipped_branch(m)
    base = s.coefficients()
    flip = g2.g2_coefficients(fp2, s.jet)
    out = []

    def both(a, b):
        out.append((abs(a.value - b.value), a.scale + b.scale))

    for i in range(s.n):
        both(base.Gi[i], flip.Gi[i])
        both(base.Qi[i], flip.Qi[i])
        out.append(_cmp(s.fp.H[i], fp2.H[i], 0))
        for j in range(s.n):
            both(base.Pij[i][j], flip.Pij[i][j])
            if i != j:
                both(base.Gij[i][j], flip.Gij[i][j])
                both(g2.t_coefficient_terms(s.fp, i, j), g2.t_coefficient_terms(fp2, i, j))
    return out


def _lemma31_eval(which: int, s: Sample):
    return [_cmp(*g2.lemma31_check(s.fp, i, which)) for i in range(s.n)]


def _lemma31(which: int):
    return partial(_lemma31_eval, which)


def chk_pij_decomposition(s: Sample):
    out = []
    for i, j in _pairs(s.n):
        a, b = g2.pij_decomposition_check(s.fp, i, j)
        out.append((abs(a - b), s.coefficients().Pij[i][j].scale))
    return out


def chk_pij_decomposition_antisym(s: Sample):
    out = []
    for i in range(s.n):
        for j in range(i + 1, s.n):
            a = g2.pij_antisymmetric_form(s.fp, i, j)
            b = g2.pij_antisymmetric_form(s.fp, j, i)
            out.append((abs(a + b), max(abs(a), abs(b), mpmath.mpf(1))))
    return out


# ---------------------------------------------------------------- registry

def default_registry() -> list:
    two_up = tuple(range(2, 9))
    reg = [
        CheckSpec("an.superpotential.layout", chk_superpotential_layout, 1e-60,
                  covers=("build_superpotential",)),
        CheckSpec("an.critical.residual", chk_critical_residual, 1e-60,
                  covers=("build_point", "find_roots")),
        CheckSpec("an.hsq.inverse", chk_hsq_inverse, 1e-60, covers=("build_point",)),
        CheckSpec("an.tables.structure", chk_gamma_symmetric, 1e-60, covers=("build_point",)),
        CheckSpec("an.H.two_forms", chk_H_two_forms, 1e-40, covers=("compute_H",)),
        CheckSpec("an.lame.fd_offdiag", chk_lame_fd_offdiag, 1e-20,
                  covers=("lame_partial", "invert_u_to_t")),
        CheckSpec("an.lame.fd_diag", chk_lame_fd_diag, 1e-20, covers=("lame_partial",)),
        CheckSpec("an.rotation.fd_distinct", chk_rotation_fd_distinct, 1e-20,
                  n_range=tuple(range(3, 9)), covers=("rotation_partial",)),
        CheckSpec("an.rotation.fd_own", chk_rotation_fd_own, 1e-20, n_range=two_up,
                  covers=("rotation_partial",)),
        CheckSpec("an.lame.darboux_egoroff", chk_de_lame, 1e-60, covers=("lame_partial",)),
        CheckSpec("an.rotation.darboux_egoroff", chk_de_rotation, 1e-60, n_range=two_up,
                  covers=("rotation_partial",)),
        CheckSpec("an.e_invariance", chk_e_invariance, 1e-60,
                  covers=("lame_partial", "rotation_partial")),
        CheckSpec("an.euler", chk_euler, 1e-60, covers=("lame_partial", "rotation_partial")),
        CheckSpec("an.quasihomogeneity", chk_quasihomogeneity, 1e-60,
                  covers=("build_point", "compute_H")),
        CheckSpec("an.flat.examples", chk_flat_examples, 1e-60, n_range=(1, 2, 3),
                  covers=("flat_coordinates",)),
        CheckSpec("an.flat.weights", chk_flat_weights, 1e-60, covers=("flat_coordinates",)),
        CheckSpec("an.invert.roundtrip", chk_invert_roundtrip, 1e-60, covers=("invert_u_to_t",)),
        CheckSpec("an.sample.admissible", chk_sample_admissible, 0.5,
                  covers=("sample_admissible",)),
        CheckSpec("resid.global_theorem", chk_global_residue, 1e-50, covers=("residue_at",)),
        CheckSpec("resid.guard_robustness", chk_guard_robustness, 1e-70, covers=("residue_at",)),
    ]
    for p in re_.R1_TABLE:
        reg.append(CheckSpec(f"appB.R1.p{p}", _appb("R1", (p,)), 1e-40, covers=("closed_R1",)))
    for p in re_.R2_TABLE:
        reg.append(CheckSpec(f"appB.R2.p{p}", _appb("R2", (p,)), 1e-40, covers=("closed_R2",)))
    for p in re_.R3_TABLE:
        reg.append(CheckSpec(f"appB.R3.p{p}", _appb("R3", (p,)), 1e-40, covers=("closed_R3",)))
    for p, q in re_.R4_TABLE:
        reg.append(CheckSpec(f"appB.R4.p{p}q{q}", _appb("R4", (p, q)), 1e-40, covers=("closed_R4",)))
    for p, q in re_.R5_TABLE:
        reg.append(CheckSpec(f"appB.R5.p{p}q{q}", _appb("R5", (p, q)), 1e-40, n_range=two_up,
                             covers=("closed_R5",)))
    for p, q in re_.R6_TABLE:
        reg.append(CheckSpec(f"appB.R6.p{p}q{q}", _appb("R6", (p, q)), 1e-40, n_range=two_up,
                             covers=("closed_R6",)))
    for kind in re_.SUM_KINDS:
        nr = DEFAULT_N if kind in ("inv_z", "hsq_inv_z", "hsq_u_inv_z", "C_inv_z") else two_up
        reg.append(CheckSpec(f"sums.{kind}", _sums(kind), 1e-40, n_range=nr,
                             covers=("sum_vs_residue",)))
    for prefix in ("newton", "c3", "c4", "ck", "hsq_ratio"):
        reg.append(CheckSpec(f"sym.{prefix}", _symmetric(prefix + "."), 1e-50, n_range=two_up,
                             covers=("power_sums_and_symmetric",)))
    reg += [
        CheckSpec("g2.Gi.vanish", chk_Gi, 1e-30, covers=("g2_Gi",)),
        CheckSpec("g2.Gij.vanish", chk_Gij, 1e-30, n_range=two_up, covers=("g2_Gij",)),
        CheckSpec("g2.Gij.closed_vanish", chk_Gij_closed, 1e-30, n_range=two_up,
                  covers=("g2_Gij_closed",)),
        CheckSpec("g2.Gij.consistency", chk_Gij_consistency, 1e-40, n_range=two_up,
                  covers=("g2_Gij", "g2_Gij_closed")),
        CheckSpec("g2.Pij.skew", chk_Pij_skew, 1e-30, n_range=two_up, covers=("g2_Pij",)),
        CheckSpec("g2.Pii.closed", chk_Pii_closed, 1e-50, covers=("g2_Pij",)),
        CheckSpec("g2.PQ.endpoint", chk_PQ_endpoint, 1e-30, covers=("g2_Pij", "g2_Qi")),
        CheckSpec("g2.T.vanish", chk_T, 1e-30, n_range=two_up, covers=("t_coefficient",)),
        CheckSpec("g2.total.vanish", chk_total, 1e-30, covers=("g2_total",)),
        CheckSpec("g2.jet_covariance", chk_jet_covariance, 1e-60, covers=("g2_Gi",)),
        CheckSpec("g2.branch_flip", chk_branch_flip, 1e-60,
                  covers=("g2_Gi", "g2_Gij", "g2_Pij", "g2_Qi", "t_coefficient")),
    ]
    for which in (1, 2, 3, 4):
        reg.append(CheckSpec(f"lemma31.iden{which}", _lemma31(which), 1e-40,
                             covers=("lemma31_check",)))
    reg += [
        CheckSpec("g2.pij_decomposition", chk_pij_decomposition, 1e-25, n_range=two_up,
                  trials=5, gating=False, covers=("pij_decomposition_check",)),
        CheckSpec("g2.pij_decomposition.antisym", chk_pij_decomposition_antisym, 1e-60,
                  n_range=two_up, covers=("pij_decomposition_check",)),
    ]
    return reg


# operations the default registry must exercise
COVERED_OPERATIONS = (
    "build_superpotential", "build_point", "compute_H", "lame_partial", "rotation_partial",
    "flat_coordinates", "invert_u_to_t", "sample_admissible",
    "residue_at", "closed_R1", "closed_R2", "closed_R3", "closed_R4", "closed_R5", "closed_R6",
    "sum_vs_residue", "power_sums_and_symmetric",
    "g2_Gi", "g2_Gij", "g2_Gij_closed", "g2_Pij", "g2_Qi", "g2_total", "t_coefficient",
    "lemma31_check", "pij_decomposition_check",
)


def filter_registry(registry: Sequence[CheckSpec], n_values=None, trials=None,
                    tolerance=None, select=None) -> list:
    """Restrict n ranges, override trial counts or tolerances, or keep ids with a prefix."""
    out = []
    for spec in registry:
        if select and not any(spec.check_id.startswith(s) for s in select):
            continue
        kw = {}
        if n_values is not None:
            kw["n_range"] = tuple(n for n in spec.n_range if n in set(n_values))
            if not kw["n_range"]:
                continue
        if trials is not None:
            kw["trials"] = trials
        if tolerance is not None:
            kw["tolerance"] = tolerance
        out.append(replace(spec, **kw))
    return out


# ---------------------------------------------------------------- report

@dataclass
class VerificationReport:
    seed: int
    precision_bits: int
    entries: list = field(default_factory=list)
    wall_time_seconds: float = 0.0
    rejected: list = field(default_factory=list)

    @property
    def summary(self) -> dict:
        passed = sum(1 for e in self.entries if e["passed"])
        gating_failed = sum(1 for e in self.entries if not e["passed"] and e["gating"])
        return {
            "total": len(self.entries),
            "passed": passed,
            "failed": len(self.entries) - passed,
            "gating_failed": gating_failed,
            "wall_time_seconds": round(self.wall_time_seconds, 3),
        }

    @property
    def ok(self) -> bool:
        return self.summary["gating_failed"] == 0

    def failures(self, gating_only: bool = True) -> list:
        return [e for e in self.entries if not e["passed"] and (e["gating"] or not gating_only)]

    def worst(self, check_id: str) -> dict:
        rows = [e for e in self.entries if e["check_id"] == check_id]
        if not rows:
            raise KeyError(check_id)
        return max(rows, key=lambda e: mpmath.mpf(e["rel_residual"]))

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "precision_bits": self.precision_bits,
            "entries": self.entries,
            "rejected": self.rejected,
            "summary": self.summary,
        }


def _dec(x) -> str:
    if x == mpmath.inf:
        return "inf"
    return mpmath.nstr(mpmath.mpf(x), REPORT_DIGITS)


def _run_unit(registry: Sequence[CheckSpec], n: int, trial: int, seed: int,
              precision_bits: int, param_json: dict) -> tuple:
    """Run every applicable check on one sample; returns (entries, rejection or None)."""
    with precision(precision_bits):
        param = ParamPoint.from_json(param_json)
        try:
            sample = Sample(n, seed, trial, param)
        except CausticError as exc:
            return [], {"n": n, "trial": trial, "reason": str(exc)}
        entries = []
        for spec in registry:
            if n not in spec.n_range or trial >= spec.trials:
                continue
            tol = effective_tolerance(spec.tolerance, precision_bits)
            measures = spec.evaluate(sample)
            worst = (mpmath.mpf(0), mpmath.mpf(0), mpmath.mpf(0))
            for resid, mag in measures:
                if resid == 0:
                    rel = mpmath.mpf(0)
                elif mag == 0:
                    rel = mpmath.inf
                else:
                    rel = resid / mag
                if rel > worst[2] or (rel == worst[2] and resid > worst[0]):
                    worst = (resid, mag, rel)
            passed = bool(worst[2] <= tol)
            entry = {
                "check_id": spec.check_id,
                "n": n,
                "seed": seed,
                "trial": trial,
                "residual": _dec(worst[0]),
                "termscale": _dec(worst[1]),
                "rel_residual": _dec(worst[2]),
                "tolerance": f"{tol:.1e}",
                "gating": spec.gating,
                "instances": len(measures),
                "passed": passed,
            }
            if not passed and spec.gating:
                entry["point"] = param.to_json()
                entry["jet"] = sample.jet.to_json()
            entries.append(entry)
        return entries, None


def _run_unit_star(args):
    return _run_unit(*args)


def run_suite(registry: Sequence[CheckSpec], seed: int = 42, precision_bits: int = 256,
              threads: int = 1, progress: Callable | None = None) -> VerificationReport:
    """Evaluate every check on its (n, trial) grid; deterministic in (registry, seed, precision)."""
    if precision_bits < MIN_SUITE_PRECISION:
        raise SuiteError(f"precision_bits must be >= {MIN_SUITE_PRECISION}")
    ids = [s.check_id for s in registry]
    if len(set(ids)) != len(ids):
        raise SuiteError("duplicate check_id in registry")
    start = time.perf_counter()
    n_values = sorted({n for s in registry for n in s.n_range})
    units = []
    with precision(precision_bits):
        for n in n_values:
            trials = max(s.trials for s in registry if n in s.n_range)
            points = sample_admissible(n, seed, trials)
            for trial, p in enumerate(points):
                units.append((registry, n, trial, seed, precision_bits, p.to_json()))
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_unit_star, units))
    else:
        results = []
        for u in units:
            results.append(_run_unit(*u))
            if progress is not None:
                progress(u[1], u[2])
    order = {cid: k for k, cid in enumerate(ids)}
    entries = [e for ents, _ in results for e in ents]
    entries.sort(key=lambda e: (order[e["check_id"]], e["n"], e["trial"]))
    rejected = [r for _, r in results if r is not None]
    report = VerificationReport(seed, precision_bits, entries, rejected=rejected)
    report.wall_time_seconds = time.perf_counter() - start
    return report


def replay(entry: dict, registry: Sequence[CheckSpec] | None = None, precision_bits: int = 256):
    """Re-run the check named in a failure entry on its serialized point."""
    registry = registry or default_registry()
    spec = next(s for s in registry if s.check_id == entry["check_id"])
    with precision(precision_bits):
        param = ParamPoint.from_json(entry["point"])
        sample = Sample(param.n, entry["seed"], entry["trial"], param)
        return spec.evaluate(sample)


__all__ = [
    "CheckSpec", "VerificationReport", "SuiteError", "Sample", "default_registry",
    "filter_registry", "effective_tolerance", "run_suite", "derivative_oracle", "fd_partials",
    "replay", "COVERED_OPERATIONS",
]
