"""Dense univariate polynomials over mpc and an Aberth-Ehrlich root finder."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import mpmath
from mpmath import mp

from .mp_series import BigComplex, TruncatedSeries, big

CAUSTIC_DELTA = 0.05


class NonConvergence(ArithmeticError):
    pass


class RootCluster(ArithmeticError):
    """Two roots closer than the cluster threshold."""

    def __init__(self, msg, roots=None, separation=None):
        super().__init__(msg)
        self.roots = roots
        self.separation = separation


@dataclass(frozen=True)
class Poly:
    """Coefficients in increasing degree; trailing zeros are stripped on construction."""

    coeffs: tuple

    def __init__(self, coeffs: Sequence):
        cs = [big(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        # zero polynomial has degree -1
        return len(self.coeffs) - 1

    def __call__(self, z):
        return poly_eval(self, z)

    def __add__(self, other: "Poly") -> "Poly":
        if not isinstance(other, Poly):
            other = Poly([other])
        m = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (m - len(self.coeffs))
        b = other.coeffs + (0,) * (m - len(other.coeffs))
        return Poly([x + y for x, y in zip(a, b)])

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly([other])
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return Poly([c * other for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return Poly([])
        out = [mpmath.mpc(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def max_coeff(self):
        return max((abs(c) for c in self.coeffs), default=mpmath.mpf(0))

    def taylor(self, center, order: int) -> TruncatedSeries:
        """Taylor coefficients of ``self`` about ``center``, as a series of ``order`` terms."""
        center = big(center)
        # repeated synthetic division gives p^(k)(c)/k! directly
        work = list(self.coeffs)
        out = []
        for _ in range(min(order, len(work))):
            acc = mpmath.mpc(0)
            for idx in range(len(work) - 1, -1, -1):
                acc = acc * center + work[idx]
                work[idx] = acc
            out.append(work[0])
            work = work[1:]
        return TruncatedSeries.from_coeffs(out, order, center)


def poly_eval(p: Poly, z) -> BigComplex:
    acc = mpmath.mpc(0)
    for c in reversed(p.coeffs):
        acc = acc * z + c
    return acc


def poly_derive(p: Poly, k: int = 1) -> Poly:
    if k < 0:
        raise ValueError("derivative order must be non-negative")
    cs = list(p.coeffs)
    for _ in range(k):
        cs = [c * m for m, c in enumerate(cs)][1:]
    return Poly(cs)


def from_roots(roots: Sequence, leading=1) -> Poly:
    p = Poly([leading])
    for r in roots:
        p = p * Poly([-r, 1])
    return p


def residual_scale(p: Poly, z):
    return p.max_coeff() * max(mpmath.mpf(1), abs(z)) ** p.degree


def _residual_ok(p: Poly, z, value) -> bool:
    return abs(value) <= mpmath.ldexp(residual_scale(p, z), -(mp.prec - 8))


def _initial_guesses(p: Poly) -> list:
    n = p.degree
    lead = p.coeffs[-1]
    # Fujiwara-style radius from the coefficient ratios
    radius = max(
        abs(p.coeffs[n - k] / lead) ** (mpmath.mpf(1) / k) for k in range(1, n + 1)
    )
    radius = max(radius, mpmath.mpf("0.5"))
    # offset angle keeps the start off symmetry lines of real polynomials
    phase = mpmath.mpf("0.4")
    return [
        radius * mpmath.expjpi(2 * mpmath.mpf(k) / n + phase / n) * (1 + mpmath.mpf(k) / (7 * n))
        for k in range(n)
    ]


def find_roots(p: Poly, cluster_threshold=CAUSTIC_DELTA, max_iter: int = 400) -> list:
    """All roots of ``p``, sorted by (real, imag).

    Aberth-Ehrlich iteration from a perturbed circle, then Newton polish until
    ``|p(z)| <= 2**-(prec-8) * max|coeff| * max(1, |z|)**deg``.
    Raises :class:`RootCluster` when two roots are closer than
    ``cluster_threshold`` and :class:`NonConvergence` when the iteration cap
    is hit.
    """
    n = p.degree
    if n < 1:
        raise ValueError("find_roots needs degree >= 1")
    if n == 1:
        roots = [-p.coeffs[0] / p.coeffs[1]]
        return roots
    dp = poly_derive(p)
    z = _initial_guesses(p)
    done = [False] * n
    for _ in range(max_iter):
        for k in range(n):
            if done[k]:
                continue
            zk = z[k]
            val = poly_eval(p, zk)
            if _residual_ok(p, zk, val):
                done[k] = True
                continue
            w = val / poly_eval(dp, zk)
            s = mpmath.mpc(0)
            for j in range(n):
                if j != k:
                    s += 1 / (zk - z[j])
            z[k] = zk - w / (1 - w * s)
        if all(done):
            break

    sep = min(abs(z[a] - z[b]) for a in range(n) for b in range(a + 1, n))
    if sep < cluster_threshold:
        raise RootCluster(
            f"roots {mpmath.nstr(sep, 5)} apart, below threshold {cluster_threshold}",
            roots=z,
            separation=sep,
        )
    if not all(done):
        raise NonConvergence(f"Aberth iteration did not converge in {max_iter} steps")

    polished = [_newton_polish(p, dp, zk) for zk in z]
    return sorted(polished, key=lambda r: (r.real, r.imag))


def _newton_polish(p: Poly, dp: Poly, z, max_iter: int = 30):
    val = poly_eval(p, z)
    for _ in range(max_iter):
        if _residual_ok(p, z, val):
            # one extra step is cheap and squeezes out the last bits
            step = val / poly_eval(dp, z)
            z2 = z - step
            val2 = poly_eval(p, z2)
            return z2 if abs(val2) <= abs(val) else z
        z = z - val / poly_eval(dp, z)
        val = poly_eval(p, z)
    raise NonConvergence("Newton polish did not reach the residual bound")
