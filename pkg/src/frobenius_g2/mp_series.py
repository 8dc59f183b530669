"""Multiprecision scalars and truncated power series.

Scalars are :class:`mpmath.mpc` values.  mpmath keeps the working precision
in a context object rather than on each number, so every public entry point
that does arithmetic runs inside :func:`precision`.  A number created at
128 bits and combined with one created at 256 bits inside a 256-bit block is
computed at 256 bits, which is the promotion rule we want.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass
from typing import Iterable, Sequence

import mpmath
from mpmath import mp

BigComplex = mpmath.mpc

DEFAULT_PRECISION = 256
MIN_PRECISION = 64


@contextlib.contextmanager
def precision(bits: int):
    """Run the enclosed block at ``bits`` of binary precision."""
    if bits < MIN_PRECISION:
        raise ValueError(f"precision_bits must be >= {MIN_PRECISION}, got {bits}")
    with mp.workprec(bits):
        yield


def current_precision() -> int:
    return mp.prec


def big(x, im=0) -> BigComplex:
    """Coerce ``x`` (int, float, str, Fraction-like, mpf, mpc) to a BigComplex.

    Strings are parsed at the current precision, so decimal input keeps as many
    digits as the context allows.
    """
    if isinstance(x, mpmath.mpc) and not im:
        return +x
    if isinstance(x, (tuple, list)):
        return mpmath.mpc(mpmath.mpf(x[0]), mpmath.mpf(x[1]))
    if hasattr(x, "numerator") and hasattr(x, "denominator") and not isinstance(x, int):
        x = mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpc(x, im)


def to_decimal_pair(x: BigComplex, digits: int | None = None) -> list[str]:
    """``[re, im]`` as decimal strings carrying the full working precision."""
    if digits is None:
        digits = mp.dps + 5
    return [mpmath.nstr(x.real, digits, min_fixed=-mpmath.inf, max_fixed=mpmath.inf),
            mpmath.nstr(x.imag, digits, min_fixed=-mpmath.inf, max_fixed=mpmath.inf)]


def from_decimal_pair(pair: Sequence[str]) -> BigComplex:
    return mpmath.mpc(mpmath.mpf(pair[0]), mpmath.mpf(pair[1]))


def ulp_bound(bits: int | None = None, slack: int = 0):
    """``2**-(bits - slack)``, the relative tolerance used by residual bounds."""
    if bits is None:
        bits = mp.prec
    return mpmath.ldexp(mpmath.mpf(1), -(bits - slack))


class SeriesError(ValueError):
    pass


@dataclass(frozen=True)
class TruncatedSeries:
    """Taylor coefficients of a function about ``center``, truncated at ``order`` terms.

    ``coeffs[k]`` multiplies ``(z - center)**k``; terms of degree ``>= order``
    are unknown and dropped by every operation.
    """

    center: BigComplex
    coeffs: tuple

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @classmethod
    def from_coeffs(cls, coeffs: Iterable, order: int, center=0) -> "TruncatedSeries":
        cs = [big(c) for c in coeffs][:order]
        cs += [mpmath.mpc(0)] * (order - len(cs))
        return cls(big(center), tuple(cs))

    @classmethod
    def one(cls, order: int, center=0) -> "TruncatedSeries":
        return cls.from_coeffs([1], order, center)

    def __getitem__(self, k: int) -> BigComplex:
        return self.coeffs[k]

    def _check(self, other: "TruncatedSeries") -> None:
        if self.center != other.center:
            raise SeriesError("series centers differ")
        if self.order != other.order:
            raise SeriesError("series orders differ")

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries(self.center, (self.coeffs[0] + other,) + self.coeffs[1:])
        self._check(other)
        return TruncatedSeries(self.center, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.center, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return series_mul(self, other)
        return TruncatedSeries(self.center, tuple(a * other for a in self.coeffs))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return series_mul(self, series_reciprocal(other))
        return TruncatedSeries(self.center, tuple(a / other for a in self.coeffs))

    def shift_down(self, k: int = 1) -> "TruncatedSeries":
        """Divide by ``(z - center)**k``; the leading ``k`` coefficients are discarded.

        The result keeps the same order, so its top ``k`` coefficients are
        padded with zeros and must not be trusted.
        """
        tail = self.coeffs[k:] + (mpmath.mpc(0),) * k
        return TruncatedSeries(self.center, tail)


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    a._check(b)
    m = a.order
    ac, bc = a.coeffs, b.coeffs
    out = []
    for k in range(m):
        s = mpmath.mpc(0)
        for j in range(k + 1):
            s += ac[j] * bc[k - j]
        out.append(s)
    return TruncatedSeries(a.center, tuple(out))


def series_reciprocal(a: TruncatedSeries) -> TruncatedSeries:
    """Series ``b`` with ``a * b == 1`` to the truncation order."""
    a0 = a.coeffs[0]
    if a0 == 0:
        raise SeriesError("reciprocal of a series with vanishing constant term")
    inv0 = 1 / a0
    b = [inv0]
    for k in range(1, a.order):
        s = mpmath.mpc(0)
        for j in range(1, k + 1):
            s += a.coeffs[j] * b[k - j]
        b.append(-s * inv0)
    return TruncatedSeries(a.center, tuple(b))


def series_pow(a: TruncatedSeries, exponent) -> TruncatedSeries:
    """``a**exponent`` for a series with constant term 1, by the binomial series."""
    if a.coeffs[0] != 1:
        raise SeriesError("series_pow expects a unit constant term")
    w = a - 1
    result = TruncatedSeries.one(a.order, a.center)
    power = TruncatedSeries.one(a.order, a.center)
    exponent = mpmath.mpf(exponent) if not isinstance(exponent, mpmath.mpf) else exponent
    for m in range(1, a.order):
        power = series_mul(power, w)
        result = result + power * mpmath.binomial(exponent, m)
    return result
