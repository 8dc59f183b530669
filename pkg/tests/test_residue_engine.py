import itertools
import random

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frobenius_g2 import residue_engine as re_
from frobenius_g2.frobenius_an import build_point, sample_admissible
from frobenius_g2.mp_series import precision
from frobenius_g2.polynomial import Poly, poly_derive, poly_eval


def contour_residue(f, a, radius):
    """(1/2 pi i) * integral of f over a circle around a, by quadrature."""
    g = lambda th: f(a + radius * mpmath.expj(th)) * radius * mpmath.expj(th)
    return mpmath.quad(g, [0, mpmath.pi / 2, mpmath.pi, 3 * mpmath.pi / 2, 2 * mpmath.pi]) / (2 * mpmath.pi)


@pytest.fixture(scope="module")
def fp6():
    with precision(256):
        return build_point(sample_admissible(6, 4, 1)[0])


def test_simple_pole():
    f = re_.RationalAtPoles(Poly([3]), ((2, 1),))
    assert abs(re_.residue_at(f, 2, 1) - 3) < 1e-70


def test_double_pole_derivative():
    # z**3 / (z - 1)**2 has residue 3 at 1
    f = re_.RationalAtPoles(Poly([0, 0, 0, 1]), ((1, 2),))
    assert abs(re_.residue_at(f, 1, 2) - 3) < 1e-70


def test_order_mismatch():
    f = re_.RationalAtPoles(Poly([1]), ((0, 2),))
    with pytest.raises(re_.ResidueError):
        re_.residue_at(f, 0, 4)
    with pytest.raises(re_.ResidueError):
        re_.residue_at(f, 0, 3)


def test_distinct_poles_required():
    with pytest.raises(ValueError):
        re_.RationalAtPoles(Poly([1]), ((1, 1), (1, 2)))


def test_against_quadrature(fp6):
    lam1 = poly_derive(fp6.lam, 1)
    num = poly_derive(fp6.lam, 2)
    i = 2
    f = re_.RationalAtPoles(num, ((fp6.z[i], 3),), lam1)
    series = re_.residue_at(f, fp6.z[i], 4)
    with precision(128):
        fun = lambda z: poly_eval(num, z) / ((z - fp6.z[i]) ** 3 * poly_eval(lam1, z))
        quad = contour_residue(fun, fp6.z[i], mpmath.mpf("0.01"))
    assert abs(series - quad) < 1e-20 * max(1, abs(series))


def test_claimed_lambda_prime_zero_checked(fp6):
    f = re_.RationalAtPoles(Poly([1]), (), poly_derive(fp6.lam, 1))
    with pytest.raises(re_.ResidueError):
        re_.residue_at(f, fp6.z[0] + mpmath.mpf("0.1"), 1)


def test_R1_golden(a2):
    assert abs(re_.closed_R1(a2, 1, 2) + mpmath.mpf(1) / 4) < 1e-70
    assert abs(re_.oracle_R1(a2, 1, 2) + mpmath.mpf(1) / 4) < 1e-70


@pytest.mark.parametrize("p", re_.R1_TABLE)
def test_a1_closed_forms_vanish(a1, p):
    assert re_.closed_R1(a1, 0, p) == 0
    assert abs(re_.oracle_R1(a1, 0, p)) < 1e-70


def test_out_of_table(a2):
    with pytest.raises(ValueError):
        re_.closed_R1(a2, 0, 9)


def test_all_rows_n6(fp6):
    for name, args in re_.residue_rows(fp6):
        a = re_.CLOSED[name](fp6, *args)
        b = re_.ORACLE[name](fp6, *args)
        assert abs(a - b) <= 1e-40 * max(abs(a), abs(b), 1), (name, args)


def test_sum_vs_residue_golden(a2):
    d, r = re_.sum_vs_residue(a2, 1, "inv_z", 2)
    assert abs(d - mpmath.mpf(1) / 4) < 1e-70 and abs(r - mpmath.mpf(1) / 4) < 1e-70


def test_sum_vs_residue_n1(a1):
    d, r = re_.sum_vs_residue(a1, 0, "inv_z", 3)
    assert d == 0 and abs(r) < 1e-70


def test_sum_needs_decay(a2):
    assert not re_.decays_at_infinity(2, "hsq_u_inv_z", 2)
    with pytest.raises(ValueError):
        re_.sum_vs_residue(a2, 0, "hsq_u_inv_z", 2)
    with pytest.raises(ValueError):
        re_.sum_vs_residue(a2, 0, "two_pole_inv", 2, 2)


def _kind_grid(kind):
    if kind == "C_inv_z":
        return [(p, q, None) for p in range(1, 5) for q in (3, 4, 5)]
    if kind in ("inv_z", "hsq_inv_z", "hsq_u_inv_z"):
        return [(p, 0, None) for p in range(1, 7)]
    return [(p, q, 4) for p in range(1, 5) for q in range(1, 5)]


@pytest.mark.parametrize("kind", re_.SUM_KINDS)
def test_sum_kinds_n7(kind):
    fp = build_point(sample_admissible(7, 8, 1)[0])
    checked = 0
    for p, q, j in _kind_grid(kind):
        if re_.decays_at_infinity(7, kind, p, q):
            d, r, mag = re_.sum_vs_residue_scaled(fp, 1, kind, p, q, j)
            assert abs(d - r) <= 1e-40 * mag, (p, q)
            checked += 1
    assert checked


def test_power_sums_golden(a2):
    rep = re_.power_sums_and_symmetric(a2, 1, 0)
    assert all(a == 0 for a in rep.A[1:])
    lhs, rhs, _ = rep.identities["c3.power_sum"]
    assert abs(lhs + 2) < 1e-70 and abs(rhs + 2) < 1e-70
    ratio, prod, _ = rep.identities["hsq_ratio.product"]
    assert abs(ratio + 1) < 1e-70 and prod == -1


def test_power_sums_n6(fp6):
    for i, k in itertools.permutations(range(6), 2):
        for name, (a, b, mag) in re_.power_sums_and_symmetric(fp6, i, k).identities.items():
            assert abs(a - b) <= 1e-50 * mag, name


def test_power_sums_preconditions(fp6):
    with pytest.raises(ValueError):
        re_.power_sums_and_symmetric(fp6, 1, 1)
    with pytest.raises(ValueError):
        re_.power_sums_and_symmetric(fp6, 1, 2, pmax=7)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
                min_size=0, max_size=8), st.integers(min_value=1, max_value=6))
def test_newton_identities(values, p):
    vals = [mpmath.mpc(v) for v in values]
    A = [mpmath.mpc(len(vals))] + [sum((v ** q for v in vals), mpmath.mpc(0)) for q in range(1, 7)]
    bound = (1 + sum(abs(v) for v in vals)) ** p
    assert abs(re_.elementary_from_power_sums(A, p) - re_.elementary_direct(vals, p)) <= 1e-60 * bound


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=2, max_value=6), st.integers(min_value=0, max_value=500))
def test_global_residue_theorem(n, seed):
    fp = build_point(sample_admissible(n, seed, 1)[0])
    rng = random.Random(seed)
    mult = [rng.randint(0, 2) for _ in range(n)]
    deg = sum(mult) + n - 2
    num = Poly([mpmath.mpc(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(deg + 1)])
    f = re_.RationalAtPoles(num, tuple((fp.z[i], m) for i, m in enumerate(mult) if m),
                            poly_derive(fp.lam, 1))
    parts = [re_.residue_at(f, fp.z[i], mult[i] + 1) for i in range(n)]
    assert abs(sum(parts)) <= 1e-50 * sum(abs(x) for x in parts)


def test_guard_robustness(fp6):
    f = re_.RationalAtPoles(poly_derive(fp6.lam, 3), ((fp6.z[0], 4),), poly_derive(fp6.lam, 1))
    a = re_.residue_at(f, fp6.z[0], 5)
    b = re_.residue_at(f, fp6.z[0], 5, guard=4)
    assert abs(a - b) <= mpmath.ldexp(abs(a), -240)
