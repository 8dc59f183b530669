import json

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frobenius_g2.frobenius_an import (
    CausticError,
    Jet2,
    ParamPoint,
    RejectionExhausted,
    admissible,
    build_point,
    build_superpotential,
    compute_H,
    critical_values,
    flat_coordinates,
    invert_u_to_t,
    lame_partial,
    rotation_partial,
    sample_admissible,
)
from frobenius_g2.polynomial import poly_derive, poly_eval

EPS = mpmath.mpf(10) ** -70


def near(a, b, tol=EPS):
    return abs(mpmath.mpc(a) - mpmath.mpc(b)) <= tol * max(1, abs(b))


@pytest.mark.parametrize("t,coeffs", [
    ((5,), (5, 0, 1)),
    ((0, -3), (0, -3, 0, 1)),
    ((1, 0, 2), (1, 0, 2, 0, 1)),
])
def test_superpotential_layout(t, coeffs):
    assert build_superpotential(ParamPoint(len(t), t)).coeffs == tuple(map(mpmath.mpc, coeffs))


def test_param_point_validation():
    with pytest.raises(ValueError):
        ParamPoint(2, (1,))
    with pytest.raises(ValueError):
        ParamPoint(0, ())


def test_a2_golden(a2):
    assert near(a2.z[0], -1) and near(a2.z[1], 1)
    assert near(a2.u[1], -2) and near(a2.u[0], 2)
    assert near(a2.hsq[1], mpmath.mpf(1) / 6) and near(a2.hsq[0], -mpmath.mpf(1) / 6)
    assert near(a2.C[1][3], 1) and near(a2.C[0][3], -1)
    for i in range(2):
        for k in range(4, a2.kmax + 1):
            assert a2.C[i][k] == 0
    assert near(a2.H[1], mpmath.mpf(1) / 288)
    # same value from 1/2 u_12 gamma_12**2
    assert near(a2.ud(1, 0) * a2.gamma[1][0] ** 2 / 2, mpmath.mpf(1) / 288)


def test_a1(a1):
    assert a1.z == (0,) or near(a1.z[0], 0)
    assert near(a1.u[0], 5)
    assert near(a1.hsq[0], 0.5)
    assert all(c == 0 for c in a1.C[0][3:])
    assert a1.H[0] == 0
    assert lame_partial(a1, 0, 0) == 0


def test_caustic():
    with pytest.raises(CausticError):
        build_point(ParamPoint(2, (0, 0)))


def test_h_branch_and_tables(a2):
    for i in range(2):
        assert near(a2.h[i] ** 2, a2.hsq[i])
        # principal square root
        assert a2.h[i] == mpmath.sqrt(a2.hsq[i])
    assert a2.gamma[0][1] is a2.gamma[1][0] or a2.gamma[0][1] == a2.gamma[1][0]
    assert a2.gamma[0][0] == 0


def test_compute_H_random_sample():
    fp = build_point(sample_admissible(5, 3, 1)[0])
    for i, H in enumerate(compute_H(fp)):
        direct = sum(fp.ud(i, j) * fp.gamma[i][j] ** 2 for j in range(5) if j != i) / 2
        assert abs(H - direct) <= mpmath.mpf(10) ** -60 * abs(H)


def test_lame_partial_golden(a2):
    # index 1 is z = 1, index 0 is z = -1, z_10 = 2
    assert near(lame_partial(a2, 1, 0), -a2.h[1] / 24)


def test_rotation_partial_rejects_diagonal(a2):
    with pytest.raises(ValueError):
        rotation_partial(a2, 0, 0, 1)


def test_darboux_egoroff_n2(a2):
    # d_1 gamma_12 from the closed form against the u_ij formula
    g = a2.gamma[0][1]
    rhs = (sum(a2.ud(1, k) * a2.gamma[0][k] * a2.gamma[k][1] for k in range(2)) - g) / a2.ud(0, 1)
    assert near(rotation_partial(a2, 0, 1, 0), rhs, 1e-60)


def test_e_invariance_random():
    fp = build_point(sample_admissible(6, 11, 1)[0])
    for i in range(6):
        s = sum(fp.dh[i])
        assert abs(s) <= 1e-60 * sum(abs(x) for x in fp.dh[i])


@pytest.mark.parametrize("n,expect", [
    (1, lambda t: [t[0]]),
    (2, lambda t: [t[0], t[1]]),
    (3, lambda t: [t[0] - t[2] ** 2 / 8, t[1], t[2]]),
])
def test_flat_coordinates_examples(n, expect):
    t = tuple(mpmath.mpc(k + 1, -k) / 3 for k in range(n))
    v = flat_coordinates(ParamPoint(n, t))
    for a, b in zip(v, expect(t)):
        assert near(a, b, 1e-60)


def test_flat_coordinate_n4_by_hand():
    # lambda = z**5 (1 + w), w = t4 y**2 + t3 y**3 + t2 y**4 + t1 y**5 with y = 1/z;
    # only the w and w**2 terms of the binomial series reach y**4 and y**5
    t1, t2, t3, t4 = (mpmath.mpc(x) for x in ("0.3", "-0.7", "0.5", "1.1"))
    v = flat_coordinates(ParamPoint(4, (t1, t2, t3, t4)))
    assert near(v[3], t4) and near(v[2], t3)
    assert near(v[1], t2 - t4 ** 2 / 5, 1e-60)
    assert near(v[0], t1 - t3 * t4 / 5, 1e-60)


def test_invert_round_trip():
    p = sample_admissible(4, 5, 1)[0]
    fp = build_point(p)
    q = invert_u_to_t(4, fp.u, p.t)
    assert all(near(a, b, 1e-70) for a, b in zip(q.t, p.t))


def test_invert_first_column():
    p = sample_admissible(3, 9, 1)[0]
    fp = build_point(p)
    eps = mpmath.mpf(10) ** -30
    q = invert_u_to_t(3, [fp.u[0] + eps] + list(fp.u[1:]), p.t)
    col = [(a - b) / eps for a, b in zip(q.t, p.t)]
    J = mpmath.matrix([[fp.z[i] ** a for a in range(3)] for i in range(3)])
    want = mpmath.lu_solve(J, mpmath.matrix([1, 0, 0]))
    for a in range(3):
        assert abs(col[a] - want[a]) < 1e-25 * max(1, abs(want[a]))


def test_critical_values_track_labels():
    p = sample_admissible(5, 1, 1)[0]
    fp = build_point(p)
    z, u = critical_values(p, list(reversed(fp.z)))
    assert all(near(a, b) for a, b in zip(z, reversed(fp.z)))


def test_sampling_deterministic_and_admissible():
    a = sample_admissible(4, 42, 3)
    b = sample_admissible(4, 42, 3)
    assert [p.to_json() for p in a] == [p.to_json() for p in b]
    assert a != sample_admissible(4, 43, 3)
    for p in a:
        fp = build_point(p)
        assert admissible(fp)
        assert max(abs(z) for z in fp.z) <= 10
        assert min(abs(fp.zd(i, j)) for i in range(4) for j in range(i + 1, 4)) >= 0.05


def test_sampling_exhausted():
    with pytest.raises(RejectionExhausted):
        sample_admissible(3, 0, 5, delta=50, max_attempts=20)


def test_json_round_trip():
    p = sample_admissible(3, 2, 1)[0]
    q = ParamPoint.from_json(json.dumps(p.to_json()))
    assert all(near(a, b, 1e-75) for a, b in zip(p.t, q.t))
    jet = Jet2((1, 2j), (3, -1))
    assert Jet2.from_json(jet.to_json()) == jet


def test_jet_zero_component():
    with pytest.raises(ZeroDivisionError):
        Jet2((1, 0), (0, 0)).check_nonzero()


def test_flipped_branch(a2):
    f = a2.with_flipped_branch(0)
    assert f.h[0] == -a2.h[0] and f.h[1] == a2.h[1]
    assert f.gamma[0][1] == -a2.gamma[0][1]
    assert f.H == a2.H


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=1000))
def test_critical_point_invariants(n, seed):
    fp = build_point(sample_admissible(n, seed, 1)[0])
    dlam = poly_derive(fp.lam, 1)
    lam2 = poly_derive(fp.lam, 2)
    for i in range(n):
        assert abs(poly_eval(dlam, fp.z[i])) < 1e-70 * dlam.max_coeff() * max(1, abs(fp.z[i])) ** n
        assert abs(fp.hsq[i] * poly_eval(lam2, fp.z[i]) - 1) < 1e-70
        assert near(fp.u[i], poly_eval(fp.lam, fp.z[i]))
