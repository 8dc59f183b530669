import itertools
import random

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frobenius_g2 import g2_function as g2
from frobenius_g2.frobenius_an import Jet2, build_point, random_jet, sample_admissible

TOL = 1e-30


@pytest.fixture(scope="module")
def sample6():
    with mpmath.workprec(256):
        fp = build_point(sample_admissible(6, 17, 1)[0])
        jet = random_jet(6, random.Random(6))
        return fp, jet, g2.g2_coefficients(fp, jet)


def test_termsum():
    s = g2.TermSum()
    s.add(mpmath.mpc(3))
    s.add(mpmath.mpc(-3))
    assert s.value == 0 and s.scale == 6 and s.rel == 0
    assert g2.TermSum().rel == 0
    assert s.times(-2).scale == 12


def test_n1_everything_zero(a1):
    jet = Jet2((2,), (1,))
    assert g2.g2_Gi(a1, jet, 0) == 0
    assert g2.g2_total(a1, jet) == 0
    assert g2.g2_Qi(a1, 0) == 0


def test_a2_closed_Gij_zero(a2):
    # bracket 6/4 - 2/2 - 1/2 + 0 with z_12 = 2, C_13 = 1, C_23 = -1
    for i, j in ((0, 1), (1, 0)):
        t = g2.Gij_closed_terms(a2, i, j)
        assert abs(t.value) <= 1e-70 * t.scale


def test_a2_golden_jet(a2):
    jet = Jet2((1, 2), (3, -1))
    t = g2.g2_total_terms(a2, jet)
    assert t.scale > 0
    assert abs(t.value) <= TOL * t.scale


def test_a2_first_single_sum_identity_by_hand(a2):
    lhs, rhs = g2.lemma31_check(a2, 1, 1)
    assert abs(lhs + mpmath.mpf(1) / 12) < 1e-70
    assert abs(rhs + mpmath.mpf(1) / 12) < 1e-70


def test_zero_jet_component(a2):
    with pytest.raises(ZeroDivisionError):
        g2.g2_Gi(a2, Jet2((1, 0), (1, 1)), 0)


def test_Gij_requires_distinct(a2):
    with pytest.raises(ValueError):
        g2.g2_Gij(a2, 0, 0)
    with pytest.raises(ValueError):
        g2.t_coefficient(a2, 1, 1)


def test_vanishing_n6(sample6):
    fp, jet, c = sample6
    for i in range(6):
        assert c.Gi[i].rel <= TOL
        h = c.Pij[i][i].times(mpmath.mpf(1) / 2)
        h += c.Qi[i]
        assert h.rel <= TOL
    for i, j in itertools.permutations(range(6), 2):
        assert c.Gij[i][j].rel <= TOL
        assert g2.Gij_closed_terms(fp, i, j).rel <= TOL
        assert g2.t_coefficient_terms(fp, i, j).rel <= TOL
        skew = abs(c.Pij[i][j].value + c.Pij[j][i].value)
        assert skew <= TOL * (c.Pij[i][j].scale + c.Pij[j][i].scale)
    assert g2.g2_total_terms(fp, jet, c).rel <= TOL


def test_individual_coefficients_nonzero(sample6):
    # the cancellation is between families, not inside each P_ij
    fp, jet, c = sample6
    assert abs(c.Pij[0][1].value) > 1e-10 * c.Pij[0][1].scale


def test_total_matches_coefficients(sample6):
    fp, jet, c = sample6
    a = g2.g2_total_terms(fp, jet)
    b = g2.g2_total_terms(fp, jet, c)
    assert a.value == b.value and a.scale == b.scale


def test_half_Pii_closed(sample6):
    fp, jet, c = sample6
    for i in range(6):
        a = c.Pij[i][i].times(mpmath.mpf(1) / 2)
        b = g2.half_Pii_closed_terms(fp, i)
        assert abs(a.value - b.value) <= 1e-50 * (a.scale + b.scale)


def test_single_sum_identities_n7():
    fp = build_point(sample_admissible(7, 3, 1)[0])
    for i in range(7):
        for which in (1, 2, 3, 4):
            lhs, rhs = g2.lemma31_check(fp, i, which)
            assert abs(lhs - rhs) <= 1e-40 * max(abs(lhs), abs(rhs), 1)


def test_single_sum_identity_bad_index(a2):
    with pytest.raises(ValueError):
        g2.lemma31_check(a2, 0, 5)


def test_decomposition_reported(a2, sample6):
    a, b = g2.pij_decomposition_check(a2, 0, 1)
    assert abs(a - b) <= 1e-25 * max(abs(a), 1)
    fp, _, c = sample6
    for i, j in itertools.combinations(range(6), 2):
        assert abs(g2.pij_antisymmetric_form(fp, i, j) + g2.pij_antisymmetric_form(fp, j, i)) < 1e-60 * max(
            abs(g2.pij_antisymmetric_form(fp, i, j)), 1)
    with pytest.raises(ValueError):
        g2.pij_decomposition_check(a2, 1, 1)


def test_jet_rescaling(sample6):
    fp, jet, c = sample6
    scaled = jet.scaled(mpmath.mpc("1.7", "-0.4"))
    for i in range(6):
        b = g2.Gi_terms(fp, scaled, i)
        assert abs(c.Gi[i].value - b.value) <= 1e-60 * (c.Gi[i].scale + b.scale)


def test_branch_flip(sample6):
    fp, jet, c = sample6
    flipped = g2.g2_coefficients(fp.with_flipped_branch(3), jet)
    for i in range(6):
        assert abs(c.Qi[i].value - flipped.Qi[i].value) <= 1e-60 * c.Qi[i].scale
        for j in range(6):
            a, b = c.Pij[i][j], flipped.Pij[i][j]
            assert abs(a.value - b.value) <= 1e-60 * (a.scale + b.scale)


def test_deterministic(sample6):
    fp, jet, c = sample6
    again = g2.g2_coefficients(fp, jet)
    assert [t.value for t in again.Qi] == [t.value for t in c.Qi]


@settings(max_examples=6, deadline=None)
@given(st.integers(min_value=2, max_value=5), st.integers(min_value=0, max_value=10 ** 5))
def test_total_vanishes_property(n, seed):
    fp = build_point(sample_admissible(n, seed, 1)[0])
    jet = random_jet(n, random.Random(seed))
    assert g2.g2_total_terms(fp, jet).rel <= TOL
