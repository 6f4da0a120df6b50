import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hadamard_lab.catalogue import CATALOGUE, bundled_family, dita_d6, fourier, get, load_affine_family, m6_discrete, m6_one, tao_s6
from hadamard_lab.core import CHMatrix, DimensionMismatch, Tolerances, conjugate, dephase
from hadamard_lab.equivalence import (
    EquivalenceCertificate,
    OrderTooLarge,
    are_equivalent,
    bucket_phases,
    conjugate_equivalent,
    lambda_contains,
    lambda_difference,
    lambda_equal,
    lambda_set,
    random_certificate,
)

OMEGA = np.exp(2j * np.pi / 3)


def f4(a):
    e = np.exp(1j * a)
    return CHMatrix(np.array([[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, e, -e], [1, -1, -e, e]]))


def brute_equivalent(H1, H2, tol=1e-7):
    """Plain loop over every permutation pair, comparing dephased forms."""
    A = dephase(H1)[0].entries
    n = H1.n
    for p1 in itertools.permutations(range(n)):
        for p2 in itertools.permutations(range(n)):
            Q = CHMatrix(H2.entries[np.ix_(p1, p2)])
            if np.max(np.abs(dephase(Q)[0].entries - A)) <= tol:
                return True
    return False


def test_fourier_lambda_brute_force():
    # exponents of omega6 for every quadruple, in exact integer arithmetic
    ex = {(i * j - k * j + k * l - i * l) % 6 for i, j, k, l in itertools.product(range(6), repeat=4)}
    L = lambda_set(fourier(6))
    assert sorted(np.round(np.array(L.turns()) * 6).astype(int) % 6) == sorted(ex)
    assert len(L) == 6


def test_s6_lambda_cube_roots():
    L = lambda_set(tao_s6())
    assert np.allclose(sorted(L.turns()), [0, 1 / 3, 2 / 3])
    assert lambda_contains(L, OMEGA) and not lambda_contains(L, 1j)


def test_m6_lambda_memberships():
    L = lambda_set(m6_discrete())
    assert not lambda_contains(L, OMEGA)
    assert not lambda_contains(L, 1j)
    assert L.distance_to(2 * np.pi / 3) > 5e-3


def test_lambda_closed_under_conjugation():
    for H in (m6_discrete(), get("c6"), dita_d6()):
        L = lambda_set(H)
        neg = np.mod(-L.values, 2 * np.pi)
        assert max(L.distance_to(v) for v in neg) < 1e-9


def test_bucket_phases_wraps_around():
    got = bucket_phases(np.array([1e-9, 2 * np.pi - 1e-9, 1.0, 1.0 + 1e-9]), 1e-7)
    assert len(got) == 2 and min(got[0], 2 * np.pi - got[0]) < 1e-8
    assert bucket_phases(np.array([]), 1e-7).size == 0


def test_lambda_difference_reports_sides():
    only_f, only_s = lambda_difference(lambda_set(fourier(6)), lambda_set(tao_s6()))
    assert len(only_f) == 3 and len(only_s) == 0
    assert not lambda_equal(lambda_set(fourier(6)), lambda_set(tao_s6()))
    assert not lambda_equal(lambda_set(fourier(6)), lambda_set(fourier(5)))


@pytest.mark.parametrize("name", sorted(CATALOGUE))
def test_lambda_invariant_under_random_certificates(name, rng):
    H = get(name)
    L = lambda_set(H)
    for _ in range(10):
        G = random_certificate(6, rng).apply(H)
        assert lambda_equal(L, lambda_set(G))


@pytest.mark.parametrize("name", sorted(CATALOGUE))
def test_equivalent_to_random_image(name, rng):
    H = get(name)
    G = random_certificate(6, rng).apply(H)
    cert = are_equivalent(G, H)
    assert cert is not None and cert.error(G, H) <= 1e-7
    back = are_equivalent(H, G)
    assert back is not None


def test_reflexive_with_identity_first():
    cert = are_equivalent(fourier(6), fourier(6))
    assert cert.p1 == tuple(range(6)) and cert.p2 == tuple(range(6))
    assert np.allclose(np.exp(1j * cert.d1), 1) and np.allclose(np.exp(1j * cert.d2), 1)


def test_known_equivalences():
    assert are_equivalent(m6_one(), fourier(6)) is not None
    assert are_equivalent(get("f2f3"), fourier(6)) is not None
    assert are_equivalent(tao_s6(), fourier(6)) is None
    assert are_equivalent(m6_discrete(), tao_s6()) is None


def test_filter_does_not_change_outcome():
    pairs = [(tao_s6(), fourier(6)), (m6_one(), fourier(6)), (dita_d6(), get("c6"))]
    for a, b in pairs:
        assert (are_equivalent(a, b) is None) == (are_equivalent(a, b, use_filter=False) is None)


def test_family_members_not_all_equivalent():
    fam = load_affine_family(bundled_family("f2f3"))
    assert are_equivalent(fam(0.3, 1.2), fam(0.0, 0.0)) is None
    assert lambda_contains(lambda_set(fam(0.3, 1.2)), OMEGA)


phase_grid = st.sampled_from([0.0, math.pi / 4, math.pi / 3, math.pi / 2, 2.0, math.pi, 4.5])


@given(phase_grid, phase_grid)
def test_order4_against_brute_force(a, b):
    H1, H2 = f4(a), f4(b)
    expected = brute_equivalent(H1, H2)
    cert = are_equivalent(H1, H2, use_filter=False)
    assert (cert is not None) == expected
    if cert is not None:
        assert cert.error(H1, H2) <= 1e-7


@given(st.integers(min_value=0, max_value=2**31))
def test_symmetry_on_random_pairs(seed):
    r = np.random.default_rng(seed)
    a, b = r.uniform(0, 2 * np.pi, 2)
    H1, H2 = f4(a), random_certificate(4, r).apply(f4(b))
    assert (are_equivalent(H1, H2) is None) == (are_equivalent(H2, H1) is None)


def test_certificate_json():
    c = EquivalenceCertificate((1, 0), (0, 1), np.array([0.0, np.pi]), np.zeros(2))
    js = c.to_json()
    assert js["p1"] == [1, 0] and js["d1_turns"] == [0.0, 0.5]


def test_conjugate_equivalence():
    assert conjugate_equivalent(tao_s6())
    assert conjugate_equivalent(dita_d6())
    assert conjugate_equivalent(fourier(6))


def test_m6_certificate_with_conjugate():
    # the discrete member is equivalent to its conjugate through an explicit relabelling
    M = m6_discrete()
    cert = are_equivalent(M, conjugate(M))
    assert cert is not None
    assert cert.error(M, conjugate(M)) <= 1e-12


def test_errors():
    with pytest.raises(DimensionMismatch):
        are_equivalent(fourier(5), fourier(6))
    with pytest.raises(OrderTooLarge):
        are_equivalent(fourier(7), fourier(7))
    cert = are_equivalent(fourier(7), fourier(7), budget=math.factorial(7) ** 2)
    assert cert is not None


def test_tolerance_matters():
    H = m6_discrete()
    G = CHMatrix(H.entries * np.exp(1j * 1e-5 * np.outer(np.arange(6), np.arange(6))))
    assert are_equivalent(G, H, Tolerances(tol_equiv=1e-7), use_filter=False) is None
    assert are_equivalent(G, H, Tolerances(tol_equiv=1e-3, tol_lambda=1e-3), use_filter=False) is not None
