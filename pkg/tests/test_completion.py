import cmath

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hadamard_lab.catalogue import m6_closed_forms
from hadamard_lab.completion import NoCompletion, complete_row, completion_pair, haagerup_product
from hadamard_lab.core import UnitComplex

OMEGA = cmath.exp(2j * cmath.pi / 3)
angles = st.floats(min_value=0.0, max_value=2 * np.pi, allow_nan=False)


def quadratic_roots(sigma):
    # w^2 + 2 sigma w + sigma/conj(sigma) = 0
    return np.roots([1, 2 * sigma, sigma / sigma.conjugate()])


def test_cube_root_row():
    rc = complete_row(1, 1, OMEGA**2, OMEGA**2)
    assert rc.sigma == pytest.approx(1 + OMEGA**2)
    x5, x6 = rc.values()
    assert x5 + x6 == pytest.approx(-2 * rc.sigma, abs=1e-12)
    roots = quadratic_roots(rc.sigma)
    for v in (x5, x6):
        assert np.min(np.abs(roots - v)) < 1e-7  # |sigma| = 1: double root, sqrt-conditioned
        assert v == pytest.approx(OMEGA, abs=1e-7)


@pytest.mark.parametrize("z", [1, 1j, OMEGA, cmath.exp(0.7j)])
def test_degenerate_sigma(z):
    rc = complete_row(1, -1, z, -z)
    assert rc.degenerate
    with pytest.raises(ValueError):
        rc.values()


def test_m6_row_three_completion():
    e = m6_closed_forms()
    rc = complete_row(1, e.x, e.a, 1)
    assert rc.sigma == pytest.approx((2 + e.x + e.a) / 2)
    got = sorted(rc.values(), key=lambda z: z.imag)
    assert got[0] == pytest.approx(e.b, abs=1e-12)
    assert got[1] == pytest.approx(e.c, abs=1e-12)
    # "+" branch first
    assert rc.values()[0] == pytest.approx(e.c, abs=1e-12)


def test_no_completion():
    with pytest.raises(NoCompletion):
        complete_row(1, 1, 1, 1)


def test_clamp_just_above_one():
    p, m = completion_pair(1 + 5e-11)
    assert p == pytest.approx(-1 - 5e-11) and m == pytest.approx(p)


@given(angles, angles, angles, angles)
def test_completion_properties(a, b, c, d):
    xs = [UnitComplex(t) for t in (a, b, c, d)]
    try:
        rc = complete_row(*xs)
    except NoCompletion:
        assert abs(sum(x.value for x in xs) / 2) > 1
        return
    if rc.degenerate:
        return
    x5, x6 = rc.values()
    assert abs(sum(x.value for x in xs) + x5 + x6) < 1e-12
    assert abs(abs(x5) - 1) < 1e-12 and abs(abs(x6) - 1) < 1e-12
    assert abs(x5 * x6 - rc.sigma / rc.sigma.conjugate()) < 1e-12
    # depends only on the multiset of inputs
    again = complete_row(xs[2], xs[0], xs[3], xs[1])
    assert abs(again.sigma - rc.sigma) < 1e-15


def test_haagerup_examples():
    assert haagerup_product(1, 1, 1, 1) == 8
    assert haagerup_product(1, 1, 1, 1j) == pytest.approx(4)


@given(angles, angles, angles, angles)
def test_haagerup_product_is_real(a, b, c, d):
    u, v, s, t = (cmath.exp(1j * x) for x in (a, b, c, d))
    assert abs(haagerup_product(u, v, s, t).imag) < 1e-12
