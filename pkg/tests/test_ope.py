"""Tests for the mode calculus: n-th products, normal ordering, OPE poles.

The engine computes A_(q)B directly by commuting oscillator modes through
vertex operators, so the axiomatic identities — skew-symmetry, the
translation covariance of products, vacuum axioms — are genuine checks of
the recursion rather than restatements of it.  Lattice exponentials are
exercised on the half-lattice block (c, d), where all pairings are even
integers, and on Cartan exponentials at levels chosen to make (or break)
integrality.
"""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from support import random_state
from wsub.fock import BosonBasis
from wsub.ope import (
    Engine,
    NonIntegerPairingError,
    NotProportionalError,
    OPEError,
    SingularPart,
    proportionality,
)


def small_pair(seed):
    """Two random states on a shared rank-1 basis, with its engine."""
    rng = random.Random(seed)
    basis = BosonBasis.standard(1)
    return basis, Engine(basis), random_state(rng, basis, 2), random_state(rng, basis, 2)


def factorial(i: int) -> int:
    out = 1
    for m in range(2, i + 1):
        out *= m
    return out


# ---------------------------------------------------------------------------
# axiomatic identities on random states
# ---------------------------------------------------------------------------


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=10**9), st.integers(min_value=0, max_value=2))
def test_skew_symmetry(seed, q):
    # A_(q)B = sum_i (-1)^(q+i+1) d^i (B_(q+i)A) / i!
    basis, eng, a, b = small_pair(seed)
    flipped = eng.singular_part(b, a)
    total = basis.zero_state()
    for i in range(0, flipped.max_pole - q + 1):
        sign = Fraction((-1) ** (q + i + 1), factorial(i))
        total = total + flipped.product(q + i).derivative(i).scale(sign)
    assert eng.nth_product(a, b, q) == total


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_skew_symmetry_of_normal_ordering(seed):
    # :AB: = :BA: + sum_{i>=1} (-1)^i d^i (B_(i-1)A) / i!
    basis, eng, a, b = small_pair(seed)
    flipped = eng.singular_part(b, a)
    total = eng.normally_ordered(b, a)
    for i in range(1, flipped.max_pole + 1):
        sign = Fraction((-1) ** i, factorial(i))
        total = total + flipped.product(i - 1).derivative(i).scale(sign)
    assert eng.normally_ordered(a, b) == total


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=10**9), st.integers(min_value=1, max_value=3))
def test_derivative_shifts_the_product_index(seed, q):
    # (dA)_(q)B = -q A_(q-1)B, and (dA)_(0)B = 0.
    _, eng, a, b = small_pair(seed)
    da = a.derivative()
    assert eng.nth_product(da, b, q) == eng.nth_product(a, b, q - 1).scale(-q)
    assert eng.nth_product(da, b, 0).is_zero


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=10**9), st.integers(min_value=0, max_value=2))
def test_translation_is_a_derivation_of_products(seed, q):
    # d(A_(q)B) = (dA)_(q)B + A_(q)(dB)
    _, eng, a, b = small_pair(seed)
    lhs = eng.nth_product(a, b, q).derivative()
    rhs = eng.nth_product(a.derivative(), b, q) + eng.nth_product(a, b.derivative(), q)
    assert lhs == rhs


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_vacuum_axioms(seed):
    basis, eng, a, _ = small_pair(seed)
    vac = basis.vacuum()
    assert eng.normally_ordered(vac, a) == a
    assert eng.normally_ordered(a, vac) == a
    for j in range(3):
        assert eng.nth_product(a, vac, j).is_zero
        assert eng.nth_product(vac, a, j).is_zero
    # :(dA) vac: reconstructs the derivative state.
    assert eng.normally_ordered(a.derivative(), vac) == a.derivative()


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_products_are_bilinear(seed):
    basis, eng, a, b = small_pair(seed)
    k = basis.field.sym("k")
    c = random_state(random.Random(seed + 1), basis, 2)
    for q in (0, 1):
        lhs = eng.nth_product(a.scale(k) + b, c, q)
        rhs = eng.nth_product(a, c, q).scale(k) + eng.nth_product(b, c, q)
        assert lhs == rhs


# ---------------------------------------------------------------------------
# known products
# ---------------------------------------------------------------------------


def test_heisenberg_current_products():
    basis = BosonBasis.standard(1)
    eng = Engine(basis)
    k = basis.field.sym("k")
    h = basis.osc("h1")

    part = eng.singular_part(h, h)
    assert part.max_pole == 2
    assert part.product(1) == basis.vacuum().scale(2 * (k + 2))
    assert part.product(0).is_zero
    assert part.pole_order(2) == part.product(1)
    assert part.product(5).is_zero
    assert not part.is_zero()

    # h_(0) acts on |mu> by <h, mu>.
    mu = basis.momentum({"h1": 1, "c": 3})
    assert eng.nth_product(h, basis.exp(mu), 0) == basis.exp(mu).scale(2 * (k + 2))
    # h_(-1) is creation.
    assert eng.normally_ordered(h, basis.exp(mu)) == basis.exp(mu).apply_osc("h1", 1)


def test_engine_apply_creation_forms_agree():
    basis = BosonBasis.standard(2)
    eng = Engine(basis)
    a = basis.exp(basis.unit("d")).apply_osc("h2", 2)
    assert eng.apply_creation("h1", a) == a.apply_osc("h1", 1)
    mu = basis.momentum({"h1": 2, "c": -1})
    assert eng.apply_creation(mu, a) == a.apply_creation(mu, 1)


def test_lattice_exponential_products():
    basis = BosonBasis.standard(1)
    eng = Engine(basis)
    c, d = basis.unit("c"), basis.unit("d")

    # <c, -c> = 0: regular OPE, and :e^c e^-c: = |0>.
    assert eng.singular_part(basis.exp(c), basis.exp(-c)).is_zero()
    assert eng.normally_ordered(basis.exp(c), basis.exp(-c)) == basis.vacuum()

    # <c, d> = +2: the OPE has a second-order zero, so even :e^c e^d: = 0.
    assert eng.singular_part(basis.exp(c), basis.exp(d)).is_zero()
    assert eng.normally_ordered(basis.exp(c), basis.exp(d)).is_zero

    # <c, -d> = -2: second-order pole with leading term |c - d> and
    # subleading term c(-1)|c - d>.
    part = eng.singular_part(basis.exp(c), basis.exp(-d))
    assert part.max_pole == 2
    assert part.product(1) == basis.exp(c - d)
    assert part.product(0) == basis.exp(c - d).apply_creation(c, 1)


def test_cartan_exponentials_at_integral_level():
    # At k = 1/2 and n = 1, <alpha, alpha> = 2(k + 2) = 5.
    field_basis = BosonBasis(1, BosonBasis.standard(1).field, Fraction(1, 2))
    eng = Engine(field_basis)
    alpha = field_basis.unit("h1")
    part = eng.singular_part(field_basis.exp(alpha), field_basis.exp(-alpha))
    assert part.max_pole == 5
    assert part.product(4) == field_basis.vacuum()
    assert part.product(3) == field_basis.vacuum().apply_creation(alpha, 1)


def test_non_integral_pairings_are_rejected():
    basis = BosonBasis.standard(1)
    eng = Engine(basis)
    e = basis.exp(basis.unit("h1"))
    with pytest.raises(NonIntegerPairingError):
        eng.singular_part(e, e)
    with pytest.raises(NonIntegerPairingError):
        eng.normally_ordered(e, e)

    third = BosonBasis(1, basis.field, Fraction(1, 3))
    e3 = third.exp(third.unit("h1"))
    with pytest.raises(NonIntegerPairingError):
        Engine(third).singular_part(e3, e3)


# ---------------------------------------------------------------------------
# ordering helpers and guards
# ---------------------------------------------------------------------------


def test_normally_ordered_many_nests_right_to_left():
    basis = BosonBasis.standard(1)
    eng = Engine(basis)
    h = basis.osc("h1")
    e = basis.exp(basis.unit("c"))
    assert eng.normally_ordered_many([]) == basis.vacuum()
    assert eng.normally_ordered_many([h]) == h
    expected = eng.normally_ordered(h, eng.normally_ordered(e, h))
    assert eng.normally_ordered_many([h, e, h]) == expected


def test_negative_product_index_is_an_error():
    basis = BosonBasis.standard(1)
    eng = Engine(basis)
    with pytest.raises(OPEError):
        eng.nth_product(basis.vacuum(), basis.vacuum(), -1)


def test_singular_part_api():
    basis = BosonBasis.standard(1)
    eng = Engine(basis)
    h = basis.osc("h1")

    regular = eng.singular_part(basis.vacuum(), h)
    assert regular.is_zero()
    assert regular.max_pole == 0
    assert str(regular) == "regular"
    assert regular.to_json() == []

    part = eng.singular_part(h, h)
    assert "(z-w)^-2" in str(part)
    assert part.to_json() == [p.to_json() for p in part.poles]
    assert part == SingularPart(basis, list(part.poles))
    with pytest.raises(OPEError):
        part.product(-1)
    with pytest.raises(OPEError):
        part.pole_order(0)

    # Trailing zero poles are trimmed on construction.
    padded = SingularPart(basis, list(part.poles) + [basis.zero_state()])
    assert padded.max_pole == part.max_pole


def test_proportionality_extracts_eigenvalues():
    basis = BosonBasis.standard(1)
    k = basis.field.sym("k")
    x = basis.osc("h1") + basis.exp(basis.unit("c")).scale(3)
    assert proportionality(x, x.scale(2 * k)) == 2 * k
    assert proportionality(x, basis.zero_state()).is_zero

    with pytest.raises(NotProportionalError):
        proportionality(basis.zero_state(), x)
    with pytest.raises(NotProportionalError):
        proportionality(x, basis.osc("h1"))
    with pytest.raises(NotProportionalError):
        proportionality(x, x + basis.osc("d"))
