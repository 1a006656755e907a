"""Tests for the bosonic state space: lattice pairing, momenta, and states.

The basis couples a rank-n Heisenberg block (Cartan directions h1..hn with
Gram matrix A_ij (k+n+1)) to a rank-2 half-lattice block (c, d with
<c,d> = 2, <c,c> = <d,d> = 0).  States are finite sums of oscillator
monomials acting on momentum vectors, and the translation operator acts
blockwise.
"""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from support import random_state
from wsub.fock import (
    BosonBasis,
    FieldExpr,
    FockError,
    Momentum,
    a_momentum,
    b_momentum,
    ell,
    epsilon_field,
    epsilon_momentum,
    omega1_momentum,
)
from wsub.scalars import PoleEvaluationError


# ---------------------------------------------------------------------------
# bilinear form
# ---------------------------------------------------------------------------


def test_gram_matrix_matches_cartan_normalisation():
    basis = BosonBasis.standard(3)
    k = basis.field.sym("k")
    scale = k + 4  # k + n + 1 at n = 3
    alpha = [basis.unit(f"h{i}") for i in range(1, 4)]
    c, d = basis.unit("c"), basis.unit("d")

    for i in range(3):
        assert basis.pair(alpha[i], alpha[i]) == 2 * scale
    assert basis.pair(alpha[0], alpha[1]) == -scale
    assert basis.pair(alpha[1], alpha[2]) == -scale
    assert basis.pair(alpha[0], alpha[2]) == basis.field.zero
    assert basis.pair(c, c).is_zero
    assert basis.pair(d, d).is_zero
    assert basis.pair(c, d) == basis.field.const(2)
    assert basis.pair(d, c) == basis.field.const(2)
    for i in range(3):
        assert basis.pair(alpha[i], c).is_zero
        assert basis.pair(alpha[i], d).is_zero


def test_pairing_is_symmetric_and_bilinear():
    basis = BosonBasis.standard(2)
    k = basis.field.sym("k")
    mu = basis.momentum({"h1": 2, "c": k, "d": Fraction(1, 2)})
    nu = basis.momentum({"h2": -1, "c": 3, "d": k + 1})
    rho = basis.momentum({"h1": k, "h2": k})
    assert basis.pair(mu, nu) == basis.pair(nu, mu)
    assert basis.pair(mu + rho, nu) == basis.pair(mu, nu) + basis.pair(rho, nu)
    assert basis.pair(mu.scale(k), nu) == k * basis.pair(mu, nu)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_j_current_direction_pairings(n):
    basis = BosonBasis.standard(n)
    k = basis.field.sym("k")
    l = ell(basis)
    assert l == k * Fraction(n, n + 1) + (n - 1)
    a, b, c = a_momentum(basis), b_momentum(basis), basis.unit("c")
    assert a + b == basis.unit("d")
    assert basis.pair(a, a) == -l
    assert basis.pair(b, b) == l
    assert basis.pair(a, b).is_zero
    assert basis.pair(a, c) == basis.field.one
    assert basis.pair(b, c) == basis.field.one


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_defining_weights(n):
    basis = BosonBasis.standard(n)
    k = basis.field.sym("k")
    eps = [epsilon_momentum(basis, s) for s in range(1, n + 2)]

    total = eps[0]
    for mu in eps[1:]:
        total = total + mu
    assert total.is_zero

    for i in range(n):
        assert eps[i] - eps[i + 1] == basis.unit(f"h{i + 1}")

    assert eps[0] == omega1_momentum(basis)
    assert basis.pair(eps[0], eps[0]) == (k + n + 1) * Fraction(n, n + 1)

    with pytest.raises(FockError):
        epsilon_momentum(basis, 0)
    with pytest.raises(FockError):
        epsilon_momentum(basis, n + 2)


def test_weight_field_is_a_creation_state():
    basis = BosonBasis.standard(1)
    # eps_1 = alpha_1 / 2 at n = 1.
    assert epsilon_field(1, basis) == basis.osc("h1").scale(Fraction(1, 2))
    assert epsilon_field(2, basis) == basis.osc("h1").scale(Fraction(-1, 2))


# ---------------------------------------------------------------------------
# linear structure of states
# ---------------------------------------------------------------------------


def test_state_constructors():
    basis = BosonBasis.standard(2)
    assert basis.zero_state().is_zero
    assert basis.vacuum() == basis.exp(basis.zero_momentum)
    assert not basis.vacuum().is_zero
    with pytest.raises(FockError):
        basis.osc("h1", depth=0)
    with pytest.raises(FockError):
        basis.osc("nope")


def test_linear_algebra_identities():
    basis = BosonBasis.standard(2)
    k = basis.field.sym("k")
    x = basis.osc("h1", 2) + basis.exp(basis.unit("c")).scale(k)
    y = basis.osc("d") - basis.vacuum().scale(3)

    assert (x + y) - y == x
    assert x + (-x) == basis.zero_state()
    assert 2 * x == x + x
    assert x * 2 == x + x
    assert x / 2 == x.scale(Fraction(1, 2))
    assert x.scale(0).is_zero
    assert (x - y).scale(k) == x.scale(k) - y.scale(k)


def test_states_are_not_hashable():
    basis = BosonBasis.standard(1)
    with pytest.raises(TypeError):
        hash(basis.vacuum())


def test_zero_coefficients_are_pruned():
    basis = BosonBasis.standard(1)
    k = basis.field.sym("k")
    x = basis.osc("h1").scale(k) + basis.osc("h1").scale(1 - k)
    assert x == basis.osc("h1")
    assert len((x - basis.osc("h1")).terms) == 0


# ---------------------------------------------------------------------------
# creation operators and the translation operator
# ---------------------------------------------------------------------------


def test_apply_osc_is_order_independent():
    basis = BosonBasis.standard(2)
    v = basis.vacuum()
    assert v.apply_osc("h1", 1).apply_osc("h2", 1) == v.apply_osc("h2", 1).apply_osc(
        "h1", 1
    )
    assert v.apply_osc("c", 2).apply_osc("c", 1) == v.apply_osc("c", 1).apply_osc(
        "c", 2
    )
    # Name and index addressing agree (h2 has index 1).
    assert v.apply_osc("h2", 3) == v.apply_osc(1, 3)
    with pytest.raises(FockError):
        v.apply_osc("h1", 0)


def test_apply_creation_is_the_momentum_contraction():
    basis = BosonBasis.standard(2)
    k = basis.field.sym("k")
    mu = basis.momentum({"h1": 2, "c": -k})
    v = basis.exp(basis.unit("d"))
    assert v.apply_creation(mu, 3) == v.apply_osc("h1", 3).scale(2) + v.apply_osc(
        "c", 3
    ).scale(-k)


def test_translation_operator_rules():
    basis = BosonBasis.standard(1)
    mu = basis.momentum({"h1": 2, "c": Fraction(1, 2)})

    assert basis.vacuum().derivative().is_zero
    # d|mu> = mu(-1)|mu>
    assert basis.exp(mu).derivative() == basis.exp(mu).apply_creation(mu, 1)
    # d(h(-m)|0>) = m h(-m-1)|0>
    assert basis.osc("h1", 1).derivative() == basis.osc("h1", 2)
    assert basis.osc("h1", 2).derivative() == basis.osc("h1", 3).scale(2)
    # Leibniz over an oscillator acting on a momentum state.
    state = basis.exp(mu).apply_osc("d", 1)
    expected = basis.exp(mu).apply_osc("d", 2) + basis.exp(mu).apply_osc(
        "d", 1
    ).apply_creation(mu, 1)
    assert state.derivative() == expected

    assert state.derivative(0) == state
    assert state.derivative(2) == state.derivative().derivative()
    with pytest.raises(FockError):
        state.derivative(-1)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_block_derivatives_split_the_translation(seed):
    basis = BosonBasis.standard(2)
    x = random_state(random.Random(seed), basis, 3)
    split = x.block_derivative("alpha") + x.block_derivative("pi")
    assert x.derivative() == split


def test_block_derivative_validates_block():
    basis = BosonBasis.standard(1)
    with pytest.raises(FockError):
        basis.vacuum().block_derivative("beta")


def test_block_derivative_moves_only_its_block():
    basis = BosonBasis.standard(1)
    mixed = basis.vacuum().apply_osc("h1", 1).apply_osc("c", 1)
    alpha_part = mixed.block_derivative("alpha")
    assert alpha_part == basis.vacuum().apply_osc("h1", 2).apply_osc("c", 1)
    pi_part = mixed.block_derivative("pi")
    assert pi_part == basis.vacuum().apply_osc("h1", 1).apply_osc("c", 2)


# ---------------------------------------------------------------------------
# substitution and inspection
# ---------------------------------------------------------------------------


def test_substitution_merges_colliding_momenta():
    basis = BosonBasis.standard(1)
    k = basis.field.sym("k")
    x = basis.exp(basis.momentum({"c": k})) + basis.exp(basis.unit("c"))
    merged = x.subs({"k": 1})
    assert merged == basis.exp(basis.unit("c")).scale(2)
    split = x.subs({"k": 2})
    assert len(split.terms) == 2


def test_substitution_hits_coefficients_and_reports_poles():
    basis = BosonBasis.standard(1)
    k = basis.field.sym("k")
    x = basis.osc("h1").scale(1 / (k + 2))
    assert x.subs({"k": 0}) == basis.osc("h1").scale(Fraction(1, 2))
    with pytest.raises(PoleEvaluationError):
        x.subs({"k": -2})


def test_osc_degree_and_coefficient_lookup():
    basis = BosonBasis.standard(2)
    assert basis.vacuum().osc_degree() == 0
    x = basis.vacuum().apply_osc("h1", 3).apply_osc("h2", 1)
    assert x.osc_degree() == 4

    i1, i2 = basis.index("h1"), basis.index("h2")
    # Lookup accepts the oscillator tuple in any order.
    assert x.coefficient(((i2, 1), (i1, 3)), basis.zero_momentum) == basis.field.one
    assert x.coefficient((), basis.zero_momentum).is_zero

    mu = basis.unit("d")
    y = x + basis.exp(mu)
    assert y.momenta() == {basis.zero_momentum, mu}


def test_map_coeffs():
    basis = BosonBasis.standard(1)
    k = basis.field.sym("k")
    x = basis.osc("h1").scale(k) + basis.vacuum()
    assert x.map_coeffs(lambda c: c * 2) == x.scale(2)


# ---------------------------------------------------------------------------
# momenta as values
# ---------------------------------------------------------------------------


def test_momentum_arithmetic_and_hash():
    basis = BosonBasis.standard(2)
    k = basis.field.sym("k")
    mu = basis.momentum({"h1": 1, "c": k})
    nu = basis.momentum({"h1": -1, "c": -k})
    assert (mu + nu).is_zero
    assert -mu == nu
    assert mu - mu == basis.zero_momentum
    assert 2 * mu == mu.scale(2)
    assert mu.coord("c") == k
    assert mu.coord("h2").is_zero
    assert hash(mu) == hash(basis.momentum({"c": k, "h1": 1}))
    assert mu != nu
    assert mu in {mu, nu}


def test_momentum_arity_guard():
    basis = BosonBasis.standard(2)
    with pytest.raises(FockError):
        Momentum(basis, (basis.field.zero,) * 3)


# ---------------------------------------------------------------------------
# cross-basis and constructor guards
# ---------------------------------------------------------------------------


def test_cross_basis_objects_are_rejected():
    one = BosonBasis.standard(1)
    other = BosonBasis.standard(1)
    with pytest.raises(FockError):
        one.pair(one.unit("c"), other.unit("c"))
    with pytest.raises(FockError):
        one.vacuum() + other.vacuum()
    with pytest.raises(FockError):
        one.unit("c") + other.unit("c")
    with pytest.raises(FockError):
        one.exp(other.unit("c"))
    with pytest.raises(FockError):
        one.vacuum().apply_creation(other.unit("c"), 1)


def test_basis_requires_a_heisenberg_direction():
    with pytest.raises(FockError):
        BosonBasis.standard(0)


def test_standard_basis_layout():
    basis = BosonBasis.standard(3, extra_symbols=("x",))
    assert basis.names == ("h1", "h2", "h3", "c", "d")
    assert basis.field.symbols == ("k", "x")
    assert [basis.is_pi_index(i) for i in range(5)] == [
        False,
        False,
        False,
        True,
        True,
    ]
    with pytest.raises(FockError):
        basis.index("h4")


# ---------------------------------------------------------------------------
# serialisation and rendering
# ---------------------------------------------------------------------------


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_json_round_trip(seed):
    basis = BosonBasis.standard(2)
    x = random_state(random.Random(seed), basis, 3)
    assert FieldExpr.from_json(basis, x.to_json()) == x
    for mu in x.momenta():
        assert Momentum.from_json(basis, mu.to_json()) == mu


def test_json_decoder_merges_and_validates():
    basis = BosonBasis.standard(1)
    term = basis.osc("h1").to_json()["terms"][0]
    doubled = FieldExpr.from_json(basis, {"terms": [term, term]})
    assert doubled == basis.osc("h1").scale(2)

    bad = {"terms": [{"osc": [["h1", 0]], "mom": basis.zero_momentum.to_json(),
                      "coeff": basis.field.one.to_json()}]}
    with pytest.raises(FockError):
        FieldExpr.from_json(basis, bad)


def test_rendering_is_stable():
    basis = BosonBasis.standard(1)
    k = basis.field.sym("k")
    assert str(basis.vacuum()) == "|0>"
    assert str(basis.zero_state()) == "0"
    assert str(basis.osc("h1")) == "h1(-1)|0>"
    assert str(basis.osc("h1").scale(-1)) == "-h1(-1)|0>"
    mu = basis.momentum({"c": 2, "d": -1})
    assert str(basis.exp(mu)) == "|2*c-d>"
    composite = basis.osc("c", 2).scale(k + 1) - basis.vacuum()
    assert str(composite) == "-|0> + (k+1)*c(-2)|0>"


def test_latex_folds_derivative_factorials():
    basis = BosonBasis.standard(1)
    assert basis.vacuum().to_latex() == r"\mathbbm{1}"
    assert basis.osc("h1", 2).to_latex() == r"\partial \alpha_{1}"
    # h(-3) = (1/2) d^2 h, so the displayed coefficient picks up the 1/2.
    assert basis.osc("h1", 3).to_latex() == r"\left(1/2\right)\,\partial^{2} \alpha_{1}"
