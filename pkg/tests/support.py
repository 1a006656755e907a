"""Shared test helpers: bridges between the package and the numeric oracle.

The oracle (``tests/oracle.py``) works over plain Fractions, so symbolic
states have to be specialised before comparison.  The helpers here do that
specialisation and generate reproducible random states for the
engine-versus-oracle equivalence checks.
"""

from __future__ import annotations

from fractions import Fraction

from wsub.fock import BosonBasis, FieldExpr
from wsub.scalars import scalar_eval


def to_oracle_state(x: FieldExpr, bindings: dict) -> dict:
    """Specialise a FieldExpr at exact rationals, in the oracle's format.

    Oracle states are ``{(osc, momentum): Fraction}`` with ``osc`` a sorted
    tuple of (direction index, depth) pairs and the momentum a plain tuple
    of Fractions.
    """
    out: dict = {}
    for (osc, mu), coeff in x.terms.items():
        c = scalar_eval(coeff, bindings)
        if not c:
            continue
        mom = tuple(scalar_eval(comp, bindings) for comp in mu.coords)
        key = (tuple(sorted(osc)), mom)
        v = out.get(key, Fraction(0)) + c
        if v:
            out[key] = v
        elif key in out:
            del out[key]
    return out


def random_level(rng, n: int) -> Fraction:
    """A random rational level avoiding the degenerate shifts k = -n, -n-1."""
    while True:
        k = Fraction(rng.randint(-30, 30), rng.randint(1, 10))
        if k != -n and k != -(n + 1):
            return k


def random_state(rng, basis: BosonBasis, max_osc_weight: int) -> FieldExpr:
    """A random 1-3 term state with momenta on the integer (c, d) lattice.

    Oscillators run over every direction (so contractions pick up the
    k-dependent Gram entries); momenta stay in the lattice block, where all
    pairings are even integers and vertex operators are single-valued.
    """
    c = basis.unit("c")
    d = basis.unit("d")
    out = basis.zero_state()
    for _ in range(rng.randint(1, 3)):
        mu = c.scale(rng.randint(-2, 2)) + d.scale(rng.randint(-1, 1))
        term = basis.exp(mu)
        budget = rng.randint(0, max_osc_weight)
        while budget > 0:
            depth = rng.randint(1, budget)
            name = rng.choice(basis.names)
            term = term.apply_osc(name, depth)
            budget -= depth
        out = out + term.scale(rng.randint(-3, 3))
    return out
