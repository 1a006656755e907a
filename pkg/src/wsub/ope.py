"""Exact n-th products A_(q)B of free-field states.

The engine computes arbitrary modes of vertex operators on the oscillator
states of :mod:`wsub.fock` by structural recursion:

* peel the first oscillator of A: with X = d^(m-1)h/(m-1)! one has
  A = h(-m)A' = X_(-1)A', and the iterate (Borcherds) identity at p = -1
  gives

      (X_(-1)A')_(q)C = sum_{i>=0} X_(-1-i)(A'_(q+i)C)
                      + sum_{i>=0} A'_(q-1-i)(X_(i)C),

  where X_(-1-i) = binom(i+m-1, m-1) h(-i-m) is a creation mode and
  X_(i) = (-1)^(m-1) binom(i, m-1) h(i-m+1) annihilates (or is the zero
  mode, i = m-1);

* once A = |mu| is a pure momentum vector, commute it through C's
  oscillators, e^mu_(q)(g(-m)B') = g(-m)(e^mu_(q)B') - <g,mu> e^mu_(q-m)B',
  down to the lattice base case

      e^mu_(q) e^nu = P_i |mu+nu>,   i = -q - 1 - <mu,nu>,

  with P_i the Schur-like polynomial generated by i P_i = sum_m mu(-m)P_{i-m}
  (and P_i = 0 for i < 0).

Both infinite sums truncate exactly: every product is homogeneous for the
oscillator grading, deg(A_(q)B) = deg A + deg B - q - 1 - <mu,nu>, so terms
of negative degree vanish.  The base case requires the momentum pairing
<mu,nu> to be a constant integer (two-sided locality); otherwise
:class:`NonIntegerPairingError` is raised.  All lattice structure constants
use the trivial two-cocycle, which is consistent for the even pairings the
package ever multiplies two-sidedly.

Products are memoised per engine, keyed on canonical (term, q, term)
triples, so repeated sub-products across a large verification run are free.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from math import comb

from .fock import BosonBasis, FieldExpr, Momentum, _insert
from .scalars import Scalar, ScalarError

__all__ = [
    "Engine",
    "SingularPart",
    "OPEError",
    "NonIntegerPairingError",
    "NotProportionalError",
    "proportionality",
]


class OPEError(ValueError):
    """Base class for product-level failures."""


class NonIntegerPairingError(OPEError):
    """Two momenta with non-integer (or non-constant) pairing were multiplied."""


class NotProportionalError(OPEError):
    """A state expected to be a multiple of another is not."""


@dataclass
class SingularPart:
    """All singular terms of one OPE: poles[j] = A_(j)B, the coefficient of
    (z-w)^(-j-1).  Trailing zero entries are trimmed, so len(poles) - 1 is
    the largest nonzero product index."""

    basis: BosonBasis
    poles: list = dataclass_field(default_factory=list)

    def __post_init__(self):
        while self.poles and self.poles[-1].is_zero:
            self.poles.pop()

    def product(self, j: int) -> FieldExpr:
        """A_(j)B."""
        if j < 0:
            raise OPEError(f"product index must be >= 0, got {j}")
        if j >= len(self.poles):
            return self.basis.zero_state()
        return self.poles[j]

    def pole_order(self, p: int) -> FieldExpr:
        """The coefficient of (z-w)^(-p), p >= 1 (i.e. A_(p-1)B)."""
        if p < 1:
            raise OPEError(f"pole order must be >= 1, got {p}")
        return self.product(p - 1)

    @property
    def max_pole(self) -> int:
        """Largest pole order present (0 when regular)."""
        return len(self.poles)

    def is_zero(self) -> bool:
        return not self.poles

    def __eq__(self, other) -> bool:
        if not isinstance(other, SingularPart):
            return NotImplemented
        return self.basis is other.basis and self.poles == other.poles

    def __str__(self) -> str:
        if not self.poles:
            return "regular"
        lines = [
            f"  (z-w)^-{j + 1}: {f}"
            for j, f in reversed(list(enumerate(self.poles)))
            if not f.is_zero
        ]
        return "\n".join(lines)

    def to_json(self):
        return [f.to_json() for f in self.poles]


class Engine:
    """Mode calculus for one :class:`BosonBasis` with one memo cache."""

    def __init__(self, basis: BosonBasis):
        self.basis = basis
        self.field = basis.field
        self._cache: dict = {}
        self._pair_cache: dict = {}

    # -- public products -------------------------------------------------------

    def nth_product(self, a: FieldExpr, b: FieldExpr, j: int) -> FieldExpr:
        """A_(j)B for j >= 0 (the singular OPE coefficients)."""
        if j < 0:
            raise OPEError(
                f"nth_product index must be >= 0, got {j}; "
                "use normally_ordered for regular products"
            )
        return self._nth(a, j, b)

    def normally_ordered(self, a: FieldExpr, b: FieldExpr) -> FieldExpr:
        """:AB: = A_(-1)B."""
        return self._nth(a, -1, b)

    def normally_ordered_many(self, factors) -> FieldExpr:
        """:A1 A2 ... Ar: nested right-to-left."""
        factors = list(factors)
        if not factors:
            return self.basis.vacuum()
        out = factors[-1]
        for a in reversed(factors[:-1]):
            out = self.normally_ordered(a, out)
        return out

    def apply_creation(self, h, a: FieldExpr) -> FieldExpr:
        """:hA: for a basis symbol name or a Momentum — the mode h_(-1)."""
        if isinstance(h, Momentum):
            return a.apply_creation(h, 1)
        return a.apply_osc(h, 1)

    def singular_part(self, a: FieldExpr, b: FieldExpr) -> SingularPart:
        """Every A_(q)B with q >= 0, as a list indexed by q."""
        self.basis._check(a)
        self.basis._check(b)
        acc: dict = {}
        top = -1
        for ta, ca in a.terms.items():
            for tb, cb in b.terms.items():
                p = self._pairing(ta[1], tb[1])
                qmax = _deg(ta) + _deg(tb) - 1 - p
                top = max(top, qmax)
                if qmax < 0:
                    continue
                cab = ca * cb
                for q in range(0, qmax + 1):
                    term = self._nth_term(ta, q, tb)
                    if not term.is_zero:
                        _accumulate(acc.setdefault(q, {}), term.terms, cab)
        zero = self.basis.zero_state()
        poles = [
            FieldExpr._raw(self.basis, _strip(acc[q])) if q in acc else zero
            for q in range(0, top + 1)
        ]
        return SingularPart(self.basis, poles)

    def derivative(self, a: FieldExpr, order: int = 1) -> FieldExpr:
        return a.derivative(order)

    # -- recursion ----------------------------------------------------------------

    def _nth(self, a: FieldExpr, q: int, b: FieldExpr) -> FieldExpr:
        self.basis._check(a)
        self.basis._check(b)
        bucket: dict = {}
        for ta, ca in a.terms.items():
            for tb, cb in b.terms.items():
                term = self._nth_term(ta, q, tb)
                if not term.is_zero:
                    _accumulate(bucket, term.terms, ca * cb)
        return FieldExpr._raw(self.basis, _strip(bucket))

    def _pairing(self, mu: Momentum, nu: Momentum) -> int:
        """<mu, nu> as an integer; 0 if either vanishes, error otherwise."""
        if mu.is_zero or nu.is_zero:
            return 0
        key = (mu, nu)
        hit = self._pair_cache.get(key)
        if hit is not None:
            return hit
        p = self.basis.pair(mu, nu)
        try:
            out = p.as_int()
        except ScalarError:
            raise NonIntegerPairingError(
                f"momenta <{mu}>, <{nu}> pair to {p}, not an integer: "
                "their fields are not mutually local"
            ) from None
        self._pair_cache[key] = out
        return out

    def _nth_term(self, ta, q: int, tb) -> FieldExpr:
        key = (ta, q, tb)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        out = self._nth_term_uncached(ta, q, tb)
        self._cache[key] = out
        return out

    def _nth_term_uncached(self, ta, q: int, tb) -> FieldExpr:
        osc_a, mu = ta
        osc_b, nu = tb
        zero = self.basis.zero_state()

        # Homogeneity cutoff: the result lives in oscillator degree
        # deg(A) + deg(B) - q - 1 - <mu,nu>.
        p = self._pairing(mu, nu)
        if sum(m for _, m in osc_a) + sum(m for _, m in osc_b) - q - 1 - p < 0:
            return zero

        # Vacuum: 1_(q)B = delta_{q,-1} B.
        if not osc_a and mu.is_zero:
            if q == -1:
                return FieldExpr(self.basis, {tb: self.field.one})
            return zero

        if osc_a:
            return self._peel_oscillator(osc_a, mu, q, tb, p)
        return self._momentum_action(mu, q, tb, p)

    def _peel_oscillator(self, osc_a, mu, q: int, tb, p: int) -> FieldExpr:
        (idx, m) = osc_a[0]
        rest = (osc_a[1:], mu)
        osc_b, nu = tb
        deg_rest = sum(d for _, d in osc_a[1:])
        deg_b = sum(d for _, d in osc_b)
        bucket: dict = {}

        # Creation half: sum_i binom(i+m-1, m-1) h(-i-m) (A'_(q+i) B).
        imax = deg_rest + deg_b - q - 1 - p
        for i in range(0, imax + 1):
            inner = self._nth_term(rest, q + i, tb)
            if inner.is_zero:
                continue
            cmb = comb(i + m - 1, m - 1)
            mult = None if cmb == 1 else self.field.const(cmb)
            entry = (idx, i + m)
            for (osc, mom), c in inner.terms.items():
                key = (_insert(osc, entry), mom)
                v = c if mult is None else mult * c
                prev = bucket.get(key)
                bucket[key] = v if prev is None else prev + v

        # Annihilation half: sum_i (-1)^(m-1) binom(i, m-1) A'_(q-1-i)(h(s)B),
        # s = i - m + 1, which only hits the zero mode (s = 0) and the depths
        # actually present in B.
        sign = -1 if (m - 1) % 2 else 1

        zero_mode = self.basis.gram[idx]  # row for <h, .>
        hnu = self.field.zero
        for jidx, x in enumerate(nu.coords):
            if not x.is_zero and not zero_mode[jidx].is_zero:
                hnu = hnu + zero_mode[jidx] * x
        if not hnu.is_zero:
            inner = self._nth_term(rest, q - m, tb)
            if not inner.is_zero:
                _accumulate(bucket, inner.terms, hnu if sign == 1 else -hnu)

        for pos, (gidx, s) in enumerate(osc_b):
            pair = self.basis.gram[idx][gidx]
            if pair.is_zero:
                continue
            trimmed = (osc_b[:pos] + osc_b[pos + 1 :], nu)
            inner = self._nth_term(rest, q - s - m, trimmed)
            if inner.is_zero:
                continue
            k = s * sign * comb(s + m - 1, m - 1)
            _accumulate(bucket, inner.terms, pair if k == 1 else pair * k)
        return FieldExpr._raw(self.basis, _strip(bucket))

    def _momentum_action(self, mu, q: int, tb, p: int) -> FieldExpr:
        osc_b, nu = tb
        if osc_b:
            # e^mu_(q)(g(-s)B') = g(-s)(e^mu_(q)B') - <g,mu> e^mu_(q-s)B'.
            (gidx, s) = osc_b[0]
            trimmed = (osc_b[1:], nu)
            bucket: dict = {}
            base = self._nth_term(((), mu), q, trimmed)
            if not base.is_zero:
                entry = (gidx, s)
                for (osc, mom), c in base.terms.items():
                    key = (_insert(osc, entry), mom)
                    prev = bucket.get(key)
                    bucket[key] = c if prev is None else prev + c
            gmu = self.field.zero
            row = self.basis.gram[gidx]
            for jidx, x in enumerate(mu.coords):
                if not x.is_zero and not row[jidx].is_zero:
                    gmu = gmu + row[jidx] * x
            if not gmu.is_zero:
                inner = self._nth_term(((), mu), q - s, trimmed)
                if not inner.is_zero:
                    _accumulate(bucket, inner.terms, -gmu)
            return FieldExpr._raw(self.basis, _strip(bucket))
        # Lattice base case.
        i = -q - 1 - p
        if i < 0:
            return self.basis.zero_state()
        return self._schur(mu, i, mu + nu)

    def _schur(self, mu: Momentum, i: int, total: Momentum) -> FieldExpr:
        """P_i |total| with i P_i = sum_{m=1..i} mu(-m) P_{i-m}."""
        layers = [self.basis.exp(total)]
        for j in range(1, i + 1):
            acc = self.basis.zero_state()
            for m in range(1, j + 1):
                acc = acc + layers[j - m].apply_creation(mu, m)
            layers.append(acc.scale(self.field.const(1) / self.field.const(j)))
        return layers[i]


def _deg(term) -> int:
    osc, _ = term
    return sum(m for _, m in osc)


def _accumulate(bucket: dict, terms: dict, mult: Scalar) -> None:
    """bucket += mult * terms, in place (bucket maps term key -> Scalar)."""
    for key, c in terms.items():
        v = mult * c
        prev = bucket.get(key)
        bucket[key] = v if prev is None else prev + v


def _strip(bucket: dict) -> dict:
    """Drop exact cancellations so the dict is a canonical terms mapping."""
    return {t: c for t, c in bucket.items() if not c.is_zero}


def proportionality(x: FieldExpr, y: FieldExpr) -> Scalar:
    """The scalar lam with y = lam * x, for nonzero x; exact, or error.

    Useful for eigenvalue extraction (conformal weights, charges).
    """
    if x.is_zero:
        raise NotProportionalError("reference state is zero")
    if y.is_zero:
        return x.basis.field.zero
    key, cx = next(iter(x.terms.items()))
    cy = y.terms.get(key)
    if cy is None:
        raise NotProportionalError(f"{y} is not proportional to {x}")
    lam = cy / cx
    if y != x.scale(lam):
        raise NotProportionalError(f"{y} is not proportional to {x}")
    return lam
