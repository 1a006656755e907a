"""The regular (principal) W-algebra of sl_{n+1} inside its Heisenberg field.

Strong generators are produced by the Miura map: with eps_1, ..., eps_{n+1}
the weights of the defining representation (eps_i - eps_{i+1} = alpha_i,
sum eps_i = 0),

    W_s = -E_s( (k+n) d - (eps_1)(-1), ..., (k+n) d - (eps_{n+1})(-1) ) |0>,

where E_m of an ordered family of non-commuting operators is the
noncommutative elementary symmetric polynomial

    E_m(x_1, ..., x_N) = sum_{i_1 > i_2 > ... > i_m} x_{i_1} x_{i_2} ... x_{i_m}

(rightmost factor applied first), equivalently the coefficient of u^{N-m} in
the ordered product (u + x_N)(u + x_{N-1}) ... (u + x_1) for central u.  Then
W_0 = -|0>, W_1 = 0, and T = W_2/(k+n+1) is a conformal vector of central
charge

    c_reg = -n ((n+1)(k-1) + n^2 + 2n) ((n+2)k + (n+1)^2) / (k+n+1).

The kernel characterisation is by screening charges: every W_s is killed by
the zero mode of e^{-alpha_i/(k+n+1)} for each simple root alpha_i.

Operators on states are first-class here: an :class:`OperatorWord` is a
formal sum of composition words in derivative and creation atoms, compared
structurally, and applied right-to-left.
"""

from __future__ import annotations

from .fock import (
    BosonBasis,
    FieldExpr,
    FockError,
    Momentum,
    epsilon_momentum,
)
from .ope import Engine, proportionality
from .scalars import Scalar

__all__ = [
    "DerivAtom",
    "CreationAtom",
    "OperatorWord",
    "elementary_symmetric",
    "miura_operators",
    "miura_field",
    "regular_em_field",
    "regular_central_charge",
    "half_lattice_central_charge",
    "subregular_central_charge",
    "verify_regular_screening",
    "screening_momentum",
    "RegularFamily",
]


class DerivAtom:
    """The translation operator on one block or on everything."""

    __slots__ = ("basis", "block")

    def __init__(self, basis: BosonBasis, block: str = "full"):
        if block not in ("full", "alpha", "pi"):
            raise FockError(f"unknown derivative block {block!r}")
        self.basis = basis
        self.block = block

    def __call__(self, v: FieldExpr) -> FieldExpr:
        if self.block == "full":
            return v.derivative()
        return v.block_derivative(self.block)

    def __eq__(self, other):
        return (
            isinstance(other, DerivAtom)
            and self.basis is other.basis
            and self.block == other.block
        )

    def __hash__(self):
        return hash((id(self.basis), "d", self.block))

    def __repr__(self):
        return "d" if self.block == "full" else f"d[{self.block}]"


class CreationAtom:
    """The creation mode (mu)(-1) for a momentum direction mu."""

    __slots__ = ("momentum",)

    def __init__(self, momentum: Momentum):
        self.momentum = momentum

    def __call__(self, v: FieldExpr) -> FieldExpr:
        return v.apply_creation(self.momentum, 1)

    def __eq__(self, other):
        return isinstance(other, CreationAtom) and self.momentum == other.momentum

    def __hash__(self):
        return hash(("cr", self.momentum))

    def __repr__(self):
        return f"({self.momentum})(-1)"


class OperatorWord:
    """A formal sum of scaled composition words of atoms.

    ``words`` maps a tuple of atoms (leftmost applied last) to a Scalar
    coefficient.  Addition, scaling and composition stay formal; application
    to a FieldExpr expands right-to-left.  Equality is structural on the
    canonical word dictionary, which makes identities like

        E_2(w1, w2, w3) = w3 w2 + w3 w1 + w2 w1

    checkable without reference to any particular state.
    """

    __slots__ = ("field", "words")

    def __init__(self, field, words: dict):
        self.field = field
        self.words = {w: c for w, c in words.items() if not c.is_zero}

    @classmethod
    def identity(cls, field) -> "OperatorWord":
        return cls(field, {(): field.one})

    @classmethod
    def atom(cls, field, a) -> "OperatorWord":
        return cls(field, {(a,): field.one})

    def __add__(self, other: "OperatorWord") -> "OperatorWord":
        out = dict(self.words)
        for w, c in other.words.items():
            got = out.get(w)
            out[w] = c if got is None else got + c
        return OperatorWord(self.field, out)

    def __sub__(self, other: "OperatorWord") -> "OperatorWord":
        return self + other.scale(-1)

    def scale(self, factor) -> "OperatorWord":
        f = self.field(factor)
        return OperatorWord(self.field, {w: f * c for w, c in self.words.items()})

    def __matmul__(self, other: "OperatorWord") -> "OperatorWord":
        """Composition: (self @ other)(v) = self(other(v))."""
        out = {}
        for w1, c1 in self.words.items():
            for w2, c2 in other.words.items():
                w = w1 + w2
                c = c1 * c2
                got = out.get(w)
                out[w] = c if got is None else got + c
        return OperatorWord(self.field, out)

    def __call__(self, v: FieldExpr) -> FieldExpr:
        out = v.basis.zero_state()
        for word, c in self.words.items():
            cur = v
            for a in reversed(word):
                cur = a(cur)
            out = out + cur.scale(c)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatorWord):
            return NotImplemented
        return self.words == other.words

    def __repr__(self):
        if not self.words:
            return "0"
        return " + ".join(
            f"{c}*{''.join(map(repr, w)) or 'id'}" for w, c in self.words.items()
        )


def elementary_symmetric(ops, m: int) -> OperatorWord:
    """E_m(x_1 .. x_N) = sum over strictly descending index words of length m.

    Built by the Pascal recursion E_m(x_1..x_j) = E_m(x_1..x_{j-1})
    + x_j E_{m-1}(x_1..x_{j-1}), which keeps indices descending left to
    right.
    """
    ops = list(ops)
    if not 0 <= m <= len(ops):
        raise FockError(
            f"elementary symmetric degree {m} out of range 0..{len(ops)}"
        )
    field = ops[0].field if ops else None
    if field is None:
        raise FockError("empty operator family needs an explicit field")
    row = [OperatorWord.identity(field)] + [
        OperatorWord(field, {}) for _ in range(m)
    ]
    for op in ops:
        for deg in range(min(m, len(ops)), 0, -1):
            row[deg] = row[deg] + (op @ row[deg - 1])
    return row[m]


def es_tables(ops, v: FieldExpr):
    """All E_m(ops) v for m = 0 .. len(ops) by the same recursion, applied
    directly to a state (shares prefixes; used for the Miura fields)."""
    zero = v.basis.zero_state()
    row = [v] + [zero] * len(ops)
    for j, op in enumerate(ops, start=1):
        new = [row[0]]
        for m in range(1, j + 1):
            new.append(row[m] + op(row[m - 1]))
        new.extend([zero] * (len(ops) - j))
        row = new
    return row


def miura_operators(basis: BosonBasis):
    """The factors (k+n) d - (eps_i)(-1), i = 1 .. n+1, as OperatorWords."""
    field = basis.field
    shift = basis.level + basis.n
    out = []
    for s in range(1, basis.n + 2):
        deriv = OperatorWord.atom(field, DerivAtom(basis)).scale(shift)
        eps = OperatorWord.atom(
            field, CreationAtom(epsilon_momentum(basis, s))
        )
        out.append(deriv - eps)
    return out


def miura_field(s: int, basis: BosonBasis, _cache: dict = {}) -> FieldExpr:
    """W_s = -E_s(Miura factors)|0> for s = 0 .. n+1; W_0 = -|0>, W_1 = 0.

    The cache is keyed by the basis object itself (identity semantics); the
    strong reference keeps the basis alive, so a recycled object address can
    never alias a dead basis's table.
    """
    n = basis.n
    if not 0 <= s <= n + 1:
        raise FockError(f"Miura generator index must be in 0..{n + 1}, got {s}")
    table = _cache.get(basis)
    if table is None:
        table = [
            t.scale(-1) for t in es_tables(miura_operators(basis), basis.vacuum())
        ]
        _cache[basis] = table
    return table[s]


def regular_em_field(basis: BosonBasis) -> FieldExpr:
    """T = W_2/(k+n+1), the regular algebra's energy-momentum field."""
    return miura_field(2, basis) / (basis.level + (basis.n + 1))


def screening_momentum(basis: BosonBasis, i: int) -> Momentum:
    """-alpha_i/(k+n+1), the i-th regular screening momentum."""
    n = basis.n
    if not 1 <= i <= n:
        raise FockError(f"screening index must be in 1..{n}, got {i}")
    scale = -(basis.field.one / (basis.level + (n + 1)))
    return basis.unit(f"h{i}").scale(scale)


def verify_regular_screening(engine: Engine, i: int, state: FieldExpr) -> bool:
    """True iff (e^{-alpha_i/(k+n+1)})_(0) kills the state."""
    vertex = engine.basis.exp(screening_momentum(engine.basis, i))
    return engine.nth_product(vertex, state, 0).is_zero


class RegularFamily:
    """Convenience bundle: one basis/engine with the W_s and their checks."""

    def __init__(self, engine: Engine):
        self.engine = engine
        self.basis = engine.basis
        self.field = engine.field

    @property
    def n(self) -> int:
        return self.basis.n

    def epsilon(self, s: int) -> Momentum:
        return epsilon_momentum(self.basis, s)

    def generator(self, s: int) -> FieldExpr:
        return miura_field(s, self.basis)

    @property
    def stress_tensor(self) -> FieldExpr:
        return regular_em_field(self.basis)

    def w2_closed_form(self) -> FieldExpr:
        """W_2 = (k+n) sum_j (n+1-j) d eps_j - sum_{i>j} :eps_i eps_j:,
        an independent expansion of the s = 2 Miura coefficient."""
        n = self.n
        shift = self.basis.level + n
        out = self.basis.zero_state()
        for j in range(1, n + 2):
            eps_state = self.basis.vacuum().apply_creation(self.epsilon(j), 1)
            out = out + eps_state.derivative().scale(shift * (n + 1 - j))
        for i in range(1, n + 2):
            for j in range(1, i):
                a = self.basis.vacuum().apply_creation(self.epsilon(i), 1)
                b = self.basis.vacuum().apply_creation(self.epsilon(j), 1)
                out = out - self.engine.normally_ordered(a, b)
        return out

    def central_charge(self) -> Scalar:
        """c with T_(3)T = (c/2)|0>, computed from the fields."""
        t = self.stress_tensor
        lam = proportionality(
            self.basis.vacuum(), self.engine.nth_product(t, t, 3)
        )
        return lam * 2

    def verify_screenings(self, generators=None) -> bool:
        """Every regular screening kills every listed state (default: all
        W_s, s = 2 .. n+1)."""
        if generators is None:
            generators = [self.generator(s) for s in range(2, self.n + 2)]
        return all(
            verify_regular_screening(self.engine, i, g)
            for i in range(1, self.n + 1)
            for g in generators
        )


def regular_central_charge(field, n: int) -> Scalar:
    """Closed form: -n ((n+1)(k-1) + n^2 + 2n) ((n+2)k + (n+1)^2) / (k+n+1)."""
    k = field.sym("k")
    return (
        -(
            field(n)
            * ((k - 1) * (n + 1) + n * n + 2 * n)
            * (k * (n + 2) + (n + 1) * (n + 1))
        )
        / (k + n + 1)
    )


def half_lattice_central_charge(field, n: int) -> Scalar:
    """c_Pi = 2 + 12 n ell_n(k) = 2 - 48 alpha beta at the chosen (alpha, beta)."""
    k = field.sym("k")
    return field(2) + (k * n / (n + 1) + (n - 1)) * (12 * n)


def subregular_central_charge(field, n: int) -> Scalar:
    """Closed form for the subregular algebra:

    -(n(k+n) - 1)(k(n-1)(n^2+5n-2) + (n+1)(n^3+3n^2-9n+2)) / ((n+1)(k+n+1)).
    """
    k = field.sym("k")
    return (
        -((k + n) * n - 1)
        * (
            k * (n - 1) * (n * n + 5 * n - 2)
            + (n + 1) * (n * n * n + 3 * n * n - 9 * n + 2)
        )
        / ((k + n + 1) * (n + 1))
    )
