"""Free-field state spaces: bosonic oscillators over a lattice of momenta.

A :class:`BosonBasis` fixes ``n`` Heisenberg directions ``h1 .. hn`` whose
Gram matrix is the A_n Cartan matrix scaled by ``level + n + 1``, plus the
two half-lattice directions ``c``, ``d`` with pairings ``<c,c> = <d,d> = 0``
and ``<c,d> = 2``; the two blocks are orthogonal.

States are finite linear combinations of

    h_{i1}(-m1) h_{i2}(-m2) ... |mu>

with exact :class:`~wsub.scalars.Scalar` coefficients, where ``|mu>`` is the
highest-weight vector of momentum ``mu`` (a vector of Scalar coordinates over
the basis directions) and each ``h(-m)``, ``m >= 1``, is a creation mode.
Creation modes commute, so the sorted oscillator multiset is a canonical
form and equality of states is exact dictionary equality after dropping zero
coefficients.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

from .scalars import Scalar, ScalarError, ScalarField

__all__ = [
    "BosonBasis",
    "Momentum",
    "FieldExpr",
    "FockError",
    "ell",
    "epsilon_momentum",
    "omega1_momentum",
    "a_momentum",
    "b_momentum",
    "epsilon_field",
    "pi_em_field",
]

# An oscillator multiset: ((symbol_index, depth), ...) sorted ascending.
Osc = "tuple[tuple[int, int], ...]"

ScalarLike = Union[Scalar, int, Fraction]


class FockError(ValueError):
    """Malformed state-space input (bad symbol, bad depth, basis mismatch)."""


class BosonBasis:
    """Oscillator directions, their Gram matrix, and state constructors."""

    def __init__(self, n: int, field: ScalarField, level: Scalar):
        if n < 1:
            raise FockError(f"need at least one Heisenberg direction, got n={n}")
        self.n = n
        self.field = field
        self.level = field(level)
        self.names = tuple(f"h{i}" for i in range(1, n + 1)) + ("c", "d")
        self._index = {name: i for i, name in enumerate(self.names)}
        self.c_index = self._index["c"]
        self.d_index = self._index["d"]
        scale = self.level + (n + 1)  # <alpha_i, alpha_j> = A_ij (k + n + 1)
        zero, two = field.zero, field.const(2)
        gram = [[zero for _ in self.names] for _ in self.names]
        for i in range(n):
            gram[i][i] = two * scale
            if i + 1 < n:
                gram[i][i + 1] = -scale
                gram[i + 1][i] = -scale
        gram[self.c_index][self.d_index] = two
        gram[self.d_index][self.c_index] = two
        self.gram = gram
        self.zero_momentum = Momentum(self, (zero,) * len(self.names))

    @classmethod
    def standard(cls, n: int, extra_symbols: Iterable[str] = ()) -> "BosonBasis":
        """Basis over Q(k, *extra_symbols) at symbolic level k."""
        field = ScalarField(("k", *extra_symbols))
        return cls(n, field, field.sym("k"))

    def __repr__(self) -> str:
        return f"BosonBasis(n={self.n}, level={self.level})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise FockError(
                f"unknown direction {name!r}; declared: {self.names}"
            ) from None

    def is_pi_index(self, i: int) -> bool:
        """True for the half-lattice block (c, d)."""
        return i >= self.n

    # -- momenta -------------------------------------------------------------

    def momentum(self, coords: Mapping[str, ScalarLike]) -> "Momentum":
        vec = [self.field.zero] * len(self.names)
        for name, value in coords.items():
            vec[self.index(name)] = self.field(value)
        return Momentum(self, tuple(vec))

    def unit(self, name: str) -> "Momentum":
        return self.momentum({name: 1})

    def pair(self, mu: "Momentum", nu: "Momentum") -> Scalar:
        """The bilinear form <mu, nu>."""
        self._check(mu)
        self._check(nu)
        total = self.field.zero
        for i, x in enumerate(mu.coords):
            if x.is_zero:
                continue
            row = self.gram[i]
            for j, y in enumerate(nu.coords):
                if y.is_zero or row[j].is_zero:
                    continue
                total = total + x * y * row[j]
        return total

    def _check(self, obj) -> None:
        if obj.basis is not self:
            raise FockError("object belongs to a different basis")

    # -- state constructors ----------------------------------------------------

    def zero_state(self) -> "FieldExpr":
        return FieldExpr(self, {})

    def vacuum(self) -> "FieldExpr":
        return FieldExpr(self, {((), self.zero_momentum): self.field.one})

    def exp(self, mu: "Momentum") -> "FieldExpr":
        """The highest-weight vector |mu>."""
        self._check(mu)
        return FieldExpr(self, {((), mu): self.field.one})

    def osc(self, name: str, depth: int = 1) -> "FieldExpr":
        """The state h(-depth)|0>, i.e. d^(depth-1) h / (depth-1)! as a field."""
        if depth < 1:
            raise FockError(f"creation depth must be >= 1, got {depth}")
        return FieldExpr(
            self, {(((self.index(name), depth),), self.zero_momentum): self.field.one}
        )


class Momentum:
    """A lattice/weight vector: Scalar coordinates over the basis directions."""

    __slots__ = ("basis", "coords", "_hash")

    def __init__(self, basis: BosonBasis, coords: "tuple[Scalar, ...]"):
        if len(coords) != len(basis.names):
            raise FockError("momentum arity does not match basis")
        self.basis = basis
        self.coords = coords
        self._hash = None

    @property
    def is_zero(self) -> bool:
        return all(x.is_zero for x in self.coords)

    def __add__(self, other: "Momentum") -> "Momentum":
        self.basis._check(other)
        return Momentum(
            self.basis, tuple(x + y for x, y in zip(self.coords, other.coords))
        )

    def __sub__(self, other: "Momentum") -> "Momentum":
        return self + (-other)

    def __neg__(self) -> "Momentum":
        return Momentum(self.basis, tuple(-x for x in self.coords))

    def scale(self, factor: ScalarLike) -> "Momentum":
        f = self.basis.field(factor)
        return Momentum(self.basis, tuple(f * x for x in self.coords))

    def __rmul__(self, factor: ScalarLike) -> "Momentum":
        return self.scale(factor)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Momentum):
            return NotImplemented
        return self.basis is other.basis and self.coords == other.coords

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.coords)
        return self._hash

    def coord(self, name: str) -> Scalar:
        return self.coords[self.basis.index(name)]

    def __str__(self) -> str:
        parts = []
        for name, x in zip(self.basis.names, self.coords):
            if x.is_zero:
                continue
            text = str(x)
            if text == "1":
                parts.append(name)
            elif text == "-1":
                parts.append(f"-{name}")
            else:
                if "+" in text[1:] or "-" in text[1:]:
                    text = f"({text})"
                parts.append(f"{text}*{name}")
        if not parts:
            return "0"
        out = parts[0]
        for p in parts[1:]:
            out += f"+{p}" if not p.startswith("-") else p
        return out

    def __repr__(self) -> str:
        return f"Momentum({self})"

    def to_json(self):
        return [x.to_json() for x in self.coords]

    @classmethod
    def from_json(cls, basis: BosonBasis, obj) -> "Momentum":
        return cls(basis, tuple(basis.field.from_json(x) for x in obj))


class FieldExpr:
    """A state: dict from (oscillator multiset, momentum) to Scalar coefficient.

    Zero-coefficient terms are dropped eagerly, so ``terms`` is a canonical
    form and ``==`` is dictionary equality.
    """

    __slots__ = ("basis", "terms")

    def __init__(self, basis: BosonBasis, terms: dict):
        self.basis = basis
        self.terms = {t: c for t, c in terms.items() if not c.is_zero}

    @classmethod
    def _raw(cls, basis: BosonBasis, terms: dict) -> "FieldExpr":
        """Trusted constructor: ``terms`` must already be zero-free."""
        out = object.__new__(cls)
        out.basis = basis
        out.terms = terms
        return out

    # -- linear structure ------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "FieldExpr") -> "FieldExpr":
        self.basis._check(other)
        out = dict(self.terms)
        for t, c in other.terms.items():
            acc = out.get(t)
            out[t] = c if acc is None else acc + c
        return FieldExpr(self.basis, out)

    def __sub__(self, other: "FieldExpr") -> "FieldExpr":
        return self + (-other)

    def __neg__(self) -> "FieldExpr":
        return FieldExpr(self.basis, {t: -c for t, c in self.terms.items()})

    def scale(self, factor: ScalarLike) -> "FieldExpr":
        f = self.basis.field(factor)
        if f.is_zero:
            return self.basis.zero_state()
        return FieldExpr(self.basis, {t: f * c for t, c in self.terms.items()})

    def __rmul__(self, factor: ScalarLike) -> "FieldExpr":
        return self.scale(factor)

    def __mul__(self, factor: ScalarLike) -> "FieldExpr":
        return self.scale(factor)

    def __truediv__(self, factor: ScalarLike) -> "FieldExpr":
        f = self.basis.field(factor)
        return self.scale(self.basis.field.one / f)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FieldExpr):
            return NotImplemented
        return self.basis is other.basis and self.terms == other.terms

    def __hash__(self):
        raise TypeError("FieldExpr is mutable-by-convention; do not hash")

    # -- mode actions ------------------------------------------------------------

    def apply_osc(self, name_or_index, depth: int) -> "FieldExpr":
        """Apply the creation mode h(-depth) to every term."""
        if depth < 1:
            raise FockError(f"creation depth must be >= 1, got {depth}")
        idx = (
            name_or_index
            if isinstance(name_or_index, int)
            else self.basis.index(name_or_index)
        )
        out = {}
        for (osc, mu), c in self.terms.items():
            key = (_insert(osc, (idx, depth)), mu)
            acc = out.get(key)
            out[key] = c if acc is None else acc + c
        return FieldExpr(self.basis, out)

    def apply_creation(self, direction: Momentum, depth: int) -> "FieldExpr":
        """Apply (mu)(-depth) = sum_i mu^i h_i(-depth) for a momentum mu."""
        self.basis._check(direction)
        out = self.basis.zero_state()
        for i, x in enumerate(direction.coords):
            if x.is_zero:
                continue
            out = out + self.apply_osc(i, depth).scale(x)
        return out

    def derivative(self, order: int = 1) -> "FieldExpr":
        """The translation operator: d(h(-m)v) = m h(-m-1)v + h(-m) dv,
        d|mu> = mu(-1)|mu>."""
        return self._derivative(order, None)

    def block_derivative(self, block: str, order: int = 1) -> "FieldExpr":
        """Translation of one tensor factor only: "alpha" moves the h
        oscillators and h-momentum components, "pi" the (c, d) ones."""
        if block not in ("alpha", "pi"):
            raise FockError(f"block must be 'alpha' or 'pi', got {block!r}")
        want_pi = block == "pi"
        return self._derivative(
            order, lambda idx: self.basis.is_pi_index(idx) == want_pi
        )

    def _derivative(self, order: int, keep) -> "FieldExpr":
        if order < 0:
            raise FockError("derivative order must be >= 0")
        expr = self
        for _ in range(order):
            out = {}
            for (osc, mu), c in expr.terms.items():
                for pos, (idx, m) in enumerate(osc):
                    if keep is not None and not keep(idx):
                        continue
                    rest = osc[:pos] + osc[pos + 1 :]
                    key = (_insert(rest, (idx, m + 1)), mu)
                    acc = out.get(key)
                    add = c * m
                    out[key] = add if acc is None else acc + add
                for i, x in enumerate(mu.coords):
                    if x.is_zero or (keep is not None and not keep(i)):
                        continue
                    key = (_insert(osc, (i, 1)), mu)
                    acc = out.get(key)
                    add = c * x
                    out[key] = add if acc is None else acc + add
            expr = FieldExpr(self.basis, out)
        return expr

    # -- inspection ---------------------------------------------------------------

    def osc_degree(self) -> int:
        """Max total oscillator depth over terms (0 for pure momenta)."""
        return max((sum(m for _, m in osc) for (osc, _) in self.terms), default=0)

    def momenta(self) -> "set[Momentum]":
        return {mu for (_, mu) in self.terms}

    def coefficient(self, osc, mu: Momentum) -> Scalar:
        """The coefficient of a single canonical term (zero if absent)."""
        key = (tuple(sorted(osc)), mu)
        return self.terms.get(key, self.basis.field.zero)

    def map_coeffs(self, f) -> "FieldExpr":
        return FieldExpr(self.basis, {t: f(c) for t, c in self.terms.items()})

    def subs(self, bindings: dict) -> "FieldExpr":
        """Substitute exact rationals into all coefficients and momenta."""
        out = {}
        for (osc, mu), c in self.terms.items():
            mu2 = Momentum(self.basis, tuple(x.subs(bindings) for x in mu.coords))
            key = (osc, mu2)
            add = c.subs(bindings)
            acc = out.get(key)
            out[key] = add if acc is None else acc + add
        return FieldExpr(self.basis, out)

    # -- rendering -----------------------------------------------------------------

    def _sorted_terms(self):
        def key(item):
            (osc, mu), _ = item
            return (
                sum(m for _, m in osc),
                osc,
                tuple(str(x) for x in mu.coords),
            )

        return sorted(self.terms.items(), key=key)

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        chunks = []
        for (osc, mu), c in self._sorted_terms():
            oscs = "".join(
                f"{self.basis.names[i]}(-{m})" for i, m in reversed(osc)
            )
            ket = f"|{mu}>" if not mu.is_zero else "|0>"
            coeff = str(c)
            if "+" in coeff[1:] or "-" in coeff[1:] or "/" in coeff:
                coeff = f"({coeff})"
            if coeff == "1":
                chunks.append(f"{oscs}{ket}")
            elif coeff == "-1":
                chunks.append(f"-{oscs}{ket}")
            else:
                chunks.append(f"{coeff}*{oscs}{ket}")
        out = chunks[0]
        for piece in chunks[1:]:
            out += f" + {piece}" if not piece.startswith("-") else f" - {piece[1:]}"
        return out

    def to_latex(self) -> str:
        """Render with derivative fields and nested right-to-left normal
        ordering: h(-m) prints as d^(m-1)h/(m-1)! with the factorial folded
        into the displayed coefficient."""
        if self.is_zero:
            return "0"
        pieces = []
        for (osc, mu), c in self._sorted_terms():
            shown = c
            factors = []
            for i, m in osc:
                name = self.basis.names[i]
                sym = (
                    rf"\alpha_{{{name[1:]}}}"
                    if name.startswith("h")
                    else name
                )
                if m == 1:
                    factors.append(sym)
                elif m == 2:
                    factors.append(rf"\partial {sym}")
                else:
                    factors.append(rf"\partial^{{{m - 1}}} {sym}")
                    shown = shown / _factorial_scalar(self.basis.field, m - 1)
            if not mu.is_zero:
                factors.append(rf"\mathrm{{e}}^{{{_latex_momentum(mu)}}}")
            if not factors:
                body = r"\mathbbm{1}"
            elif len(factors) == 1:
                body = factors[0]
            else:
                body = ":" + r"\,".join(factors) + ":"
            coeff = str(shown)
            if coeff == "1":
                pieces.append(body)
            elif coeff == "-1":
                pieces.append(f"-{body}")
            else:
                if "+" in coeff[1:] or "-" in coeff[1:] or "/" in coeff:
                    coeff = rf"\left({coeff}\right)"
                pieces.append(rf"{coeff}\,{body}")
        out = pieces[0]
        for p in pieces[1:]:
            out += f" + {p}" if not p.startswith("-") else f" - {p[1:]}"
        return out

    def __repr__(self) -> str:
        return f"FieldExpr({self})"

    def to_json(self):
        return {
            "terms": [
                {
                    "osc": [[self.basis.names[i], m] for i, m in osc],
                    "mom": mu.to_json(),
                    "coeff": c.to_json(),
                }
                for (osc, mu), c in self._sorted_terms()
            ]
        }

    @classmethod
    def from_json(cls, basis: BosonBasis, obj) -> "FieldExpr":
        terms = {}
        for item in obj["terms"]:
            osc = tuple(sorted((basis.index(name), int(m)) for name, m in item["osc"]))
            for _, m in osc:
                if m < 1:
                    raise FockError(f"creation depth must be >= 1, got {m}")
            mu = Momentum.from_json(basis, item["mom"])
            coeff = basis.field.from_json(item["coeff"])
            key = (osc, mu)
            terms[key] = terms.get(key, basis.field.zero) + coeff
        return cls(basis, terms)


def _insert(osc, entry):
    """Insert one oscillator into a sorted multiset tuple."""
    out = list(osc)
    lo, hi = 0, len(out)
    while lo < hi:
        mid = (lo + hi) // 2
        if out[mid] < entry:
            lo = mid + 1
        else:
            hi = mid
    out.insert(lo, entry)
    return tuple(out)


def _factorial_scalar(field, m: int):
    out = field.one
    for i in range(2, m + 1):
        out = out * i
    return out


def _latex_momentum(mu: Momentum) -> str:
    parts = []
    for name, x in zip(mu.basis.names, mu.coords):
        if x.is_zero:
            continue
        sym = rf"\alpha_{{{name[1:]}}}" if name.startswith("h") else name
        text = str(x)
        if text == "1":
            parts.append(sym)
        elif text == "-1":
            parts.append(f"-{sym}")
        else:
            if "+" in text[1:] or "-" in text[1:] or "/" in text:
                text = rf"\left({text}\right)"
            parts.append(f"{text}{sym}")
    if not parts:
        return "0"
    out = parts[0]
    for p in parts[1:]:
        out += f"+{p}" if not p.startswith("-") else p
    return out


# -- standard momenta and fields ------------------------------------------------


def ell(basis: BosonBasis) -> "Scalar":
    """ell_n(k) = nk/(n+1) + n - 1, the J-current norm <b,b>."""
    n = basis.n
    return basis.level * n / (n + 1) + (n - 1)


def epsilon_momentum(basis: BosonBasis, s: int) -> Momentum:
    """The s-th weight of the defining representation, s = 1 .. n+1:

    eps_s = -sum_{j<s} (j/(n+1)) alpha_j + sum_{j>=s} ((n+1-j)/(n+1)) alpha_j,

    so that eps_i - eps_{i+1} = alpha_i and sum_s eps_s = 0.
    """
    n = basis.n
    if not 1 <= s <= n + 1:
        raise FockError(f"epsilon index must be in 1..{n + 1}, got {s}")
    coords = {}
    for j in range(1, n + 1):
        if j < s:
            coords[f"h{j}"] = Fraction(-j, n + 1)
        else:
            coords[f"h{j}"] = Fraction(n + 1 - j, n + 1)
    return basis.momentum(coords)


def omega1_momentum(basis: BosonBasis) -> Momentum:
    """The first fundamental weight, omega_1 = eps_1 = (1/(n+1)) sum (n-i+1) alpha_i."""
    return epsilon_momentum(basis, 1)


def a_momentum(basis: BosonBasis) -> Momentum:
    """a = -(ell/2) c + (1/2) d, with <a,a> = -ell, <a,b> = 0, <a,c> = 1."""
    half = basis.field.const(Fraction(1, 2))
    return basis.momentum({"c": -half * ell(basis), "d": half})


def b_momentum(basis: BosonBasis) -> Momentum:
    """b = (ell/2) c + (1/2) d, with <b,b> = ell, <b,c> = 1."""
    half = basis.field.const(Fraction(1, 2))
    return basis.momentum({"c": half * ell(basis), "d": half})


def epsilon_field(s: int, basis: BosonBasis) -> FieldExpr:
    """The weight field eps_s(z) as a state, (eps_s)(-1)|0>."""
    return basis.vacuum().apply_creation(epsilon_momentum(basis, s), 1)


def pi_em_field(basis: BosonBasis, alpha=None, beta=None) -> FieldExpr:
    """The half-lattice energy-momentum field

        t = (1/2):cd: + alpha dc + beta dd,

    central charge 2 - 48 alpha beta.  Defaults are the distinguished choice
    alpha = (n/2) ell_n(k), beta = -1/2, which assigns weight 1 to e^c and
    weight (n/2) ell_n(k) to every |(-b + x c)>.
    """
    field = basis.field
    if alpha is None:
        alpha = ell(basis) * basis.n / 2
    if beta is None:
        beta = field.const(Fraction(-1, 2))
    half = field.const(Fraction(1, 2))
    cd = basis.osc("d").apply_osc("c", 1)
    return (
        cd.scale(half)
        + basis.osc("c", 2).scale(field(alpha))
        + basis.osc("d", 2).scale(field(beta))
    )
