"""Exact rational-function scalars over Q.

Every coefficient in the engine is an element of Q(s1, ..., sm) for a symbol
set declared once per session.  Elements are stored as a (numerator,
denominator) pair of sparse polynomials (sympy ``PolyElement`` over QQ with
graded-lex monomial order) and normalised lazily: arithmetic keeps fractions
un-cancelled where cheap, and the canonical form (gcd removed, denominator's
leading coefficient positive under graded-lex) is enforced whenever a scalar
is compared, hashed, serialised or evaluated.

No floats appear anywhere; evaluation takes exact rationals and raises on
poles.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Union

from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import ring

RationalLike = Union[int, Fraction, str]

__all__ = [
    "ScalarField",
    "Scalar",
    "ScalarError",
    "UndeclaredSymbolError",
    "ScalarDivisionError",
    "PoleEvaluationError",
]


class ScalarError(ValueError):
    """Base class for scalar-level failures."""


class UndeclaredSymbolError(ScalarError):
    """A symbol outside the session's declared symbol set was used."""


class ScalarDivisionError(ScalarError, ZeroDivisionError):
    """Division by the zero scalar."""


class PoleEvaluationError(ScalarError, ZeroDivisionError):
    """Evaluation hit a zero of the denominator."""


def _as_qq(value: RationalLike):
    """Coerce an exact rational-like value to the QQ ground domain."""
    if isinstance(value, str):
        value = Fraction(value)
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, int):
        return QQ(value)
    raise TypeError(f"not an exact rational: {value!r} (floats are rejected)")


class ScalarField:
    """The field Q(symbols) with a fixed, declared symbol tuple.

    The symbol order is significant: it is the variable order used by the
    graded-lex canonicalisation and by serialisation.
    """

    def __init__(self, symbols: Iterable[str] = ("k",)):
        self.symbols = tuple(symbols)
        if len(set(self.symbols)) != len(self.symbols):
            raise ScalarError(f"duplicate symbols in {self.symbols}")
        if not self.symbols:
            raise ScalarError("declare at least one symbol")
        self._ring, *gens = ring(list(self.symbols), QQ, order=grlex)
        self._gens = {name: g for name, g in zip(self.symbols, gens)}
        self.zero = Scalar(self, self._ring.zero, self._ring.one, True)
        self.one = Scalar(self, self._ring.one, self._ring.one, True)

    def __repr__(self) -> str:
        return f"ScalarField{self.symbols}"

    def sym(self, name: str) -> "Scalar":
        """The scalar for a declared symbol; error on undeclared names."""
        try:
            gen = self._gens[name]
        except KeyError:
            raise UndeclaredSymbolError(
                f"symbol {name!r} is not in the declared set {self.symbols}"
            ) from None
        return Scalar(self, gen, self._ring.one, True)

    def const(self, value: RationalLike) -> "Scalar":
        """Embed an exact rational constant, stored in canonical p/q form."""
        c = _as_qq(value)
        num = self._ring.ground_new(QQ(int(QQ.numer(c))))
        den = self._ring.ground_new(QQ(int(QQ.denom(c))))
        return Scalar(self, num, den, True)

    def __call__(self, value: Union[RationalLike, "Scalar"]) -> "Scalar":
        if isinstance(value, Scalar):
            if value.field is not self:
                raise ScalarError("scalar belongs to a different field")
            return value
        return self.const(value)

    # -- parsing / deserialisation ------------------------------------------

    def from_terms(self, num_terms, den_terms) -> "Scalar":
        """Rebuild a scalar from JSON term lists (see ``Scalar.to_json``)."""
        num = self._poly_from_terms(num_terms)
        den = self._poly_from_terms(den_terms)
        if not den:
            raise ScalarDivisionError("denominator term list is zero")
        return Scalar(self, num, den).normalised()

    def _poly_from_terms(self, terms):
        data = {}
        nsym = len(self.symbols)
        for coeff_str, exps in terms:
            if len(exps) != nsym:
                raise ScalarError(
                    f"term exponent arity {len(exps)} != symbol count {nsym}"
                )
            data[tuple(int(e) for e in exps)] = _as_qq(str(coeff_str))
        return self._ring.from_dict(data)

    def from_json(self, obj) -> "Scalar":
        return self.from_terms(obj["num"], obj["den"])


class Scalar:
    """An element of Q(symbols), lazily normalised.

    ``num``/``den`` are sympy sparse polynomials.  The ``_canon`` flag records
    whether the pair is already in canonical form (coprime, denominator's
    graded-lex leading coefficient positive).
    """

    __slots__ = ("field", "num", "den", "_canon", "_hash")

    def __init__(self, field: ScalarField, num, den, canon: bool = False):
        self.field = field
        self.num = num
        self.den = den
        self._canon = canon
        self._hash = None

    # -- normal form --------------------------------------------------------

    def normalised(self) -> "Scalar":
        """Cancel the gcd, clear rational content, fix the sign, in place.

        Canonical form: num/den coprime polynomials with integer coefficients,
        jointly primitive, and the denominator's graded-lex leading coefficient
        positive (so the zero scalar is 0/1 and constants are p/q in lowest
        terms).
        """
        if self._canon:
            return self
        num, den = self.num, self.den
        if not num:
            den = self.field._ring.one
        else:
            if not den:
                raise ScalarDivisionError("zero denominator")
            g = num.gcd(den)
            if g != 1:
                num = num.quo(g)
                den = den.quo(g)
            # Joint rational content gcd(numerators)/lcm(denominators); divide
            # it out so both polynomials carry integer, jointly primitive
            # coefficients.
            nums = [int(QQ.numer(c)) for c in num.coeffs()] + [
                int(QQ.numer(c)) for c in den.coeffs()
            ]
            dens = [int(QQ.denom(c)) for c in num.coeffs()] + [
                int(QQ.denom(c)) for c in den.coeffs()
            ]
            cg = 0
            for v in nums:
                cg = gcd(cg, v)
            cl = 1
            for v in dens:
                cl = cl * v // gcd(cl, v)
            content = QQ(cg, cl)
            if den.LC < 0:
                content = -content
            if content != QQ.one:
                num = num.quo_ground(content)
                den = den.quo_ground(content)
        self.num, self.den = num, den
        self._canon = True
        return self

    @property
    def is_zero(self) -> bool:
        return not self.num

    @property
    def is_one(self) -> bool:
        self.normalised()
        return self.num == self.field._ring.one and self.den == self.field._ring.one

    def is_constant(self) -> bool:
        self.normalised()
        return self.num.is_ground and self.den.is_ground

    def as_fraction(self) -> Fraction:
        """The value as an exact rational; error if symbols survive."""
        self.normalised()
        if not self.is_constant():
            raise ScalarError(f"scalar {self} is not constant")
        if not self.num:
            return Fraction(0)
        c = self.num.LC / self.den.LC
        return Fraction(int(QQ.numer(c)), int(QQ.denom(c)))

    def as_int(self) -> int:
        f = self.as_fraction()
        if f.denominator != 1:
            raise ScalarError(f"scalar {self} is not an integer")
        return f.numerator

    def is_polynomial_in(self, name: str) -> bool:
        """True if the canonical denominator does not involve the symbol."""
        self.normalised()
        gen = self.field._gens.get(name)
        if gen is None:
            raise UndeclaredSymbolError(
                f"symbol {name!r} is not in the declared set {self.field.symbols}"
            )
        return self.den.degree(gen) <= 0

    def degree(self, name: str) -> int:
        """Degree in a symbol: deg(num) - deg(den) in canonical form."""
        self.normalised()
        if self.is_zero:
            raise ScalarError("the zero scalar has no degree")
        gen = self.field._gens.get(name)
        if gen is None:
            raise UndeclaredSymbolError(
                f"symbol {name!r} is not in the declared set {self.field.symbols}"
            )
        return self.num.degree(gen) - self.den.degree(gen)

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.field is not self.field:
                raise ScalarError("mixing scalars from different fields")
            return other
        return self.field.const(other)

    def __add__(self, other) -> "Scalar":
        other = self._coerce(other)
        sden, oden = self.den, other.den
        if sden == oden:
            return Scalar(self.field, self.num + other.num, sden)
        if sden.is_ground and oden.is_ground:
            sc, oc = sden.LC, oden.LC
            ring = self.field._ring
            return Scalar(
                self.field,
                self.num.mul_ground(oc) + other.num.mul_ground(sc),
                ring.ground_new(sc * oc),
            )
        return Scalar(
            self.field,
            self.num * oden + other.num * sden,
            sden * oden,
        )

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar(self.field, -self.num, self.den, self._canon)

    def __sub__(self, other) -> "Scalar":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Scalar":
        return (-self) + self._coerce(other)

    def __mul__(self, other) -> "Scalar":
        other = self._coerce(other)
        snum, onum = self.num, other.num
        if not snum or not onum:
            return self.field.zero
        if snum.is_ground:
            num = onum.mul_ground(snum.LC)
        elif onum.is_ground:
            num = snum.mul_ground(onum.LC)
        else:
            num = snum * onum
        sden, oden = self.den, other.den
        one = self.field._ring.one
        if sden == one:
            den = oden
        elif oden == one:
            den = sden
        elif sden.is_ground:
            den = oden.mul_ground(sden.LC)
        elif oden.is_ground:
            den = sden.mul_ground(oden.LC)
        else:
            den = sden * oden
        return Scalar(self.field, num, den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Scalar":
        other = self._coerce(other)
        if other.is_zero:
            raise ScalarDivisionError("division by zero scalar")
        num = self.num * other.den
        if not num:
            return self.field.zero
        return Scalar(self.field, num, self.den * other.num)

    def __rtruediv__(self, other) -> "Scalar":
        return self._coerce(other) / self

    def __pow__(self, n: int) -> "Scalar":
        if n < 0:
            return self.field.one / (self ** (-n))
        out = self.field.one
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- comparison / hashing -------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.field.const(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        if self.field is not other.field:
            return False
        self.normalised()
        other.normalised()
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self.normalised()
            self._hash = hash((tuple(self.num.terms()), tuple(self.den.terms())))
        return self._hash

    def __bool__(self) -> bool:
        return not self.is_zero

    # -- evaluation ------------------------------------------------------------

    def eval(self, bindings: dict) -> Fraction:
        """Evaluate at exact rationals; every symbol occurring must be bound.

        Raises :class:`PoleEvaluationError` when the denominator vanishes and
        :class:`UndeclaredSymbolError` for unknown binding keys.
        """
        self.normalised()
        for name in bindings:
            if name not in self.field.symbols:
                raise UndeclaredSymbolError(f"binding for undeclared symbol {name!r}")
        vals = []
        for i, name in enumerate(self.field.symbols):
            if name in bindings:
                vals.append(_as_qq(bindings[name]))
            else:
                if any(m[i] for m in self.num.monoms()) or any(
                    m[i] for m in self.den.monoms()
                ):
                    raise ScalarError(f"no binding for symbol {name!r}")
                vals.append(QQ(0))
        nv = self._eval_poly(self.num, vals)
        dv = self._eval_poly(self.den, vals)
        if not dv:
            raise PoleEvaluationError(f"pole of {self} at {bindings}")
        c = nv / dv
        return Fraction(int(QQ.numer(c)), int(QQ.denom(c)))

    @staticmethod
    def _eval_poly(poly, vals):
        total = QQ(0)
        for monom, coeff in poly.terms():
            v = coeff
            for e, val in zip(monom, vals):
                if e:
                    v *= val**e
            total += v
        return total

    def subs(self, bindings: dict) -> "Scalar":
        """Substitute exact rationals for a subset of symbols."""
        self.normalised()
        out_num = self._subs_poly(self.num, bindings)
        out_den = self._subs_poly(self.den, bindings)
        if not out_den:
            raise PoleEvaluationError(f"pole of {self} at {bindings}")
        return Scalar(self.field, out_num, out_den).normalised()

    def _subs_poly(self, poly, bindings: dict):
        field = self.field
        for name in bindings:
            if name not in field.symbols:
                raise UndeclaredSymbolError(f"binding for undeclared symbol {name!r}")
        out = field._ring.zero
        for monom, coeff in poly.terms():
            term = field._ring.ground_new(coeff)
            for i, name in enumerate(field.symbols):
                e = monom[i]
                if not e:
                    continue
                if name in bindings:
                    term = term.mul_ground(_as_qq(bindings[name]) ** e)
                else:
                    term = term * field._gens[name] ** e
            out = out + term
        return out

    # -- serialisation -----------------------------------------------------------

    def _poly_text(self, poly) -> str:
        if not poly:
            return "0"
        parts = []
        for monom, coeff in sorted(poly.terms(), key=lambda t: grlex(t[0]), reverse=True):
            factors = []
            for name, e in zip(self.field.symbols, monom):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}**{e}")
            cnum, cden = int(QQ.numer(coeff)), int(QQ.denom(coeff))
            mag = f"{abs(cnum)}" + (f"/{cden}" if cden != 1 else "")
            if factors and abs(cnum) == 1 and cden == 1:
                body = "*".join(factors)
            elif factors:
                body = "*".join([mag] + factors)
            else:
                body = mag
            sign = "-" if cnum < 0 else "+"
            parts.append((sign, body))
        sign0, body0 = parts[0]
        text = ("-" if sign0 == "-" else "") + body0
        for sign, body in parts[1:]:
            text += sign + body
        return text

    def __str__(self) -> str:
        self.normalised()
        num_text = self._poly_text(self.num)
        if self.den == self.field._ring.one:
            return num_text
        den_text = self._poly_text(self.den)
        if len(self.num.terms()) > 1 or num_text.startswith("-"):
            num_text = f"({num_text})"
        if len(self.den.terms()) > 1:
            den_text = f"({den_text})"
        return f"{num_text}/{den_text}"

    def __repr__(self) -> str:
        return f"Scalar({self})"

    def _poly_terms(self, poly):
        out = []
        for monom, coeff in sorted(poly.terms(), key=lambda t: grlex(t[0]), reverse=True):
            cnum, cden = int(QQ.numer(coeff)), int(QQ.denom(coeff))
            s = str(cnum) if cden == 1 else f"{cnum}/{cden}"
            out.append([s, list(monom)])
        return out

    def to_json(self):
        """Canonical JSON form: numerator/denominator term lists.

        Each term is ``[coefficient, exponents]`` with the coefficient an
        exact-rational string and exponents aligned with the field's declared
        symbol order; terms are sorted graded-lex descending.
        """
        self.normalised()
        return {"num": self._poly_terms(self.num), "den": self._poly_terms(self.den)}


def scalar_eval(a: Scalar, bindings: dict) -> Fraction:
    """Evaluate ``a`` at exact rational bindings (module-level convenience)."""
    return a.eval(bindings)


def scalar_arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    """Dispatch one field operation by name: add, sub, mul or div."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ScalarError(f"unknown operation {op!r}; expected add/sub/mul/div")
