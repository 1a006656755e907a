"""Golden OPE tables for the low-rank subregular algebras.

The classical presentations of the first three members of the family — the
affine sl_2 algebra (n = 1), the Bershadsky-Polyakov algebra (n = 2) and the
n = 3 Feigin-Semikhatov algebra — have completely explicit OPE tables.  This
module stores those tables as structured data (exact rational-function
coefficients attached to normally-ordered words in the strong generators),
materialises both sides through the engine, and compares canonical forms.
String comparison is never used: normal-ordering conventions make textual
forms non-unique, so every check reduces a field or a full singular part to
the canonical free-field expansion.

Corpus files live in the package data directory ``wsub/golden`` with a
format stamp; loading fails loudly on schema drift.  The committed files are
regenerated by ``scripts/build_appendix_golden.py`` from
:func:`appendix_source`.

Schema (JSON, format 1):

    {
      "format": 1,
      "n": 2,
      "symbols": ["k"],
      "defs":    [{"name": ..., "terms": EXPR}, ...],
      "entries": [{"kind": "ope", "left": ..., "right": ...,
                   "poles": {"3": EXPR, ...}},
                  {"kind": "field", "name": ..., "lhs": EXPR, "rhs": EXPR}]
    }

where EXPR is a list of [scalar-json, word] terms, a word is a list of
[generator-name, derivative-order] atoms materialised as the right-nested
normally ordered product of the derivatives, and the empty word is the
vacuum.  Generator names resolve to the strong generators (J, L, G+, G-,
U3, ...) extended by the in-order definitions.
"""

from __future__ import annotations

import json
import time
from fractions import Fraction
from importlib import resources

from .fock import FieldExpr
from .scalars import Scalar, ScalarField
from .ope import SingularPart
from .subreg import CheckResult, GeneratorSet, check_field, check_singular

__all__ = [
    "GoldenCorpusError",
    "FORMAT_VERSION",
    "appendix_source",
    "corpus_text",
    "load_corpus",
    "verify_appendix",
    "APPENDIX_RANKS",
]

FORMAT_VERSION = 1
APPENDIX_RANKS = (1, 2, 3)


class GoldenCorpusError(ValueError):
    """Corpus missing, malformed, or inconsistent with the requested setup."""


# -- corpus generation ------------------------------------------------------------


def _term(coeff: Scalar, *atoms) -> list:
    return [coeff.to_json(), [list(a) for a in atoms]]


def appendix_source(n: int) -> dict:
    """The OPE table of the rank-n presentation as corpus data.

    Coefficients are exact in the level symbol k; the tables list every
    singular term, so absent pole orders assert regularity.
    """
    field = ScalarField(("k",))
    k = field.sym("k")
    one = field.one

    def expr(*terms):
        return [t for t in terms]

    if n == 1:
        h = ("h", 0)
        e = ("e", 0)
        f = ("f", 0)
        defs = [
            {"name": "h", "terms": expr(_term(field(2), ("J", 0)))},
            {"name": "e", "terms": expr(_term(one, ("G+", 0)))},
            {"name": "f", "terms": expr(_term(one, ("G-", 0)))},
            {
                # Sugawara vector (1/(2(k+2))) ((1/2):hh: + :ef: + :fe:)
                "name": "Lsug",
                "terms": expr(
                    _term(1 / (4 * (k + 2)), h, h),
                    _term(1 / (2 * (k + 2)), e, f),
                    _term(1 / (2 * (k + 2)), f, e),
                ),
            },
        ]
        entries = [
            _ope("h", "h", {2: expr(_term(2 * k))}),
            _ope("h", "e", {1: expr(_term(field(2), e))}),
            _ope("h", "f", {1: expr(_term(field(-2), f))}),
            _ope("e", "e", {}),
            _ope("f", "f", {}),
            _ope("e", "f", {2: expr(_term(k)), 1: expr(_term(one, h))}),
            {
                "kind": "field",
                "name": "Sugawara vector equals the conformal vector",
                "lhs": expr(_term(one, ("Lsug", 0))),
                "rhs": expr(_term(one, ("L", 0))),
            },
            _ope(
                "Lsug",
                "Lsug",
                {
                    4: expr(_term(3 * k / (2 * (k + 2)))),
                    2: expr(_term(field(2), ("Lsug", 0))),
                    1: expr(_term(one, ("Lsug", 1))),
                },
            ),
            _ope("Lsug", "h", {2: expr(_term(one, h)), 1: expr(_term(one, ("h", 1)))}),
            _ope("Lsug", "e", {2: expr(_term(one, e)), 1: expr(_term(one, ("e", 1)))}),
            _ope("Lsug", "f", {2: expr(_term(one, f)), 1: expr(_term(one, ("f", 1)))}),
        ]

    elif n == 2:
        J = ("J", 0)
        dJ = ("J", 1)
        L = ("L", 0)
        defs = []
        entries = [
            _ope(
                "L",
                "L",
                {
                    4: expr(_term(-2 * (k + 1) * (2 * k + 3) / (k + 3))),
                    2: expr(_term(field(2), L)),
                    1: expr(_term(one, ("L", 1))),
                },
            ),
            _ope(
                "L",
                "J",
                {
                    3: expr(_term(-(2 * k + 3) / 3)),
                    2: expr(_term(one, J)),
                    1: expr(_term(one, dJ)),
                },
            ),
            _ope("L", "G+", {2: expr(_term(one, ("G+", 0))), 1: expr(_term(one, ("G+", 1)))}),
            _ope(
                "L",
                "G-",
                {2: expr(_term(field(2), ("G-", 0))), 1: expr(_term(one, ("G-", 1)))},
            ),
            _ope("J", "J", {2: expr(_term((2 * k + 3) / 3))}),
            _ope("J", "G+", {1: expr(_term(one, ("G+", 0)))}),
            _ope("J", "G-", {1: expr(_term(-one, ("G-", 0)))}),
            _ope("G+", "G+", {}),
            _ope("G-", "G-", {}),
            _ope(
                "G+",
                "G-",
                {
                    3: expr(_term((k + 1) * (2 * k + 3))),
                    2: expr(_term(3 * (k + 1), J)),
                    1: expr(
                        _term(field(3), J, J),
                        _term(2 * k + 3, dJ),
                        _term(-(k + 3), L),
                    ),
                },
            ),
        ]

    elif n == 3:
        J = ("J", 0)
        dJ = ("J", 1)
        Lt = ("Ltilde", 0)
        Lp = ("Lperp", 0)
        dLp = ("Lperp", 1)
        Wt = ("W", 0)
        denom = 20 * k * k + 93 * k + 102
        defs = [
            {
                "name": "Ltilde",
                "terms": expr(_term(one, ("L", 0)), _term(-one, ("J", 1))),
            },
            {
                "name": "Lperp",
                "terms": expr(
                    _term(one, Lt), _term(-2 / (3 * k + 8), J, J)
                ),
            },
            {
                # primary weight-3 completion of U3.  The J L and dL terms
                # must use the shifted Virasoro field Ltilde = L - dJ (the
                # same field the OPE table below is written in); with the
                # plain L the combination fails to be primary, picking up
                # J(z)W(w) ~ ((k+4)/2) J(z) d^2J(w) + (4(k+4)/(3k+8)) J(z) :J dJ:(w).
                "name": "W",
                "terms": expr(
                    _term(-1 / (k + 2), ("U3", 0)),
                    _term(-2 * (2 * k + 5) / 3, ("J", 2)),
                    _term(4 * (k + 4) / (3 * k + 8), J, Lt),
                    _term(field(-6), J, dJ),
                    _term((k + 4) / 2, ("Ltilde", 1)),
                    _term(-8 * (11 * k + 32) / (3 * (3 * k + 8) ** 2), J, J, J),
                ),
            },
            {"name": "LperpJ", "terms": expr(_term(one, Lp, J))},
            {
                # (k+2)^2 Lambda = :G+G-: - ((k+2)/2) dW - ... (quadratic composite)
                "name": "Lambda",
                "terms": expr(
                    _term(1 / (k + 2) ** 2, ("G+", 0), ("G-", 0)),
                    _term(-1 / (2 * (k + 2)), ("W", 1)),
                    _term(-4 / ((k + 2) * (3 * k + 8)), Wt, J),
                    _term(
                        3 * (k + 4) * (6 * k * k + 33 * k + 46) / (2 * (3 * k + 8) * denom),
                        ("Lperp", 2),
                    ),
                    _term(
                        -((k + 4) ** 2) * (11 * k + 26) / ((k + 2) * 2 * (3 * k + 8) * denom),
                        Lp,
                        Lp,
                    ),
                    _term(2 * (k + 4) / ((k + 2) * (3 * k + 8)), ("LperpJ", 1)),
                    _term(8 * (k + 4) / ((k + 2) * (3 * k + 8) ** 2), Lp, J, J),
                    _term(-(2 * k + 5) * 8 / ((k + 2) * (3 * k + 8) * 3), ("J", 2), J),
                    _term(-(2 * k + 5) * 2 / ((k + 2) * (3 * k + 8)), dJ, dJ),
                    _term(-(2 * k + 5) * 16 / ((k + 2) * (3 * k + 8) ** 2), dJ, J, J),
                    _term(
                        -(2 * k + 5) * 32 / ((k + 2) * 3 * (3 * k + 8) ** 3), J, J, J, J
                    ),
                    _term(-(2 * k + 5) / ((k + 2) * 6), ("J", 3)),
                ),
            },
        ]

        def w_g_entry(sgn: int, g: str) -> dict:
            G = (g, 0)
            dG = (g, 1)
            return _ope(
                "W",
                g,
                {
                    3: expr(
                        _term(
                            sgn * 2 * (k + 4) * (3 * k + 7) * (5 * k + 16) / (3 * k + 8) ** 2,
                            G,
                        )
                    ),
                    2: expr(
                        _term(sgn * 3 * (k + 4) * (5 * k + 16) / (2 * (3 * k + 8)), dG),
                        _term(-6 * (k + 4) * (5 * k + 16) / (3 * k + 8) ** 2, J, G),
                    ),
                    1: expr(
                        _term(-8 * (k + 3) * (k + 4) / ((k + 2) * (3 * k + 8)), J, dG),
                        _term(
                            -4 * (k + 4) * (3 * k * k + 15 * k + 16)
                            / ((k + 2) * (3 * k + 8) ** 2),
                            dJ,
                            G,
                        ),
                        _term(sgn * (k + 3) * (k + 4) / (k + 2), (g, 2)),
                        _term(-sgn * 2 * (k + 4) ** 2 / ((k + 2) * (3 * k + 8)), Lt, G),
                        _term(
                            sgn * 4 * (k + 4) * (5 * k + 16) / ((k + 2) * (3 * k + 8) ** 2),
                            J,
                            J,
                            G,
                        ),
                    ),
                },
            )

        entries = [
            _ope(
                "L",
                "L",
                {
                    4: expr(_term(-(3 * k + 8) * (11 * k + 29) / (2 * (k + 4)))),
                    2: expr(_term(field(2), ("L", 0))),
                    1: expr(_term(one, ("L", 1))),
                },
            ),
            _ope(
                "L",
                "J",
                {
                    3: expr(_term(-(3 * k + 8) / 2)),
                    2: expr(_term(one, J)),
                    1: expr(_term(one, dJ)),
                },
            ),
            _ope("L", "W", {2: expr(_term(field(3), Wt)), 1: expr(_term(one, ("W", 1)))}),
            _ope("L", "G+", {2: expr(_term(one, ("G+", 0))), 1: expr(_term(one, ("G+", 1)))}),
            _ope(
                "L",
                "G-",
                {2: expr(_term(field(3), ("G-", 0))), 1: expr(_term(one, ("G-", 1)))},
            ),
            _ope("J", "J", {2: expr(_term((3 * k + 8) / 4))}),
            _ope("J", "G+", {1: expr(_term(one, ("G+", 0)))}),
            _ope("J", "G-", {1: expr(_term(-one, ("G-", 0)))}),
            _ope("J", "W", {}),
            _ope("G+", "G+", {}),
            _ope("G-", "G-", {}),
            _ope(
                "G+",
                "G-",
                {
                    4: expr(_term((k + 2) * (2 * k + 5) * (3 * k + 8))),
                    3: expr(_term(4 * (k + 2) * (2 * k + 5), J)),
                    2: expr(
                        _term(-(k + 2) * (k + 4), Lt),
                        _term(6 * (k + 2), J, J),
                        _term(2 * (k + 2) * (2 * k + 5), dJ),
                    ),
                    1: expr(
                        _term(k + 2, Wt),
                        _term(8 * (k + 2) * (11 * k + 32) / (3 * (3 * k + 8) ** 2), J, J, J),
                        _term(-4 * (k + 2) * (k + 4) / (3 * k + 8), Lt, J),
                        _term(6 * (k + 2), J, dJ),
                        _term(-(k + 2) * (k + 4) / 2, ("Ltilde", 1)),
                        _term(
                            4 * (k + 2) * (3 * k * k + 17 * k + 26) / (3 * (3 * k + 8)),
                            ("J", 2),
                        ),
                    ),
                },
            ),
            w_g_entry(+1, "G+"),
            w_g_entry(-1, "G-"),
            _ope(
                "W",
                "W",
                {
                    6: expr(
                        _term(
                            2 * (k + 4) * (2 * k + 5) * (3 * k + 7) * (5 * k + 16)
                            / (3 * k + 8)
                        )
                    ),
                    4: expr(_term(-3 * (k + 4) ** 2 * (5 * k + 16) / (3 * k + 8), Lp)),
                    3: expr(
                        _term(-3 * (k + 4) ** 2 * (5 * k + 16) / (2 * (3 * k + 8)), dLp)
                    ),
                    2: expr(
                        _term(
                            -3
                            * (k + 4) ** 2
                            * (5 * k + 16)
                            * (12 * k * k + 59 * k + 74)
                            / (4 * (3 * k + 8) * denom),
                            ("Lperp", 2),
                        ),
                        _term(
                            8 * (k + 4) ** 3 * (5 * k + 16) / ((3 * k + 8) * denom), Lp, Lp
                        ),
                        _term(4 * (k + 4), ("Lambda", 0)),
                    ),
                    1: expr(
                        _term(
                            -((k + 4) ** 2)
                            * (5 * k + 16)
                            * (12 * k * k + 59 * k + 74)
                            / (6 * (3 * k + 8) * denom),
                            ("Lperp", 3),
                        ),
                        _term(
                            8 * (k + 4) ** 3 * (5 * k + 16) / ((3 * k + 8) * denom), dLp, Lp
                        ),
                        _term(2 * (k + 4), ("Lambda", 1)),
                    ),
                },
            ),
        ]
    else:
        raise GoldenCorpusError(
            f"no appendix table for n = {n}; available ranks: {APPENDIX_RANKS}"
        )

    return {
        "format": FORMAT_VERSION,
        "n": n,
        "symbols": list(field.symbols),
        "defs": defs,
        "entries": entries,
    }


def _ope(left: str, right: str, poles: dict) -> dict:
    return {
        "kind": "ope",
        "left": left,
        "right": right,
        "poles": {str(p): e for p, e in sorted(poles.items())},
    }


def corpus_text(n: int) -> str:
    """Deterministic serialised corpus (what the builder script writes)."""
    return json.dumps(appendix_source(n), indent=1, sort_keys=True) + "\n"


# -- corpus loading -----------------------------------------------------------------


def load_corpus(n: int, path=None) -> dict:
    """Read and schema-check the committed corpus for rank n."""
    if path is None:
        res = resources.files("wsub").joinpath(f"golden/appendix_a{n}.json")
        try:
            raw = res.read_text()
        except FileNotFoundError:
            raise GoldenCorpusError(
                f"golden corpus for n = {n} is missing "
                "(expected package data wsub/golden/appendix_a%d.json)" % n
            ) from None
    else:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
    try:
        corpus = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise GoldenCorpusError(f"golden corpus for n = {n} is not valid JSON: {exc}") from None
    _validate_schema(corpus, n)
    return corpus


def _validate_schema(corpus: dict, n: int) -> None:
    if not isinstance(corpus, dict):
        raise GoldenCorpusError("corpus root must be an object")
    got = corpus.get("format")
    if got != FORMAT_VERSION:
        raise GoldenCorpusError(
            f"corpus format {got!r} does not match supported version {FORMAT_VERSION}"
        )
    if corpus.get("n") != n:
        raise GoldenCorpusError(f"corpus is for n = {corpus.get('n')!r}, expected {n}")
    for key in ("symbols", "defs", "entries"):
        if key not in corpus:
            raise GoldenCorpusError(f"corpus missing key {key!r}")
    for d in corpus["defs"]:
        if set(d) != {"name", "terms"}:
            raise GoldenCorpusError(f"malformed definition {d.get('name')!r}")
    for e in corpus["entries"]:
        kind = e.get("kind")
        if kind == "ope":
            if not {"left", "right", "poles"} <= set(e):
                raise GoldenCorpusError("malformed ope entry")
            for p in e["poles"]:
                if not p.isdigit() or int(p) < 1:
                    raise GoldenCorpusError(f"bad pole order {p!r}")
        elif kind == "field":
            if not {"name", "lhs", "rhs"} <= set(e):
                raise GoldenCorpusError("malformed field entry")
        else:
            raise GoldenCorpusError(f"unknown entry kind {kind!r}")


# -- materialisation and verification ----------------------------------------------


def _materialise(gens: GeneratorSet, terms, env: dict) -> FieldExpr:
    basis = gens.basis
    out = basis.zero_state()
    for coeff_json, word in terms:
        coeff = basis.field.from_json(coeff_json)
        factors = []
        for name, order in word:
            base = env.get(name)
            if base is None:
                raise GoldenCorpusError(f"corpus references unknown field {name!r}")
            factors.append(base.derivative(order) if order else base)
        value = gens.engine.normally_ordered_many(factors) if factors else basis.vacuum()
        out = out + value.scale(coeff)
    return out


def verify_appendix(gens: GeneratorSet, corpus: dict | None = None) -> list:
    """Check every table entry for gens' rank; returns one result per entry."""
    n = gens.basis.n
    if n not in APPENDIX_RANKS:
        raise GoldenCorpusError(
            f"no appendix table for n = {n}; available ranks: {APPENDIX_RANKS}"
        )
    if corpus is None:
        corpus = load_corpus(n)
    if tuple(corpus["symbols"]) != gens.basis.field.symbols:
        raise GoldenCorpusError(
            f"corpus symbols {corpus['symbols']} do not match the "
            f"generator field symbols {list(gens.basis.field.symbols)} "
            "(the appendix tables are symbolic in k)"
        )

    env = dict(gens.named())
    for d in corpus["defs"]:
        env[d["name"]] = _materialise(gens, d["terms"], env)

    results: list[CheckResult] = []
    for entry in corpus["entries"]:
        started = time.perf_counter()
        if entry["kind"] == "ope":
            left, right = entry["left"], entry["right"]
            got = gens.engine.singular_part(env[left], env[right])
            top = max((int(p) for p in entry["poles"]), default=0)
            poles = [gens.basis.zero_state()] * top
            for p, terms in entry["poles"].items():
                poles[int(p) - 1] = _materialise(gens, terms, env)
            want = SingularPart(gens.basis, poles)
            result = check_singular(f"appendix[{n}] {left}(z){right}(w)", got, want)
        else:
            lhs = _materialise(gens, entry["lhs"], env)
            rhs = _materialise(gens, entry["rhs"], env)
            result = check_field(f"appendix[{n}] {entry['name']}", lhs, rhs)
        result.seconds = time.perf_counter() - started
        results.append(result)
    return results
