"""The subregular W-algebra of sl_{n+1} inside (regular W-algebra) (x) Pi.

The embedding sends the strong generators to

    L = T + t,   J = b,   G+ = e^c,
    G- = -E_{n+1}(rho_1, ..., rho_{n+1}) e^{-c},
    U_i = sum_{j=0}^i (-1)^{i+j} ( prod_{m=1}^j (m(k+n)+1)/(m(k+n)) )
          E_{i-j}(rho_1, ..., rho_{n+1}) rho_0^j |0>,

with the first-order operators

    rho_0 = (k+n)(d + c_(-1)),
    rho_i = (k+n) d + b_(-1) + ((k+n+1)/(n+1)) c_(-1) - (eps_i)_(-1).

This module builds those fields exactly over Q(k), verifies the defining
OPEs, decomposes G- and the U_i into (Miura generator) (x) (Pi field) pairs,
checks the screening and bosonisation kernels, evaluates the singular-vector
products (e^{mc})_(j)(-rho_{j+1}...rho_1 e^{-c}), rewrites spectral flow on
weights and mode labels, and extracts the zero-mode polynomial p(gamma, x)
governing G^-_0 on relaxed top spaces.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from math import comb

from .fock import (
    BosonBasis,
    FieldExpr,
    FockError,
    Momentum,
    a_momentum,
    b_momentum,
    ell,
    epsilon_momentum,
    omega1_momentum,
    pi_em_field,
)
from .ope import Engine, SingularPart, proportionality
from .scalars import PoleEvaluationError, Scalar
from .walgebra import (
    CreationAtom,
    DerivAtom,
    OperatorWord,
    es_tables,
    miura_field,
    regular_em_field,
    subregular_central_charge,
)

__all__ = [
    "SubregError",
    "DecompositionError",
    "RhoFamily",
    "GeneratorSet",
    "strong_generators",
    "formula_u_field",
    "CheckResult",
    "verify_subreg_opes",
    "u2_relation",
    "generation_checks",
    "decompose_regular_content",
    "tensor_state",
    "verify_inverse_screening",
    "inverse_screening_momentum",
    "fms_images",
    "fms_screening_momentum",
    "ith_product_identity",
    "singular_vector_check",
    "singular_vector_product",
    "singular_vector_reference",
    "simple_quotient_embeds",
    "admissible_level_embeds",
    "spectral_flow_weight",
    "spectral_flow_state",
    "FlowedMode",
    "spectral_flow_mode",
    "zero_mode_shift",
    "zero_mode_coefficients",
    "zero_mode_polynomial",
    "alternative_conformal_vector",
    "alternative_conformal_check",
]


class SubregError(ValueError):
    """Base class for failures in the subregular layer."""


class DecompositionError(SubregError):
    """A field does not decompose as sum of W_j (x) (Pi field) terms."""


# ---------------------------------------------------------------------------
# rho operators
# ---------------------------------------------------------------------------


class RhoFamily:
    """The operators rho_0, rho_1, ..., rho_{n+1} and their building blocks.

    sigma_i = (k+n) d_alpha - (eps_i)_(-1) acts on the regular tensor factor
    only, and u = (k+n) d_pi + b_(-1) + ((k+n+1)/(n+1)) c_(-1) on the Pi
    factor only; rho_i = u + sigma_i because d = d_alpha + d_pi.
    """

    def __init__(self, basis: BosonBasis):
        self.basis = basis
        field = basis.field
        n = basis.n
        shift = basis.level + n
        c = basis.unit("c")
        b = b_momentum(basis)
        c_coeff = (basis.level + (n + 1)) / (n + 1)

        d_full = OperatorWord.atom(field, DerivAtom(basis))
        d_alpha = OperatorWord.atom(field, DerivAtom(basis, "alpha"))
        d_pi = OperatorWord.atom(field, DerivAtom(basis, "pi"))
        cr = lambda mu: OperatorWord.atom(field, CreationAtom(mu))

        self.rho0 = (d_full + cr(c)).scale(shift)
        self.u = d_pi.scale(shift) + cr(b) + cr(c).scale(c_coeff)
        self.sigmas = [
            d_alpha.scale(shift) - cr(epsilon_momentum(basis, i))
            for i in range(1, n + 2)
        ]
        self.rhos = [
            d_full.scale(shift)
            + cr(b)
            + cr(c).scale(c_coeff)
            - cr(epsilon_momentum(basis, i))
            for i in range(1, n + 2)
        ]

    def rho(self, i: int) -> OperatorWord:
        """rho_i for i = 0 .. n+1."""
        if i == 0:
            return self.rho0
        if not 1 <= i <= self.basis.n + 1:
            raise SubregError(f"rho index must be in 0..{self.basis.n + 1}, got {i}")
        return self.rhos[i - 1]

    def check_exp_action(self) -> bool:
        """rho_i e^{-c} = a_(-1) e^{-c} + ((k+n) d_alpha - (eps_i)_(-1)) e^{-c}."""
        basis = self.basis
        emc = basis.exp(-basis.unit("c"))
        a_dir = a_momentum(basis)
        for rho_i, sigma_i in zip(self.rhos, self.sigmas):
            want = emc.apply_creation(a_dir, 1) + sigma_i(emc)
            if rho_i(emc) != want:
                return False
        return True

    def symmetric_polynomial_check(self, state: FieldExpr) -> bool:
        """E_m(rho_1..rho_{n+1}) v = sum_j C(n+1-j, m-j) E_j(sigma) u^{m-j} v
        for every m = 1 .. n+1, on the given state v."""
        n = self.basis.n
        lhs_table = es_tables(self.rhos, state)
        u_pows = [state]
        for _ in range(n + 1):
            u_pows.append(self.u(u_pows[-1]))
        for m in range(1, n + 2):
            rhs = self.basis.zero_state()
            for j in range(0, m + 1):
                rhs = rhs + es_tables(self.sigmas, u_pows[m - j])[j].scale(
                    comb(n + 1 - j, m - j)
                )
            if lhs_table[m] != rhs:
                return False
        return True


# ---------------------------------------------------------------------------
# strong generators
# ---------------------------------------------------------------------------


@dataclass
class GeneratorSet:
    """The strong generators of the subregular algebra at rank n.

    ``u_fields`` holds the closed-form U_i for i = 3 .. n.  U_2 is never
    stored (L replaces it in the strong generating set; ``u2_relation``
    recovers the linear relation), and ``u_top`` is the weight-(n+1) field
    U_{n+1} = (-1)^n G^+_(-1) G^-.

    The factor order in u_top matters: with the opposite order the product
    picks up a dW_{n...} contamination (skew-symmetry corrections contain
    dL) and no longer expands with the Miura fields undisturbed.  With this
    order the product coincides exactly with the closed-form U_{n+1}, which
    ``generation_checks`` verifies.
    """

    basis: BosonBasis
    engine: Engine
    rho: RhoFamily
    L: FieldExpr
    J: FieldExpr
    Gplus: FieldExpr
    Gminus: FieldExpr
    u_top: FieldExpr
    u_fields: dict = dataclass_field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def field(self):
        return self.basis.field

    def named(self) -> dict:
        """The strong generating set, keyed by conventional names."""
        out = {"L": self.L, "J": self.J, "G+": self.Gplus, "G-": self.Gminus}
        for i in range(3, self.n + 1):
            out[f"U{i}"] = self.u_fields[i]
        return out

    def weight(self, name: str) -> Fraction:
        """Conformal weight with respect to L."""
        if name.startswith("U"):
            return Fraction(int(name[1:]))
        return {"L": Fraction(2), "J": Fraction(1), "G+": Fraction(1),
                "G-": Fraction(self.n)}[name]

    def charge(self, name: str) -> int:
        """Eigenvalue of J_(0)."""
        return {"G+": 1, "G-": -1}.get(name, 0)

    def verify_weights_and_charges(self) -> bool:
        """Every named field is an L_(1)- and J_(0)-eigenvector as labelled,
        and so is the auxiliary field U_{n+1}."""
        fields = dict(self.named())
        fields[f"U{self.n + 1}"] = self.u_top
        for name, x in fields.items():
            if self.engine.nth_product(self.L, x, 1) != x.scale(self.weight(name)):
                return False
            want_q = x.scale(self.charge(name))
            if self.engine.nth_product(self.J, x, 0) != want_q:
                return False
        return True

    def alternative_conformal_vector(self) -> FieldExpr:
        """L~ = L - ((n-1)/2) dJ, under which G+- have weight (n+1)/2."""
        return self.L - self.J.derivative().scale(Fraction(self.n - 1, 2))


def _require_regular_at_noncritical(x: FieldExpr, basis: BosonBasis) -> None:
    """Assert no coefficient has a pole at k = -n (the apparent singularity
    in the U_i coefficients must cancel against the (k+n) in rho_0)."""
    if "k" not in basis.field.symbols:
        return
    k0 = Fraction(-basis.n)
    for coeff in x.terms.values():
        try:
            coeff.subs({"k": k0})
        except PoleEvaluationError as exc:
            raise SubregError(
                f"coefficient {coeff} is singular at k = -{basis.n}"
            ) from exc


def strong_generators(n: int, basis: BosonBasis = None) -> GeneratorSet:
    """Construct the generators over Q(k) (plus any extra basis symbols)."""
    if n < 1:
        raise SubregError(f"rank must be >= 1, got {n}")
    if basis is None:
        basis = BosonBasis.standard(n)
    elif basis.n != n:
        raise SubregError(f"basis has rank {basis.n}, expected {n}")
    engine = Engine(basis)
    rho = RhoFamily(basis)
    field = basis.field
    shift = basis.level + n

    c = basis.unit("c")
    L = regular_em_field(basis) + pi_em_field(basis)
    J = basis.vacuum().apply_creation(b_momentum(basis), 1)
    Gplus = basis.exp(c)
    Gminus = es_tables(rho.rhos, basis.exp(-c))[n + 1].scale(-1)
    u_top = engine.normally_ordered(Gplus, Gminus)
    if n % 2 == 1:
        u_top = u_top.scale(-1)

    gens = GeneratorSet(basis, engine, rho, L, J, Gplus, Gminus, u_top)
    for i in range(3, n + 1):
        gens.u_fields[i] = formula_u_field(gens, i)
    return gens


def formula_u_field(gens: GeneratorSet, i: int) -> FieldExpr:
    """The closed-form field U_i = sum_j (-1)^{i+j} (prod (m(k+n)+1)/(m(k+n)))
    E_{i-j}(rho) rho_0^j |0>, for i = 2 .. n+1.

    Internally multiplied through by prod_{m=1}^i m(k+n) so that every term
    is polynomial in (k+n), then divided back out; the absence of a pole at
    k = -n is asserted on every coefficient.
    """
    basis, rho = gens.basis, gens.rho
    n = basis.n
    field = basis.field
    shift = basis.level + n
    if not 2 <= i <= n + 1:
        raise SubregError(f"U_i index must be in 2..{n + 1}, got {i}")
    rho0_pows = [basis.vacuum()]
    for _ in range(i):
        rho0_pows.append(rho.rho0(rho0_pows[-1]))
    total = basis.zero_state()
    for j in range(0, i + 1):
        coeff = field(1) if (i + j) % 2 == 0 else field(-1)
        for m in range(1, j + 1):
            coeff = coeff * (shift * m + 1)
        for m in range(j + 1, i + 1):
            coeff = coeff * (shift * m)
        total = total + es_tables(rho.rhos, rho0_pows[j])[i - j].scale(coeff)
    denom = field(1)
    for m in range(1, i + 1):
        denom = denom * (shift * m)
    u_i = total / denom
    _require_regular_at_noncritical(u_i, basis)
    return u_i


# ---------------------------------------------------------------------------
# OPE verification
# ---------------------------------------------------------------------------


@dataclass
class CheckResult:
    """One verified claim, with printable both-sides evidence.

    ``seconds`` is optional wall-time metadata; it never participates in
    equality evidence and is deliberately excluded from ``to_json`` so that
    serialised reports stay byte-reproducible.
    """

    name: str
    passed: bool
    lhs: str
    rhs: str
    diff: str = ""
    seconds: "float | None" = None

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_json(self):
        return {
            "check": self.name,
            "status": self.status,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "diff": self.diff,
        }


def _format_poles(part: SingularPart) -> str:
    if not part.poles:
        return "regular"
    return "; ".join(
        f"(z-w)^-{j + 1}: {f}"
        for j, f in reversed(list(enumerate(part.poles)))
        if not f.is_zero
    )


def check_singular(name: str, got: SingularPart, want: SingularPart) -> CheckResult:
    """Compare two singular parts pole by pole."""
    if got == want:
        return CheckResult(name, True, _format_poles(got), _format_poles(want))
    width = max(len(got.poles), len(want.poles))
    diffs = []
    for j in range(width):
        d = got.product(j) - want.product(j)
        if not d.is_zero:
            diffs.append(f"(z-w)^-{j + 1}: {d}")
    return CheckResult(
        name, False, _format_poles(got), _format_poles(want), "; ".join(diffs)
    )


def check_field(name: str, got: FieldExpr, want: FieldExpr) -> CheckResult:
    if got == want:
        return CheckResult(name, True, str(got), str(want))
    return CheckResult(name, False, str(got), str(want), str(got - want))


def verify_subreg_opes(gens: GeneratorSet) -> "list[CheckResult]":
    """Check the defining OPE table of the subregular generators over Q(k):
    J.J, J.G+-, L.G+-, L.J, L.L (Virasoro at the subregular central charge),
    G+-.G+- regularity, and the top three poles of G+.G-."""
    eng, basis, n = gens.engine, gens.basis, gens.n
    field = basis.field
    zero = basis.zero_state()
    vac = basis.vacuum()
    lnk = ell(basis)
    sp = lambda poles: SingularPart(basis, list(poles))
    out = []

    out.append(check_singular(
        "J(z)J(w)", eng.singular_part(gens.J, gens.J),
        sp([zero, vac.scale(lnk)]),
    ))
    out.append(check_singular(
        "J(z)G+(w)", eng.singular_part(gens.J, gens.Gplus), sp([gens.Gplus]),
    ))
    out.append(check_singular(
        "J(z)G-(w)", eng.singular_part(gens.J, gens.Gminus),
        sp([gens.Gminus.scale(-1)]),
    ))
    out.append(check_singular(
        "L(z)G+(w)", eng.singular_part(gens.L, gens.Gplus),
        sp([gens.Gplus.derivative(), gens.Gplus]),
    ))
    out.append(check_singular(
        "L(z)G-(w)", eng.singular_part(gens.L, gens.Gminus),
        sp([gens.Gminus.derivative(), gens.Gminus.scale(n)]),
    ))
    out.append(check_singular(
        "L(z)J(w)", eng.singular_part(gens.L, gens.J),
        sp([gens.J.derivative(), gens.J, vac.scale(-lnk * (n - 1))]),
    ))
    cc = subregular_central_charge(field, n)
    out.append(check_singular(
        "L(z)L(w)", eng.singular_part(gens.L, gens.L),
        sp([gens.L.derivative(), gens.L.scale(2), zero, vac.scale(cc / 2)]),
    ))
    out.append(check_singular(
        "G+(z)G+(w)", eng.singular_part(gens.Gplus, gens.Gplus), sp([]),
    ))
    out.append(check_singular(
        "G-(z)G-(w)", eng.singular_part(gens.Gminus, gens.Gminus), sp([]),
    ))

    lam = lambda j: _lambda_coefficient(field, n, j)
    gpgm = eng.singular_part(gens.Gplus, gens.Gminus)
    out.append(check_field(
        f"G+(z)G-(w) pole {n + 1}", gpgm.product(n), vac.scale(lam(n)),
    ))
    out.append(check_field(
        f"G+(z)G-(w) pole {n}", gpgm.product(n - 1),
        gens.J.scale(lam(n - 1) * (n + 1)),
    ))
    if n >= 2:
        k = field.sym("k")
        composite = (
            eng.normally_ordered(gens.J, gens.J).scale(Fraction(n * (n + 1), 2))
            - gens.L.scale(k + n + 1)
            + gens.J.derivative().scale(
                ((k * (n + 2) * (n - 1)) + (n + 1) * (n * n - 2)) / 2
            )
        )
        out.append(check_field(
            f"G+(z)G-(w) pole {n - 1}", gpgm.product(n - 2),
            composite.scale(lam(n - 2)),
        ))
    return out


def _lambda_coefficient(field, n: int, j: int) -> Scalar:
    """lambda_j(n, k) = prod_{m=1}^j (m(k+n) - 1)."""
    k = field.sym("k")
    out = field.one
    for m in range(1, j + 1):
        out = out * ((k + n) * m - 1)
    return out


# ---------------------------------------------------------------------------
# linear relations among fields
# ---------------------------------------------------------------------------


def solve_field_combination(columns, target: FieldExpr):
    """Exact coefficients x with sum_i x_i columns[i] = target, or None.

    Solved by Gaussian elimination over the scalar field on the union of
    term keys; redundant columns are allowed (one solution is returned).
    """
    basis = target.basis
    field = basis.field
    keys = set(target.terms)
    for col in columns:
        keys |= set(col.terms)
    keys = sorted(keys, key=_term_sort_key)
    rows = [
        [col.terms.get(key, field.zero) for col in columns]
        + [target.terms.get(key, field.zero)]
        for key in keys
    ]
    ncols = len(columns)
    pivot_of_col = [None] * ncols
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if not rows[i][c].is_zero), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = field.one / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and not rows[i][c].is_zero:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivot_of_col[c] = r
        r += 1
    if any(not row[-1].is_zero for row in rows[r:]):
        return None
    return [
        rows[pivot_of_col[c]][-1] if pivot_of_col[c] is not None else field.zero
        for c in range(ncols)
    ]


def _term_sort_key(key):
    osc, mu = key
    return (tuple(str(c) for c in mu.coords), osc)


def u2_relation(gens: GeneratorSet):
    """Solve L = a1 U_2 + a2 dJ + a3 :JJ: ; a1 must be invertible.

    U_2 is computed on the fly from the closed form; it is not part of the
    strong generating set (L stands in for it)."""
    eng = gens.engine
    cols = [
        formula_u_field(gens, 2),
        gens.J.derivative(),
        eng.normally_ordered(gens.J, gens.J),
    ]
    sol = solve_field_combination(cols, gens.L)
    if sol is None:
        raise SubregError("L is not a combination of U_2, dJ and :JJ:")
    if sol[0].is_zero:
        raise SubregError("the U_2 coefficient in L degenerated to zero")
    return tuple(sol)


def _weighted_words(gens: GeneratorSet, weight: int):
    """Charge-0 normally ordered words of the given L-weight in the strong
    generators of strictly smaller weight (J, L, U_3, ...), including
    derivatives.  A spanning (not minimal) list."""
    eng = gens.engine
    atoms = [(1, gens.J)]
    if weight > 2:
        atoms.append((2, gens.L))
    for i in range(3, min(weight, gens.n + 1)):
        atoms.append((i, gens.u_fields[i]))
    words = {}

    def build(remaining, available, prefix):
        # prefix is the list of (weight, field) pieces (each possibly derived)
        if remaining == 0:
            state = prefix[-1][1]
            for _, f, _label in reversed(prefix[:-1]):
                state = eng.normally_ordered(f, state)
            label = tuple(p[2] for p in prefix)
            words.setdefault(label, state)
            return
        for idx, (w, f) in enumerate(available):
            for extra in range(0, remaining - w + 1):
                piece = f.derivative(extra) if extra else f
                build(
                    remaining - w - extra,
                    available[idx:],
                    prefix + [(w + extra, piece, (w, extra))],
                )

    build(weight, atoms, [])
    return list(words.values())


def generation_checks(gens: GeneratorSet) -> "list[CheckResult]":
    """Each U_i (2 <= i <= n) appears in the order n+1-i pole of G+.G- with
    an invertible coefficient modulo words in the strictly-lower-weight
    generators; the closed-form U_{n+1} coincides with the regular product
    (-1)^n G+_(-1)G- and decomposes with top Miura content (-1)^n W_{n+1}."""
    eng, n = gens.engine, gens.n
    out = []
    for i in range(2, n + 1):
        target = eng.nth_product(gens.Gplus, gens.Gminus, n - i)
        u_i = formula_u_field(gens, 2) if i == 2 else gens.u_fields[i]
        cols = [u_i] + _weighted_words(gens, i)
        sol = solve_field_combination(cols, target)
        ok = sol is not None and not sol[0].is_zero
        out.append(CheckResult(
            f"U{i} generated by G+.G- pole {n + 1 - i}",
            ok,
            f"coefficient {sol[0]}" if ok else "no expansion found",
            "nonzero coefficient",
        ))
    out.append(check_field(
        f"U{n + 1} = (-1)^{n} G+_(-1)G-",
        formula_u_field(gens, n + 1),
        gens.u_top,
    ))
    try:
        pairs = decompose_regular_content(gens, f"U{n + 1}")
        got = f"{len(pairs)} tensor pairs, top sign (-1)^{n}"
        ok = True
    except DecompositionError as exc:
        got, ok = str(exc), False
    out.append(CheckResult(
        f"U{n + 1} has top Miura content W{n + 1}",
        ok, got, "undisturbed decomposition",
    ))
    return out


# ---------------------------------------------------------------------------
# regular content
# ---------------------------------------------------------------------------


def tensor_state(w_field: FieldExpr, pi_field: FieldExpr) -> FieldExpr:
    """(A in the alpha block) (x) (B in the Pi block) as one FieldExpr."""
    basis = w_field.basis
    terms = {}
    for (aosc, amu), ca in w_field.terms.items():
        if any(not amu.coords[i].is_zero for i in range(len(basis.names))
               if basis.is_pi_index(i)):
            raise DecompositionError("left tensor factor has Pi momentum")
        for (posc, pmu), cp in pi_field.terms.items():
            key = (tuple(sorted(aosc + posc)), amu + pmu)
            coeff = ca * cp
            got = terms.get(key)
            terms[key] = coeff if got is None else got + coeff
    return FieldExpr(basis, terms)


def _split_by_miura_weight(x: FieldExpr):
    """Group the terms of x by the alpha-block content's conformal weight."""
    basis = x.basis
    by_weight = {}
    for (osc, mu), coeff in x.terms.items():
        for i in range(len(basis.names)):
            if not basis.is_pi_index(i) and not mu.coords[i].is_zero:
                raise DecompositionError(
                    f"term carries alpha-block momentum: {mu}"
                )
        aosc = tuple(e for e in osc if not basis.is_pi_index(e[0]))
        posc = tuple(e for e in osc if basis.is_pi_index(e[0]))
        w = sum(depth for _, depth in aosc)
        group = by_weight.setdefault(w, {})
        group.setdefault(aosc, {})[(posc, mu)] = coeff
    return by_weight


def decompose_regular_content(gens: GeneratorSet, which: str):
    """Write U_i or G- as sum_j W_j (x) pi_j with the Miura fields
    undisturbed (no derivatives, no normally ordered products of W_j).

    Returns (W_j, pi_j) pairs in decreasing j.  The extraction uses one
    pivot monomial of each W_j and then re-verifies the whole decomposition
    exactly; any residual is a hard error.  For G- the closed form
    pi_j = ((k+n) t_(-1) + a_(-1))^{n+1-j} applied to e^{-c} is also
    enforced, and for U_i the top pair must be ((-1)^{i+1} W_i, vacuum).
    """
    basis, n = gens.basis, gens.n
    key = which.replace("_", "").replace("minus", "-").lower()
    if key in ("g-", "gminus"):
        x = gens.Gminus
        top = n + 1
    elif key.startswith("u") and key[1:].isdigit():
        i = int(key[1:])
        if i == n + 1:
            x = gens.u_top
        elif i in gens.u_fields:
            x = gens.u_fields[i]
        elif i == 2:
            x = formula_u_field(gens, 2)
        else:
            raise SubregError(f"no field U_{i} at rank {n}")
        top = i
    else:
        raise SubregError(f"unknown decomposition target {which!r}")

    by_weight = _split_by_miura_weight(x)
    pairs = []
    recon = basis.zero_state()
    for w in sorted(by_weight, reverse=True):
        if w == 1 or w > n + 1:
            raise DecompositionError(
                f"alpha content of weight {w} cannot be a Miura generator"
            )
        w_field = miura_field(w, basis)
        monos = {osc: coeff for (osc, _), coeff in w_field.terms.items()}
        pivots = sorted(a for a in by_weight[w] if a in monos)
        if not pivots:
            raise DecompositionError(
                f"weight-{w} alpha content shares no monomial with W_{w}"
            )
        pivot = pivots[0]
        scale = basis.field.one / monos[pivot]
        pi = FieldExpr(
            basis, {key: c * scale for key, c in by_weight[w][pivot].items()}
        )
        pairs.append((w, w_field, pi))
        recon = recon + tensor_state(w_field, pi)
    if recon != x:
        raise DecompositionError(
            f"residual terms survive the W_j (x) pi decomposition: "
            f"{recon - x}"
        )

    got = {w: pi for w, _, pi in pairs}
    if key in ("g-", "gminus"):
        for w, pi in got.items():
            if _gminus_pi_reference(gens, w) != pi:
                raise DecompositionError(
                    f"pi_(-,{w}) does not match ((k+n)t_(-1)+a_(-1))^{n + 1 - w}"
                )
    else:
        sign = 1 if (top + 1) % 2 == 0 else -1
        if got.get(top) != basis.vacuum().scale(sign):
            raise DecompositionError(
                f"U_{top} top coefficient is not (-1)^{top + 1}"
            )
        for w, pi in got.items():
            if pi.momenta() != {basis.zero_momentum}:
                raise DecompositionError(
                    f"pi^({top},{w}) leaves the c,d-generated subalgebra"
                )
    return [(w_field, pi) for _, w_field, pi in pairs]


def _gminus_pi_reference(gens: GeneratorSet, j: int) -> FieldExpr:
    """The creation-mode word of ((k+n) t_(-1) + a_(-1))^{n+1-j} 𝟙 applied
    to e^{-c} (i.e. the fully right-to-left-nested product, in which only
    creation modes act and no contraction terms arise).

    t_(-1) acts as the derivative; the resulting state over the vacuum is a
    polynomial in the commuting modes a_(-1), a_(-2), ..., and transporting
    that polynomial onto e^{-c} is a plain momentum translation.
    """
    basis, n = gens.basis, gens.n
    shift = basis.level + n
    state = basis.vacuum()
    for _ in range(n + 1 - j):
        state = state.derivative().scale(shift) + state.apply_creation(
            a_momentum(basis), 1
        )
    mu_c = basis.unit("c")
    return FieldExpr(
        basis, {(osc, mu - mu_c): coeff for (osc, mu), coeff in state.terms.items()}
    )


# ---------------------------------------------------------------------------
# screenings and bosonisation
# ---------------------------------------------------------------------------


def inverse_screening_momentum(basis: BosonBasis) -> Momentum:
    """a - omega_1, the screening whose kernel is the subregular algebra."""
    return a_momentum(basis) - omega1_momentum(basis)


def verify_inverse_screening(X: FieldExpr, engine: Engine = None) -> bool:
    """True iff (e^{a - omega_1})_(0) X = 0."""
    if engine is None:
        engine = Engine(X.basis)
    vertex = X.basis.exp(inverse_screening_momentum(X.basis))
    return engine.nth_product(vertex, X, 0).is_zero


def fms_screening_momentum(basis: BosonBasis) -> Momentum:
    """(c + d)/2, the kernel screening of the ghost-system bosonisation."""
    half = Fraction(1, 2)
    return basis.unit("c").scale(half) + basis.unit("d").scale(half)


def fms_images(basis: BosonBasis, engine: Engine = None):
    """The bosonised ghost fields: beta -> e^c, gamma -> (1/2):(c+d)e^{-c}:."""
    if engine is None:
        engine = Engine(basis)
    c = basis.unit("c")
    beta = basis.exp(c)
    gamma = basis.exp(-c).apply_creation(
        basis.unit("c") + basis.unit("d"), 1
    ).scale(Fraction(1, 2))
    return beta, gamma


# ---------------------------------------------------------------------------
# singular vectors
# ---------------------------------------------------------------------------


def ith_product_identity(gens: GeneratorSet, m: int, j: int):
    """(e^{mc})_(j)(-rho_{j+1}...rho_1 e^{-c}) and whether it equals
    m prod_{i=1}^j (i(k+n)-m) e^{(m-1)c} identically in k."""
    basis, n = gens.basis, gens.n
    if m < 0:
        raise SubregError(f"momentum multiple m must be >= 0, got {m}")
    if not 0 <= j <= n:
        raise SubregError(f"product index must be in 0..{n}, got {j}")
    c = basis.unit("c")
    state = basis.exp(-c)
    for i in range(1, j + 2):
        state = gens.rho.rho(i)(state)
    lhs = gens.engine.nth_product(basis.exp(c.scale(m)), state.scale(-1), j)
    coeff = basis.field(m)
    shift = basis.level + n
    for i in range(1, j + 1):
        coeff = coeff * (shift * i - m)
    rhs = basis.exp(c.scale(m - 1)).scale(coeff)
    return lhs, lhs == rhs


def singular_vector_product(gens: GeneratorSet, m: int) -> FieldExpr:
    """G-_(n) e^{mc}, i.e. G^-_1 (G^+_{-1})^m |0> under the embedding."""
    return gens.engine.nth_product(
        gens.Gminus, gens.basis.exp(gens.basis.unit("c").scale(m)), gens.n
    )


def singular_vector_reference(gens: GeneratorSet, m: int) -> FieldExpr:
    """(-1)^{n+1} m prod_{i=1}^n (i(k+n)-m) e^{(m-1)c}: the closed form of
    G^-_1 (G^+_{-1})^m |0>.  The sign is fixed by skew-symmetry from the
    i-th product identity (all products above the n-th vanish)."""
    basis, n = gens.basis, gens.n
    coeff = basis.field(-m if n % 2 == 0 else m)
    shift = basis.level + n
    for i in range(1, n + 1):
        coeff = coeff * (shift * i - m)
    return basis.exp(basis.unit("c").scale(m - 1)).scale(coeff)


def singular_vector_check(n: int, m: int, k0=None) -> bool:
    """True iff (G^+_{-1})^m |0> is singular at level k0: some i in 1..n has
    i(k0+n) = m.  A symbolic level (k0 None) is never singular."""
    if m < 1:
        raise SubregError(f"singular vector exponent must be >= 1, got {m}")
    if k0 is None:
        return False
    k0 = Fraction(k0)
    return any(i * (k0 + n) == m for i in range(1, n + 1))


def simple_quotient_embeds(n: int, k0) -> bool:
    """The simple subregular algebra embeds into (simple regular) (x) Pi
    iff i(k0+n) is not a positive integer for every i = 1..n."""
    k0 = Fraction(k0)
    for i in range(1, n + 1):
        val = i * (k0 + n)
        if val.denominator == 1 and val >= 1:
            return False
    return True


def admissible_level_embeds(n: int, u: int, v: int) -> bool:
    """At admissible level k = -n-1+u/v (u >= n+1, gcd(u,v)=1): embeds iff
    v > n."""
    from math import gcd

    if u < n + 1 or v < 1 or gcd(u, v) != 1:
        raise SubregError(f"(u, v) = ({u}, {v}) is not admissible for rank {n}")
    return v > n


# ---------------------------------------------------------------------------
# spectral flow
# ---------------------------------------------------------------------------


def spectral_flow_weight(n: int, j: Scalar, delta: Scalar, ell_steps):
    """Weight map of the flow automorphism: (j, Delta) becomes
    (j + l_n(k) ell, Delta + j ell + l_n(k) ell^2 / 2)."""
    field = j.field
    k = field.sym("k")
    lnk = k * n / (n + 1) + (n - 1)
    step = field(Fraction(ell_steps))
    return (j + lnk * step, delta + j * step + lnk * step * step / 2)


def spectral_flow_state(v: FieldExpr, ell_steps: int) -> FieldExpr:
    """The flow of a Pi-weight vector: translate every momentum by ell*b.

    Realises sigma^ell on the lattice modules (E_{r,lambda} -> E_{r+ell,lambda}).
    """
    basis = v.basis
    shift = b_momentum(basis).scale(ell_steps)
    return FieldExpr(
        basis, {(osc, mu + shift): c for (osc, mu), c in v.terms.items()}
    )


@dataclass(frozen=True)
class FlowedMode:
    """sigma^ell of a labelled mode: a combination of labelled modes plus a
    multiple of the identity."""

    terms: tuple
    constant: Scalar

    def __str__(self) -> str:
        parts = [
            (f"{name}_{mode}" if coeff.is_one else f"({coeff})*{name}_{mode}")
            for name, mode, coeff in self.terms
        ]
        if not self.constant.is_zero:
            parts.append(f"({self.constant})*1")
        return " + ".join(parts) if parts else "0"


def spectral_flow_mode(n: int, name: str, m, ell_steps: int, field) -> FlowedMode:
    """Mode-label rewriting of the flow: G+-_m -> G+-_{m -+ ell},
    J_m -> J_m - l_n ell delta_{m,0}, and the L / L~ shifts."""
    k = field.sym("k")
    lnk = k * n / (n + 1) + (n - 1)
    step = field(ell_steps)
    one = field.one
    zero = field.zero
    if name == "G+":
        return FlowedMode((("G+", m - ell_steps, one),), zero)
    if name == "G-":
        return FlowedMode((("G-", m + ell_steps, one),), zero)
    if name == "J":
        const = -lnk * step if m == 0 else zero
        return FlowedMode((("J", m, one),), const)
    if name in ("L", "Ltilde"):
        const = zero
        if m == 0:
            const = lnk * step * step / 2
            if name == "L":
                const = const + lnk * step * (n - 1) / 2
        return FlowedMode(((name, m, one), ("J", m, -step)), const)
    raise SubregError(f"no mode-label flow rule for field {name!r}")


# ---------------------------------------------------------------------------
# zero modes on relaxed top spaces
# ---------------------------------------------------------------------------


def zero_mode_shift(gens: GeneratorSet, x) -> Scalar:
    """The coefficient of G+_0 on e^{-b + x c}: must be the unit shift."""
    basis = gens.basis
    mu = basis.unit("c").scale(x) - b_momentum(basis)
    res = gens.engine.nth_product(basis.exp(basis.unit("c")), basis.exp(mu), 0)
    return proportionality(basis.exp(mu + basis.unit("c")), res)


def zero_mode_coefficients(gens: GeneratorSet) -> dict:
    """c_j(x) with (pi_j e^{-c})-part zero mode sending e^{-b+xc} to
    c_j(x) e^{-b+(x-1)c}; the G- zero mode is sum_j gamma_j c_j(x).

    The Pi factor paired with W_j has conformal weight n - j, so its zero
    mode is the (n-j-1)-th product (negative for j = n, n+1).
    """
    basis, n = gens.basis, gens.n
    x = basis.field.sym("x")
    mu = basis.unit("c").scale(x) - b_momentum(basis)
    v = basis.exp(mu)
    target = basis.exp(mu - basis.unit("c"))
    out = {}
    for w_field, pi in decompose_regular_content(gens, "G-"):
        j = _miura_degree(gens, w_field)
        res = gens.engine._nth(pi, n - j - 1, v)
        out[j] = proportionality(target, res)
    return out


def _miura_degree(gens: GeneratorSet, w_field: FieldExpr) -> int:
    for j in range(gens.n + 2):
        if j != 1 and miura_field(j, gens.basis) == w_field:
            return j
    raise SubregError("field is not a Miura generator")


def zero_mode_polynomial(n: int, gamma=None, gens: GeneratorSet = None) -> Scalar:
    """p(gamma, x) with G^-_0 (v_gamma (x) e^{-b+xc}) =
    p(gamma, x) v_gamma (x) e^{-b+(x-1)c}.

    gamma lists the W_j zero-mode eigenvalues (gamma_2 .. gamma_{n+1});
    omitted entries stay symbolic as g2 .. g{n+1}.  gamma_0 = -1 and
    gamma_1 = 0 are forced by W_0 = -|0> and W_1 = 0.
    """
    names = tuple(["x"] + [f"g{i}" for i in range(2, n + 2)])
    if gens is None:
        gens = strong_generators(n, BosonBasis.standard(n, extra_symbols=names))
    field = gens.basis.field
    eigen = {0: field(-1), 1: field.zero}
    for idx, i in enumerate(range(2, n + 2)):
        if gamma is None:
            eigen[i] = field.sym(f"g{i}")
        elif isinstance(gamma[idx], Scalar):
            eigen[i] = gamma[idx]
        else:
            eigen[i] = field(gamma[idx])
    p = field.zero
    for j, c_j in zero_mode_coefficients(gens).items():
        p = p + eigen[j] * c_j
    return p


# ---------------------------------------------------------------------------
# alternative conformal structure
# ---------------------------------------------------------------------------


def alternative_conformal_vector(gens: GeneratorSet) -> FieldExpr:
    return gens.alternative_conformal_vector()


def alternative_conformal_check(gens: GeneratorSet) -> bool:
    """G+- primary of weight (n+1)/2 and J primary of weight 1 under
    L~ = L - ((n-1)/2) dJ."""
    eng, basis, n = gens.engine, gens.basis, gens.n
    lt = gens.alternative_conformal_vector()
    half = Fraction(n + 1, 2)
    sp = lambda poles: SingularPart(basis, list(poles))
    checks = [
        eng.singular_part(lt, gens.Gplus)
        == sp([gens.Gplus.derivative(), gens.Gplus.scale(half)]),
        eng.singular_part(lt, gens.Gminus)
        == sp([gens.Gminus.derivative(), gens.Gminus.scale(half)]),
        eng.singular_part(lt, gens.J) == sp([gens.J.derivative(), gens.J]),
    ]
    return all(checks)
