"""Characters of half-lattice modules as truncated bigraded series.

A :class:`BigradedSeries` is a formal expression

    q^{q_offset} z^{z_offset} * ( sum_{(dq,dz)} coeffs[dq,dz] q^{dq} z^{dz} )
                              * ( sum_{i in Z} z^i q^{s*i}   if delta_comb = s )

with exact :class:`~wsub.scalars.Scalar` offsets (which may carry the level
symbol k and the highest-weight symbol lam), integer grid degrees, and
explicit truncation windows dq <= q_max, |dz| <= z_max.  The delta-comb
factor sum_i z^i q^{s*i} is not a convergent series, so it is carried as a
marker (its q-step s) and only expanded on demand into the finite window.

The half-lattice vertex algebra Pi has Heisenberg pair (b, c) with
<b,c> = 1 and a family of weight modules E_{r,lam} generated from e^{rb+lam*c};
E_{r,lam} is positive-energy exactly when r = -1, and a PBW basis gives

    ch[E_{-1,lam}](z, q) = z^{lam - ell_n(k)} / eta(q)^2 * sum_{i in Z} z^i,

where eta(q) = q^{1/24} prod_m (1 - q^m) and ell_n(k) = nk/(n+1) + n - 1 is
the norm <b,b>.  Spectral flow by r + 1 steps turns this into the character
of E_{r,lam}:

    ch[E_{r,lam}](z, q)
        = z^{(r+1) ell_n} q^{(r+1)(r+2-n) ell_n / 2} ch[E_{-1,lam}](z q^{r+1}, q).

Characters of modules over the larger algebra (regular W-algebra) (x) Pi are
products of a q-only character with ch[E_{r,lam}]; the central-charge
prefactors then combine additively in the q-offsets.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import Scalar, ScalarError, ScalarField

__all__ = [
    "QSeriesError",
    "BigradedSeries",
    "two_colour_partitions",
    "eta_inverse_squared",
    "ell_value",
    "half_lattice_cc_value",
    "char_pi_module",
    "char_tensor",
    "minimal_t0_eigenvalue",
    "is_positive_energy",
]


class QSeriesError(ValueError):
    """Malformed series arithmetic (window abuse, double delta-comb, ...)."""


class BigradedSeries:
    """Truncated series in q and z with Scalar offsets and coefficients.

    ``coeffs`` maps integer pairs (dq, dz) to nonzero Scalars with
    dq <= q_max and |dz| <= z_max; dq may be negative (substituting
    z -> z q^s shears the grid).  ``delta_comb`` is None or the integer
    q-step s of a formal factor sum_{i in Z} z^i q^{s*i}.  Instances are
    immutable: all arithmetic returns new series.
    """

    __slots__ = ("field", "q_offset", "z_offset", "q_max", "z_max", "coeffs", "delta_comb")

    def __init__(
        self,
        field: ScalarField,
        q_offset: Scalar,
        z_offset: Scalar,
        q_max: int,
        z_max: int,
        coeffs: dict,
        delta_comb=None,
    ):
        if q_max < 0 or z_max < 0:
            raise QSeriesError(f"truncation window must be >= 0, got ({q_max}, {z_max})")
        if delta_comb is not None and not isinstance(delta_comb, int):
            raise QSeriesError(f"delta-comb marker must be an integer q-step, got {delta_comb!r}")
        self.field = field
        self.q_offset = field(q_offset)
        self.z_offset = field(z_offset)
        self.q_max = q_max
        self.z_max = z_max
        kept = {}
        for (dq, dz), c in coeffs.items():
            c = field(c)
            if c.is_zero:
                continue
            if dq > q_max or abs(dz) > z_max:
                raise QSeriesError(
                    f"coefficient at (q^{dq}, z^{dz}) lies outside the window ({q_max}, {z_max})"
                )
            kept[(dq, dz)] = c
        self.coeffs = kept
        self.delta_comb = delta_comb

    # -- basics ---------------------------------------------------------------

    def coefficient(self, dq: int, dz: int = 0) -> Scalar:
        if dq > self.q_max or abs(dz) > self.z_max:
            raise QSeriesError(
                f"(q^{dq}, z^{dz}) lies outside the truncation window "
                f"({self.q_max}, {self.z_max})"
            )
        got = self.coeffs.get((dq, dz))
        return self.field.zero if got is None else got

    def q_coefficients(self, up_to: int | None = None) -> list:
        """The z-degree-0 coefficients [c_0, ..., c_up_to]."""
        top = self.q_max if up_to is None else up_to
        return [self.coefficient(m, 0) for m in range(0, top + 1)]

    @property
    def is_z_exact(self) -> bool:
        """True when the z-truncation loses nothing (pure q-series)."""
        return self.delta_comb is None and all(dz == 0 for _, dz in self.coeffs)

    def window(self, q_max: int, z_max: int) -> "BigradedSeries":
        """Truncate to a (possibly finer) window."""
        new_q = min(self.q_max, q_max)
        new_z = z_max if self.is_z_exact else min(self.z_max, z_max)
        kept = {
            (dq, dz): c
            for (dq, dz), c in self.coeffs.items()
            if dq <= new_q and abs(dz) <= new_z
        }
        return BigradedSeries(
            self.field, self.q_offset, self.z_offset, new_q, new_z, kept, self.delta_comb
        )

    def __eq__(self, other) -> bool:
        """Offsets, comb marker and coefficients agree on the common window.

        A delta-comb factor sum_i z^i q^{s*i} absorbs integer z-shifts:
        multiplying by z^j q^{s*j} reindexes the comb, so offset pairs
        (q0, z0 + j) and (q0 - s*j, z0) describe the same series.  Comb-marked
        series therefore compare modulo that equivalence.
        """
        if not isinstance(other, BigradedSeries):
            return NotImplemented
        if self.field is not other.field:
            return False
        if self.delta_comb != other.delta_comb:
            return False
        if self.delta_comb is None:
            if self.q_offset != other.q_offset or self.z_offset != other.z_offset:
                return False
        else:
            try:
                j = (other.z_offset - self.z_offset).as_int()
            except ScalarError:
                return False
            if self.q_offset + self.delta_comb * j != other.q_offset:
                return False
        q_max = min(self.q_max, other.q_max)
        z_max = min(self.z_max, other.z_max)
        return self.window(q_max, z_max).coeffs == other.window(q_max, z_max).coeffs

    def __hash__(self):
        raise TypeError("BigradedSeries is not hashable")

    # -- linear / multiplicative structure -------------------------------------

    def scale(self, factor) -> "BigradedSeries":
        f = self.field(factor)
        return BigradedSeries(
            self.field,
            self.q_offset,
            self.z_offset,
            self.q_max,
            self.z_max,
            {key: f * c for key, c in self.coeffs.items()},
            self.delta_comb,
        )

    def shifted(self, dq=0, dz=0) -> "BigradedSeries":
        """Multiply by the monomial q^{dq} z^{dz} (exact Scalar exponents)."""
        return BigradedSeries(
            self.field,
            self.q_offset + self.field(dq),
            self.z_offset + self.field(dz),
            self.q_max,
            self.z_max,
            self.coeffs,
            self.delta_comb,
        )

    def __mul__(self, other: "BigradedSeries") -> "BigradedSeries":
        if not isinstance(other, BigradedSeries):
            return NotImplemented
        if self.field is not other.field:
            raise QSeriesError("mixing series over different scalar fields")
        if self.delta_comb is not None and other.delta_comb is not None:
            raise QSeriesError("the product of two delta-comb factors is not defined")
        comb = self.delta_comb if self.delta_comb is not None else other.delta_comb
        for series in (self, other):
            if any(dq < 0 for dq, _ in series.coeffs):
                raise QSeriesError(
                    "cannot multiply a sheared series (negative q-degrees): "
                    "multiply first, substitute z -> z q^s afterwards"
                )
        q_max = min(self.q_max, other.q_max)
        if self.is_z_exact:
            z_max = other.z_max
        elif other.is_z_exact:
            z_max = self.z_max
        else:
            z_max = min(self.z_max, other.z_max)
        out: dict = {}
        for (q1, z1), c1 in self.coeffs.items():
            for (q2, z2), c2 in other.coeffs.items():
                dq, dz = q1 + q2, z1 + z2
                if dq > q_max or abs(dz) > z_max:
                    continue
                v = c1 * c2
                prev = out.get((dq, dz))
                out[(dq, dz)] = v if prev is None else prev + v
        return BigradedSeries(
            self.field,
            self.q_offset + other.q_offset,
            self.z_offset + other.z_offset,
            q_max,
            z_max,
            out,
            comb,
        )

    # -- structural transforms --------------------------------------------------

    def substitute_z_times_q(self, s: int) -> "BigradedSeries":
        """The substitution z -> z q^s.

        Monomials shear as q^{dq} z^{dz} -> q^{dq + s*dz} z^{dz}, the prefactor
        z^{z_offset} contributes q^{s*z_offset}, and a delta-comb marker t
        moves to t + s (sum_i z^i q^{t*i} -> sum_i z^i q^{(t+s)*i}).  Sheared
        grid points above q_max are dropped; for each fixed z-degree the
        retained q-range stays exact.
        """
        if not isinstance(s, int):
            raise QSeriesError(f"substitution power must be an integer, got {s!r}")
        out: dict = {}
        for (dq, dz), c in self.coeffs.items():
            new_dq = dq + s * dz
            if new_dq <= self.q_max:
                out[(new_dq, dz)] = c
        comb = None if self.delta_comb is None else self.delta_comb + s
        return BigradedSeries(
            self.field,
            self.q_offset + self.z_offset * s,
            self.z_offset,
            self.q_max,
            self.z_max,
            out,
            comb,
        )

    def expand_comb(self) -> "BigradedSeries":
        """Multiply out the delta-comb factor over the finite window.

        With marker s, each coefficient at (dq, dz) spawns (dq + s*i, dz + i)
        for all integers i with |dz + i| <= z_max and dq + s*i <= q_max.
        """
        if self.delta_comb is None:
            return self
        s = self.delta_comb
        out: dict = {}
        for (dq, dz), c in self.coeffs.items():
            for z_total in range(-self.z_max, self.z_max + 1):
                i = z_total - dz
                new_dq = dq + s * i
                if new_dq > self.q_max:
                    continue
                key = (new_dq, z_total)
                prev = out.get(key)
                out[key] = c if prev is None else prev + c
        return BigradedSeries(
            self.field, self.q_offset, self.z_offset, self.q_max, self.z_max, out, None
        )

    # -- presentation -------------------------------------------------------------

    def to_json(self):
        return {
            "q_offset": str(self.q_offset),
            "z_offset": str(self.z_offset),
            "q_max": self.q_max,
            "z_max": self.z_max,
            "delta_comb": self.delta_comb,
            "coeffs": [
                [dq, dz, str(c)]
                for (dq, dz), c in sorted(self.coeffs.items())
            ],
        }

    def lines(self) -> list:
        """Aligned text rows for terminal output."""
        head = [
            f"q-offset   : {self.q_offset}",
            f"z-offset   : {self.z_offset}",
            f"window     : q <= {self.q_max}, |z| <= {self.z_max}",
        ]
        if self.delta_comb is not None:
            head.append(f"comb factor: sum_i z^i q^({self.delta_comb}*i)")
        body = [
            f"  q^{dq:<3} z^{dz:<3} : {c}"
            for (dq, dz), c in sorted(self.coeffs.items())
        ]
        return head + body

    def __str__(self) -> str:
        return "\n".join(self.lines())

    def __repr__(self) -> str:
        return (
            f"BigradedSeries(window=({self.q_max}, {self.z_max}), "
            f"terms={len(self.coeffs)}, comb={self.delta_comb})"
        )


# -- eta and partition counting ---------------------------------------------------


def two_colour_partitions(q_max: int) -> list:
    """[p2(0), ..., p2(q_max)]: partitions into parts of two colours.

    Dynamic programme for prod_{m>=1} (1 - q^m)^{-2}: absorb each part size
    once per colour.
    """
    if q_max < 0:
        raise QSeriesError(f"order must be >= 0, got {q_max}")
    counts = [1] + [0] * q_max
    for _ in range(2):
        for m in range(1, q_max + 1):
            for e in range(m, q_max + 1):
                counts[e] += counts[e - m]
    return counts


def eta_inverse_squared(q_max: int, field: ScalarField | None = None) -> BigradedSeries:
    """1/eta(q)^2 = q^{-1/12} sum_m p2(m) q^m to order q_max."""
    if field is None:
        field = ScalarField(("k", "lam"))
    counts = two_colour_partitions(q_max)
    coeffs = {(m, 0): field.const(c) for m, c in enumerate(counts)}
    return BigradedSeries(
        field,
        field.const(Fraction(-1, 12)),
        field.zero,
        q_max,
        0,
        coeffs,
        None,
    )


# -- levels and central charges ----------------------------------------------------


def ell_value(n: int, k: Scalar) -> Scalar:
    """ell_n(k) = nk/(n+1) + n - 1, the norm <b,b> of the weight-one current."""
    return k * n / (n + 1) + (n - 1)


def half_lattice_cc_value(n: int, k: Scalar) -> Scalar:
    """Central charge 2 + 12 n ell_n(k) of the half-lattice conformal vector."""
    return ell_value(n, k) * (12 * n) + 2


# -- characters ---------------------------------------------------------------------


def _as_scalar(field: ScalarField, value, default_symbol: str) -> Scalar:
    if value is None:
        return field.sym(default_symbol)
    return field(value)


def char_pi_module(
    n: int,
    r: int,
    lam=None,
    k=None,
    q_max: int = 10,
    z_max: int = 10,
    field: ScalarField | None = None,
) -> BigradedSeries:
    """Character of the half-lattice module E_{r,lam}, r integral.

    For r = -1 this is the positive-energy module character

        z^{lam - ell_n(k)} eta(q)^{-2} sum_{i in Z} z^i,

    and in general the spectral-flow shift

        z^{(r+1) ell_n} q^{(r+1)(r+2-n) ell_n/2} ch[E_{-1,lam}](z q^{r+1}, q).

    lam and k default to the symbols "lam" and "k" of the (default) field;
    pass exact rationals to specialise.  Only integer r is supported (the
    half-integer sectors are twisted and carry a different grading).
    """
    if not isinstance(r, int) or isinstance(r, bool):
        raise QSeriesError(f"the flow index r must be an integer, got {r!r}")
    if n < 1:
        raise QSeriesError(f"rank parameter n must be >= 1, got {n}")
    if field is None:
        field = ScalarField(("k", "lam"))
    k = _as_scalar(field, k, "k")
    lam = _as_scalar(field, lam, "lam")
    ellv = ell_value(n, k)

    base = eta_inverse_squared(q_max, field)
    base = BigradedSeries(
        field,
        base.q_offset,
        lam - ellv,
        q_max,
        z_max,
        base.coeffs,
        0,
    )
    s = r + 1
    if s == 0:
        return base
    flowed = base.substitute_z_times_q(s)
    return flowed.shifted(dq=ellv * s * (s + 1 - n) / 2, dz=ellv * s)


def char_tensor(m_qchar: BigradedSeries, pi_char: BigradedSeries) -> BigradedSeries:
    """Character of (module with q-character m_qchar) (x) (half-lattice module).

    The first factor must be a pure q-series (its z-content trivial); the
    central-charge offsets add, so a regular-algebra offset -c_reg/24 and the
    half-lattice offset combine to the subregular -c_sub/24.
    """
    if not m_qchar.is_z_exact or not m_qchar.z_offset.is_zero:
        raise QSeriesError("the tensor factor must be a q-only character")
    return m_qchar * pi_char


def is_positive_energy(series: BigradedSeries) -> bool:
    """Whether the q-exponents are bounded below (comb step 0 and no shear)."""
    if series.delta_comb not in (None, 0):
        return False
    return all(dq >= 0 for dq, _ in series.coeffs)


def minimal_t0_eigenvalue(series: BigradedSeries, n: int, k: Scalar) -> Scalar:
    """Minimal conformal weight read from a positive-energy character.

    The character carries q^{t_0 - c_Pi/24}, so the minimal eigenvalue is
    q_offset plus the lowest grid degree plus c_Pi/24.  For the r = -1
    half-lattice module this equals (n/2) ell_n(k).
    """
    if not is_positive_energy(series):
        raise QSeriesError("series is not bounded below in q")
    if not series.coeffs:
        raise QSeriesError("the zero series has no minimal eigenvalue")
    lowest = min(dq for dq, _ in series.coeffs)
    return series.q_offset + lowest + half_lattice_cc_value(n, k) / 24
