"""Command-line front end for the subregular W-algebra engine.

Every verb maps onto one library operation and prints a deterministic
report: identical invocations produce byte-identical output (check rows are
sorted by name, scalars are rendered in canonical form, JSON keys are
sorted).  The optional ``--timings`` flag appends wall-clock seconds to
check rows and is therefore the one switch that intentionally breaks
reproducibility.

Exit codes:

* 0 — success; for verification verbs, every non-skipped check passed
* 1 — a verification check failed
* 2 — usage error (unknown verb, unknown flag, malformed integer)
* 3 — malformed rational argument (expected forms like ``5``, ``-3/2``)
* 4 — out-of-range argument (rank above the configured cap, bad exponent)
* 5 — data error (corpus missing or malformed, bad config file, pole hit)

Configuration is a ``key = value`` file (``#`` comments allowed) selected by
``--config`` or the ``WSUB_CONFIG`` environment variable; flags override
config values.  Recognised keys: ``qmax``, ``zmax`` (character truncation
orders), ``ope_rank_cap`` (rank cap for verbs that expand operator
products, default 4), ``cc_rank_cap`` (rank cap for central-charge closed
forms, default 6) and ``workers`` (reserved; verification currently runs
in-process and single-threaded, the key is accepted for forward
compatibility).
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

from .fock import BosonBasis, FockError
from .golden import APPENDIX_RANKS, GoldenCorpusError, verify_appendix
from .ope import OPEError, SingularPart
from .qseries import QSeriesError, char_pi_module
from .scalars import PoleEvaluationError, ScalarError, ScalarField
from .subreg import (
    CheckResult,
    SubregError,
    check_singular,
    fms_images,
    fms_screening_momentum,
    inverse_screening_momentum,
    singular_vector_check,
    spectral_flow_mode,
    spectral_flow_weight,
    strong_generators,
    zero_mode_polynomial,
)
from .walgebra import (
    half_lattice_central_charge,
    miura_field,
    regular_central_charge,
    screening_momentum,
    subregular_central_charge,
)

__all__ = ["main", "build_parser", "CliConfig", "CliError"]

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_BAD_RATIONAL = 3
EXIT_RANGE = 4
EXIT_DATA = 5

ENV_CONFIG = "WSUB_CONFIG"


class CliError(Exception):
    """A user-facing error carrying the process exit code."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CliConfig:
    """Tunable limits; see the module docstring for the file format."""

    qmax: int = 10
    zmax: int = 10
    ope_rank_cap: int = 4
    cc_rank_cap: int = 6
    workers: int = 1


_CONFIG_MINIMUM = {"qmax": 0, "zmax": 0, "ope_rank_cap": 1, "cc_rank_cap": 1, "workers": 1}


def parse_config_text(text: str, source: str) -> dict:
    """Parse ``key = value`` lines into validated integer settings."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(
                EXIT_DATA, f"{source}:{lineno}: expected 'key = value', got {raw!r}"
            )
        key, _, value = (part.strip() for part in line.partition("="))
        if key not in _CONFIG_MINIMUM:
            raise CliError(
                EXIT_DATA,
                f"{source}:{lineno}: unknown config key {key!r} "
                f"(known: {', '.join(sorted(_CONFIG_MINIMUM))})",
            )
        if key in values:
            raise CliError(EXIT_DATA, f"{source}:{lineno}: duplicate config key {key!r}")
        try:
            number = int(value)
        except ValueError:
            raise CliError(
                EXIT_DATA, f"{source}:{lineno}: value for {key!r} must be an integer"
            ) from None
        if number < _CONFIG_MINIMUM[key]:
            raise CliError(
                EXIT_DATA,
                f"{source}:{lineno}: {key} must be >= {_CONFIG_MINIMUM[key]}, got {number}",
            )
        values[key] = number
    return values


def load_config(path: "str | None", env: "dict | os._Environ" = os.environ) -> CliConfig:
    """Resolve the active config: ``--config`` flag, else $WSUB_CONFIG, else defaults."""
    chosen = path if path is not None else env.get(ENV_CONFIG)
    if not chosen:
        return CliConfig()
    try:
        with open(chosen, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(EXIT_DATA, f"cannot read config file {chosen!r}: {exc}") from None
    return CliConfig(**parse_config_text(text, chosen))


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------

_RATIONAL_FLAGS = ("--k", "--lam")
_NEGATIVE_RATIONAL = re.compile(r"-\d+(/\d+)?$|-\d*\.\d+$")


def _glue_negative_values(argv: list) -> list:
    """Join ``--k -3/2`` into ``--k=-3/2`` so argparse does not read the
    negative rational as an option string."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (
            tok in _RATIONAL_FLAGS
            and i + 1 < len(argv)
            and _NEGATIVE_RATIONAL.match(argv[i + 1])
        ):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def parse_rational(text: str, flag: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise CliError(
            EXIT_BAD_RATIONAL,
            f"{flag} expects an exact rational such as 5, -3/2 or 0.25; got {text!r}",
        ) from None


def _require_rank(n: int, cap: int, what: str) -> int:
    if n < 1:
        raise CliError(EXIT_RANGE, f"rank must be >= 1, got {n}")
    if n > cap:
        raise CliError(
            EXIT_RANGE,
            f"rank {n} exceeds the {what} cap of {cap} "
            "(raise it in the config file to proceed)",
        )
    return n


def _emit(args, text: str) -> None:
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


_LATEX_SPECIAL = {
    "\\": r"\textbackslash{}",
    "&": r"\&",
    "%": r"\%",
    "$": r"\$",
    "#": r"\#",
    "_": r"\_",
    "{": r"\{",
    "}": r"\}",
    "~": r"\textasciitilde{}",
    "^": r"\textasciicircum{}",
}


def _latex_escape(text: str) -> str:
    return "".join(_LATEX_SPECIAL.get(ch, ch) for ch in text)


def _latex_formula(text: str) -> str:
    """Render a canonical scalar string as inline math."""
    return "$" + text.replace("**", "^").replace("*", r" \cdot ") + "$"


# ---------------------------------------------------------------------------
# verification reports
# ---------------------------------------------------------------------------


def _render_report(args, command: str, anchored: list) -> int:
    """Emit a sorted report of (anchor, CheckResult) rows; return exit code."""
    rows = sorted(anchored, key=lambda pair: pair[1].name)
    counts = {"pass": 0, "fail": 0, "skipped": 0}
    for _, check in rows:
        counts[check.status] = counts.get(check.status, 0) + 1
    passed = counts.get("fail", 0) == 0
    show_timing = getattr(args, "timings", False)

    if getattr(args, "json", False):
        out_rows = []
        for anchor, check in rows:
            row = {"anchor": anchor, "check": check.name, "status": check.status}
            if not check.passed:
                row["lhs"] = check.lhs
                row["rhs"] = check.rhs
                row["diff"] = check.diff
            if show_timing and check.seconds is not None:
                row["seconds"] = round(check.seconds, 3)
            out_rows.append(row)
        _emit(args, _dump_json({"checks": out_rows, "command": command, "passed": passed}))
    elif getattr(args, "latex", False):
        lines = [r"\begin{tabular}{ll}", r"check & status \\", r"\hline"]
        for _, check in rows:
            lines.append(f"{_latex_escape(check.name)} & {check.status} \\\\")
        lines.extend([r"\hline", rf"result & {'pass' if passed else 'fail'} \\", r"\end{tabular}"])
        _emit(args, "\n".join(lines) + "\n")
    else:
        lines = [f"report: {command}"]
        for _, check in rows:
            stamp = (
                f" ({check.seconds:.3f}s)"
                if show_timing and check.seconds is not None
                else ""
            )
            lines.append(f"{'pass' if check.passed else 'FAIL'}  {check.name}{stamp}")
            if not check.passed:
                lines.append(f"      lhs:  {check.lhs}")
                lines.append(f"      rhs:  {check.rhs}")
                if check.diff:
                    lines.append(f"      diff: {check.diff}")
        lines.append(
            f"checks: {len(rows)}  passed: {counts.get('pass', 0)}  "
            f"failed: {counts.get('fail', 0)}  skipped: {counts.get('skipped', 0)}"
        )
        lines.append(f"result: {'pass' if passed else 'fail'}")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def _screening_checks(gens) -> list:
    """The kernel claims behind the free-field construction, as report rows."""
    basis, eng = gens.basis, gens.engine
    rows = []

    def run(anchor: str, name: str, compute) -> None:
        started = time.perf_counter()
        result = compute(name)
        result.seconds = time.perf_counter() - started
        rows.append((anchor, result))

    inverse = basis.exp(inverse_screening_momentum(basis))
    named = gens.named()

    def inverse_check(gen_name: str) -> CheckResult:
        got = eng.nth_product(inverse, named[gen_name], 0)
        return CheckResult(
            f"inverse screening annihilates {gen_name}", got.is_zero, str(got), "0"
        )

    for gen_name in sorted(named):
        run("screening kernel of the subregular embedding", gen_name, inverse_check)

    for i in range(1, gens.n + 1):
        vertex = basis.exp(screening_momentum(basis, i))
        for s in range(2, gens.n + 2):

            def regular_check(label: str, _v=vertex, _s=s) -> CheckResult:
                got = eng.nth_product(_v, miura_field(_s, basis), 0)
                return CheckResult(label, got.is_zero, str(got), "0")

            run(
                "screening kernels of the regular W-algebra",
                f"regular screening {i} annihilates W{s}",
                regular_check,
            )

    beta, gamma = fms_images(basis, eng)
    vacuum = basis.vacuum()

    def pair_check(label: str, left=None, right=None, want=None) -> CheckResult:
        return check_singular(label, eng.singular_part(left, right), want)

    ghost_rows = [
        ("ghost bosonisation: beta(z)beta(w) regular", beta, beta, []),
        ("ghost bosonisation: gamma(z)gamma(w) regular", gamma, gamma, []),
        ("ghost bosonisation: beta(z)gamma(w) ~ -1/(z-w)", beta, gamma, [vacuum.scale(-1)]),
        ("ghost bosonisation: gamma(z)beta(w) ~ 1/(z-w)", gamma, beta, [vacuum]),
    ]
    for label, left, right, poles in ghost_rows:
        run(
            "ghost-system bosonisation relations",
            label,
            lambda name, _l=left, _r=right, _p=poles: pair_check(
                name, left=_l, right=_r, want=SingularPart(basis, list(_p))
            ),
        )

    fms_vertex = basis.exp(fms_screening_momentum(basis))
    for label, state in (("beta", beta), ("gamma", gamma)):

        def fms_check(name: str, _state=state) -> CheckResult:
            got = eng.nth_product(fms_vertex, _state, 0)
            return CheckResult(name, got.is_zero, str(got), "0")

        run(
            "ghost-system bosonisation relations",
            f"ghost bosonisation screening annihilates {label}",
            fms_check,
        )
    return rows


# ---------------------------------------------------------------------------
# verb handlers
# ---------------------------------------------------------------------------


def cmd_generators(args, cfg: CliConfig) -> int:
    n = _require_rank(args.n, cfg.ope_rank_cap, "operator-product")
    gens = strong_generators(n)
    named = gens.named()
    if args.json:
        payload = {
            "level": "k",
            "n": n,
            "generators": {
                name: {
                    "charge": gens.charge(name),
                    "weight": str(gens.weight(name)),
                    "terms": len(named[name].terms),
                    "state": named[name].to_json(),
                }
                for name in sorted(named)
            },
        }
        _emit(args, _dump_json(payload))
    elif getattr(args, "latex", False):
        lines = [r"\begin{tabular}{lrrr}", r"field & weight & charge & terms \\", r"\hline"]
        for name in sorted(named):
            lines.append(
                f"{_latex_escape(name)} & ${gens.weight(name)}$ & "
                f"${gens.charge(name)}$ & {len(named[name].terms)} \\\\"
            )
        lines.append(r"\end{tabular}")
        _emit(args, "\n".join(lines) + "\n")
    else:
        lines = [f"strong generators at rank {n} (level k symbolic)"]
        for name in sorted(named):
            lines.append(
                f"{name:<4} weight {str(gens.weight(name)):<4} "
                f"charge {gens.charge(name):>2}  terms {len(named[name].terms)}"
            )
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_miura(args, cfg: CliConfig) -> int:
    n = _require_rank(args.n, cfg.ope_rank_cap, "operator-product")
    if args.s is not None and not 0 <= args.s <= n + 1:
        raise CliError(EXIT_RANGE, f"Miura index must be in 0..{n + 1}, got {args.s}")
    basis = BosonBasis.standard(n)
    indices = range(n + 2) if args.s is None else [args.s]
    fields = {s: miura_field(s, basis) for s in indices}
    if args.json:
        payload = {
            "n": n,
            "fields": {
                f"W{s}": {"weight": s, "terms": len(w.terms), "state": w.to_json()}
                for s, w in fields.items()
            },
        }
        _emit(args, _dump_json(payload))
    else:
        lines = [f"Miura-pattern generators at rank {n} (level k symbolic)"]
        for s, w in fields.items():
            lines.append(f"W{s}: weight {s}, terms {len(w.terms)}")
        lines.append(f"energy-momentum field: T = W2/(k + {n + 1})")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_char(args, cfg: CliConfig) -> int:
    if args.n < 1:
        raise CliError(EXIT_RANGE, f"rank must be >= 1, got {args.n}")
    qmax = cfg.qmax if args.qmax is None else args.qmax
    zmax = cfg.zmax if args.zmax is None else args.zmax
    if qmax < 0 or zmax < 0:
        raise CliError(EXIT_RANGE, "truncation orders must be >= 0")
    lam = None if args.lam is None else parse_rational(args.lam, "--lam")
    k = None if args.k is None else parse_rational(args.k, "--k")
    series = char_pi_module(args.n, args.r, lam=lam, k=k, q_max=qmax, z_max=zmax)
    _emit(args, _dump_json(series.to_json()))
    return EXIT_OK


def cmd_singular(args, cfg: CliConfig) -> int:
    n = _require_rank(args.n, cfg.ope_rank_cap, "operator-product")
    if args.m < 1:
        raise CliError(EXIT_RANGE, f"exponent m must be >= 1, got {args.m}")
    k = None if args.k is None else parse_rational(args.k, "--k")
    singular = singular_vector_check(n, args.m, k)
    if args.json:
        payload = {
            "k": None if k is None else str(k),
            "m": args.m,
            "n": n,
            "singular": singular,
        }
        _emit(args, _dump_json(payload))
    else:
        _emit(args, f"singular: {'true' if singular else 'false'}\n")
    return EXIT_OK


def cmd_zeromode(args, cfg: CliConfig) -> int:
    n = _require_rank(args.n, cfg.ope_rank_cap, "operator-product")
    poly = zero_mode_polynomial(n)
    degree = poly.degree("x")
    if args.json:
        payload = {
            "degree_x": degree,
            "degree_bound": n + 1,
            "n": n,
            "polynomial": str(poly),
        }
        _emit(args, _dump_json(payload))
    elif getattr(args, "latex", False):
        _emit(args, f"p(x) = {_latex_formula(str(poly))}\n")
    else:
        _emit(
            args,
            f"zero-mode polynomial at rank {n} "
            f"(eigenvalues g2..g{n + 1} symbolic)\n"
            f"p(x) = {poly}\n"
            f"degree in x: {degree} (bound {n + 1})\n",
        )
    return EXIT_OK


def cmd_sflow(args, cfg: CliConfig) -> int:
    n = _require_rank(args.n, cfg.ope_rank_cap, "operator-product")
    field = ScalarField(("k",))
    steps = args.ell
    weight_data = {"G+": (1, Fraction(1)), "G-": (-1, Fraction(n)), "J": (0, Fraction(1)), "L": (0, Fraction(2))}
    mode_names = ("G+", "G-", "J", "L", "Ltilde")
    modes = {
        name: {m: str(spectral_flow_mode(n, name, m, steps, field)) for m in (-1, 0, 1)}
        for name in mode_names
    }
    weights = {}
    for name, (charge, weight) in sorted(weight_data.items()):
        j1, d1 = spectral_flow_weight(n, field(charge), field(weight), steps)
        weights[name] = {
            "from": [str(field(charge)), str(field(weight))],
            "to": [str(j1), str(d1)],
        }
    if args.json:
        payload = {"ell": steps, "modes": modes, "n": n, "weights": weights}
        _emit(args, _dump_json(payload))
    else:
        lnk = field.sym("k") * n / (n + 1) + (n - 1)
        lines = [
            f"spectral flow by {steps} step(s) at rank {n}",
            f"half-lattice weight l_{n}(k) = {lnk}",
            "mode maps:",
        ]
        for name in mode_names:
            for m in (-1, 0, 1):
                lines.append(f"  {name}_{m} -> {modes[name][m]}")
        lines.append("weight map (charge j, weight Delta):")
        for name in sorted(weights):
            src = weights[name]["from"]
            dst = weights[name]["to"]
            lines.append(f"  {name}: ({src[0]}, {src[1]}) -> ({dst[0]}, {dst[1]})")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_central_charges(args, cfg: CliConfig) -> int:
    if args.n < 1:
        raise CliError(EXIT_RANGE, f"rank must be >= 1, got {args.n}")
    if args.n > cfg.cc_rank_cap:
        raise CliError(
            EXIT_RANGE,
            f"rank {args.n} exceeds the central-charge cap of {cfg.cc_rank_cap} "
            "(raise it in the config file to proceed)",
        )
    n = args.n
    field = ScalarField(("k",))
    regular = regular_central_charge(field, n)
    half_lattice = half_lattice_central_charge(field, n)
    subregular = subregular_central_charge(field, n)
    total = regular + half_lattice
    additive = total == subregular
    values_at_k = None
    if args.k is not None:
        k = parse_rational(args.k, "--k")
        try:
            values_at_k = {
                "k": str(k),
                "subregular": str(subregular.eval({"k": k})),
                "regular": str(regular.eval({"k": k})),
                "half_lattice": str(half_lattice.eval({"k": k})),
            }
        except PoleEvaluationError as exc:
            raise CliError(EXIT_DATA, f"central charge has a pole: {exc}") from None

    if args.json:
        payload = {
            "additivity": "pass" if additive else "fail",
            "half_lattice": str(half_lattice),
            "n": n,
            "regular": str(regular),
            "subregular": str(subregular),
        }
        if values_at_k is not None:
            payload["values_at_k"] = values_at_k
        if not additive:
            payload["regular_plus_half_lattice"] = str(total)
        _emit(args, _dump_json(payload))
    elif getattr(args, "latex", False):
        lines = [
            r"\begin{tabular}{ll}",
            rf"subregular & {_latex_formula(str(subregular))} \\",
            rf"regular & {_latex_formula(str(regular))} \\",
            rf"half-lattice & {_latex_formula(str(half_lattice))} \\",
            r"\hline",
            rf"additivity & {'pass' if additive else 'fail'} \\",
            r"\end{tabular}",
        ]
        _emit(args, "\n".join(lines) + "\n")
    else:
        lines = [
            f"central charges at rank {n} (type A_{n}, level k symbolic)",
            f"subregular   = {subregular}",
            f"regular      = {regular}",
            f"half-lattice = {half_lattice}",
        ]
        if values_at_k is not None:
            lines.append(
                f"at k = {values_at_k['k']}: subregular = {values_at_k['subregular']}, "
                f"regular = {values_at_k['regular']}, "
                f"half-lattice = {values_at_k['half_lattice']}"
            )
        lines.append(
            "additivity: "
            + ("pass" if additive else f"FAIL (regular + half-lattice = {total})")
            + "  [regular + half-lattice = subregular]"
        )
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if additive else EXIT_CHECK_FAILED


def cmd_verify(args, cfg: CliConfig) -> int:
    n = _require_rank(args.n, cfg.ope_rank_cap, "operator-product")
    if args.target == "appendix":
        if n not in APPENDIX_RANKS:
            raise GoldenCorpusError(
                f"no appendix table for n = {n}; available ranks: {APPENDIX_RANKS}"
            )
        gens = strong_generators(n)
        anchor = f"defining OPE table of the rank-{n} subregular algebra"
        rows = [(anchor, check) for check in verify_appendix(gens)]
        return _render_report(args, f"verify appendix (n = {n})", rows)
    gens = strong_generators(n)
    rows = _screening_checks(gens)
    return _render_report(args, f"verify screening (n = {n})", rows)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wsub",
        description=(
            "Symbolic free-field calculus for the subregular W-algebras of "
            "type A: construct the strong generators inside (regular "
            "W-algebra) (x) (half-lattice algebra), expand operator "
            "products, and verify the defining relations."
        ),
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"key=value config file (default: ${ENV_CONFIG})")
    common.add_argument("--out", help="write the output to FILE instead of stdout", metavar="FILE")
    common.add_argument("--json", action="store_true", help="emit JSON instead of text")
    common.add_argument(
        "--timings",
        action="store_true",
        help="append wall-clock seconds to check rows (makes output non-reproducible)",
    )
    latexable = argparse.ArgumentParser(add_help=False)
    latexable.add_argument("--latex", action="store_true", help="emit a LaTeX table")

    sub = parser.add_subparsers(dest="verb", required=True, metavar="VERB")

    p = sub.add_parser(
        "generators",
        parents=[common, latexable],
        help="strong generators J, L, G+, G-, U_i of the subregular algebra",
    )
    p.add_argument("--n", type=int, required=True, help="rank (type A_n)")
    p.set_defaults(handler=cmd_generators)

    p = sub.add_parser(
        "miura",
        parents=[common],
        help="Miura-pattern generators W_s of the regular W-algebra",
    )
    p.add_argument("--n", type=int, required=True, help="rank (type A_n)")
    p.add_argument("--s", type=int, help="single Miura index (default: all of 0..n+1)")
    p.set_defaults(handler=cmd_miura)

    p = sub.add_parser(
        "char",
        parents=[common],
        help="bigraded character of a relaxed half-lattice module (JSON)",
    )
    p.add_argument("--n", type=int, required=True, help="rank (type A_n)")
    p.add_argument("--r", type=int, required=True, help="module shift index r")
    p.add_argument("--lam", help="weight label lambda as an exact rational (default: symbolic)")
    p.add_argument("--k", help="level as an exact rational (default: symbolic)")
    p.add_argument("--qmax", type=int, help="q-truncation order (default from config)")
    p.add_argument("--zmax", type=int, help="z-truncation order (default from config)")
    p.set_defaults(handler=cmd_char)

    p = sub.add_parser(
        "singular",
        parents=[common],
        help="singular-vector test for the m-th power of the charged generator",
    )
    p.add_argument("--n", type=int, required=True, help="rank (type A_n)")
    p.add_argument("--m", type=int, required=True, help="exponent m >= 1")
    p.add_argument("--k", help="level as an exact rational (default: symbolic, never singular)")
    p.set_defaults(handler=cmd_singular)

    p = sub.add_parser(
        "zeromode",
        parents=[common, latexable],
        help="zero-mode action polynomial on relaxed top spaces",
    )
    p.add_argument("--n", type=int, required=True, help="rank (type A_n)")
    p.set_defaults(handler=cmd_zeromode)

    p = sub.add_parser(
        "sflow",
        parents=[common],
        help="spectral-flow mode maps and weight shifts",
    )
    p.add_argument("--n", type=int, required=True, help="rank (type A_n)")
    p.add_argument("--ell", type=int, default=1, help="number of flow steps (default 1)")
    p.set_defaults(handler=cmd_sflow)

    p = sub.add_parser(
        "central-charges",
        parents=[common, latexable],
        help="central charges of the three algebras and their additivity",
    )
    p.add_argument("--n", type=int, required=True, help="rank (type A_n)")
    p.add_argument("--k", help="also evaluate at this exact rational level")
    p.set_defaults(handler=cmd_central_charges)

    p = sub.add_parser(
        "verify",
        parents=[common, latexable],
        help="verification reports (appendix: low-rank OPE tables; screening: kernel claims)",
    )
    p.add_argument(
        "target",
        choices=("appendix", "screening"),
        help="appendix: check the classical OPE tables; screening: check the kernel claims",
    )
    p.add_argument("--n", type=int, required=True, help="rank (type A_n)")
    p.set_defaults(handler=cmd_verify)

    return parser


def main(argv=None) -> int:
    arguments = _glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = parser.parse_args(arguments)
    except SystemExit as exc:
        code = exc.code
        if code in (None, 0):
            return EXIT_OK
        return code if isinstance(code, int) else EXIT_USAGE
    try:
        cfg = load_config(args.config, os.environ)
        return args.handler(args, cfg)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except GoldenCorpusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (SubregError, FockError, OPEError, QSeriesError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except ScalarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
