"""Batch verification harness, formula emitter and Weyl-group queries.

``hecketools verify`` runs the check matrix and writes a report whose bytes
depend only on the configuration.  ``hecketools emit`` serializes a closed
form.  ``hecketools weyl`` answers enumeration and length queries.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterator, Sequence

from . import casselman, lattices, satake, weyl, zeta
from .casselman import GroupDescriptor
from .errors import HeckeToolsError, UnknownFilter, UnknownFormula
from .exactalg import LaurentPoly, RatFunc, VarContext
from .weyl import LengthModel, SignedPermutation

OUT_DIR_ENV = "HECKETOOLS_OUT_DIR"

STATUSES = ("pass", "exploratory", "expected-counterexample", "fail")
SUITES = ("weyl", "casselman", "lattices", "zeta", "satake")
DEFAULT_MAX_RANK = {"weyl": 5, "casselman": 3, "lattices": 3, "zeta": 3, "satake": 3}


@dataclass(frozen=True)
class SuiteConfig:
    max_rank: dict[str, int] = field(default_factory=lambda: dict(DEFAULT_MAX_RANK))
    seed: int = 0
    output: str | None = None
    format: str = "json"

    def __post_init__(self) -> None:
        ranks = dict(DEFAULT_MAX_RANK)
        ranks.update(self.max_rank)
        if any(k < 1 for k in ranks.values()):
            raise ValueError("rank bounds must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.format not in ("json", "markdown"):
            raise ValueError(f"unknown format {self.format!r}")
        object.__setattr__(self, "max_rank", ranks)

    @classmethod
    def capped(cls, k: int | None = None, **kw) -> "SuiteConfig":
        """Defaults with every suite bound replaced by ``k``."""
        ranks = dict(DEFAULT_MAX_RANK) if k is None else {s: k for s in SUITES}
        return cls(max_rank=ranks, **kw)

    def ranks(self, suite: str, limit: int | None = None) -> range:
        top = self.max_rank[suite]
        return range(1, (top if limit is None else min(top, limit)) + 1)

    def to_json(self) -> dict:
        return {"max_rank": dict(sorted(self.max_rank.items())), "seed": self.seed}


@dataclass(frozen=True)
class Entry:
    suite: str
    tag: str
    theorem_anchor: str
    rank: int | None
    status: str
    detail: object = None

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "tag": self.tag,
            "theorem_anchor": self.theorem_anchor,
            "rank": self.rank,
            "status": self.status,
            "detail": _jsonable(self.detail),
        }


@dataclass(frozen=True)
class VerificationReport:
    config: dict
    entries: tuple[Entry, ...]

    @property
    def worst_status(self) -> str:
        return max((e.status for e in self.entries), key=STATUSES.index, default="pass")

    @property
    def exit_code(self) -> int:
        return 1 if any(e.status == "fail" for e in self.entries) else 0

    def counts(self) -> dict[str, int]:
        return {s: sum(e.status == s for e in self.entries) for s in STATUSES}

    def to_json(self) -> dict:
        return {
            "config": self.config,
            "entries": [e.to_json() for e in self.entries],
            "summary": {"counts": self.counts(), "worst_status": self.worst_status, "exit_code": self.exit_code},
        }


def _jsonable(x: object) -> object:
    if isinstance(x, (RatFunc, LaurentPoly)):
        return x.to_text()
    if isinstance(x, SignedPermutation):
        return str(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(_jsonable(v) for v in x)
    if hasattr(x, "value") and not isinstance(x, (int, str, float, bool)):
        return x.value
    return x


def _guard(fn: Callable[[], object]) -> tuple[str, object]:
    """Run a check: ``pass`` with its result, or ``fail`` with the serialized counterexample."""
    try:
        return "pass", fn()
    except HeckeToolsError as exc:
        detail = getattr(exc, "detail", None)
        return "fail", {"error": type(exc).__name__, "message": str(exc), "counterexample": detail}


# --------------------------------------------------------------------------
# check matrix, one generator per tag


def _appendix(cfg: SuiteConfig) -> Iterator[Entry]:
    for model in LengthModel:
        anchor = f"sum_w q^l(w) x^I(w) = [n]_q! prod (1 + q^(i{model.shift:+d}) x_i) [{model.value}]"
        for n in cfg.ranks("weyl"):
            status, res = _guard(lambda: weyl.poincare_check(n, model))
            yield Entry("weyl", "appendix", anchor, n, status, res)


def _lemma_trick(cfg: SuiteConfig) -> Iterator[Entry]:
    anchor = "l(w_1 w) > l(w) => 1 not in I(w), |I(w_1 w)| = |I(w)| + 1"
    for n in cfg.ranks("weyl"):
        status, res = _guard(lambda: weyl.lemma_trick_scan(n))
        yield Entry("weyl", "lemma-trick", anchor, n, status, res)


def _eigen(cfg: SuiteConfig) -> Iterator[Entry]:
    for th in casselman.EIGEN_THEOREMS.values():
        for r in cfg.ranks("casselman"):
            status, res = _guard(lambda: casselman.eigen_verify(th.id, r))
            yield Entry("casselman", "eigen", th.anchor, r, status, res)


def _spherical_average(cfg: SuiteConfig) -> Iterator[Entry]:
    for r in cfg.ranks("casselman"):
        g = GroupDescriptor.quasi_split(r)
        status, res = _guard(lambda: casselman.spherical_average("phi_L", g))
        yield Entry("casselman", "spherical-average", "[r]_q! prod (1 + q^(-sigma_i+1/2))", r, status, res)
    for r in cfg.ranks("casselman"):
        g = GroupDescriptor.non_quasi_split(r)
        status, res = _guard(lambda: casselman.spherical_average("phi_K_ns", g))
        yield Entry("casselman", "spherical-average", "[r]_q! prod (1 + q^(-sigma_i-1/2))", r, status, res)
        holds = casselman.spherical_sum(g, LengthModel.TypeC) == casselman.spherical_closed_form(g)
        yield Entry(
            "casselman",
            "spherical-average",
            "[r]_q! prod (1 + q^(-sigma_i-1/2)) [TypeC weights]",
            r,
            "exploratory",
            {"holds": holds},
        )


def _hecke_character(cfg: SuiteConfig) -> Iterator[Entry]:
    status, res = _guard(casselman.hecke_character_check)
    yield Entry("casselman", "hecke-character", "x^2 = (q-1)x + q", None, status, res)


def _qbinomial(cfg: SuiteConfig) -> Iterator[Entry]:
    for r in cfg.ranks("zeta"):
        for rec in zeta.q_binomial_identities(r):
            status = "pass" if rec["holds"] else "fail"
            yield Entry("zeta", "qbinomial", f"q-binomial {rec['identity']}", r, status, rec)


def _cells(cfg: SuiteConfig) -> Iterator[Entry]:
    for r in cfg.ranks("zeta"):
        total = sum((zeta.vol_bruhat(r, j) for j in range(r + 1)), zeta.BASE.const(0))
        status = "pass" if total == zeta.BASE.const(1) else "fail"
        yield Entry("zeta", "cells", "sum_j vol(B_j) = 1", r, status, {"sum": total})
        for which in zeta.CELL_CONSTANTS:
            status, res = _guard(lambda: zeta.cell_constants(r, which))
            yield Entry("zeta", "cells", f"{which} = sum_i weight_i vol(B_i)", r, status, res)


def _root_products(cfg: SuiteConfig) -> Iterator[Entry]:
    for which in zeta.ROOT_PRODUCTS:
        for r in cfg.ranks("zeta"):
            rep = zeta.root_product_report(r, which)
            detail = {k: rep[k] for k in ("lines", "failed_lines", "final_line_holds")}
            yield Entry(
                "zeta",
                "root-products",
                f"{which} / C+_w' ratio",
                r,
                "pass" if rep["ratio_holds"] else "fail",
                {"product": rep["product"]},
            )
            status = "pass" if not rep["failed_lines"] else "fail"
            yield Entry("zeta", "root-products", f"{which} chain", r, status, detail)


def _zeta(cfg: SuiteConfig) -> Iterator[Entry]:
    for prop in zeta.PROP_IDS:
        for r in cfg.ranks("zeta"):
            status, res = _guard(lambda: zeta.zeta_closed_form(prop, r).coefficient)
            yield Entry("zeta", "zeta-closed-forms", f"Z = coefficient * L(s+1/2) / b_2r(s) [{prop}]", r, status, res)


def _special_values(cfg: SuiteConfig) -> Iterator[Entry]:
    for prop in zeta.PROP_IDS:
        for r in cfg.ranks("zeta"):
            status, res = _guard(lambda: zeta.special_value_s0(prop, r))
            yield Entry("zeta", "special-values", f"coefficient at s = 0 [{prop}]", r, status, res)
    status, res = _guard(zeta.almost_spherical_at_half)
    yield Entry("zeta", "special-values", "-(1+q^-s) / (q^2 (1-q^(-1-s))) at sigma = 1/2", 1, status, res)


def _sections(cfg: SuiteConfig) -> Iterator[Entry]:
    for model in zeta.SectionModel:
        if model is zeta.SectionModel.UNIMODULAR_NONSPLIT:
            continue
        target = zeta.SECTION_TARGET[model][0]
        for r in cfg.ranks("zeta"):
            status, res = _guard(lambda: zeta.degenerate_section(model, r).level_weights)
            yield Entry("zeta", "sections", f"f_Phi = {target} [{model.value}]", r, status, res)
    for r in cfg.ranks("zeta"):
        probe = zeta.nonsplit_sign_probe(r)
        status = "pass" if all(probe["matches"].values()) else "expected-counterexample"
        anchor = "f_Phi' = sum (-q)^(-ri) phi_(i,0) vs sum q^(-ri) phi_(i,0)"
        yield Entry("zeta", "sections", anchor, r, status, probe)


def _mdagger(cfg: SuiteConfig) -> Iterator[Entry]:
    for r in cfg.ranks("zeta", 4):
        status, res = _guard(lambda: zeta.mdagger_epsilon_check(r))
        yield Entry("zeta", "mdagger", "M-dagger(s) f~(s) = -q^-s f~(-s), epsilon = -q^(-s+1/2)", r, status, res)


REP_PAIRINGS = (
    ("Lambda", lattices.Convention.OMEGA_STANDARD, "pass"),
    ("Lambda_prime", lattices.Convention.OMEGA_SEMI_STANDARD, "pass"),
    ("Lambda_V_plus", lattices.Convention.OMEGA_STANDARD, "pass"),
    ("Lambda_prime_V_plus", lattices.Convention.OMEGA_SEMI_STANDARD, "pass"),
    ("Lambda_V_minus", lattices.Convention.OMEGA_STANDARD, "pass"),
    ("Lambda_prime_V_minus", lattices.Convention.OMEGA_SEMI_STANDARD, "exploratory"),
    ("mirrored Lambda_prime_V_minus", lattices.Convention.OMEGA_SEMI_STANDARD, "exploratory"),
)


def _rep_lattice(name: str, r: int) -> tuple[lattices.HermitianSpace, lattices.DiagonalLattice]:
    if name.startswith("mirrored "):
        space, _ = lattices.standard_lattice("Lambda_V_minus", r)
        return space, lattices.DiagonalLattice((0,) * r + (1,) * r + (0, 0))
    return lattices.standard_lattice(name, r)


def _representatives(cfg: SuiteConfig) -> Iterator[Entry]:
    for name, conv, mode in REP_PAIRINGS:
        for r in cfg.ranks("lattices"):
            space, L = _rep_lattice(name, r)
            neutral = not space.split
            failures = []
            count = 0
            for w in weyl.enumerate_group(r):
                count += 1
                status, res = _guard(
                    lambda: lattices.verify_representative(lattices.representative_matrix(w, space, conv), L, neutral)
                )
                if status == "fail":
                    failures.append(res)
            detail = {"elements": count, "failures": len(failures), "first_failures": failures[:3]}
            status = "exploratory" if mode == "exploratory" else ("fail" if failures else "pass")
            yield Entry("lattices", "representatives", f"{conv.value}(w) in stab({name})", r, status, detail)


def _dominance(cfg: SuiteConfig) -> Iterator[Entry]:
    for r in cfg.ranks("satake", 3):
        res = satake.dominance_equivalence_scan(r, 4)
        detail = {**res, "disagreements": len(res["disagreements"]), "examples": res["disagreements"][:3]}
        anchor = "lambda_i - lambda'_i >= 0, differences nonincreasing <=> partial-sum order"
        yield Entry("satake", "dominance", anchor, r, "exploratory", detail)


def _kato(cfg: SuiteConfig) -> Iterator[Entry]:
    u2 = None
    for r in cfg.ranks("satake", 4):
        status, res = _guard(lambda: satake.kato_irreducibility_check(r, 500, cfg.seed))
        if status == "pass":
            u2 = res.pop("unramified_U2")
        yield Entry("satake", "kato", "W_sigma = W_(sigma)", r, status, res)
    if u2 is None:
        u2 = satake.kato_compare((Fraction(1, 4),), satake.KatoPreset.UNRAMIFIED_U2)
        u2["strict"] = u2["generated"] < u2["stabilizer"]
    status = "expected-counterexample" if u2["strict"] else "fail"
    yield Entry("satake", "kato", "W_(sigma) < W_sigma, U(2), theta = 1/4", 1, status, u2)


CHECKS: dict[str, tuple[str, Callable[[SuiteConfig], Iterator[Entry]]]] = {
    "appendix": ("weyl", _appendix),
    "lemma-trick": ("weyl", _lemma_trick),
    "eigen": ("casselman", _eigen),
    "spherical-average": ("casselman", _spherical_average),
    "hecke-character": ("casselman", _hecke_character),
    "representatives": ("lattices", _representatives),
    "qbinomial": ("zeta", _qbinomial),
    "cells": ("zeta", _cells),
    "root-products": ("zeta", _root_products),
    "zeta-closed-forms": ("zeta", _zeta),
    "special-values": ("zeta", _special_values),
    "sections": ("zeta", _sections),
    "mdagger": ("zeta", _mdagger),
    "dominance": ("satake", _dominance),
    "kato": ("satake", _kato),
}


def select_checks(tags: Sequence[str]) -> list[str]:
    """Check tags selected by a filter of check tags or suite names (empty = all)."""
    tags = [t.strip() for t in tags if t.strip()]
    if not tags:
        return list(CHECKS)
    unknown = [t for t in tags if t not in CHECKS and t not in SUITES]
    if unknown:
        raise UnknownFilter(f"unknown filter tag(s): {', '.join(unknown)}")
    return [name for name, (suite, _) in CHECKS.items() if name in tags or suite in tags]


def run_suite(config: SuiteConfig, tags: Sequence[str] = ()) -> VerificationReport:
    entries: list[Entry] = []
    for name in select_checks(tags):
        entries.extend(CHECKS[name][1](config))
    return VerificationReport({**config.to_json(), "filter": select_checks(tags)}, tuple(entries))


# --------------------------------------------------------------------------
# rendering


def _cell(x: object) -> str:
    text = json.dumps(_jsonable(x), sort_keys=True, separators=(",", ":"))
    if len(text) > 120:
        text = text[:117] + "..."
    return text.replace("|", "\\|")


def report_render(rep: VerificationReport, format: str = "json") -> str:
    if format == "json":
        return json.dumps(rep.to_json(), sort_keys=True, indent=2) + "\n"
    if format != "markdown":
        raise ValueError(f"unknown format {format!r}")
    lines = ["# hecketools verification report", ""]
    if rep.entries:
        counts = ", ".join(f"{s}: {n}" for s, n in rep.counts().items())
        lines += [f"worst status: {rep.worst_status}; exit code {rep.exit_code}; {counts}", ""]
    for suite in SUITES:
        rows = [e for e in rep.entries if e.suite == suite]
        if not rows:
            continue
        lines += [f"## {suite}", "", "| tag | anchor | rank | status | detail |", "|---|---|---|---|---|"]
        for e in rows:
            anchor = e.theorem_anchor.replace("|", "\\|")
            rank = "" if e.rank is None else str(e.rank)
            lines.append(f"| {e.tag} | `{anchor}` | {rank} | {e.status} | {_cell(e.detail)} |")
        lines.append("")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# formulas


def _c_root(r: int, index: int) -> tuple[int, ...]:
    alpha = [0] * r
    alpha[index - 1] = 2
    return tuple(alpha)


def _formulas() -> dict[str, Callable[[int, int], RatFunc]]:
    qs = GroupDescriptor.quasi_split
    table: dict[str, Callable[[int, int], RatFunc]] = {}
    for fam in casselman.FAMILIES:
        table[f"c_function:{fam}"] = lambda r, j, fam=fam: casselman.c_function(_c_root(r, j), fam, qs(r))
    for kind in ("L_sigma", "L_sigma_minus"):
        table[kind] = lambda r, j, kind=kind: zeta.lfactor(kind, r)
    table["b"] = lambda r, j: zeta.lfactor("b", r)
    table["a"] = lambda r, j: zeta.lfactor("a", r)
    table["zetaE"] = lambda r, j: zeta.zeta_E(r, j)
    table["q_binomial"] = lambda r, j: zeta._qbin(r, j)
    table["vol_bruhat"] = zeta.vol_bruhat
    table["cell_index"] = zeta.cell_index
    for which in zeta.CELL_CONSTANTS:
        table[which] = lambda r, j, which=which: zeta.cell_constants(r, which)
    for which in zeta.ROOT_PRODUCTS:
        table[which] = lambda r, j, which=which: zeta.root_product_constant(r, which, bound=r)
    for prop in zeta.PROP_IDS:
        table[f"zeta:{prop}"] = lambda r, j, prop=prop: zeta.zeta_closed_form(prop, r, bound=r).value
        table[f"special_value:{prop}"] = lambda r, j, prop=prop: zeta.special_value_s0(prop, r)
    table["c_minus_r"] = lambda r, j: zeta.c_minus_r(r)
    table["S_prime"] = lambda r, j: zeta.corollary_constants(r)[0]
    table["S"] = lambda r, j: zeta.corollary_constants(r)[1]
    table["almost_spherical_at_half"] = lambda r, j: zeta.almost_spherical_at_half()
    table["spherical_average"] = lambda r, j: casselman.spherical_closed_form(qs(r))
    table["spherical_average_nonsplit"] = lambda r, j: casselman.spherical_closed_form(
        GroupDescriptor.non_quasi_split(r)
    )
    return table


FORMULAS = _formulas()


def emit_formula(name: str, r: int = 1, format: str = "json", index: int = 1) -> str:
    """Serialize the named closed form at rank ``r`` (``index`` selects ``j`` where used)."""
    name = name.replace("′", "'")
    if name not in FORMULAS:
        raise UnknownFormula(f"unknown formula {name!r}")
    value = FORMULAS[name](r, index)
    if format == "json":
        body = {"name": name, "rank": r, "index": index, "value": value.to_json()}
        return json.dumps(body, sort_keys=True) + "\n"
    if format == "text":
        return value.to_text() + "\n"
    if format == "latex":
        return value.to_latex() + "\n"
    raise ValueError(f"unknown format {format!r}")


# --------------------------------------------------------------------------
# command line


def parse_element(text: str) -> SignedPermutation:
    """``"[2,-1]"`` or ``"2,-1"`` as a signed permutation."""
    body = text.strip().strip("[]")
    return SignedPermutation(tuple(int(x) for x in body.split(",")))


def _weyl_command(args: argparse.Namespace) -> object:
    model = LengthModel(args.model)
    if args.action == "enumerate":
        return [
            {"element": str(w), "length": weyl.length(w, model), "I": sorted(w.negated_set())}
            for w in weyl.enumerate_group(args.rank)
        ]
    if args.action == "poincare":
        return weyl.poincare_check(args.rank, model)
    if args.element is None:
        raise SystemExit(f"weyl {args.action} needs an element such as [2,-1]")
    w = parse_element(args.element)
    if args.action == "length":
        return {"element": str(w), "model": model.value, "length": weyl.length(w, model)}
    word = weyl.reduced_word(w, model)
    return {"element": str(w), "model": model.value, "word": word, "names": [weyl.generator_name(g) for g in word]}


def _default_out(fmt: str) -> Path | None:
    base = os.environ.get(OUT_DIR_ENV)
    if not base:
        return None
    return Path(base) / ("report.md" if fmt == "markdown" else "report.json")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hecketools", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the verification matrix")
    v.add_argument("--filter", default="", help="comma-separated check tags or suite names")
    v.add_argument("--max-rank", type=int, default=None, help="rank bound for every suite")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", default=None, help=f"report path (default: ${OUT_DIR_ENV}/report.*, else stdout)")
    v.add_argument("--format", choices=("json", "markdown"), default="json")

    e = sub.add_parser("emit", help="serialize a closed form")
    e.add_argument("name", help="formula name; 'list' prints the registry")
    e.add_argument("--rank", type=int, default=1)
    e.add_argument("--index", type=int, default=1)
    e.add_argument("--format", choices=("json", "text", "latex"), default="json")

    w = sub.add_parser("weyl", help="hyperoctahedral group queries")
    w.add_argument("action", choices=("enumerate", "length", "word", "reduced-word", "poincare"))
    w.add_argument("element", nargs="?", default=None)
    w.add_argument("--rank", type=int, default=2)
    w.add_argument("--model", choices=[m.value for m in LengthModel], default="TypeC")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            cfg = SuiteConfig.capped(args.max_rank, seed=args.seed, output=args.out, format=args.format)
            report = run_suite(cfg, args.filter.split(","))
            text = report_render(report, cfg.format)
            out = Path(args.out) if args.out else _default_out(cfg.format)
            if out is None:
                sys.stdout.write(text)
            else:
                out.parent.mkdir(parents=True, exist_ok=True)
                out.write_text(text, encoding="utf-8")
                print(f"{out}: {report.worst_status}, exit code {report.exit_code}", file=sys.stderr)
            return report.exit_code
        if args.command == "emit":
            if args.name == "list":
                sys.stdout.write("\n".join(sorted(FORMULAS)) + "\n")
                return 0
            sys.stdout.write(emit_formula(args.name, args.rank, args.format, args.index))
            return 0
        sys.stdout.write(json.dumps(_jsonable(_weyl_command(args)), sort_keys=True) + "\n")
        return 0
    except (UnknownFilter, UnknownFormula, ValueError) as exc:
        print(f"hecketools: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return 2
    except HeckeToolsError as exc:
        print(f"hecketools: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
