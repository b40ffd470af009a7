"""Bruhat-cell volumes, degenerate sections and closed-form doubling zeta integrals.

Values depending only on ``q`` and ``s`` live in the two-variable ring
``VarContext(0)`` (``t = q^(1/2)``, ``Y = q^-s``).  Closed forms that also
depend on the Satake parameter live in ``VarContext(r)``.

Every proof chain is transcribed line by line; a chain check compares each
line with the first one and reports the lines that do not hold, instead of
stopping at the first difference.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Sequence

from .casselman import (
    Basis,
    GroupDescriptor,
    PSVector,
    build_special_vector,
    c_function,
    normalize_family,
)
from .errors import IdentityFailed, InvalidName, OutOfRange
from .exactalg import (
    LaurentPoly,
    RatFunc,
    VarContext,
    specialize_doubled,
    substitute,
)
from .weyl import SignedPermutation, enumerate_group

BASE = VarContext(0)


# --------------------------------------------------------------------------
# small constructors in the (t, Y) ring


def qp(k: int | Fraction, ctx: VarContext = BASE) -> RatFunc:
    """``q^k`` for integer or half-integer ``k``."""
    k2 = Fraction(k) * 2
    if k2.denominator != 1:
        raise ValueError(f"q-exponent {k} is not a half-integer")
    return ctx.q_pow(int(k2))


def qs(a: int | Fraction, b: int = 0, ctx: VarContext = BASE) -> RatFunc:
    """``q^(a + b s) = t^(2a) Y^(-b)``."""
    return qp(a, ctx) * ctx.Y ** (-b)


def zeta_E(m: int | Fraction, c: int = 1, ctx: VarContext = BASE) -> RatFunc:
    """``zeta_E(m + c s) = 1 / (1 - q^(-m) Y^c)``."""
    return 1 / (1 - qp(-Fraction(m), ctx) * ctx.Y**c)


def lift(f: RatFunc, ctx: VarContext) -> RatFunc:
    """View a ``(t, Y)`` function in a larger context."""
    return substitute(f, {}, ctx)


def negate_s(f: RatFunc) -> RatFunc:
    """``f(s) -> f(-s)``."""
    return substitute(f, {"Y": f.context.Y ** -1})


def shift_s(f: RatFunc, k: int | Fraction) -> RatFunc:
    """``f(s) -> f(s + k)``."""
    ctx = f.context
    return substitute(f, {"Y": ctx.Y * qp(-Fraction(k), ctx)})


def at_s0(f: RatFunc) -> RatFunc:
    return substitute(f, {"Y": 1})


def _prod(factors, ctx: VarContext = BASE) -> RatFunc:
    out = ctx.const(1)
    for f in factors:
        out = out * f
    return out


def _check_chain(name: str, lines: Sequence[RatFunc]) -> list[dict]:
    """Compare every line with the first; return one record per line."""
    first = lines[0]
    return [{"chain": name, "line": k, "holds": line == first} for k, line in enumerate(lines)]


def _failed_lines(records: Sequence[dict]) -> list[int]:
    return [rec["line"] for rec in records if not rec["holds"]]


# --------------------------------------------------------------------------
# q-binomials and cell volumes


def q_binomial(r: int, j: int) -> LaurentPoly:
    """Gaussian binomial ``[r choose j]_q`` as a polynomial in ``q = t^2``."""
    if r < 0 or not 0 <= j <= r:
        raise OutOfRange(f"q-binomial needs 0 <= j <= r, got r={r}, j={j}")
    # rows of the q-Pascal triangle: [n, k] = [n-1, k-1] + q^k [n-1, k]
    row = [{0: 1}]
    for n in range(1, r + 1):
        new = []
        for k in range(n + 1):
            acc: dict[int, int] = {}
            if k >= 1:
                for e, c in row[k - 1].items():
                    acc[e] = acc.get(e, 0) + c
            if k <= n - 1:
                for e, c in row[k].items():
                    acc[e + k] = acc.get(e + k, 0) + c
            new.append(acc)
        row = new
    return LaurentPoly(BASE.names, {(2 * e, 0): c for e, c in row[j].items() if c})


def _qbin(r: int, j: int, ctx: VarContext = BASE) -> RatFunc:
    poly = q_binomial(r, j)
    return lift(RatFunc(poly), ctx) if ctx != BASE else RatFunc(poly)


def _cell_denominator(r: int) -> RatFunc:
    return _prod(1 + qp(i) for i in range(1, r + 1))


def cell_index(r: int, j: int) -> RatFunc:
    """``[B_j : B_0] = q^C(j+1,2) [r, j]_q``."""
    return qp(comb(j + 1, 2)) * _qbin(r, j)


def vol_bruhat(r: int, j: int) -> RatFunc:
    """Volume of the ``j``-th Bruhat cell of ``K_r`` (total mass 1)."""
    if r < 1 or not 0 <= j <= r:
        raise OutOfRange(f"Bruhat cell index needs 0 <= j <= r, got r={r}, j={j}")
    return cell_index(r, j) / _cell_denominator(r)


def q_binomial_identities(r: int) -> list[dict]:
    """The generating identity and the three displayed summations at rank ``r``.

    Each record carries both sides, so a failing display is reported with
    the value it should have had.
    """
    q, x = BASE.q, BASE.Y
    out = []

    def record(name: str, lhs: RatFunc, rhs: RatFunc) -> None:
        out.append({"identity": name, "rank": r, "holds": lhs == rhs, "lhs": lhs.to_text(), "rhs": rhs.to_text()})

    lhs = sum((qp(comb(j, 2)) * _qbin(r, j) * x**j for j in range(r + 1)), BASE.const(0))
    record("generating", lhs, _prod(1 + q**i * x for i in range(r)))
    lhs = sum((qp(comb(i + 1, 2)) * _qbin(r, i) for i in range(r + 1)), BASE.const(0))
    record("total-index", lhs, _prod(q ** (i + 1) + 1 for i in range(r)))
    lhs = sum((qp(comb(i + 1, 2) - 2 * i) * _qbin(r, i) for i in range(r + 1)), BASE.const(0))
    record("weight-q^-2i", lhs, (q + 1) / q * _prod(q**i + 1 for i in range(r - 1)))
    lhs = sum((qp(comb(i + 1, 2) - (r + 1) * i) * _qbin(r, i) for i in range(r + 1)), BASE.const(0))
    record("weight-q^-(r+1)i", lhs, _prod(q ** (i - 1 - r) + 1 for i in range(1, r)))
    record("weight-q^-(r+1)i, full product", lhs, _prod(q ** (-k) + 1 for k in range(1, r + 1)))
    return out


CELL_CONSTANTS = ("C", "C_+", "C_+'", "C_-", "C_-'")


def _cell_weight(which: str, r: int, i: int) -> RatFunc:
    """Weight of ``vol(B_i)`` in the defining sum; ``q^(si) = Y^-i``."""
    Y = BASE.Y
    if which == "C":
        return qp(-2 * i)
    if which == "C_+":
        return Y ** (-i)
    if which == "C_+'":
        return qp(-i * r) * Y**i
    if which == "C_-":
        return qp(-i) * Y ** (-i)
    return qp(-i - i * r) * Y**i


def _cell_closed_form(which: str, r: int) -> RatFunc:
    q, Y = BASE.q, BASE.Y
    den = _cell_denominator(r)
    if which == "C":
        return 2 * (q + 1) / (q * (q**r + 1) * (q ** (r - 1) + 1))
    if which == "C_+":
        return _prod(1 + q**i / Y for i in range(1, r + 1)) / den
    if which == "C_+'":
        return _prod(1 + q ** (1 - i) * Y for i in range(1, r + 1)) / den
    if which == "C_-":
        return _prod(1 + q ** (i - 1) / Y for i in range(1, r + 1)) / den
    return _prod(1 + q ** (-i) * Y for i in range(1, r + 1)) / den


def cell_constants(r: int, which: str) -> RatFunc:
    """Weighted cell-volume sum, asserted equal to its closed product form."""
    which = which.replace("′", "'")
    if which not in CELL_CONSTANTS:
        raise InvalidName(f"unknown cell constant {which!r}")
    if r < 1:
        raise OutOfRange("rank must be positive")
    total = sum((_cell_weight(which, r, i) * vol_bruhat(r, i) for i in range(r + 1)), BASE.const(0))
    closed = _cell_closed_form(which, r)
    if total != closed:
        raise IdentityFailed(
            f"{which} at r={r}: weighted sum differs from the closed form",
            {"sum": total.to_text(), "closed_form": closed.to_text()},
        )
    return closed


# --------------------------------------------------------------------------
# degenerate sections


class SectionModel(str, enum.Enum):
    PI_MODULAR = "pi-modular"
    UNIMODULAR_SPLIT = "unimodular-split"
    ALMOST_PI_MODULAR = "almost-pi-modular"
    UNIMODULAR_NONSPLIT = "unimodular-nonsplit"


class FourierSign(str, enum.Enum):
    PAPER_STATEMENT = "paper-statement"
    PROOF_EVALUATION = "proof-evaluation"


# vector each section is identified with, and whether that holds for all s
SECTION_TARGET = {
    SectionModel.PI_MODULAR: ("phi_K", True),
    SectionModel.UNIMODULAR_SPLIT: ("phi_L", False),
    SectionModel.ALMOST_PI_MODULAR: ("phi_K_minus", True),
    SectionModel.UNIMODULAR_NONSPLIT: ("phi_L_minus", False),
}


@dataclass(frozen=True)
class SectionVector:
    model: SectionModel
    r: int
    vector: PSVector = field(compare=False)
    level_weights: tuple[RatFunc, ...] = field(compare=False)


def section_level_weight(
    model: SectionModel | str, r: int, level: int, sign: FourierSign | str = FourierSign.PAPER_STATEMENT
) -> RatFunc:
    """Value of the standard section on the level-``i`` cells of ``K_2r``."""
    model, sign = SectionModel(model), FourierSign(sign)
    q = BASE.q
    if model is SectionModel.PI_MODULAR:
        return BASE.const(1)
    if model is SectionModel.UNIMODULAR_SPLIT:
        return q ** (-r * level)
    if model is SectionModel.ALMOST_PI_MODULAR:
        return (-q) ** (-level)
    if sign is FourierSign.PAPER_STATEMENT:
        return (-q) ** (-r * level)
    return q ** (-r * level)


def _section_vector(model: SectionModel, r: int, sign: FourierSign) -> tuple[PSVector, tuple[RatFunc, ...]]:
    group = GroupDescriptor.quasi_split(2 * r)
    ctx = group.ctx
    weights = tuple(section_level_weight(model, r, i, sign) for i in range(2 * r + 1))
    lifted = [lift(w, ctx) for w in weights]
    coeffs = {w: lifted[len(w.negated_set())] for w in enumerate_group(2 * r, bound=max(2 * r, 6))}
    return PSVector(group, SignedPermutation.identity(2 * r), coeffs, Basis.CASSELMAN), weights


def section_mismatches(
    model: SectionModel | str, r: int, sign: FourierSign | str = FourierSign.PAPER_STATEMENT
) -> list[dict]:
    """Elements where the section differs from its identified special vector at s = 0."""
    model, sign = SectionModel(model), FourierSign(sign)
    vec, weights = _section_vector(model, r, sign)
    target, all_s = SECTION_TARGET[model]
    special = build_special_vector(target, vec.group)
    out = []
    # both vectors are functions of the sign pattern I(w); specialise once per
    # pattern and compare the raw coefficients of the other elements with it
    first: dict[frozenset, SignedPermutation] = {}
    reported: set[int] = set()
    for w in sorted(vec.coeffs):
        key = w.negated_set()
        if key in first:
            u = first[key]
            if vec.coeff(w) == vec.coeff(u) and special.coeff(w) == special.coeff(u):
                continue
        else:
            first[key] = w
        got = specialize_doubled(vec.coeff(w))
        want = specialize_doubled(special.coeff(w))
        if not all_s:
            got, want = at_s0(got), at_s0(want)
        if got != want and len(key) not in reported:
            reported.add(len(key))
            out.append({"w": str(w), "level": len(key), "section": got.to_text(), "special": want.to_text()})
    return out


def degenerate_section(
    model: SectionModel | str, r: int, nonsplit_fourier_sign: FourierSign | str = FourierSign.PAPER_STATEMENT
) -> SectionVector:
    """Standard section over ``G_2r`` as a vector in the Casselman basis.

    The section is checked against the special vector it is identified with
    (for all ``s`` where the identification is exact, at ``s = 0`` otherwise).
    """
    model, sign = SectionModel(model), FourierSign(nonsplit_fourier_sign)
    if r < 1:
        raise OutOfRange("rank must be positive")
    bad = section_mismatches(model, r, sign)
    if bad:
        raise IdentityFailed(
            f"{model.value} section at r={r} ({sign.value}) differs from {SECTION_TARGET[model][0]}",
            bad,
        )
    vec, weights = _section_vector(model, r, sign)
    return SectionVector(model, r, vec, weights)


def nonsplit_sign_probe(r: int) -> dict:
    """Which sign convention of the non-split unimodular section matches ``phi^-_L``."""
    out = {}
    for sign in FourierSign:
        out[sign.value] = not section_mismatches(SectionModel.UNIMODULAR_NONSPLIT, r, sign)
    return {"rank": r, "matches": out}


# --------------------------------------------------------------------------
# root-product constants


ROOT_PRODUCTS = {
    "C+_w'": "c",
    "C+'_w'": "c'",
    "C-_w'": "c''",
    "C-'_w'": "c'''",
}


def _flipped_roots(r: int) -> list[tuple[int, ...]]:
    """Positive roots of ``C_2r`` made negative by ``w'_r``: ``e_i + e_j`` and ``2 e_i``, ``i, j <= r``."""
    n = 2 * r
    roots = []
    for i in range(r):
        for j in range(i + 1, r):
            v = [0] * n
            v[i] = v[j] = 1
            roots.append(tuple(v))
    for i in range(r):
        v = [0] * n
        v[i] = 2
        roots.append(tuple(v))
    return roots


def root_product(r: int, family: str) -> RatFunc:
    """``prod c_alpha(sigma_s)`` over the flipped roots, at the doubled parameter."""
    group = GroupDescriptor.quasi_split(2 * r)
    family = normalize_family(family)
    out = BASE.const(1)
    for alpha in _flipped_roots(r):
        out = out * specialize_doubled(c_function(alpha, family, group))
    return out


def c_plus(r: int) -> RatFunc:
    """``C^+ = prod zeta_E(2s+2i-1) / zeta_E(2s+r+i)``."""
    return _prod(zeta_E(2 * i - 1, 2) / zeta_E(r + i, 2) for i in range(1, r + 1))


def _pairs(r: int):
    return [(i, j) for i in range(1, r + 1) for j in range(i + 1, r + 1)]


def _pair_zeta(r: int) -> RatFunc:
    return _prod(zeta_E(2 * r + 1 - i - j, 2) / zeta_E(2 * r + 2 - i - j, 2) for i, j in _pairs(r))


def _pair_raw(r: int) -> RatFunc:
    return _prod(
        (1 - qs(-(2 * r + 2 - i - j), -2)) / (1 - qs(-(2 * r + 1 - i - j), -2)) for i, j in _pairs(r)
    )


def _half_power(r: int) -> RatFunc:
    """``q^(-rs - r(r+1)/2)``."""
    return qs(-Fraction(r * (r + 1), 2), -r)


def _chain_c_plus_prime(r: int) -> list[RatFunc]:
    R = range(1, r + 1)
    P = _half_power(r)
    pl = lambda k: 1 + qs(-k, -1)  # noqa: E731  1 + q^(-s-k)
    tail = _prod(zeta_E(2 * i - 1, 2) / zeta_E(r + i, 2) for i in R)
    return [
        _pair_raw(r)
        * _prod(
            qs(-r - 1 + i, -1) * (1 - qs(-(r + 1 - i), -1)) * pl(r - i) / (1 - qs(-(2 * r + 1 - 2 * i), -2))
            for i in R
        ),
        _pair_zeta(r) * _prod(qs(-r - 1 + i, -1) * zeta_E(2 * i - 1, 2) * pl(r - i) / zeta_E(i) for i in R),
        P * _pair_zeta(r) * _prod(zeta_E(2 * i - 1, 2) * pl(r - i) / zeta_E(i) for i in R),
        P
        * _prod(zeta_E(2 * i, 2) / zeta_E(r + i, 2) for i in R)
        * _prod(zeta_E(2 * i - 1, 2) * pl(r - i) / zeta_E(i) for i in R),
        P * _prod(zeta_E(2 * i, 2) / zeta_E(i) * pl(i - 1) * zeta_E(2 * i - 1, 2) / zeta_E(r + i, 2) for i in R),
        P * _prod(pl(i - 1) / pl(i) * zeta_E(2 * i - 1, 2) / zeta_E(r + i, 2) for i in R),
        P * pl(0) / pl(r) * tail,
    ]


def _chain_c_minus(r: int) -> list[RatFunc]:
    R = range(1, r + 1)
    q = BASE.q
    sign = (-q) ** (-r)
    tail = _prod(zeta_E(2 * i - 1, 2) / zeta_E(r + i, 2) for i in R)
    return [
        _pair_raw(r) * _prod((qs(-(2 * r - 2 * i), -2) - 1) / (q * (1 - qs(-(2 * r + 1 - 2 * i), -2))) for i in R),
        sign * _pair_zeta(r) * _prod(zeta_E(2 * i - 1, 2) / zeta_E(2 * i - 2, 2) for i in R),
        sign * _prod(zeta_E(2 * i, 2) / zeta_E(2 * i - 2, 2) for i in R) * tail,
        sign * (1 - qs(0, -2)) / (1 - qs(-2 * r, -2)) * tail,
    ]


def _chain_c_minus_prime(r: int) -> list[RatFunc]:
    R = range(1, r + 1)
    P = (-1) ** r * _half_power(r)
    pairs_reflected = _prod(zeta_E(i + j - 1, 2) / zeta_E(i + j, 2) for i, j in _pairs(r))
    single = lambda i: (1 - qs(-r + i, -1)) * (1 + qs(-r + i - 1, -1)) / (1 - qs(-(2 * r + 1 - 2 * i), -2))  # noqa: E731
    return [
        _pair_raw(r)
        * _prod(
            qs(-2 * r - 1 + 2 * i, -2) * (1 - qs(r - i, 1)) * (1 + qs(-r + i - 1, -1)) / (1 - qs(-(2 * r + 1 - 2 * i), -2))
            for i in R
        ),
        pairs_reflected * _prod(-qs(-r - 1 + i, -1) * single(i) for i in R),
        P
        * _prod(zeta_E(2 * i, 2) / zeta_E(r + i, 2) for i in R)
        * _prod(zeta_E(2 * i - 1, 2) * (1 + qs(-i, -1)) / zeta_E(i - 1) for i in R),
        P * _prod(zeta_E(i) / zeta_E(r + i, 2) for i in R) * _prod(zeta_E(2 * i - 1, 2) / zeta_E(i - 1) for i in R),
        P * zeta_E(r) / zeta_E(0) * _prod(zeta_E(2 * i - 1, 2) / zeta_E(r + i) for i in R),
        P * (1 - qs(0, -1)) / (1 - qs(-r, -1)) * _prod(zeta_E(2 * i - 1, 2) / zeta_E(r + i) for i in R),
    ]


CHAINS: dict[str, Callable[[int], list[RatFunc]]] = {
    "C+'_w'": _chain_c_plus_prime,
    "C-_w'": _chain_c_minus,
    "C-'_w'": _chain_c_minus_prime,
}


def root_product_ratio(r: int, which: str) -> RatFunc:
    """Displayed quotient of a root-product constant by ``C^+``."""
    if which == "C+_w'":
        return BASE.const(1)
    if which == "C+'_w'":
        return _half_power(r) * (1 + qs(0, -1)) / (1 + qs(-r, -1))
    if which == "C-_w'":
        return (-BASE.q) ** (-r) * (1 - qs(0, -2)) / (1 - qs(-2 * r, -2))
    if which == "C-'_w'":
        return (-1) ** r * _half_power(r) * (1 - qs(0, -1)) / (1 - qs(-r, -1))
    raise InvalidName(f"unknown root-product constant {which!r}")


def root_product_report(r: int, which: str) -> dict:
    """Root product, its displayed chain and its displayed ratio to ``C^+``."""
    which = which.replace("′", "'")
    if which not in ROOT_PRODUCTS:
        raise InvalidName(f"unknown root-product constant {which!r}")
    product = root_product(r, ROOT_PRODUCTS[which])
    ratio = root_product_ratio(r, which)
    if which in CHAINS:
        lines = [product] + CHAINS[which](r)
        chain = _check_chain(which, lines)
    else:
        chain = _check_chain(which, [product, c_plus(r)])
    return {
        "constant": which,
        "rank": r,
        "product": product,
        "ratio_holds": product == ratio * c_plus(r),
        "final_line_holds": chain[-1]["holds"],
        "failed_lines": _failed_lines(chain),
        "lines": len(chain),
    }


def root_product_constant(r: int, which: str, bound: int = 5) -> RatFunc:
    """The root product; raises unless it equals ``ratio * C^+``.

    Chain lines that fail as transcribed are reported by
    :func:`root_product_report` and do not raise here.
    """
    if r > bound:
        raise OutOfRange(f"rank {r} exceeds the bound {bound}")
    rep = root_product_report(r, which)
    if not rep["ratio_holds"]:
        raise IdentityFailed(f"{which} at r={r}: product differs from the displayed ratio times C^+", rep)
    return rep["product"]


# --------------------------------------------------------------------------
# L-factors


LFACTOR_KINDS = ("L_sigma", "L_sigma_minus", "b", "a", "zetaE")


def lfactor(kind: str, r: int = 1, shift: int | Fraction = 0, negate: bool = False, m: int | Fraction = 0, c: int = 1) -> RatFunc:
    """Euler factors as rational functions.

    ``L_sigma`` and ``L_sigma_minus`` are evaluated at ``s + shift`` over
    ``VarContext(r)``; ``b`` and ``a`` are ``b_2r`` and ``a_2r`` at ``s``
    (or ``-s`` when ``negate``) over ``VarContext(0)``; ``zetaE`` is
    ``zeta_E(m + c s)``.
    """
    if kind == "zetaE":
        return zeta_E(m, c)
    if kind in ("L_sigma", "L_sigma_minus"):
        ctx = VarContext(r)
        y = ctx.Y * qp(-Fraction(shift), ctx)
        out = ctx.const(1)
        for i in range(1, r + 1):
            x = ctx.X(i)
            out = out / ((1 - x * y) * (1 - y / x))
        if kind == "L_sigma_minus":
            out = out * (1 - ctx.t * y)
        return out
    if kind == "b":
        out = _prod(zeta_E(2 * i, 2) for i in range(1, r + 1))
    elif kind == "a":
        out = _prod(zeta_E(-2 * i + 1, 2) for i in range(1, r + 1))
    else:
        raise InvalidName(f"unknown L-factor kind {kind!r}")
    return negate_s(out) if negate else out


def b_closed(r: int) -> RatFunc:
    """``b_2r(s) = prod 1 / (1 - q^(-2s-2i))`` written out."""
    return _prod(1 / (1 - qs(-2 * i, -2)) for i in range(1, r + 1))


# --------------------------------------------------------------------------
# zeta closed forms


PROP_IDS = (
    "spherical-pi-modular",
    "spherical-unimodular-split",
    "almost-spherical-almost-pi-modular",
    "almost-spherical-unimodular-nonsplit",
)

_L_KIND = {
    "spherical-pi-modular": "L_sigma",
    "spherical-unimodular-split": "L_sigma",
    "almost-spherical-almost-pi-modular": "L_sigma_minus",
    "almost-spherical-unimodular-nonsplit": "L_sigma_minus",
}


@dataclass(frozen=True)
class ZetaClosedForm:
    value: RatFunc = field(compare=False)
    prop_id: str
    rank: int
    sigma_mode: str = "generic"
    coefficient: RatFunc | None = field(default=None, compare=False)

    def to_json(self) -> dict:
        return {
            "prop_id": self.prop_id,
            "rank": self.rank,
            "sigma_mode": self.sigma_mode,
            "value": self.value.to_json(),
        }


def l_over_b(prop_id: str, r: int) -> RatFunc:
    """``L(s + 1/2) / b_2r(s)`` with the L-factor used by ``prop_id``."""
    ctx = VarContext(r)
    return lfactor(_L_KIND[prop_id], r, shift=Fraction(1, 2)) / lift(lfactor("b", r), ctx)


def zeta_coefficient_display(prop_id: str, r: int) -> RatFunc:
    """Coefficient of ``L / b`` in the final displayed formula."""
    q = BASE.q
    if prop_id == "spherical-pi-modular":
        return BASE.const(1)
    if prop_id == "spherical-unimodular-split":
        return _prod(
            (1 + qs(-i, -1)) * (1 + qs(-i + 1, -1)) / ((1 + q**i) * (1 + q**i)) for i in range(1, r + 1)
        ) * (1 + qs(0, -1)) / (1 + qs(-r, -1))
    if prop_id == "almost-spherical-almost-pi-modular":
        return 2 * (q + 1) / ((-q) ** r * q * (q**r + 1) * (q ** (r - 1) + 1)) * (1 + qs(0, -1)) / (
            1 - qs(-2 * r, -2)
        )
    if prop_id == "almost-spherical-unimodular-nonsplit":
        return (
            (-1) ** r
            * _prod((1 + qs(-i + 1, -1)) * (1 + qs(-i, -1)) / (1 + q**i) ** 2 for i in range(1, r + 1))
            * q
            * (q**r + 1)
            * (q ** (r - 1) + 1)
            / (2 * q**r * (q + 1))
            / (1 - qs(-r, -1))
        )
    raise InvalidName(f"unknown proposition id {prop_id!r}")


def zeta_coefficient_chain(prop_id: str, r: int) -> RatFunc:
    """Coefficient of ``L / b`` reassembled from cell and root-product constants.

    ``L_-(s + 1/2) = (1 - q^-s) L(s + 1/2)`` absorbs one factor for the
    almost-spherical propositions.
    """
    if prop_id == "spherical-pi-modular":
        return BASE.const(1)
    Y = BASE.Y
    if prop_id == "spherical-unimodular-split":
        return (
            cell_constants(r, "C_+")
            * cell_constants(r, "C_+'")
            * root_product_constant(r, "C+'_w'")
            / c_plus(r)
        )
    if prop_id == "almost-spherical-almost-pi-modular":
        C = cell_constants(r, "C")
        return C**-1 * C**2 * root_product_constant(r, "C-_w'") / c_plus(r) / (1 - Y)
    if prop_id == "almost-spherical-unimodular-nonsplit":
        return (
            cell_constants(r, "C") ** -1
            * cell_constants(r, "C_-")
            * cell_constants(r, "C_-'")
            * root_product_constant(r, "C-'_w'")
            / c_plus(r)
            / (1 - Y)
        )
    raise InvalidName(f"unknown proposition id {prop_id!r}")


def zeta_penultimate_lines(prop_id: str, r: int) -> list[RatFunc]:
    """Intermediate displayed coefficients before the final simplification."""
    q = BASE.q
    R = range(1, r + 1)
    if prop_id == "spherical-unimodular-split":
        return [
            _prod((1 + qs(i, 1)) * (1 + qs(-i + 1, -1)) / (1 + q**i) ** 2 for i in R)
            * _half_power(r)
            * (1 + qs(0, -1))
            / (1 + qs(-r, -1))
        ]
    if prop_id == "almost-spherical-almost-pi-modular":
        C = 2 * (q + 1) / ((-q) ** r * q * (q**r + 1) * (q ** (r - 1) + 1))
        return [C * (1 - qs(0, -2)) / (1 - qs(-2 * r, -2)) / (1 - BASE.Y)]
    if prop_id == "almost-spherical-unimodular-nonsplit":
        return [
            _prod((1 + qs(-1 + i, 1)) * (1 + qs(-i, -1)) / (1 + q**i) ** 2 for i in R)
            * q
            * (q**r + 1)
            * (q ** (r - 1) + 1)
            / (2 * (q + 1))
            * (-1) ** r
            * _half_power(r)
            / (1 - qs(-r, -1))
        ]
    return []


def zeta_closed_form(prop_id: str, r: int, bound: int = 5) -> ZetaClosedForm:
    """Closed form of a doubling zeta integral, built by two independent routes."""
    if prop_id not in PROP_IDS:
        raise InvalidName(f"unknown proposition id {prop_id!r}")
    if not 1 <= r <= bound:
        raise OutOfRange(f"rank {r} outside 1..{bound}")
    display = zeta_coefficient_display(prop_id, r)
    chain = zeta_coefficient_chain(prop_id, r)
    if chain != display:
        raise IdentityFailed(
            f"{prop_id} at r={r}: reassembled coefficient differs from the displayed one",
            {"chain": chain.to_text(), "display": display.to_text()},
        )
    for k, line in enumerate(zeta_penultimate_lines(prop_id, r)):
        if line != display:
            raise IdentityFailed(f"{prop_id} at r={r}: intermediate line {k} differs", line.to_text())
    ctx = VarContext(r)
    value = lift(display, ctx) * l_over_b(prop_id, r)
    return ZetaClosedForm(value, prop_id, r, "generic", display)


SPECIAL_VALUE_DISPLAY: dict[str, Callable[[int], RatFunc]] = {
    "spherical-pi-modular": lambda r: BASE.const(1),
    "spherical-unimodular-split": lambda r: 4 / (BASE.q ** (r * r - r) * (1 + BASE.q**r) ** 2),
    "almost-spherical-almost-pi-modular": lambda r: 2
    * (BASE.q + 1)
    / ((-BASE.q) ** r * BASE.q * (BASE.q**r + 1) * (BASE.q ** (r - 1) + 1))
    * 2
    / (1 - BASE.q ** (-2 * r)),
    "almost-spherical-unimodular-nonsplit": lambda r: (-1) ** r
    * BASE.q
    * (BASE.q ** (r - 1) + 1)
    / (BASE.q ** (r * r) * (BASE.q + 1))
    / (BASE.q**r - 1),
}


def special_value_s0(prop_id: str, r: int) -> RatFunc:
    """Coefficient of ``L(1/2) / b_2r(0)`` at ``s = 0``, checked against its display."""
    form = zeta_closed_form(prop_id, r)
    if lift(form.coefficient, VarContext(r)) * l_over_b(prop_id, r) != form.value:
        raise IdentityFailed(f"{prop_id} at r={r}: value does not factor through L / b")
    constant = at_s0(form.coefficient)
    expected = SPECIAL_VALUE_DISPLAY[prop_id](r)
    if constant != expected:
        raise IdentityFailed(
            f"{prop_id} at r={r}: s = 0 coefficient differs from the display",
            {"computed": constant.to_text(), "display": expected.to_text()},
        )
    return expected


def almost_spherical_at_half() -> RatFunc:
    """The ``r = 1``, ``sigma = 1/2`` value, checked against its display."""
    form = zeta_closed_form("almost-spherical-almost-pi-modular", 1)
    value = substitute(form.value, {"X1": BASE.t}, BASE)
    Y, q = BASE.Y, BASE.q
    display = -(1 + Y) / q**2 / (1 - Y / q)
    if value != display:
        raise IdentityFailed("r=1, sigma=1/2 value differs", {"value": value.to_text(), "display": display.to_text()})
    return display


# --------------------------------------------------------------------------
# M-dagger and the epsilon factor


def c_minus_r(r: int) -> RatFunc:
    """``c_-^r(s) = 2(1+q)(1+q^-s) / ((-q)^r q (1+q^(r-1)) (1+q^r) (1-q^(-2s-2r)))``."""
    q = BASE.q
    return 2 * (1 + q) * (1 + qs(0, -1)) / ((-q) ** r * q * (1 + q ** (r - 1)) * (1 + q**r) * (1 - qs(-2 * r, -2)))


def _mdagger_lines(r: int) -> list[RatFunc]:
    n = 2 * r
    q = BASE.q
    pre = q ** (-n)
    I = range(1, n + 1)
    a, b = lfactor("a", r), lfactor("b", r)
    c, c_neg = c_minus_r(r), negate_s(c_minus_r(r))
    return [
        pre
        * _prod(zeta_E(n - i - j + 1, 2) / zeta_E(n - i - j + 2, 2) for i in I for j in I if i < j)
        * _prod(zeta_E(n - 2 * i + 1, 2) / zeta_E(n - 2 * i, 2) for i in I),
        pre
        * _prod(zeta_E(n - 2 * j + 2, 2) / zeta_E(n - j + 1, 2) for j in I)
        * _prod(zeta_E(n - 2 * i + 1, 2) / zeta_E(n - 2 * i, 2) for i in I),
        pre * zeta_E(n, 2) / zeta_E(-n, 2) * _prod(zeta_E(n - 2 * i + 1, 2) / zeta_E(n - i + 1, 2) for i in I),
        pre * zeta_E(n, 2) / zeta_E(-n, 2) * _prod(zeta_E(-2 * i + 1, 2) / zeta_E(2 * i, 2) for i in range(1, r + 1)),
        -qs(0, -2) * zeta_E(n, 2) / zeta_E(n, -2) * a / b,
        -qs(0, -1) * c / c_neg * a / b,
    ]


def mdagger_epsilon_check(r: int, bound: int = 4) -> dict:
    """Verify the displayed intertwining identities and the resulting scalars."""
    if not 1 <= r <= bound:
        raise OutOfRange(f"rank {r} outside 1..{bound}")
    lines = _mdagger_lines(r)
    chain = _check_chain("M(s) scalar", lines)
    bad = _failed_lines(chain)
    if bad:
        raise IdentityFailed(f"M(s) chain at r={r}: line {bad[0]} differs from line 0", chain)
    a, b = lfactor("a", r), lfactor("b", r)
    b_neg = lfactor("b", r, negate=True)
    c, c_neg = c_minus_r(r), negate_s(c_minus_r(r))
    zeta_ratio = zeta_E(2 * r, 2) / zeta_E(2 * r, -2)
    identities = {
        "b closed form": b == b_closed(r),
        "c ratio, first form": c / c_neg == (1 + qs(0, -1)) / (1 + qs(0, 1)) * zeta_ratio,
        "c ratio, second form": c / c_neg == qs(0, -1) * zeta_ratio,
        "(1+q^-s)/(1+q^s) = q^-s": (1 + qs(0, -1)) / (1 + qs(0, 1)) == qs(0, -1),
    }
    m_scalar = lines[-1]
    dagger = b_neg / a * m_scalar
    identities["M-dagger scalar"] = dagger == -qs(0, -1) * b_neg / b * c / c_neg
    # normalised section f~(s) = b(s)/c(s) f(s):  M-dagger f~(s) = lam(s) f~(-s)
    lam = b / c * dagger / (b_neg / c_neg)
    identities["functional-equation scalar is -q^-s"] = lam == -qs(0, -1)
    identities["lam(s) lam(-s) = 1"] = lam * negate_s(lam) == BASE.const(1)
    epsilon = -qs(Fraction(1, 2), -1)
    identities["epsilon = lam(s - 1/2)"] = shift_s(lam, Fraction(-1, 2)) == epsilon
    failed = [k for k, ok in identities.items() if not ok]
    if failed:
        raise IdentityFailed(f"M-dagger identities fail at r={r}: {failed}", identities)
    return {
        "rank": r,
        "chain_lines": len(lines),
        "identities": sorted(identities),
        "scalar": lam.to_text(),
        "status": "pass",
    }


# --------------------------------------------------------------------------
# global constants


def corollary_constants(r: int) -> tuple[RatFunc, RatFunc]:
    """``(S', S)`` local constants, transcribed from their display."""
    if r < 1:
        raise OutOfRange("rank must be positive")
    q = BASE.q
    s_prime = (q ** (r - 1) + 1) / (q ** (r * r - 1) * (q + 1) * (q**r - 1))
    s_const = q ** (r - 1) * (q + 1) / ((q ** (2 * r - 1) + 1) * (q ** (2 * r) - 1))
    return s_prime, s_const
