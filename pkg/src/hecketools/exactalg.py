"""Exact arithmetic: Laurent polynomials, rational functions and unit angles.

Everything here is immutable.  Coefficients are Python ``int`` or
``fractions.Fraction``; exponent vectors are tuples of ints indexed by an
ordered tuple of variable names.

Rational functions keep their denominator as a multiset of *atoms*
(content-free Laurent polynomials with leading coefficient 1).  Sums use the
least common multiple of the two atom multisets and every result is reduced by
trial division of the numerator by its denominator atoms.  No multivariate gcd
is ever computed, so representations are not canonical; equality is decided by
cross-multiplication.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Iterable, Mapping, Sequence, Union

from .errors import (
    ContextMismatch,
    DivisionByZero,
    EvalPole,
    RankMismatch,
    SubstitutionPole,
)

Coeff = Union[int, Fraction]
Exps = tuple[int, ...]

__all__ = [
    "VarContext",
    "LaurentPoly",
    "RatFunc",
    "UnitAngle",
    "ratfunc_arith",
    "ratfunc_eq",
    "substitute",
    "weyl_act_vars",
    "specialize_doubled",
    "eval_numeric",
    "exact_sqrt",
    "pack_poly",
    "unpack_poly",
    "packed_mul",
    "packed_add",
]


def _norm_coeff(c: Any) -> Coeff:
    if isinstance(c, int):
        return c
    c = Fraction(c)
    return c.numerator if c.denominator == 1 else c


def _grlex(e: Exps) -> tuple[int, Exps]:
    return (sum(e), e)


def _coeff_pair(c: Coeff) -> tuple[int, int]:
    f = Fraction(c)
    return (f.numerator, f.denominator)


# --------------------------------------------------------------------------
# variable contexts


@dataclass(frozen=True)
class VarContext:
    """The ordered variables ``t, X1..Xn, Y`` with t = q^(1/2), Xi = q^sigma_i, Y = q^-s.

    ``rank = 0`` is the two-variable ring in ``t`` and ``Y`` used for values
    after specialising the Satake parameter.
    """

    rank: int

    def __post_init__(self) -> None:
        if self.rank < 0:
            raise ValueError("rank must be non-negative")

    @property
    def names(self) -> tuple[str, ...]:
        return ("t",) + tuple(f"X{i}" for i in range(1, self.rank + 1)) + ("Y",)

    @classmethod
    def from_names(cls, names: Sequence[str]) -> "VarContext":
        names = tuple(names)
        ctx = cls(len(names) - 2)
        if ctx.names != names:
            raise ContextMismatch(f"{names} is not a standard variable context")
        return ctx

    def index(self, name: str) -> int:
        return self.names.index(name)

    def monomial(self, exps: Mapping[str, int] | Sequence[int], coeff: Any = 1) -> "RatFunc":
        return RatFunc(LaurentPoly.monomial(self.names, exps, coeff))

    def const(self, c: Any) -> "RatFunc":
        return RatFunc(LaurentPoly.constant(self.names, c))

    @property
    def t(self) -> "RatFunc":
        return self.monomial({"t": 1})

    @property
    def q(self) -> "RatFunc":
        return self.monomial({"t": 2})

    @property
    def Y(self) -> "RatFunc":
        return self.monomial({"Y": 1})

    def X(self, i: int) -> "RatFunc":
        if not 1 <= i <= self.rank:
            raise RankMismatch(f"X{i} is not a variable of a rank-{self.rank} context")
        return self.monomial({f"X{i}": 1})

    def q_pow(self, half_exponent: int) -> "RatFunc":
        """``q^(k/2) = t^k``."""
        return self.monomial({"t": half_exponent})


# --------------------------------------------------------------------------
# Laurent polynomials


class LaurentPoly:
    """Sparse Laurent polynomial ``{exponent tuple: coefficient}`` over named variables."""

    __slots__ = ("vars", "_terms", "_hash")

    def __init__(
        self,
        vars: Sequence[str],
        terms: Mapping[Exps, Any] | None = None,
        *,
        _trusted: bool = False,
    ) -> None:
        self.vars: tuple[str, ...] = tuple(vars)
        self._hash: int | None = None
        if _trusted:
            self._terms: dict[Exps, Coeff] = terms  # type: ignore[assignment]
            return
        n = len(self.vars)
        clean: dict[Exps, Coeff] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != n:
                raise ContextMismatch(f"exponent {e} does not match variables {self.vars}")
            c = _norm_coeff(c)
            if c:
                clean[e] = clean.get(e, 0) + c
                if not clean[e]:
                    del clean[e]
        self._terms = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, vars: Sequence[str]) -> "LaurentPoly":
        return cls(vars, {}, _trusted=True)

    @classmethod
    def constant(cls, vars: Sequence[str], c: Any) -> "LaurentPoly":
        vars = tuple(vars)
        c = _norm_coeff(c)
        return cls(vars, {(0,) * len(vars): c} if c else {}, _trusted=True)

    @classmethod
    def monomial(
        cls, vars: Sequence[str], exps: Mapping[str, int] | Sequence[int], coeff: Any = 1
    ) -> "LaurentPoly":
        vars = tuple(vars)
        if isinstance(exps, Mapping):
            e = [0] * len(vars)
            for name, k in exps.items():
                try:
                    e[vars.index(name)] += k
                except ValueError:
                    raise ContextMismatch(f"unknown variable {name!r}") from None
            exps = e
        return cls(vars, {tuple(exps): coeff})

    @classmethod
    def variable(cls, vars: Sequence[str], name: str, power: int = 1) -> "LaurentPoly":
        return cls.monomial(vars, {name: power})

    # -- basic queries ------------------------------------------------------

    @property
    def terms(self) -> Mapping[Exps, Coeff]:
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_constant(self) -> bool:
        if not self._terms:
            return True
        return len(self._terms) == 1 and not any(next(iter(self._terms)))

    def constant_value(self) -> Coeff:
        if not self.is_constant():
            raise ValueError("not a constant")
        return next(iter(self._terms.values()), 0)

    def sorted_terms(self) -> list[tuple[Exps, Coeff]]:
        """Terms in decreasing graded-lex order."""
        return sorted(self._terms.items(), key=lambda kv: _grlex(kv[0]), reverse=True)

    def leading_term(self) -> tuple[Exps, Coeff]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self._terms, key=_grlex)
        return e, self._terms[e]

    def min_exponents(self) -> Exps:
        return tuple(min(col) for col in zip(*self._terms))

    def max_exponents(self) -> Exps:
        return tuple(max(col) for col in zip(*self._terms))

    def sort_key(self) -> tuple:
        return tuple((e, _coeff_pair(c)) for e, c in self.sorted_terms())

    def degree_in(self, name: str) -> tuple[int, int]:
        """(lowest, highest) exponent of one variable."""
        i = self.vars.index(name)
        ks = [e[i] for e in self._terms]
        return (min(ks), max(ks))

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other: Any) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            if other.vars != self.vars:
                raise ContextMismatch(f"{self.vars} vs {other.vars}")
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentPoly.constant(self.vars, other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: Any) -> "LaurentPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if len(other._terms) > len(self._terms):
            big, small = other._terms, self._terms
        else:
            big, small = self._terms, other._terms
        out = dict(big)
        for e, c in small.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return LaurentPoly(self.vars, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.vars, {e: -c for e, c in self._terms.items()}, _trusted=True)

    def __sub__(self, other: Any) -> "LaurentPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e, 0) - c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return LaurentPoly(self.vars, out, _trusted=True)

    def __rsub__(self, other: Any) -> "LaurentPoly":
        return (-self) + other

    def __mul__(self, other: Any) -> "LaurentPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._terms, other._terms
        if not a or not b:
            return LaurentPoly.zero(self.vars)
        if len(a) < len(b):
            a, b = b, a
        out: dict[Exps, Coeff] = {}
        get = out.get
        for eb, cb in b.items():
            for ea, ca in a.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = get(e, 0) + ca * cb
        return LaurentPoly(self.vars, {e: c for e, c in out.items() if c}, _trusted=True)

    __rmul__ = __mul__

    def scale(self, c: Any) -> "LaurentPoly":
        c = _norm_coeff(c)
        if not c:
            return LaurentPoly.zero(self.vars)
        return LaurentPoly(self.vars, {e: v * c for e, v in self._terms.items()}, _trusted=True)

    def shift(self, exps: Exps) -> "LaurentPoly":
        """Multiply by the monomial with exponent vector ``exps``."""
        return LaurentPoly(
            self.vars,
            {tuple(x + y for x, y in zip(e, exps)): c for e, c in self._terms.items()},
            _trusted=True,
        )

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            if not self.is_monomial():
                raise ValueError("negative powers exist only for monomials")
            (e, c), = self._terms.items()
            return LaurentPoly(
                self.vars, {tuple(n * x for x in e): Fraction(1, 1) / Fraction(c) ** (-n)}
            )
        result = LaurentPoly.constant(self.vars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.constant(self.vars, other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.vars == other.vars and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self._terms.items())))
        return self._hash

    # -- structural maps ----------------------------------------------------

    def map_exponents(self, fn: Callable[[Exps], Exps], vars: Sequence[str] | None = None) -> "LaurentPoly":
        """Apply an exponent map that is injective on the support (e.g. a variable permutation)."""
        vars = self.vars if vars is None else tuple(vars)
        out: dict[Exps, Coeff] = {}
        for e, c in self._terms.items():
            ne = fn(e)
            v = out.get(ne, 0) + c
            if v:
                out[ne] = v
            else:
                out.pop(ne, None)
        return LaurentPoly(vars, out, _trusted=True)

    def substitute_monomials(
        self, images: Sequence[tuple[Coeff, Exps]], vars: Sequence[str]
    ) -> "LaurentPoly":
        """Replace variable ``i`` by the monomial ``images[i] = (coeff, exps)`` over ``vars``."""
        vars = tuple(vars)
        n = len(vars)
        out: dict[Exps, Coeff] = {}
        for e, c in self._terms.items():
            coeff: Coeff = c
            ne = [0] * n
            for k, (ic, ie) in zip(e, images):
                if k:
                    if ic != 1:
                        coeff = coeff * (Fraction(ic) ** k if k < 0 else ic**k)
                    for j, x in enumerate(ie):
                        if x:
                            ne[j] += k * x
            key = tuple(ne)
            v = out.get(key, 0) + coeff
            if v:
                out[key] = v
            else:
                out.pop(key, None)
        return LaurentPoly(vars, {e: _norm_coeff(c) for e, c in out.items()}, _trusted=True)

    def evaluate(self, values: Sequence[Any]) -> Fraction:
        total = Fraction(0)
        vals = [Fraction(v) for v in values]
        for e, c in self._terms.items():
            term = Fraction(c)
            for v, k in zip(vals, e):
                if k:
                    if v == 0 and k < 0:
                        raise EvalPole("negative power of zero")
                    term *= v**k
            total += term
        return total

    # -- canonical forms and exact division ---------------------------------

    def canonical(self) -> tuple[Coeff, Exps, "LaurentPoly"]:
        """Split ``self = c * x^m * P`` with P content-free and of leading coefficient 1."""
        if not self._terms:
            raise DivisionByZero("zero polynomial has no canonical form")
        m = self.min_exponents()
        _, lc = self.leading_term()
        inv = Fraction(1) / Fraction(lc)
        p = LaurentPoly(
            self.vars,
            {
                tuple(x - y for x, y in zip(e, m)): _norm_coeff(c * inv)
                for e, c in self._terms.items()
            },
            _trusted=True,
        )
        return _norm_coeff(lc), m, p

    def exact_divide(self, divisor: "LaurentPoly") -> "LaurentPoly | None":
        """Return ``self / divisor`` when it is a Laurent polynomial, else ``None``."""
        if not divisor._terms:
            raise DivisionByZero("division by the zero polynomial")
        if not self._terms:
            return self
        dc, dm, dp = divisor.canonical()
        sm = self.min_exponents()
        num = self.shift(tuple(-x for x in sm))
        quot = _poly_divide(num, dp)
        if quot is None:
            return None
        shift = tuple(x - y for x, y in zip(sm, dm))
        return quot.shift(shift).scale(Fraction(1) / Fraction(dc))

    # -- display ------------------------------------------------------------

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        parts: list[str] = []
        for e, c in self.sorted_terms():
            mon = "*".join(
                (name if k == 1 else f"{name}^{k}") for name, k in zip(self.vars, e) if k
            )
            c = Fraction(c)
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if mon:
                body = mon if a == 1 else f"{a}*{mon}"
            else:
                body = str(a)
            parts.append(f" {sign} {body}")
        s = "".join(parts).strip()
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    def to_latex(self) -> str:
        if not self._terms:
            return "0"
        out: list[str] = []
        for e, c in self.sorted_terms():
            mon = " ".join(
                (_latex_name(name) if k == 1 else f"{_latex_name(name)}^{{{k}}}")
                for name, k in zip(self.vars, e)
                if k
            )
            c = Fraction(c)
            a = abs(c)
            if a.denominator != 1:
                num = f"\\frac{{{a.numerator}}}{{{a.denominator}}}"
            else:
                num = str(a.numerator)
            body = (mon if a == 1 else f"{num} {mon}") if mon else num
            out.append(("-" if c < 0 else "+") + " " + body)
        s = " ".join(out)
        return s[2:] if s.startswith("+ ") else "-" + s[1:]

    def __repr__(self) -> str:
        return f"LaurentPoly({self.to_text()})"

    def json_terms(self) -> list[list]:
        out = []
        for e, c in self.sorted_terms():
            f = Fraction(c)
            out.append([f.numerator, f.denominator, list(e)])
        return out

    @classmethod
    def from_json_terms(cls, vars: Sequence[str], rows: Iterable[Sequence]) -> "LaurentPoly":
        return cls(vars, {tuple(e): Fraction(n, d) for n, d, e in rows})


def _latex_name(name: str) -> str:
    if name.startswith("X") and name[1:].isdigit():
        return f"X_{{{name[1:]}}}"
    if name == "w":
        return r"\varpi"
    return name


def _poly_divide(num: LaurentPoly, den: LaurentPoly) -> LaurentPoly | None:
    """Exact division of genuine polynomials (non-negative exponents); ``None`` if inexact.

    ``den`` must be content-free with leading coefficient 1.  For such a
    divisor the division algorithm meets a non-divisible leading term exactly
    when the division is inexact, so we stop at the first one.
    """
    lt_e, lt_c = den.leading_term()
    if lt_c != 1:
        raise ValueError("divisor must be monic")
    if len(den) == 1:
        if any(lt_e):
            raise ValueError("divisor must be content-free")
        return num
    tail = [(e, c) for e, c in den._terms.items() if e != lt_e]
    rem = dict(num._terms)
    heap = [(-sum(e), tuple(-x for x in e)) for e in rem]
    heapq.heapify(heap)
    quot: dict[Exps, Coeff] = {}
    while rem:
        negdeg, nege = heapq.heappop(heap)
        e = tuple(-x for x in nege)
        c = rem.pop(e, None)
        if c is None:
            continue
        d = tuple(x - y for x, y in zip(e, lt_e))
        if any(x < 0 for x in d):
            return None
        quot[d] = c
        for fe, fc in tail:
            ne = tuple(x + y for x, y in zip(d, fe))
            v = rem.get(ne, 0) - c * fc
            if v:
                if ne not in rem:
                    heapq.heappush(heap, (-sum(ne), tuple(-x for x in ne)))
                rem[ne] = v
            else:
                rem.pop(ne, None)
    return LaurentPoly(num.vars, quot, _trusted=True)


_FILTER_PRIME = (1 << 61) - 1


@lru_cache(maxsize=None)
def _filter_power(i: int, k: int) -> int:
    return pow(3, (7 * i + 5) * k, _FILTER_PRIME)


def _univariate_image(p: LaurentPoly) -> dict[int, int] | None:
    """Image in ``F_P[T, 1/T]`` under ``x_i -> 3^(7i+5) T``; ``None`` if a denominator hits P."""
    out: dict[int, int] = {}
    for e, c in p._terms.items():
        if isinstance(c, int):
            v = c
        else:
            if c.denominator % _FILTER_PRIME == 0:
                return None
            v = c.numerator * pow(c.denominator, -1, _FILTER_PRIME)
        for i, k in enumerate(e):
            if k:
                v = v * _filter_power(i, k) % _FILTER_PRIME
        d = sum(e)
        out[d] = (out.get(d, 0) + v) % _FILTER_PRIME
    return {d: v for d, v in out.items() if v}


_atom_image = lru_cache(maxsize=4096)(_univariate_image)


def _may_divide(a: dict[int, int] | None, den: LaurentPoly) -> bool:
    """Cheap necessary condition for ``den | num`` given ``a``, the image of ``num`` mod P.

    A ``False`` is only wrong if P divides a quotient coefficient; callers use
    it to skip a cancellation, which never affects correctness.
    """
    b = _atom_image(den)
    if a is None or b is None or len(b) <= 1 or not a:
        return True
    lo_b, hi_b = min(b), max(b)
    inv = pow(b[hi_b], -1, _FILTER_PRIME)
    rem = dict(a)
    # a nonzero multiple of b spans at least hi_b - lo_b degrees
    while rem and max(rem) - min(rem) >= hi_b - lo_b:
        top = max(rem)
        f = rem.pop(top) * inv % _FILTER_PRIME
        shift = top - hi_b
        for d, v in b.items():
            if d == hi_b:
                continue
            nd = d + shift
            nv = (rem.get(nd, 0) - f * v) % _FILTER_PRIME
            if nv:
                rem[nd] = nv
            else:
                rem.pop(nd, None)
    return not rem


# --------------------------------------------------------------------------
# packed polynomials: exponent vectors folded into one integer

PACK_BASE = 1 << 20

Packed = dict  # {packed exponent: coefficient}


def pack_exponents(e: Exps) -> int:
    """``sum_i e_i B^i``; injective for ``|e_i| < B/2`` and additive."""
    out = 0
    for x in reversed(e):
        out = out * PACK_BASE + x
    return out


def unpack_exponents(k: int, n: int) -> Exps:
    out = []
    half = PACK_BASE // 2
    for _ in range(n):
        d = k % PACK_BASE
        if d >= half:
            d -= PACK_BASE
        out.append(d)
        k = (k - d) // PACK_BASE
    if k:
        raise OverflowError("exponent out of the packing range")
    return tuple(out)


def pack_poly(p: LaurentPoly) -> Packed:
    return {pack_exponents(e): c for e, c in p.terms.items()}


def unpack_poly(d: Packed, vars: Sequence[str]) -> LaurentPoly:
    vars = tuple(vars)
    return LaurentPoly(vars, {unpack_exponents(k, len(vars)): c for k, c in d.items() if c})


def packed_mul(a: Packed, b: Packed) -> Packed:
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return {}
    items = iter(b.items())
    k0, c0 = next(items)
    if c0 == 1:
        out: Packed = {k + k0: c for k, c in a.items()}
    else:
        out = {k + k0: c * c0 for k, c in a.items()}
    get = out.get
    for kb, cb in items:
        for ka, ca in a.items():
            k = ka + kb
            out[k] = get(k, 0) + ca * cb
    return {k: c for k, c in out.items() if c}


def packed_add(a: Packed, b: Packed) -> Packed:
    out = dict(a)
    get = out.get
    for k, c in b.items():
        v = get(k, 0) + c
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return out


# --------------------------------------------------------------------------
# rational functions

_Den = tuple[tuple[LaurentPoly, int], ...]


def _sorted_den(den: Mapping[LaurentPoly, int]) -> _Den:
    return tuple(sorted(((a, m) for a, m in den.items() if m), key=lambda am: am[0].sort_key()))


def _den_product(vars: tuple[str, ...], den: Iterable[tuple[LaurentPoly, int]]) -> LaurentPoly:
    out = LaurentPoly.constant(vars, 1)
    for a, m in den:
        for _ in range(m):
            out = out * a
    return out


class RatFunc:
    """Quotient of Laurent polynomials with a factored, normalised denominator.

    The stored denominator is a product of atoms: content-free Laurent
    polynomials whose graded-lex leading coefficient is 1.  Monomials and
    scalars are absorbed in the numerator.  Instances are unhashable because
    distinct representations can be equal.
    """

    __slots__ = ("vars", "_num", "_den")
    __hash__ = None  # type: ignore[assignment]

    def __init__(self, num: LaurentPoly | Any, den: LaurentPoly | Any = None) -> None:
        if not isinstance(num, LaurentPoly):
            if isinstance(den, LaurentPoly):
                num = LaurentPoly.constant(den.vars, num)
            else:
                raise TypeError("RatFunc needs at least one LaurentPoly to fix the variables")
        self.vars = num.vars
        if den is None:
            self._num = num
            self._den: _Den = ()
            return
        if not isinstance(den, LaurentPoly):
            den = LaurentPoly.constant(num.vars, den)
        if den.vars != num.vars:
            raise ContextMismatch(f"{num.vars} vs {den.vars}")
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        built = RatFunc._build(num, [(den, 1)])
        self._num, self._den = built._num, built._den

    @classmethod
    def _raw(cls, num: LaurentPoly, den: _Den) -> "RatFunc":
        obj = cls.__new__(cls)
        obj.vars = num.vars
        obj._num = num
        obj._den = den
        return obj

    @classmethod
    def _build(cls, num: LaurentPoly, factors: Iterable[tuple[LaurentPoly, int]]) -> "RatFunc":
        """Normalise arbitrary (non-canonical) denominator factors, then cancel."""
        den: dict[LaurentPoly, int] = {}
        for f, m in factors:
            if not m:
                continue
            if f.is_zero():
                raise DivisionByZero("zero denominator factor")
            c, mono, atom = f.canonical()
            inv = Fraction(1) / Fraction(c) ** m
            num = num.shift(tuple(-m * x for x in mono)).scale(inv)
            if len(atom) > 1:
                den[atom] = den.get(atom, 0) + m
        return cls._reduce(num, den)

    @classmethod
    def _reduce(cls, num: LaurentPoly, den: dict[LaurentPoly, int]) -> "RatFunc":
        if num.is_zero():
            return cls._raw(num, ())
        if num.is_monomial():
            return cls._raw(num, _sorted_den(den))
        image = _univariate_image(num)
        for atom in list(den):
            m = den[atom]
            while m:
                if not _may_divide(image, atom):
                    break
                h = num.exact_divide(atom)
                if h is None:
                    break
                num = h
                image = _univariate_image(num)
                m -= 1
            den[atom] = m
            if num.is_monomial():
                break
        return cls._raw(num, _sorted_den(den))

    # -- accessors ----------------------------------------------------------

    @property
    def num(self) -> LaurentPoly:
        return self._num

    @property
    def den(self) -> LaurentPoly:
        return _den_product(self.vars, self._den)

    @property
    def den_factors(self) -> _Den:
        return self._den

    @property
    def context(self) -> VarContext:
        return VarContext.from_names(self.vars)

    def is_zero(self) -> bool:
        return self._num.is_zero()

    def __bool__(self) -> bool:
        return not self._num.is_zero()

    def is_polynomial(self) -> bool:
        return not self._den

    def is_constant(self) -> bool:
        return not self._den and self._num.is_constant()

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other: Any) -> "RatFunc":
        if isinstance(other, RatFunc):
            if other.vars != self.vars:
                raise ContextMismatch(f"{self.vars} vs {other.vars}")
            return other
        if isinstance(other, LaurentPoly):
            if other.vars != self.vars:
                raise ContextMismatch(f"{self.vars} vs {other.vars}")
            return RatFunc._raw(other, ())
        if isinstance(other, (int, Fraction)):
            return RatFunc._raw(LaurentPoly.constant(self.vars, other), ())
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: Any) -> "RatFunc":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other._num.is_zero():
            return self
        if self._num.is_zero():
            return other
        if self._den == other._den:
            return RatFunc._reduce(self._num + other._num, dict(self._den))
        da, db = dict(self._den), dict(other._den)
        lcm = dict(da)
        for a, m in db.items():
            if m > lcm.get(a, 0):
                lcm[a] = m
        fa = _den_product(self.vars, ((a, m - da.get(a, 0)) for a, m in lcm.items()))
        fb = _den_product(self.vars, ((a, m - db.get(a, 0)) for a, m in lcm.items()))
        return RatFunc._reduce(self._num * fa + other._num * fb, lcm)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc._raw(-self._num, self._den)

    def __sub__(self, other: Any) -> "RatFunc":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Any) -> "RatFunc":
        return (-self) + other

    def __mul__(self, other: Any) -> "RatFunc":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self._num.is_zero() or other._num.is_zero():
            return RatFunc._raw(LaurentPoly.zero(self.vars), ())
        if not other._den and other._num.is_monomial():
            return RatFunc._raw(self._num * other._num, self._den)
        if not self._den and self._num.is_monomial():
            return RatFunc._raw(self._num * other._num, other._den)
        den = dict(self._den)
        for a, m in other._den:
            den[a] = den.get(a, 0) + m
        return RatFunc._reduce(self._num * other._num, den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self._num.is_zero():
            raise DivisionByZero("inverse of the zero rational function")
        return RatFunc._build(self.den, [(self._num, 1)])

    def __truediv__(self, other: Any) -> "RatFunc":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other._num.is_zero():
            raise DivisionByZero("division by the zero rational function")
        if not other._den and other._num.is_monomial():
            return RatFunc._raw(self._num * other._num ** -1, self._den)
        return self * other.inverse()

    def __rtruediv__(self, other: Any) -> "RatFunc":
        return self._coerce(other) / self

    def __pow__(self, n: int) -> "RatFunc":
        if n < 0:
            return self.inverse() ** (-n)
        if not self._den and self._num.is_monomial():
            return RatFunc._raw(self._num**n, ())
        result = RatFunc._raw(LaurentPoly.constant(self.vars, 1), ())
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        try:
            o = self._coerce(other)
        except ContextMismatch:
            raise
        if o is NotImplemented:
            return NotImplemented
        return ratfunc_eq(self, o)

    # -- maps ---------------------------------------------------------------

    def map_exponents(self, fn: Callable[[Exps], Exps]) -> "RatFunc":
        """Apply an invertible linear exponent map to numerator and atoms."""
        return RatFunc._build(
            self._num.map_exponents(fn), [(a.map_exponents(fn), m) for a, m in self._den]
        )

    def substitute_monomials(
        self, images: Sequence[tuple[Coeff, Exps]], vars: Sequence[str]
    ) -> "RatFunc":
        vars = tuple(vars)
        num = self._num.substitute_monomials(images, vars)
        factors = []
        for a, m in self._den:
            img = a.substitute_monomials(images, vars)
            if img.is_zero():
                raise SubstitutionPole(f"denominator factor {a.to_text()} vanishes")
            factors.append((img, m))
        return RatFunc._build(num, factors)

    def evaluate(self, values: Sequence[Any]) -> Fraction:
        d = self.den.evaluate(values)
        if d == 0:
            raise EvalPole("denominator vanishes at the evaluation point")
        return self._num.evaluate(values) / d

    # -- display and serialisation ------------------------------------------

    def to_text(self) -> str:
        n = self._num.to_text()
        if not self._den:
            return n
        parts = []
        for a, m in self._den:
            s = f"({a.to_text()})"
            parts.append(s if m == 1 else f"{s}^{m}")
        return f"({n})/({'*'.join(parts)})"

    def to_latex(self) -> str:
        n = self._num.to_latex()
        if not self._den:
            return n
        parts = []
        for a, m in self._den:
            s = f"\\left({a.to_latex()}\\right)"
            parts.append(s if m == 1 else f"{s}^{{{m}}}")
        return f"\\frac{{{n}}}{{{' '.join(parts)}}}"

    def __repr__(self) -> str:
        return f"RatFunc({self.to_text()})"

    def to_json(self) -> dict:
        return {
            "vars": list(self.vars),
            "num": self._num.json_terms(),
            "den": self.den.json_terms(),
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "RatFunc":
        vars = tuple(data["vars"])
        num = LaurentPoly.from_json_terms(vars, data["num"])
        den = LaurentPoly.from_json_terms(vars, data["den"])
        return cls(num, den)


def ratfunc_eq(a: RatFunc, b: RatFunc) -> bool:
    """Cross-multiplication test ``a.num * b.den == b.num * a.den``.

    Atoms shared by both denominators are cancelled from both sides first,
    which does not change the truth value.
    """
    if a.vars != b.vars:
        raise ContextMismatch(f"{a.vars} vs {b.vars}")
    da, db = dict(a._den), dict(b._den)
    if da == db:
        return a._num == b._num
    for atom in list(da):
        common = min(da[atom], db.get(atom, 0))
        if common:
            da[atom] -= common
            db[atom] -= common
    left = a._num * _den_product(a.vars, db.items())
    right = b._num * _den_product(a.vars, da.items())
    return left == right


_OPS: dict[str, Callable[[RatFunc, RatFunc], RatFunc]] = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}


def ratfunc_arith(a: RatFunc, b: RatFunc, op: str) -> RatFunc:
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown operation {op!r}") from None
    return fn(a, b)


def _monomial_image(img: Any, vars: tuple[str, ...]) -> tuple[Coeff, Exps]:
    if isinstance(img, RatFunc):
        if img._den:
            raise ValueError("substitution images must be monomials")
        img = img._num
    if isinstance(img, LaurentPoly):
        if img.vars != vars:
            raise ContextMismatch(f"image over {img.vars}, expected {vars}")
        if not img.is_monomial():
            raise ValueError(f"substitution image {img.to_text()} is not a monomial")
        (e, c), = img.terms.items()
        return c, e
    if isinstance(img, (int, Fraction)):
        return _norm_coeff(img), (0,) * len(vars)
    raise TypeError(f"cannot use {img!r} as a substitution image")


def substitute(
    f: RatFunc,
    mapping: Mapping[str, Any],
    target: Sequence[str] | VarContext | None = None,
) -> RatFunc:
    """Replace variables by Laurent monomials (with coefficients) over ``target``.

    Variables absent from ``mapping`` must also exist in ``target`` and are
    kept.  Raises :class:`SubstitutionPole` if the denominator becomes zero.
    """
    if isinstance(target, VarContext):
        tvars = target.names
    elif target is None:
        tvars = f.vars
    else:
        tvars = tuple(target)
    images: list[tuple[Coeff, Exps]] = []
    for name in f.vars:
        if name in mapping:
            images.append(_monomial_image(mapping[name], tvars))
        else:
            if name not in tvars:
                raise ContextMismatch(f"variable {name} has no image in {tvars}")
            e = [0] * len(tvars)
            e[tvars.index(name)] = 1
            images.append((1, tuple(e)))
    unknown = set(mapping) - set(f.vars)
    if unknown:
        raise ContextMismatch(f"unknown variables {sorted(unknown)}")
    return f.substitute_monomials(images, tvars)


def _images_of(w: Any) -> tuple[int, ...]:
    return tuple(getattr(w, "images", w))


def weyl_act_vars(f: RatFunc, w: Any) -> RatFunc:
    """Left action ``X_i -> X_{|w(i)|}^{sign w(i)}`` of a signed permutation."""
    images = _images_of(w)
    ctx = f.context
    if len(images) != ctx.rank:
        raise RankMismatch(f"element of rank {len(images)} acting on rank {ctx.rank}")
    if all(images[i] == i + 1 for i in range(len(images))):
        return f
    n = ctx.rank

    def fn(e: Exps) -> Exps:
        out = [0] * (n + 2)
        out[0] = e[0]
        out[-1] = e[-1]
        for i, wi in enumerate(images):
            if wi > 0:
                out[wi] = e[i + 1]
            else:
                out[-wi] = -e[i + 1]
        return tuple(out)

    return f.map_exponents(fn)


def specialize_doubled(f: RatFunc) -> RatFunc:
    """Substitute the doubled parameter ``X_i -> Y^-1 t^(2(r-i)+1)`` on a rank-2r context."""
    ctx = f.context
    if ctx.rank % 2:
        raise RankMismatch(f"doubled specialisation needs even rank, got {ctx.rank}")
    r = ctx.rank // 2
    target = VarContext(0)
    mapping = {
        f"X{i}": target.monomial({"Y": -1, "t": 2 * (r - i) + 1}) for i in range(1, 2 * r + 1)
    }
    return substitute(f, mapping, target)


def exact_sqrt(x: Any) -> Fraction:
    x = Fraction(x)
    if x < 0:
        raise ValueError("negative value has no real square root")
    n, d = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if n * n != x.numerator or d * d != x.denominator:
        raise ValueError(f"{x} is not the square of a rational")
    return Fraction(n, d)


def eval_numeric(
    f: RatFunc, q_val: Any, x_vals: Sequence[Any] = (), y_val: Any = 1
) -> Fraction:
    """Exact value at q = q_val (a rational square), X_i = x_vals[i-1], Y = y_val."""
    ctx = f.context
    if len(x_vals) != ctx.rank:
        raise RankMismatch(f"expected {ctx.rank} X-values, got {len(x_vals)}")
    t = exact_sqrt(q_val)
    return f.evaluate([t, *x_vals, y_val])


# --------------------------------------------------------------------------
# unit angles


@dataclass(frozen=True, order=True)
class UnitAngle:
    """A unitary parameter ``q^sigma = exp(2 pi i theta)`` stored as theta mod 1."""

    theta: Fraction

    def __init__(self, theta: Any) -> None:
        object.__setattr__(self, "theta", Fraction(theta) % 1)

    def __add__(self, other: "UnitAngle") -> "UnitAngle":
        return UnitAngle(self.theta + other.theta)

    def __neg__(self) -> "UnitAngle":
        return UnitAngle(-self.theta)

    def __sub__(self, other: "UnitAngle") -> "UnitAngle":
        return UnitAngle(self.theta - other.theta)

    def scaled(self, k: int) -> "UnitAngle":
        return UnitAngle(k * self.theta)

    def is_zero_mod(self, period: Any = 1) -> bool:
        """True when theta is an integer multiple of ``period`` (period divides 1)."""
        return (self.theta / Fraction(period)).denominator == 1

    def __repr__(self) -> str:
        return f"UnitAngle({self.theta})"
