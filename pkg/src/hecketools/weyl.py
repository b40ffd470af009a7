"""Signed permutations: the hyperoctahedral group W_n.

Generators are encoded as integers: ``0`` is the sign change of coordinate 1
(written ``w1``) and ``i >= 1`` is the transposition of ``i, i+1`` (written
``w{i},{i+1}``).  A word ``[g1, ..., gk]`` stands for the product
``g1 * g2 * ... * gk``, and products compose right to left:
``(a * b)(i) = a(b(i))``.

Three length functions are supported.  They agree on transpositions and give
the sign change ``w1`` the weight 1 (``TypeC``), 0 (``TypeD0``) or 2
(``Type2D``).
"""

from __future__ import annotations

import enum
import heapq
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import BoundExceeded, CounterexampleFound, IdentityFailed, RankMismatch
from .exactalg import LaurentPoly

DEFAULT_BOUND = 6


class LengthModel(enum.Enum):
    TypeC = "TypeC"
    TypeD0 = "TypeD0"
    Type2D = "Type2D"

    @property
    def sign_weight(self) -> int:
        """Length assigned to the sign change ``w1``."""
        return {"TypeC": 1, "TypeD0": 0, "Type2D": 2}[self.value]

    @property
    def shift(self) -> int:
        """``delta`` in the product ``[n]_q! prod (1 + q^(i + delta) x_i)``."""
        return self.sign_weight - 1


@dataclass(frozen=True, order=True)
class SignedPermutation:
    """``images[i-1] = w(i)``; ``w(-i) = -w(i)`` is implicit."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.images)
        if sorted(abs(x) for x in self.images) != list(range(1, n + 1)):
            raise ValueError(f"{self.images} is not a signed permutation")

    # -- construction -------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "SignedPermutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def generator(cls, n: int, g: int) -> "SignedPermutation":
        return cls(_generator_images(n, g))

    @classmethod
    def from_word(cls, n: int, word: Sequence[int]) -> "SignedPermutation":
        w = cls.identity(n)
        for g in word:
            w = w * cls.generator(n, g)
        return w

    @classmethod
    def sign_flips(cls, n: int, subset: Sequence[int]) -> "SignedPermutation":
        s = set(subset)
        return cls(tuple(-i if i in s else i for i in range(1, n + 1)))

    @classmethod
    def longest(cls, n: int) -> "SignedPermutation":
        return cls(tuple(-i for i in range(1, n + 1)))

    # -- group structure ----------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1] if i > 0 else -self.images[-i - 1]

    def __mul__(self, other: "SignedPermutation") -> "SignedPermutation":
        if not isinstance(other, SignedPermutation):
            return NotImplemented
        if other.rank != self.rank:
            raise RankMismatch(f"rank {self.rank} times rank {other.rank}")
        a = self.images
        return SignedPermutation(tuple(a[b - 1] if b > 0 else -a[-b - 1] for b in other.images))

    def inverse(self) -> "SignedPermutation":
        inv = [0] * self.rank
        for i, x in enumerate(self.images, start=1):
            if x > 0:
                inv[x - 1] = i
            else:
                inv[-x - 1] = -i
        return SignedPermutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(x == i for i, x in enumerate(self.images, start=1))

    def negated_set(self) -> frozenset[int]:
        """``I(w) = {|w(j)| : w(j) < 0}``."""
        return frozenset(-x for x in self.images if x < 0)

    def act_on_vector(self, v: Sequence[int]) -> tuple[int, ...]:
        """Linear action on coordinates: ``w(e_i) = sign(w(i)) e_|w(i)|``."""
        out = [0] * self.rank
        for i, x in enumerate(self.images):
            if x > 0:
                out[x - 1] += v[i]
            else:
                out[-x - 1] -= v[i]
        return tuple(out)

    def __str__(self) -> str:
        return "[" + ",".join(str(x) for x in self.images) + "]"


def _generator_images(n: int, g: int) -> tuple[int, ...]:
    if not 0 <= g < max(n, 1) or n == 0:
        raise ValueError(f"generator {g} does not exist in rank {n}")
    images = list(range(1, n + 1))
    if g == 0:
        images[0] = -1
    else:
        images[g - 1], images[g] = images[g], images[g - 1]
    return tuple(images)


def generator_name(g: int) -> str:
    return "w1" if g == 0 else f"w{g},{g + 1}"


def parse_generator(name: str) -> int:
    name = name.strip().replace("_", "").replace("{", "").replace("}", "")
    if name == "w1":
        return 0
    if name.startswith("w") and "," in name:
        a, b = (int(x) for x in name[1:].split(","))
        if b == a + 1:
            return a
    raise ValueError(f"unknown generator {name!r}")


def group_ops(a: SignedPermutation, b: SignedPermutation | None, op: str) -> SignedPermutation:
    if op == "mul":
        assert b is not None
        return a * b
    if op == "inv":
        return a.inverse()
    raise ValueError(f"unknown operation {op!r}")


def decompose_IT(w: SignedPermutation) -> tuple[frozenset[int], tuple[int, ...]]:
    """Return ``(I, tau)`` with ``w = w_I * w_tau``; tau as a tuple of images."""
    return w.negated_set(), tuple(abs(x) for x in w.images)


def recompose_IT(subset: Sequence[int], tau: Sequence[int]) -> SignedPermutation:
    n = len(tau)
    return SignedPermutation.sign_flips(n, subset) * SignedPermutation(tuple(tau))


def long_length(w: SignedPermutation) -> int:
    """Number of sign changes ``|I(w)|``."""
    return sum(1 for x in w.images if x < 0)


# --------------------------------------------------------------------------
# lengths


def type_c_length(w: SignedPermutation) -> int:
    """Signed inversion count: inversions + negative pair sums + negative entries."""
    a = w.images
    n = len(a)
    total = 0
    for i in range(n):
        ai = a[i]
        if ai < 0:
            total += 1
        for j in range(i + 1, n):
            if ai > a[j]:
                total += 1
            if ai + a[j] < 0:
                total += 1
    return total


def length(w: SignedPermutation, model: LengthModel | str = LengthModel.TypeC) -> int:
    model = LengthModel(model)
    return type_c_length(w) + (model.sign_weight - 1) * long_length(w)


def weighted_length_oracle(n: int, model: LengthModel | str) -> dict[SignedPermutation, int]:
    """Shortest weighted path from the identity in the Cayley graph (Dijkstra)."""
    model = LengthModel(model)
    gens = [(SignedPermutation.generator(n, g), model.sign_weight if g == 0 else 1) for g in range(n)]
    start = SignedPermutation.identity(n)
    dist = {start: 0}
    heap: list[tuple[int, tuple[int, ...]]] = [(0, start.images)]
    while heap:
        d, images = heapq.heappop(heap)
        w = SignedPermutation(images)
        if dist.get(w, math.inf) < d:
            continue
        for g, weight in gens:
            v = g * w
            nd = d + weight
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                heapq.heappush(heap, (nd, v.images))
    return dist


def is_left_descent(w: SignedPermutation, g: int) -> bool:
    """``l(g w) < l(w)`` for the Coxeter length."""
    a = w.images
    if g == 0:
        return 1 not in a
    # l(s_g w) < l(w) iff value g+1 "comes before" value g in signed order
    inv = w.inverse().images
    return inv[g] < inv[g - 1]


def reduced_word(w: SignedPermutation, model: LengthModel | str = LengthModel.TypeC) -> list[int]:
    """Lexicographically smallest reduced word (generator ``w1`` sorts first).

    Reduced words are those of the Coxeter length; ``model`` only changes
    what the word's weighted length is, not the word itself.
    """
    LengthModel(model)
    return list(_lex_word(w))


@lru_cache(maxsize=None)
def _lex_word(w: SignedPermutation) -> tuple[int, ...]:
    for g in range(w.rank):
        if is_left_descent(w, g):
            return (g,) + _lex_word(SignedPermutation.generator(w.rank, g) * w)
    return ()


@lru_cache(maxsize=None)
def all_reduced_words(w: SignedPermutation) -> tuple[tuple[int, ...], ...]:
    """Every reduced word of ``w``, in lexicographic order."""
    if w.is_identity():
        return ((),)
    out: list[tuple[int, ...]] = []
    for g in range(w.rank):
        if is_left_descent(w, g):
            rest = SignedPermutation.generator(w.rank, g) * w
            out.extend((g,) + word for word in all_reduced_words(rest))
    return tuple(out)


def word_weight(word: Sequence[int], model: LengthModel | str) -> int:
    model = LengthModel(model)
    return sum(model.sign_weight if g == 0 else 1 for g in word)


# --------------------------------------------------------------------------
# enumeration


def enumerate_group(n: int, bound: int = DEFAULT_BOUND) -> Iterator[SignedPermutation]:
    """All ``2^n n!`` elements, permutations in lex order then sign patterns."""
    if n > bound:
        raise BoundExceeded(f"rank {n} exceeds the enumeration bound {bound}")
    if n < 0:
        raise ValueError("rank must be non-negative")
    for perm in itertools.permutations(range(1, n + 1)):
        for signs in itertools.product((1, -1), repeat=n):
            yield SignedPermutation(tuple(s * p for s, p in zip(signs, perm)))


def group_order(n: int) -> int:
    return 2**n * math.factorial(n)


# --------------------------------------------------------------------------
# roots


def is_positive_root(v: Sequence[int]) -> bool:
    """Positive iff the nonzero coordinate of largest index is positive."""
    for x in reversed(v):
        if x:
            return x > 0
    raise ValueError("zero vector is not a root")


def root_vector(n: int, coeffs: dict[int, int]) -> tuple[int, ...]:
    v = [0] * n
    for i, c in coeffs.items():
        v[i - 1] += c
    return tuple(v)


def positive_roots(n: int, kind: str = "C") -> list[tuple[int, ...]]:
    """Positive roots: ``e_j - e_i``, ``e_i + e_j`` (i<j) and ``2e_i`` (C) or ``e_i`` (B)."""
    roots: list[tuple[int, ...]] = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            roots.append(root_vector(n, {j: 1, i: -1}))
            roots.append(root_vector(n, {i: 1, j: 1}))
        roots.append(root_vector(n, {i: 2 if kind == "C" else 1}))
    return roots


def inverted_roots(w: SignedPermutation, roots: Sequence[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """``{beta > 0 : w beta < 0}``."""
    return [b for b in roots if not is_positive_root(w.act_on_vector(b))]


def simple_root(n: int, g: int, kind: str = "C") -> tuple[int, ...]:
    if g == 0:
        return root_vector(n, {1: 2 if kind == "C" else 1})
    return root_vector(n, {g + 1: 1, g: -1})


# --------------------------------------------------------------------------
# generating-function identities


def _x_names(n: int) -> tuple[str, ...]:
    return ("t",) + tuple(f"x{i}" for i in range(1, n + 1))


def q_integer_poly(k: int, vars: Sequence[str]) -> LaurentPoly:
    """``[k]_q = 1 + q + ... + q^(k-1)`` with ``q = t^2`` (t is the first variable)."""
    n = len(vars)
    return LaurentPoly(vars, {(2 * j,) + (0,) * (n - 1): 1 for j in range(k)})


def q_factorial_poly(k: int, vars: Sequence[str]) -> LaurentPoly:
    out = LaurentPoly.constant(vars, 1)
    for j in range(1, k + 1):
        out = out * q_integer_poly(j, vars)
    return out


def poincare_sum(n: int, model: LengthModel | str, bound: int = DEFAULT_BOUND) -> LaurentPoly:
    """``sum_w q^l(w) prod_{i in I(w)} x_i`` by enumeration."""
    model = LengthModel(model)
    vars = _x_names(n)
    acc: dict[tuple[int, ...], int] = {}
    for w in enumerate_group(n, bound):
        neg = w.negated_set()
        e = (2 * length(w, model),) + tuple(1 if i in neg else 0 for i in range(1, n + 1))
        acc[e] = acc.get(e, 0) + 1
    return LaurentPoly(vars, acc)


def poincare_product(n: int, model: LengthModel | str) -> LaurentPoly:
    """``[n]_q! prod_i (1 + q^(i + delta) x_i)``."""
    model = LengthModel(model)
    vars = _x_names(n)
    out = q_factorial_poly(n, vars)
    for i in range(1, n + 1):
        e = [0] * (n + 1)
        e[0] = 2 * (i + model.shift)
        e[i] = 1
        out = out * (LaurentPoly.constant(vars, 1) + LaurentPoly(vars, {tuple(e): 1}))
    return out


def poincare_check(n: int, model: LengthModel | str, bound: int = DEFAULT_BOUND) -> dict:
    model = LengthModel(model)
    lhs = poincare_sum(n, model, bound)
    rhs = poincare_product(n, model)
    if lhs != rhs:
        raise IdentityFailed(
            f"generating identity fails for n={n}, {model.value}",
            {"difference": (lhs - rhs).to_text()},
        )
    return {
        "n": n,
        "model": model.value,
        "elements": group_order(n),
        "polynomial": rhs.to_text(),
        "status": "pass",
    }


def type_c_poincare_polynomial(n: int) -> LaurentPoly:
    """``prod_{i=1}^n [2i]_q`` in the variable t."""
    vars = ("t",)
    out = LaurentPoly.constant(vars, 1)
    for i in range(1, n + 1):
        out = out * q_integer_poly(2 * i, vars)
    return out


def lemma_trick_scan(n: int, bound: int = DEFAULT_BOUND) -> dict:
    """Check: ``l(w1 w) > l(w)`` forces ``1 not in I(w)`` and ``|I(w1 w)| = |I(w)| + 1``."""
    flip = SignedPermutation.generator(n, 0)
    scanned = 0
    applicable = 0
    bad: list[str] = []
    for w in enumerate_group(n, bound):
        scanned += 1
        v = flip * w
        if type_c_length(v) > type_c_length(w):
            applicable += 1
            if 1 in w.negated_set() or long_length(v) != long_length(w) + 1:
                bad.append(str(w))
    if bad:
        raise CounterexampleFound(f"{len(bad)} counterexamples in W_{n}", bad[:10])
    return {"n": n, "scanned": scanned, "applicable": applicable, "counterexamples": 0}
