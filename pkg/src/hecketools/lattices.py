"""Hermitian and skew-Hermitian spaces over a ramified quadratic extension.

Ring elements are Laurent polynomials in ``w`` (the uniformizer of E, with
``w^2`` the uniformizer of F) and ``u`` (the fixed non-square unit), with
rational coefficients.  The Galois involution sends ``w -> -w`` and fixes
``u``; valuations count powers of ``w``.

Matrices act on column vectors and a form is ``(x, y) = x^dagger H y``, so
``g`` is unitary when ``g^dagger H g = H``.  All standard Gram matrices are
monomial (one unit-times-power-of-``w`` entry per row), which is what makes
the duals of diagonal lattices diagonal again.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import CheckFailed, NonStandardGram, UnsupportedSpace
from .exactalg import LaurentPoly
from .weyl import SignedPermutation, reduced_word

RING_VARS = ("w", "u")

Matrix = tuple[tuple[LaurentPoly, ...], ...]


# --------------------------------------------------------------------------
# the involutive ring


def ring(terms: dict[tuple[int, int], int | Fraction] | int) -> LaurentPoly:
    """Ring element from ``{(w_exp, u_exp): coeff}`` or an integer constant."""
    if isinstance(terms, int):
        return LaurentPoly.constant(RING_VARS, terms)
    return LaurentPoly(RING_VARS, terms)


def wpow(k: int, coeff: int = 1) -> LaurentPoly:
    return ring({(k, 0): coeff})


def conj(x: LaurentPoly) -> LaurentPoly:
    """Galois involution ``w -> -w``."""
    return LaurentPoly(RING_VARS, {e: (-c if e[0] % 2 else c) for e, c in x.terms.items()})


def valuation(x: LaurentPoly) -> int:
    if x.is_zero():
        raise ValueError("valuation of zero")
    return min(e[0] for e in x.terms)


def residue(x: LaurentPoly) -> LaurentPoly:
    """Reduction modulo ``w`` of an element of valuation at least 0."""
    if x.is_zero():
        return x
    if valuation(x) < 0:
        raise ValueError("element is not integral")
    return LaurentPoly(RING_VARS, {e: c for e, c in x.terms.items() if e[0] == 0})


# --------------------------------------------------------------------------
# matrices


def identity_matrix(n: int) -> Matrix:
    return tuple(tuple(ring(1 if i == j else 0) for j in range(n)) for i in range(n))


def diagonal_matrix(entries: Sequence[LaurentPoly]) -> Matrix:
    n = len(entries)
    return tuple(tuple(entries[i] if i == j else ring(0) for j in range(n)) for i in range(n))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, m, k = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(k):
            s = ring(0)
            for l in range(m):
                if not a[i][l].is_zero() and not b[l][j].is_zero():
                    s = s + a[i][l] * b[l][j]
            row.append(s)
        out.append(tuple(row))
    return tuple(out)


def dagger(a: Matrix) -> Matrix:
    """Conjugate transpose."""
    return tuple(tuple(conj(a[j][i]) for j in range(len(a))) for i in range(len(a[0])))


def is_diagonal(a: Matrix) -> bool:
    return all(a[i][j].is_zero() for i in range(len(a)) for j in range(len(a[0])) if i != j)


def monomial_pattern(a: Matrix) -> tuple[int, ...] | None:
    """``p`` with ``a[p[j]][j]`` the only nonzero entry of column ``j``, else ``None``."""
    n = len(a)
    pattern = []
    for j in range(n):
        rows = [i for i in range(n) if not a[i][j].is_zero()]
        if len(rows) != 1:
            return None
        pattern.append(rows[0])
    if sorted(pattern) != list(range(n)):
        return None
    return tuple(pattern)


def _permutation_sign(p: Sequence[int]) -> int:
    seen = [False] * len(p)
    sign = 1
    for i in range(len(p)):
        if seen[i]:
            continue
        j, cycle = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            cycle += 1
        if cycle % 2 == 0:
            sign = -sign
    return sign


def monomial_det(a: Matrix) -> LaurentPoly:
    """Determinant of a matrix with exactly one nonzero entry per row and column."""
    p = monomial_pattern(a)
    if p is None:
        raise ValueError("matrix is not monomial")
    out = ring(_permutation_sign(p))
    for j, i in enumerate(p):
        out = out * a[i][j]
    return out


def matrix_to_json(a: Matrix) -> list:
    return [[x.json_terms() for x in row] for row in a]


def matrix_to_text(a: Matrix) -> list[list[str]]:
    return [[x.to_text() for x in row] for row in a]


# --------------------------------------------------------------------------
# spaces and lattices


class SpaceKind(enum.Enum):
    SKEW_HERMITIAN = "W"
    SPLIT_HERMITIAN = "V+"
    NONSPLIT_HERMITIAN = "V-"


@dataclass(frozen=True)
class HermitianSpace:
    """Standard space of the given kind and Witt index ``r``."""

    kind: SpaceKind
    r: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", SpaceKind(self.kind))
        if self.r < 0 or (self.r == 0 and self.kind is not SpaceKind.NONSPLIT_HERMITIAN):
            raise ValueError("rank must be positive")

    @property
    def dim(self) -> int:
        return 2 * self.r + (2 if self.kind is SpaceKind.NONSPLIT_HERMITIAN else 0)

    @property
    def split(self) -> bool:
        return self.kind is not SpaceKind.NONSPLIT_HERMITIAN

    @property
    def hermitian_sign(self) -> int:
        """``H^dagger = sign * H``."""
        return -1 if self.kind is SpaceKind.SKEW_HERMITIAN else 1

    @property
    def gram(self) -> Matrix:
        r, n = self.r, self.dim
        rows = [[ring(0)] * n for _ in range(n)]
        k = 0 if self.kind is SpaceKind.SKEW_HERMITIAN else -1
        for i in range(r):
            rows[i][r + i] = wpow(k)
            rows[r + i][i] = wpow(k, -1)
        if self.kind is SpaceKind.NONSPLIT_HERMITIAN:
            rows[2 * r][2 * r] = ring(1)
            rows[2 * r + 1][2 * r + 1] = ring({(0, 1): -1})
        return tuple(tuple(row) for row in rows)

    def gram_inverse(self) -> Matrix:
        """Inverse of the monomial Gram matrix, entry by entry."""
        h = self.gram
        n = self.dim
        rows = [[ring(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                if not h[i][j].is_zero():
                    rows[j][i] = _monomial_inverse(h[i][j])
        return tuple(tuple(row) for row in rows)

    def check_gram(self) -> bool:
        h = self.gram
        s = self.hermitian_sign
        dh = dagger(h)
        return all(dh[i][j] == h[i][j] * s for i in range(self.dim) for j in range(self.dim))


def _monomial_inverse(x: LaurentPoly) -> LaurentPoly:
    if not x.is_monomial():
        raise NonStandardGram(f"entry {x.to_text()} is not a unit times a power of w")
    return x**-1


@dataclass(frozen=True)
class DiagonalLattice:
    """``sum_i w^{a_i} O_E e_i``."""

    valuations: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "valuations", tuple(int(a) for a in self.valuations))

    def shift(self, k: int) -> "DiagonalLattice":
        """``w^k L``."""
        return DiagonalLattice(tuple(a + k for a in self.valuations))

    def contains(self, other: "DiagonalLattice") -> bool:
        return all(a <= b for a, b in zip(self.valuations, other.valuations))

    def index_over(self, other: "DiagonalLattice") -> int:
        """``dim_k self/other`` for ``other`` contained in ``self``."""
        if not self.contains(other):
            raise ValueError("lattice is not contained")
        return sum(b - a for a, b in zip(self.valuations, other.valuations))


def standard_lattice(name: str, r: int) -> tuple[HermitianSpace, DiagonalLattice]:
    """The named standard lattice and its ambient space."""
    W, Vp, Vm = SpaceKind.SKEW_HERMITIAN, SpaceKind.SPLIT_HERMITIAN, SpaceKind.NONSPLIT_HERMITIAN
    table = {
        "Lambda": (W, (0,) * (2 * r)),
        "Lambda_prime": (W, (0,) * r + (1,) * r),
        "Lambda_V_plus": (Vp, (0,) * (2 * r)),
        "Lambda_prime_V_plus": (Vp, (0,) * r + (1,) * r),
        "Lambda_V_minus": (Vm, (0,) * (2 * r + 2)),
        "Lambda_prime_V_minus": (Vm, (1,) * r + (0,) * r + (0, 0)),
    }
    if name not in table:
        raise UnsupportedSpace(f"unknown standard lattice {name!r}")
    kind, vals = table[name]
    return HermitianSpace(kind, r), DiagonalLattice(vals)


STANDARD_LATTICES = (
    "Lambda",
    "Lambda_prime",
    "Lambda_V_plus",
    "Lambda_prime_V_plus",
    "Lambda_V_minus",
    "Lambda_prime_V_minus",
)


def _gram_partners(space: HermitianSpace) -> list[tuple[int, int]]:
    """For each row ``i``: ``(j, val(H_ij))`` of its single nonzero entry."""
    out = []
    for i, row in enumerate(space.gram):
        nz = [(j, x) for j, x in enumerate(row) if not x.is_zero()]
        if len(nz) != 1 or not nz[0][1].is_monomial():
            raise NonStandardGram(f"row {i} of the Gram matrix is not monomial")
        out.append((nz[0][0], valuation(nz[0][1])))
    return out


def dual_lattice(L: DiagonalLattice, space: HermitianSpace, kind: str = "sharp") -> DiagonalLattice:
    """``L^sharp = {x : (x, L) in O_E}`` or ``L^vee = w^-1 L^sharp``."""
    if len(L.valuations) != space.dim:
        raise ValueError("lattice and space dimensions differ")
    a = L.valuations
    sharp = DiagonalLattice(tuple(-a[j] - v for j, v in _gram_partners(space)))
    if kind == "sharp":
        return sharp
    if kind == "vee":
        return sharp.shift(-1)
    raise ValueError(f"unknown dual {kind!r}")


def classify_lattice(L: DiagonalLattice, space: HermitianSpace) -> str:
    """``unimodular``, ``pi-modular``, ``almost-pi-modular`` or ``none``."""
    sharp = dual_lattice(L, space, "sharp")
    vee = dual_lattice(L, space, "vee")
    if L == sharp:
        return "unimodular"
    if space.split and L == vee:
        return "pi-modular"
    if (
        not space.split
        and L.contains(sharp)
        and vee.contains(L)
        and vee.index_over(L) == 2
    ):
        return "almost-pi-modular"
    return "none"


# --------------------------------------------------------------------------
# Weyl representatives


class Convention(enum.Enum):
    OMEGA_STANDARD = "omega"
    OMEGA_SEMI_STANDARD = "Omega"


@dataclass(frozen=True)
class RepMatrix:
    matrix: Matrix
    element: SignedPermutation
    word: tuple[int, ...]
    convention: Convention
    space: HermitianSpace

    def to_json(self) -> dict:
        return {
            "element": list(self.element.images),
            "word": list(self.word),
            "convention": self.convention.value,
            "space": self.space.kind.value,
            "matrix": matrix_to_json(self.matrix),
        }


def generator_matrix(g: int, space: HermitianSpace, convention: Convention | str) -> Matrix:
    """Representative of a simple generator (``0`` the sign change, ``i`` a swap)."""
    convention = Convention(convention)
    r, n = space.r, space.dim
    rows = [list(row) for row in identity_matrix(n)]
    if g == 0:
        rows[0][0] = ring(0)
        rows[r][r] = ring(0)
        if convention is Convention.OMEGA_STANDARD:
            rows[0][r], rows[r][0] = ring(1), ring(-1)
        else:
            rows[0][r], rows[r][0] = wpow(-1), wpow(1)
            if not space.split:
                rows[2 * r][2 * r] = ring(-1)
    elif 1 <= g < r:
        for a, b in ((g - 1, g), (r + g - 1, r + g)):
            rows[a][a], rows[b][b] = ring(0), ring(0)
            rows[a][b], rows[b][a] = ring(1), ring(1)
        if convention is Convention.OMEGA_SEMI_STANDARD and not space.split:
            # right multiplication by the displayed torus element diag(1, .., 1, -1, 1)
            rows[2 * r][2 * r] = ring(-1)
    else:
        raise ValueError(f"generator {g} does not exist in rank {r}")
    return tuple(tuple(row) for row in rows)


def representative_matrix(
    w: SignedPermutation, space: HermitianSpace, convention: Convention | str
) -> RepMatrix:
    """Product of generator representatives along the lex-smallest reduced word."""
    convention = Convention(convention)
    if space.r != w.rank:
        raise UnsupportedSpace(f"rank {w.rank} element in a rank {space.r} space")
    word = tuple(reduced_word(w))
    m = identity_matrix(space.dim)
    for g in word:
        m = mat_mul(m, generator_matrix(g, space, convention))
    return RepMatrix(m, w, word, convention, space)


def coordinate_permutation(w: SignedPermutation, space: HermitianSpace) -> tuple[int, ...]:
    """Image of each basis line under ``w``: ``e_i -> e_|w(i)|`` or its partner ``e_{r+|w(i)|}``."""
    r = space.r
    p = list(range(space.dim))
    for i in range(1, r + 1):
        x = w(i)
        top, bottom = (abs(x) - 1, r + abs(x) - 1) if x > 0 else (r + abs(x) - 1, abs(x) - 1)
        p[i - 1] = top
        p[r + i - 1] = bottom
    return tuple(p)


def inverse_unitary(m: Matrix, space: HermitianSpace) -> Matrix:
    """``H^-1 m^dagger H``, the inverse of a unitary ``m``."""
    return mat_mul(mat_mul(space.gram_inverse(), dagger(m)), space.gram)


def stabilizes(m: Matrix, L: DiagonalLattice) -> bool:
    """``m L`` is contained in ``L``: ``val(m_ij) + a_j >= a_i`` on nonzero entries."""
    a = L.valuations
    return all(
        valuation(m[i][j]) + a[j] >= a[i]
        for i in range(len(m))
        for j in range(len(m))
        if not m[i][j].is_zero()
    )


def semi_standard_factorizations(r: int) -> dict[str, bool]:
    """The two displayed torus factorizations of the semi-standard ``w1`` representative."""
    space = HermitianSpace(SpaceKind.SKEW_HERMITIAN, r)
    big = generator_matrix(0, space, Convention.OMEGA_SEMI_STANDARD)
    small = generator_matrix(0, space, Convention.OMEGA_STANDARD)
    n = space.dim
    left = [ring(1)] * n
    left[0], left[r] = wpow(-1), wpow(1, -1)
    right = [ring(1)] * n
    right[0], right[r] = wpow(1, -1), wpow(-1)
    return {
        "Omega(w1) = diag(w^-1, 1, -w, 1) omega(w1)": mat_mul(diagonal_matrix(left), small) == big,
        "Omega(w1) = omega(w1) diag(-w, 1, w^-1, 1)": mat_mul(small, diagonal_matrix(right)) == big,
    }


def verify_representative(
    rep: RepMatrix, L: DiagonalLattice, require_neutral: bool = False
) -> dict:
    """Check unitarity, lattice stabilization and the torus relations of a representative.

    ``require_neutral`` additionally asks for determinant ``1`` modulo ``w``.
    """
    space, m = rep.space, rep.matrix
    h = space.gram
    clauses: dict[str, bool] = {}
    clauses["unitary"] = mat_mul(mat_mul(dagger(m), h), m) == h
    inv = inverse_unitary(m, space)
    clauses["inverse"] = mat_mul(m, inv) == identity_matrix(space.dim)
    pattern = monomial_pattern(m)
    expected = coordinate_permutation(rep.element, space)
    clauses["weyl pattern"] = pattern == expected
    clauses["stabilizes lattice"] = stabilizes(m, L) and stabilizes(inv, L)
    if rep.convention is Convention.OMEGA_SEMI_STANDARD:
        small = representative_matrix(rep.element, space, Convention.OMEGA_STANDARD).matrix
        small_inv = inverse_unitary(small, space)
        clauses["Omega omega^-1 diagonal"] = is_diagonal(mat_mul(m, small_inv))
        clauses["omega^-1 Omega diagonal"] = is_diagonal(mat_mul(small_inv, m))
        if space.kind is SpaceKind.SKEW_HERMITIAN and rep.word == (0,):
            clauses.update(semi_standard_factorizations(space.r))
    det = monomial_det(m)
    det_residue = residue(det) if valuation(det) == 0 else None
    if require_neutral:
        clauses["determinant 1 mod w"] = det_residue is not None and det_residue == ring(1)
    failed = [k for k, ok in clauses.items() if not ok]
    report = {
        "element": str(rep.element),
        "word": list(rep.word),
        "convention": rep.convention.value,
        "space": space.kind.value,
        "lattice": list(L.valuations),
        "determinant": det.to_text(),
        "clauses": clauses,
        "status": "pass" if not failed else "fail",
    }
    if failed:
        raise CheckFailed(f"representative of {rep.element}: {', '.join(failed)}", report)
    return report
