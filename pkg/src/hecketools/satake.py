"""Cartan and dominance combinatorics, Weyl invariance, and Kato's irreducibility test.

Unitary parameters are rational angles: ``q^sigma_i = exp(2 pi i theta_i)``.
A preset fixes the root system (which decides the reflections) and the
period modulo which the Weyl group acts on angles.  Vanishing of
``d_alpha`` is always read modulo 1, because ``d_alpha`` is a function of
``q^sigma``.
"""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import CounterexampleFound, OutOfRange, SumMismatch
from .exactalg import LaurentPoly, RatFunc, UnitAngle, VarContext, weyl_act_vars
from .weyl import SignedPermutation, enumerate_group, positive_roots

Angles = tuple[Fraction, ...]


# --------------------------------------------------------------------------
# cocharacters and dominance


@dataclass(frozen=True)
class Cocharacter:
    coords: tuple[int, ...]

    def __init__(self, coords: Iterable[int]) -> None:
        object.__setattr__(self, "coords", tuple(int(x) for x in coords))

    @property
    def rank(self) -> int:
        return len(self.coords)

    @property
    def dominant(self) -> bool:
        c = self.coords
        return all(a >= b for a, b in zip(c, c[1:])) and (not c or c[-1] >= 0)


def _coords(lam: Cocharacter | Sequence[int]) -> tuple[int, ...]:
    return lam.coords if isinstance(lam, Cocharacter) else tuple(lam)


def doubled_vector(lam: Cocharacter | Sequence[int]) -> tuple[int, ...]:
    """``(l_1, ..., l_r) -> (l_1, ..., l_r, -l_r, ..., -l_1)``."""
    c = _coords(lam)
    return c + tuple(-x for x in reversed(c))


def gl_dominance(mu_prime: Sequence[int], mu: Sequence[int]) -> bool:
    """``mu' <= mu`` in the partial-sum order of ``GL_n``."""
    mu_prime, mu = tuple(mu_prime), tuple(mu)
    if len(mu_prime) != len(mu):
        raise SumMismatch(f"lengths differ: {len(mu_prime)} vs {len(mu)}")
    if sum(mu_prime) != sum(mu):
        raise SumMismatch(f"sums differ: {sum(mu_prime)} vs {sum(mu)}")
    return all(p >= 0 for p in itertools.accumulate(a - b for a, b in zip(mu, mu_prime)))


def paper_dominance(lam_prime: Cocharacter | Sequence[int], lam: Cocharacter | Sequence[int]) -> bool:
    """Nonnegative differences ``lam - lam'`` that are nonincreasing."""
    d = [a - b for a, b in zip(_coords(lam), _coords(lam_prime))]
    return all(x >= 0 for x in d) and all(a >= b for a, b in zip(d, d[1:]))


def dominant_cocharacters(r: int, bound: int) -> list[Cocharacter]:
    """Dominant cocharacters with coordinates in ``0..bound``."""
    out = []
    for c in itertools.product(range(bound, -1, -1), repeat=r):
        lam = Cocharacter(c)
        if lam.dominant:
            out.append(lam)
    return sorted(out, key=lambda x: x.coords)


def dominance_equivalence_scan(r: int, bound: int) -> dict:
    """Compare the doubled ``GL_2r`` order with the stated condition on dominant pairs."""
    if not 1 <= r <= 3 or not 0 <= bound <= 4:
        raise OutOfRange("scan needs r <= 3 and bound <= 4")
    lams = dominant_cocharacters(r, bound)
    pairs = 0
    disagreements = []
    for lam_prime in lams:
        for lam in lams:
            a, b = doubled_vector(lam_prime), doubled_vector(lam)
            pairs += 1
            gl = gl_dominance(a, b)
            stated = paper_dominance(lam_prime, lam)
            if gl != stated:
                disagreements.append(
                    {"lambda_prime": list(lam_prime.coords), "lambda": list(lam.coords), "gl": gl, "stated": stated}
                )
    return {
        "rank": r,
        "bound": bound,
        "pairs": pairs,
        "agree": not disagreements,
        "disagreements": disagreements,
    }


def partial_order_check(vectors: Sequence[Sequence[int]]) -> bool:
    """Reflexivity, antisymmetry and transitivity of ``gl_dominance`` on equal-sum vectors."""
    vs = [tuple(v) for v in vectors]
    le = {(a, b): gl_dominance(a, b) for a in vs for b in vs}
    if not all(le[a, a] for a in vs):
        return False
    if any(le[a, b] and le[b, a] and a != b for a in vs for b in vs):
        return False
    return all(not (le[a, b] and le[b, c]) or le[a, c] for a in vs for b in vs for c in vs)


# --------------------------------------------------------------------------
# Weyl invariance


def invariance_check(f: LaurentPoly | RatFunc) -> bool:
    """True iff ``f`` in ``X_1..X_r`` is fixed by every simple reflection."""
    if isinstance(f, LaurentPoly):
        f = RatFunc(f)
    r = f.context.rank
    return all(weyl_act_vars(f, SignedPermutation.generator(r, g)) == f for g in range(r))


def orbit_sum(exponents: Sequence[int], r: int) -> RatFunc:
    """Sum of ``X^e`` over the distinct ``W_r``-images of ``e``."""
    ctx = VarContext(r)
    seen = set()
    total = ctx.const(0)
    for w in enumerate_group(r):
        e = w.act_on_vector(exponents)
        if e in seen:
            continue
        seen.add(e)
        total = total + ctx.monomial({f"X{i}": x for i, x in enumerate(e, start=1) if x})
    return total


# --------------------------------------------------------------------------
# Kato's criterion


class KatoPreset(str, enum.Enum):
    RAMIFIED_QUASI_SPLIT = "ramified-quasi-split"
    RAMIFIED_NON_QUASI_SPLIT = "ramified-non-quasi-split"
    UNRAMIFIED_U2 = "unramified-U2"

    @property
    def root_kind(self) -> str:
        return "B" if self is KatoPreset.RAMIFIED_NON_QUASI_SPLIT else "C"

    @property
    def period(self) -> Fraction:
        """Period of the angle quotient on which the Weyl group acts."""
        return Fraction(1, 2) if self is KatoPreset.UNRAMIFIED_U2 else Fraction(1)


def _angles(theta: Iterable) -> Angles:
    return tuple(UnitAngle(x.theta if isinstance(x, UnitAngle) else x).theta for x in theta)


def act_on_angles(w: SignedPermutation, theta: Sequence[Fraction]) -> Angles:
    """``(w.theta)_{|w(i)|} = sign(w(i)) theta_i`` modulo 1."""
    out = [Fraction(0)] * len(theta)
    for i, x in enumerate(theta, start=1):
        j = w(i)
        out[abs(j) - 1] = (x if j > 0 else -x) % 1
    return tuple(out)


def _same_mod(a: Sequence[Fraction], b: Sequence[Fraction], period: Fraction) -> bool:
    return all(((x - y) / period).denominator == 1 for x, y in zip(a, b))


def kato_stabilizer(theta: Iterable, period: Fraction | int = 1) -> list[SignedPermutation]:
    """``W_sigma``: elements fixing the angle vector modulo ``period``."""
    theta = _angles(theta)
    period = Fraction(period)
    return [w for w in enumerate_group(len(theta)) if _same_mod(act_on_angles(w, theta), theta, period)]


def reflection(alpha: Sequence[int]) -> SignedPermutation:
    """Signed permutation of the reflection in the root ``alpha``."""
    n = len(alpha)
    nz = [i for i, a in enumerate(alpha, start=1) if a]
    images = list(range(1, n + 1))
    if len(nz) == 1:
        images[nz[0] - 1] = -nz[0]
        return SignedPermutation(tuple(images))
    i, j = nz
    if alpha[i - 1] == alpha[j - 1]:
        images[i - 1], images[j - 1] = -j, -i
    else:
        images[i - 1], images[j - 1] = j, i
    return SignedPermutation(tuple(images))


def d_alpha_vanishes(alpha: Sequence[int], theta: Sequence[Fraction]) -> bool:
    """``d_alpha(sigma) = 0``: ``<alpha, theta>`` (or ``2 theta_i`` for short roots) is 0 mod 1."""
    nz = [i for i, a in enumerate(alpha) if a]
    if len(nz) == 1:
        value = 2 * theta[nz[0]]
    else:
        value = sum(alpha[i] * theta[i] for i in nz)
    return Fraction(value).denominator == 1


def generated_subgroup(gens: Sequence[SignedPermutation], n: int) -> list[SignedPermutation]:
    identity = SignedPermutation.identity(n)
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = g * x
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(seen)


def kato_reflections(theta: Iterable, preset: KatoPreset | str) -> list[tuple[int, ...]]:
    """Positive roots whose ``d_alpha`` vanishes at ``theta``."""
    theta = _angles(theta)
    preset = KatoPreset(preset)
    return [a for a in positive_roots(len(theta), preset.root_kind) if d_alpha_vanishes(a, theta)]


def kato_generated(theta: Iterable, preset: KatoPreset | str) -> list[SignedPermutation]:
    """``W_(sigma)``: the subgroup generated by reflections with ``d_alpha = 0``."""
    theta = _angles(theta)
    gens = [reflection(a) for a in kato_reflections(theta, preset)]
    return generated_subgroup(gens, len(theta))


def kato_compare(theta: Iterable, preset: KatoPreset | str) -> dict:
    theta = _angles(theta)
    preset = KatoPreset(preset)
    stab = kato_stabilizer(theta, preset.period)
    gen = kato_generated(theta, preset)
    if not set(gen) <= set(stab):
        raise CounterexampleFound(f"W_(sigma) is not inside W_sigma at {theta}", [str(w) for w in gen])
    return {
        "theta": [str(x) for x in theta],
        "preset": preset.value,
        "stabilizer": len(stab),
        "generated": len(gen),
        "equal": len(stab) == len(gen),
    }


def curated_angles(r: int) -> list[Angles]:
    """Edge cases: all zero, all half, and mixed classes ``theta, -theta``."""
    h, third, quarter, sixth = Fraction(1, 2), Fraction(1, 3), Fraction(1, 4), Fraction(1, 6)
    cases = [
        (Fraction(0),) * r,
        (h,) * r,
        tuple(Fraction(i % 2, 2) for i in range(r)),
        tuple(third if i % 2 == 0 else 1 - third for i in range(r)),
        tuple(quarter if i % 2 == 0 else 1 - quarter for i in range(r)),
        tuple(sixth if i % 3 else 1 - sixth for i in range(r)),
        (quarter,) * r,
        tuple(Fraction(i, r + 1) for i in range(1, r + 1)),
    ]
    out = []
    for c in cases:
        if c not in out:
            out.append(c)
    return out


def random_angles(r: int, rng: random.Random) -> Angles:
    """Rational angles with small denominators, biased towards coincidences."""
    theta: list[Fraction] = []
    for _ in range(r):
        if theta and rng.random() < 0.4:
            x = rng.choice(theta)
            theta.append((-x if rng.random() < 0.5 else x) % 1)
        else:
            d = rng.choice((1, 2, 3, 4, 5, 6, 8, 12))
            theta.append(Fraction(rng.randrange(d), d))
    return tuple(theta)


RAMIFIED = (KatoPreset.RAMIFIED_QUASI_SPLIT, KatoPreset.RAMIFIED_NON_QUASI_SPLIT)


def kato_irreducibility_check(r: int, trials: int = 500, seed: int = 0) -> dict:
    """``W_sigma = W_(sigma)`` on random and curated unitary angles for the ramified presets.

    Also reproduces the strict inequality of the unramified ``U(2)`` example.
    """
    if not 1 <= r <= 4:
        raise OutOfRange("Kato scan needs 1 <= r <= 4")
    rng = random.Random(seed)
    samples = curated_angles(r) + [random_angles(r, rng) for _ in range(trials)]
    checked = 0
    for theta in samples:
        for preset in RAMIFIED:
            res = kato_compare(theta, preset)
            if not res["equal"]:
                raise CounterexampleFound(f"W_sigma != W_(sigma) for {preset.value}", res)
            checked += 1
    u2 = kato_compare((Fraction(1, 4),), KatoPreset.UNRAMIFIED_U2)
    return {
        "rank": r,
        "trials": trials,
        "seed": seed,
        "curated": len(curated_angles(r)),
        "comparisons": checked,
        "status": "pass",
        "unramified_U2": {**u2, "strict": u2["generated"] < u2["stabilizer"]},
    }
