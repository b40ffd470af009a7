import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hecketools.errors import SumMismatch
from hecketools.exactalg import LaurentPoly, VarContext
from hecketools.satake import (
    Cocharacter,
    KatoPreset,
    act_on_angles,
    curated_angles,
    d_alpha_vanishes,
    doubled_vector,
    dominance_equivalence_scan,
    dominant_cocharacters,
    gl_dominance,
    invariance_check,
    kato_compare,
    kato_generated,
    kato_irreducibility_check,
    kato_stabilizer,
    orbit_sum,
    paper_dominance,
    partial_order_check,
    random_angles,
    reflection,
)
from hecketools.weyl import SignedPermutation, enumerate_group, positive_roots

F = Fraction


def test_doubled_vector():
    assert doubled_vector((1, 0)) == (1, 0, 0, -1)
    assert doubled_vector((0, 0, 0)) == (0,) * 6
    assert doubled_vector(Cocharacter((2, 1, 1))) == (2, 1, 1, -1, -1, -2)


def test_gl_dominance_examples():
    assert gl_dominance((1, 1), (2, 0))
    assert not gl_dominance((2, 0), (1, 1))
    assert gl_dominance((3, 1), (3, 1))
    with pytest.raises(SumMismatch):
        gl_dominance((1, 0), (1, 1))


def test_stated_dominance_examples():
    assert paper_dominance((0, 0), (1, 1))
    # differences (0, 1) increase, so the stated predicate rejects the pair
    assert not paper_dominance((1, 0), (1, 1))
    assert gl_dominance(doubled_vector((1, 0)), doubled_vector((1, 1)))
    assert paper_dominance((2, 1), (2, 1))


def test_dominance_scans():
    assert dominance_equivalence_scan(1, 3)["agree"]
    assert dominance_equivalence_scan(2, 0)["agree"]
    rep = dominance_equivalence_scan(2, 2)
    assert not rep["agree"] and len(rep["disagreements"]) == 6
    assert len(dominance_equivalence_scan(3, 4)["disagreements"]) == 373


@pytest.mark.parametrize("r, bound", [(1, 3), (2, 3), (3, 2)])
def test_gl_dominance_is_partial_order(r, bound):
    by_sum: dict[int, list] = {}
    for lam in dominant_cocharacters(r, bound):
        v = doubled_vector(lam)
        by_sum.setdefault(sum(lam.coords), []).append(v)
    for vs in by_sum.values():
        assert partial_order_check(vs)


def test_invariance_examples():
    c1 = VarContext(1)
    assert invariance_check(c1.X(1) + c1.X(1) ** -1)
    assert not invariance_check(c1.X(1))
    assert invariance_check(orbit_sum((1, 0), 2))


def _monomials(r, span):
    import itertools

    return list(itertools.product(range(-span, span + 1), repeat=r))


@pytest.mark.parametrize("r", [1, 2])
def test_invariants_are_spanned_by_orbit_sums(r):
    # a combination of monomials is invariant iff its coefficients are constant on orbits
    ctx = VarContext(r)
    rng = random.Random(r)
    mons = _monomials(r, 1)
    for _ in range(30):
        coeffs = {m: rng.choice((0, 0, 1, 2)) for m in mons}
        f = sum(
            (ctx.monomial({f"X{i}": e for i, e in enumerate(m, 1)}, c) for m, c in coeffs.items() if c),
            ctx.const(0),
        )
        orbit_constant = all(
            coeffs[m] == coeffs[w.act_on_vector(m)] for m in mons for w in enumerate_group(r)
        )
        assert invariance_check(f) == orbit_constant
    for m in mons:
        assert invariance_check(orbit_sum(m, r))


def test_stabilizer_examples():
    assert len(kato_stabilizer((F(0),))) == 2
    assert kato_stabilizer((F(1, 4),)) == [SignedPermutation((1,))]
    assert SignedPermutation((-2, -1)) in kato_stabilizer((F(1, 3), F(2, 3)))


def test_generated_examples():
    assert len(kato_generated((F(0),), "ramified-quasi-split")) == 2
    gen = kato_generated((F(1, 4), F(3, 4)), "ramified-quasi-split")
    w12, w1, w2 = SignedPermutation((2, 1)), SignedPermutation((-1, 2)), SignedPermutation((1, -2))
    assert w12 * w1 * w2 in gen
    assert reflection((1, 1)) == w12 * w1 * w2


def test_unramified_u2_example():
    res = kato_compare((F(1, 4),), KatoPreset.UNRAMIFIED_U2)
    assert res["stabilizer"] == 2 and res["generated"] == 1 and not res["equal"]


def test_ramified_examples():
    assert kato_compare((F(1, 6), F(5, 6)), "ramified-quasi-split")["equal"]
    assert kato_compare((F(1, 2),), "ramified-non-quasi-split")["equal"]
    assert kato_compare((F(1, 2),), "ramified-quasi-split")["stabilizer"] == 2


def _stabilizer_by_orbit(theta, period):
    out = []
    for w in enumerate_group(len(theta)):
        img = [None] * len(theta)
        for i, x in enumerate(theta, 1):
            j = w.images[i - 1]
            img[abs(j) - 1] = x if j > 0 else -x
        if all(((a - b) / period).denominator == 1 for a, b in zip(img, theta)):
            out.append(w)
    return out


angles = st.integers(1, 3).flatmap(
    lambda r: st.lists(
        st.sampled_from([F(k, d) for d in (1, 2, 3, 4, 6) for k in range(d)]), min_size=r, max_size=r
    )
).map(tuple)


@given(angles, st.sampled_from(list(KatoPreset)))
def test_generated_inside_stabilizer(theta, preset):
    preset = KatoPreset(preset)
    stab = kato_stabilizer(theta, preset.period)
    assert stab == _stabilizer_by_orbit(theta, preset.period)
    assert set(kato_generated(theta, preset)) <= set(stab)


@given(angles)
def test_reflections_with_vanishing_d_fix_theta(theta):
    for alpha in positive_roots(len(theta), "C"):
        if d_alpha_vanishes(alpha, theta):
            img = act_on_angles(reflection(alpha), theta)
            assert all((a - b).denominator == 1 for a, b in zip(img, theta))


@given(angles)
def test_ramified_kato_equality(theta):
    for preset in ("ramified-quasi-split", "ramified-non-quasi-split"):
        assert kato_compare(theta, preset)["equal"]


def test_kato_check_rank_two():
    rep = kato_irreducibility_check(2, trials=50, seed=3)
    assert rep["status"] == "pass"
    assert rep["unramified_U2"]["strict"]
    assert rep["curated"] == len(curated_angles(2))


def test_random_angles_are_seeded():
    a = [random_angles(3, random.Random(5)) for _ in range(2)]
    assert a[0] == a[1]
