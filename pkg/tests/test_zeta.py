from fractions import Fraction
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hecketools import zeta
from hecketools.errors import IdentityFailed, InvalidName, OutOfRange
from hecketools.exactalg import RatFunc, VarContext, eval_numeric, substitute

B = zeta.BASE
q, t, Y = B.q, B.t, B.Y


def qbin_numeric(r, j, qv):
    out = Fraction(1)
    for i in range(j):
        out *= Fraction(1 - qv ** (r - i), 1 - qv ** (i + 1))
    return out


# -- q-binomials and cells --------------------------------------------------


def test_q_binomial_example():
    assert RatFunc(zeta.q_binomial(4, 2)) == 1 + q + 2 * q**2 + q**3 + q**4
    with pytest.raises(OutOfRange):
        zeta.q_binomial(2, 3)


@given(st.integers(0, 9), st.data())
def test_q_binomial_properties(r, data):
    j = data.draw(st.integers(0, r))
    p = zeta.q_binomial(r, j)
    assert p == zeta.q_binomial(r, r - j)
    assert eval_numeric(RatFunc(p), 1) == comb(r, j)
    for qv in (4, 9):
        assert eval_numeric(RatFunc(p), qv) == qbin_numeric(r, j, qv)


def test_generating_identity_rank_three():
    total = sum((q ** comb(j + 1, 2) * RatFunc(zeta.q_binomial(3, j)) for j in range(4)), B.const(0))
    assert total == (q + 1) * (q**2 + 1) * (q**3 + 1)


@pytest.mark.parametrize("r", range(1, 9))
def test_q_binomial_identities(r):
    recs = {rec["identity"]: rec["holds"] for rec in zeta.q_binomial_identities(r)}
    assert recs["generating"] and recs["total-index"] and recs["weight-q^-2i"]
    assert recs["weight-q^-(r+1)i, full product"]


@pytest.mark.xfail(strict=True, reason="displayed product over i=1..r-1 of (q^(i-1-r)+1)")
@pytest.mark.parametrize("r", [1, 2, 3])
def test_q_binomial_third_display(r):
    recs = {rec["identity"]: rec["holds"] for rec in zeta.q_binomial_identities(r)}
    assert recs["weight-q^-(r+1)i"]


def test_volumes_rank_one():
    assert zeta.vol_bruhat(1, 0) == 1 / (1 + q)
    assert zeta.vol_bruhat(1, 1) == q / (1 + q)
    assert zeta.cell_index(2, 2) == q**3
    with pytest.raises(OutOfRange):
        zeta.vol_bruhat(2, 3)


@pytest.mark.parametrize("r", range(1, 9))
def test_volumes_sum_to_one(r):
    assert sum((zeta.vol_bruhat(r, j) for j in range(r + 1)), B.const(0)) == B.const(1)


def test_cell_constant_examples():
    assert zeta.cell_constants(1, "C") == 1 / q
    assert zeta.cell_constants(1, "C_+") == (1 + q / Y) / (1 + q)
    expected = (1 + Y / q) * (1 + Y / q**2) / ((1 + q) * (1 + q**2))
    assert zeta.cell_constants(2, "C_-'") == expected
    with pytest.raises(InvalidName):
        zeta.cell_constants(2, "C_x")


@pytest.mark.parametrize("r", range(1, 7))
@pytest.mark.parametrize("which", zeta.CELL_CONSTANTS)
def test_cell_constants_closed_forms(r, which):
    zeta.cell_constants(r, which)


# -- sections ---------------------------------------------------------------


def test_section_level_weights_rank_one():
    w = lambda m, i: zeta.section_level_weight(m, 1, i)
    assert [w("pi-modular", i) for i in range(3)] == [B.const(1)] * 3
    assert w("unimodular-split", 1) == 1 / q
    assert w("almost-pi-modular", 2) == q**-2
    assert w("almost-pi-modular", 1) == -1 / q
    sec = zeta.degenerate_section("pi-modular", 1)
    assert all(c == sec.vector.group.ctx.const(1) for c in sec.vector.coeffs.values())


@pytest.mark.parametrize("r", [1, 2])
@pytest.mark.parametrize("model", ["pi-modular", "unimodular-split", "almost-pi-modular"])
def test_sections_match_special_vectors(r, model):
    assert zeta.degenerate_section(model, r).r == r


def test_nonsplit_sign_probe():
    assert zeta.nonsplit_sign_probe(1)["matches"] == {"paper-statement": True, "proof-evaluation": False}
    assert zeta.nonsplit_sign_probe(2)["matches"] == {"paper-statement": False, "proof-evaluation": False}
    zeta.degenerate_section("unimodular-nonsplit", 1)
    with pytest.raises(IdentityFailed):
        zeta.degenerate_section("unimodular-nonsplit", 2)


# -- root products ----------------------------------------------------------


def test_c_minus_rank_one():
    got = zeta.root_product(1, "c''")
    assert got == (-q) ** -1 * (1 - Y**2) / (1 - Y**2 / q**2) * zeta.c_plus(1)


def test_c_plus_prime_rank_two_chain():
    rep = zeta.root_product_report(2, "C+'_w'")
    assert rep["failed_lines"] == [] and rep["ratio_holds"]


@pytest.mark.parametrize("r", range(1, 6))
@pytest.mark.parametrize("which", sorted(zeta.ROOT_PRODUCTS))
def test_root_product_ratios(r, which):
    zeta.root_product_constant(r, which)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_c_minus_prime_chain_failures(r):
    rep = zeta.root_product_report(r, "C-'_w'")
    assert rep["ratio_holds"]
    assert rep["failed_lines"] == [5, 6]


def test_root_product_bound():
    with pytest.raises(OutOfRange):
        zeta.root_product_constant(6, "C-_w'")


# -- L-factors and closed forms --------------------------------------------


def test_lfactor_examples():
    assert zeta.lfactor("b", 1) == 1 / (1 - Y**2 * t**-4)
    c1 = VarContext(1)
    X, Y1 = c1.X(1), c1.Y
    assert zeta.lfactor("L_sigma", 1) == 1 / ((1 - X * Y1) * (1 - Y1 / X))
    assert zeta.lfactor("L_sigma_minus", 1) == (1 - c1.t * Y1) / ((1 - X * Y1) * (1 - Y1 / X))
    assert eval_numeric(zeta.zeta_E(1), 4) == Fraction(4, 3)
    assert zeta.lfactor("zetaE", m=2, c=2) == 1 / (1 - Y**2 / q**2)
    with pytest.raises(InvalidName):
        zeta.lfactor("nope")


@pytest.mark.parametrize("r", [1, 2, 3])
def test_b_closed_form(r):
    assert zeta.lfactor("b", r) == zeta.b_closed(r)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_pi_modular_closed_form(r):
    form = zeta.zeta_closed_form("spherical-pi-modular", r)
    assert form.value == zeta.l_over_b("spherical-pi-modular", r)


@pytest.mark.parametrize("prop", zeta.PROP_IDS)
def test_closed_form_rank_two(prop):
    form = zeta.zeta_closed_form(prop, 2)
    assert form.to_json()["prop_id"] == prop


def test_almost_spherical_at_half():
    assert zeta.almost_spherical_at_half() == -(1 + Y) / (q**2 * (1 - Y / q))


def test_special_values_rank_one():
    assert zeta.special_value_s0("spherical-unimodular-split", 1) == 4 / (1 + q) ** 2
    assert zeta.special_value_s0("almost-spherical-unimodular-nonsplit", 1) == -2 / ((q + 1) * (q - 1))
    assert zeta.special_value_s0("spherical-pi-modular", 3) == B.const(1)


def test_closed_form_errors():
    with pytest.raises(InvalidName):
        zeta.zeta_closed_form("nope", 1)
    with pytest.raises(OutOfRange):
        zeta.zeta_closed_form("spherical-pi-modular", 6)


# -- M-dagger ---------------------------------------------------------------


def test_c_minus_ratio_rank_one():
    c = zeta.c_minus_r(1)
    assert c / zeta.negate_s(c) == Y * zeta.zeta_E(2, 2) / zeta.zeta_E(2, -2)


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_mdagger(r):
    rep = zeta.mdagger_epsilon_check(r)
    assert rep["scalar"] == (-Y).to_text()
    assert rep["chain_lines"] == 6


def test_functional_equation_scalar_is_an_involution():
    lam = -Y
    assert lam * zeta.negate_s(lam) == B.const(1)
    assert (1 + Y) / (1 + 1 / Y) == Y


def test_corollary_constants():
    s1, s = zeta.corollary_constants(1)
    assert s1 == 2 / (q**2 - 1)
    assert s == 1 / (q**2 - 1)
    assert zeta.corollary_constants(2)[0] == (q + 1) / (q**3 * (q + 1) * (q**2 - 1))


def test_s_helpers():
    assert zeta.shift_s(Y, 1) == Y / q
    assert zeta.at_s0(Y**3 + t) == 1 + t
    assert substitute(Y, {"Y": 1}) == B.const(1)
