"""Acceptance criteria 1 to 12, one test each.

Every test records its criterion number; the terminal summary prints one
PASS/FAIL line per criterion from the real test outcome.
"""

import subprocess
import sys
import time

import pytest

from hecketools import casselman, lattices, satake, weyl, zeta
from hecketools.casselman import GroupDescriptor
from hecketools.errors import IdentityFailed
from hecketools.exactalg import substitute
from hecketools.weyl import LengthModel

B = zeta.BASE


@pytest.fixture
def criterion(record_property):
    def mark(n: int, claim: str) -> None:
        record_property("criterion", n)
        record_property("claim", claim)

    return mark


def _report(n: int, failures: list) -> None:
    print(f"criterion {n}: {'PASS' if not failures else 'FAIL'}")
    assert not failures, failures


def test_criterion_01_appendix_identities(criterion):
    criterion(1, "generating identities, n = 1..5, three length models")
    failures = []
    for model in LengthModel:
        for n in range(1, 6):
            rep = weyl.poincare_check(n, model)
            if rep["status"] != "pass" or rep["elements"] != weyl.group_order(n):
                failures.append((model.value, n))
    _report(1, failures)


def test_criterion_02_lemma_trick(criterion):
    criterion(2, "lemma trick, W_n for n <= 6")
    failures = []
    total = 0
    for n in range(1, 7):
        rep = weyl.lemma_trick_scan(n)
        total += rep["scanned"]
        if rep["counterexamples"]:
            failures.append(rep)
    assert total == sum(weyl.group_order(n) for n in range(1, 7))
    _report(2, failures)


def test_criterion_03_eigenvector_theorems(criterion):
    criterion(3, "eigenvector theorems, r <= 3, both groups")
    failures = []
    for theorem in casselman.EIGEN_THEOREMS:
        for r in (1, 2, 3):
            try:
                rep = casselman.eigen_verify(theorem, r)
                assert rep["elements"] == weyl.group_order(r)
            except IdentityFailed as exc:
                failures.append((theorem, r, str(exc)))
    _report(3, failures)


def test_criterion_04_braid_well_definedness(criterion):
    criterion(4, "T_w independent of the reduced word on W_3, 100 seeded vectors")
    rep = casselman.braid_check(3, vectors=100, seed=0)
    assert rep["elements"] == 48
    _report(4, [] if rep["status"] == "pass" else [rep])


def test_criterion_05_volume_lemma(criterion):
    criterion(5, "cell volumes, cell constants r <= 6, q-binomial sums r <= 8")
    failures = []
    q = B.q
    for r in range(1, 7):
        den = zeta._prod(1 + q**i for i in range(1, r + 1))
        for j in range(r + 1):
            display = q ** (j * (j + 1) // 2) * zeta._qbin(r, j) / den
            if zeta.vol_bruhat(r, j) != display:
                failures.append(("vol_bruhat", r, j))
        if sum((zeta.vol_bruhat(r, j) for j in range(r + 1)), B.const(0)) != B.const(1):
            failures.append(("sum of volumes", r))
        for which in zeta.CELL_CONSTANTS:
            try:
                zeta.cell_constants(r, which)
            except IdentityFailed as exc:
                failures.append((which, r, str(exc)))
    displayed = ("total-index", "weight-q^-2i", "weight-q^-(r+1)i")
    for r in range(1, 9):
        for rec in zeta.q_binomial_identities(r):
            if rec["identity"] in displayed and not rec["holds"]:
                failures.append(("q-binomial " + rec["identity"], r, rec["lhs"], rec["rhs"]))
    _report(5, failures)


def test_criterion_06_root_product_constants(criterion):
    criterion(6, "root products equal their displayed closed forms and ratios, r <= 5")
    failures = []
    for which in ("C+'_w'", "C-_w'", "C-'_w'"):
        for r in range(1, 6):
            rep = zeta.root_product_report(r, which)
            if not rep["ratio_holds"]:
                failures.append((which, r, "ratio"))
            if not rep["final_line_holds"]:
                failures.append((which, r, "closed form", rep["failed_lines"]))
    _report(6, failures)


def test_criterion_07_zeta_closed_forms(criterion):
    criterion(7, "zeta closed forms r <= 3 and s = 0 special values")
    failures = []
    q = B.q
    for prop in zeta.PROP_IDS:
        for r in (1, 2, 3):
            try:
                zeta.zeta_closed_form(prop, r)
            except IdentityFailed as exc:
                failures.append((prop, r, str(exc)))
    for r in (1, 2, 3):
        split = 4 / (q ** (r * r - r) * (1 + q**r) ** 2)
        nonsplit = (-1) ** r * q * (q ** (r - 1) + 1) / (q ** (r * r) * (q + 1) * (q**r - 1))
        if zeta.special_value_s0("spherical-unimodular-split", r) != split:
            failures.append(("split special value", r))
        if zeta.special_value_s0("almost-spherical-unimodular-nonsplit", r) != nonsplit:
            failures.append(("nonsplit special value", r))
    _report(7, failures)


def test_criterion_08_mdagger_epsilon(criterion):
    criterion(8, "M-dagger chain and scalar r <= 4, r = 1 value at sigma = 1/2")
    failures = []
    Y, q = B.Y, B.q
    for r in (1, 2, 3, 4):
        rep = zeta.mdagger_epsilon_check(r)
        if rep["status"] != "pass" or rep["scalar"] != (-Y).to_text():
            failures.append(rep)
    if zeta.almost_spherical_at_half() != -(1 + Y) / q**2 / (1 - Y / q):
        failures.append("sigma = 1/2 value")
    _report(8, failures)


def test_criterion_09_spherical_averaging(criterion):
    criterion(9, "spherical averages r <= 4, both displayed products, X_i = -t vanishing")
    failures = []
    for r in (1, 2, 3, 4):
        for group, name in (
            (GroupDescriptor.quasi_split(r), "phi_L"),
            (GroupDescriptor.non_quasi_split(r), "phi_K_ns"),
        ):
            try:
                casselman.spherical_average(name, group)
            except IdentityFailed as exc:
                failures.append((group.kind.value, r, exc.detail))
        qs = GroupDescriptor.quasi_split(r)
        total = casselman.spherical_sum(qs)
        for i in range(1, r + 1):
            if not substitute(total, {f"X{i}": -qs.ctx.t}).is_zero():
                failures.append(("vanishing", r, i))
    _report(9, failures)


def test_criterion_10_kato(criterion):
    criterion(10, "Kato criterion, 500 trials per rank r <= 4, U(2) counterexample")
    failures = []
    for r in (1, 2, 3, 4):
        rep = satake.kato_irreducibility_check(r, trials=500, seed=0)
        if rep["status"] != "pass" or rep["comparisons"] != 2 * (500 + rep["curated"]):
            failures.append(rep)
        if not rep["unramified_U2"]["strict"]:
            failures.append(("U(2)", r))
    _report(10, failures)


def test_criterion_11_representatives(criterion):
    criterion(11, "representatives on the omega and Omega pairings, r <= 3")
    failures = []
    for r in (1, 2, 3):
        for name, conv in (
            ("Lambda", lattices.Convention.OMEGA_STANDARD),
            ("Lambda_prime", lattices.Convention.OMEGA_SEMI_STANDARD),
        ):
            space, L = lattices.standard_lattice(name, r)
            for w in weyl.enumerate_group(r):
                rep = lattices.verify_representative(lattices.representative_matrix(w, space, conv), L)
                if rep["status"] != "pass":
                    failures.append((name, str(w)))
        if not all(lattices.semi_standard_factorizations(r).values()):
            failures.append(("factorizations", r))
    _report(11, failures)


def test_criterion_12_determinism(criterion, tmp_path):
    criterion(12, "two full verify runs are byte-identical, each under 10 minutes")
    outs, times = [], []
    for k in range(2):
        out = tmp_path / f"run{k}.json"
        start = time.perf_counter()
        subprocess.run(
            [sys.executable, "-m", "hecketools", "verify", "--seed", "0", "--out", str(out)],
            capture_output=True,
            check=False,
        )
        times.append(time.perf_counter() - start)
        outs.append(out.read_bytes())
    failures = []
    if outs[0] != outs[1]:
        failures.append("reports differ")
    if max(times) >= 600:
        failures.append(("runtime", times))
    print(f"verify runtimes: {[round(t, 1) for t in times]} s")
    _report(12, failures)
