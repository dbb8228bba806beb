"""Acceptance criteria, one test per criterion (named test_criterion_<n>_...)."""

import time

import numpy as np

from plkacr import fixtures
from plkacr.certify import (
    ACR,
    DECOMP_ACR,
    DZ_D0,
    DZ_MONOSPECIES,
    AssumptionLedger,
    certify_single,
    certify_with_decomposition,
)
from plkacr.decomposition import Decomposition, check_decomposition, linkage_class_decomposition
from plkacr.kinetics import PL_NDK, PL_RDK, classify_kinetics, find_sf_pairs
from plkacr.model import linkage_partitions, structural_summary
from plkacr.numerics import find_steady_states, laplacian_kernel, verify_robustness
from plkacr.transform import cf_rm_plus, dynamically_equivalent



def test_criterion_1_structure():
    start = time.perf_counter()
    golden = {
        "example1": (4, 2, 2, 0, True),
        "idhkp": (4, 1, 3, 0, True),
        "schmitz": (6, 1, 5, 0, True),
        "example4": (4, 1, 3, 0),
    }
    for name, want in golden.items():
        s = structural_summary(fixtures.load(name).net)
        got = (s.n, s.l, s.s, s.delta, s.weakly_reversible)[: len(want)]
        assert got == want, name
    assert time.perf_counter() - start < 1.0


def test_criterion_2_classification():
    assert classify_kinetics(fixtures.load("example1")).kind == PL_RDK
    assert classify_kinetics(fixtures.load("idhkp")).kind == PL_RDK

    sch = fixtures.load("schmitz")
    cls = classify_kinetics(sch)
    assert cls.kind == PL_NDK and cls.minimally_ndk
    (node,) = cls.ndk_nodes
    assert sch.net.complex_label(node.reactant) == "M1" and node.binary and node.monospecies

    ex4 = fixtures.load("example4")
    cls = classify_kinetics(ex4)
    assert cls.kind == PL_NDK
    (node,) = cls.ndk_nodes
    assert ex4.net.complex_label(node.reactant) == "X1" and node.binary


def test_criterion_3_sf_pairs():
    expected = {
        "example1": [("R1", "R2", "A2")],
        "idhkp": [("R1", "R5", "I")],
        "schmitz": [("R2", "R8", "M1")],
        "example4": [("R1", "R4", "X1"), ("R2", "R4", "X3")],
    }
    for name, pairs in expected.items():
        sys = fixtures.load(name)
        labels = sys.net.labels
        found = {(labels[p.reaction_a], labels[p.reaction_b], p.species) for p in find_sf_pairs(sys)}
        for pair in pairs:
            assert pair in found, (name, pair)


def test_criterion_4_cf_rm_plus():
    sys = fixtures.load("schmitz")
    rec = cf_rm_plus(sys)
    before, after = structural_summary(sys.net), structural_summary(rec.result.net)
    assert classify_kinetics(rec.result).kind == PL_RDK
    assert after.delta == 1
    assert after.l == before.l + 1
    assert rec.result.F == sys.F
    assert dynamically_equivalent(sys, rec.result)
    # the same check with numeric rates, compared at 1e-12
    k = tuple(np.random.default_rng(0).uniform(0.5, 4, sys.net.r))
    assert dynamically_equivalent(sys.with_rates(k), rec.result.with_rates(k))


def test_criterion_5_certification():
    positive = AssumptionLedger.asserting(positive=True)
    balanced = AssumptionLedger.asserting(complex_balanced=True)

    def fired(name, ledger):
        return {(c.kind, c.species, c.theorem) for c in certify_single(fixtures.load(name), ledger)
                if not c.conditional}

    assert (ACR, "A2", DZ_D0) in fired("example1", positive)
    assert (ACR, "I", DZ_D0) in fired("idhkp", positive)
    assert (ACR, "M1", DZ_MONOSPECIES) in fired("schmitz", balanced)

    ex4 = fixtures.load("example4")
    ledger = AssumptionLedger.from_steady_states(find_steady_states(ex4, [1, 1, 2, 1, 1], trials=20, seed=0))
    got = {(c.kind, c.species, c.theorem) for c in certify_single(ex4, ledger) if not c.conditional}
    assert {(ACR, "X1", DZ_D0), (ACR, "X3", DZ_D0)} <= got

    # deficiency-zero, weakly reversible, conservative PL-RDK systems still certify
    for name in ("example1", "idhkp"):
        s = structural_summary(fixtures.load(name).net)
        assert s.delta == 0 and s.weakly_reversible
        assert fired(name, positive)


def test_criterion_6_numeric_steady_states():
    start = time.perf_counter()
    sys = fixtures.load("example4")
    ss = find_steady_states(sys, [1, 1, 2, 1, 1], trials=20, seed=0)
    hit = np.all(np.abs(ss.states - 1) <= 1e-8, axis=1)
    assert np.any(hit) and np.all(ss.residuals[hit] <= 1e-10)

    rng = np.random.default_rng(2024)
    for _ in range(10):
        k1 = rng.uniform(0.5, 4)
        k4, k5 = rng.uniform(0.5, 4, 2)
        k = [k1, k1, (k1 + k4) * (k5 / k4) ** 0.5, k4, k5]
        found = find_steady_states(sys, k, trials=20, seed=0)
        assert len(found) >= 1
        assert np.all(np.abs(found.states - [1, k4 / k5, 1]) <= 1e-8), (k, found.states)

    steady = find_steady_states(sys, [1, 1, 2, 1, 1], trials=20, seed=0)
    for sp in ("X1", "X3"):
        chk = verify_robustness(sys, [1, 1, 2, 1, 1], sp, steady=steady)
        assert chk.acr_spread is not None and chk.acr_spread <= 1e-6
    assert time.perf_counter() - start <= 5.0


def test_criterion_7_stlk_and_kernel_dimension():
    start = time.perf_counter()
    rng = np.random.default_rng(7)
    checked = 0
    for name in fixtures.NETWORKS:
        sys = fixtures.load(name)
        s = structural_summary(sys.net)
        if not s.weakly_reversible:
            continue
        terminal = set(linkage_partitions(sys.net).terminal_strong_linkage_classes)
        for _ in range(100):
            rep = laplacian_kernel(sys, rng.uniform(0.1, 10, sys.net.r))
            assert set(rep.supports) == terminal and len(rep.supports) == s.t, name
            assert rep.dim_ker_YA == s.delta + s.t, name
            checked += 1
    assert checked >= 400
    assert time.perf_counter() - start <= 10.0


def test_criterion_8_decompositions():
    sys = fixtures.load("example1")
    rep = check_decomposition(sys, linkage_class_decomposition(sys))
    assert rep.independent and rep.incidence_independent and rep.bi_independent and rep.c_decomposition

    rng = np.random.default_rng(8)
    for name in ("example1", "idhkp", "schmitz", "example4", "synthetic_higher_deficiency"):
        sys = fixtures.load(name)
        candidates = [linkage_class_decomposition(sys)]
        for _ in range(30):
            tags = rng.integers(0, 3, sys.net.r)
            parts = tuple(tuple(np.flatnonzero(tags == t)) for t in range(3) if np.any(tags == t))
            candidates.append(Decomposition(tuple(tuple(int(j) for j in p) for p in parts)))
        for decomp in candidates:
            rep = check_decomposition(sys, decomp)
            assert rep.consistent, (name, rep.issues)
            if rep.independent:
                assert rep.parent.delta <= rep.delta_sum
            if rep.incidence_independent:
                assert rep.parent.delta >= rep.delta_sum
            if rep.bi_independent:
                assert rep.parent.delta == rep.delta_sum


def test_criterion_9_negative_control():
    sys = fixtures.load("ab_mass_action")
    chk = verify_robustness(sys, [1, 1], "A", trials=20, seed=0)
    assert chk.acr_spread is not None and chk.acr_spread > 1e-3
    ledger = AssumptionLedger.asserting(positive=True, complex_balanced=True)
    assert certify_single(sys, ledger) == []
    decomp = linkage_class_decomposition(sys)
    assert certify_with_decomposition(sys, decomp, ledger) == []


def test_criterion_10_higher_deficiency():
    sys = fixtures.load("synthetic_higher_deficiency")
    decomp = Decomposition.from_labels(sys, fixtures.load_json("synthetic_decomposition")["parts"])
    certs = certify_with_decomposition(sys, decomp, AssumptionLedger.asserting(positive=True))
    acr = [c for c in certs if c.kind == ACR and c.species == "A2" and c.theorem == DECOMP_ACR]
    assert acr and not acr[0].conditional
    assert check_decomposition(sys, decomp).parent.delta == 2
    assert any("higher deficiency (2)" in n for n in acr[0].notes)
