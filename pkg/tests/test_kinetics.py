from fractions import Fraction

import pytest
from hypothesis import given, settings

from plkacr.kinetics import (
    PL_NDK,
    PL_RDK,
    KineticsError,
    KineticSystem,
    classify_kinetics,
    find_sf_pairs,
    t_tilde,
)
from plkacr.model import network_from_reactions, structural_summary

from .strategies import kinetic_systems


def _pairs(sys, **kw):
    labels = sys.net.labels
    return {(frozenset((labels[p.reaction_a], labels[p.reaction_b])), p.species) for p in find_sf_pairs(sys, **kw)}


@pytest.mark.parametrize("name", ["example1", "idhkp"])
def test_reactant_determined(systems, name):
    cls = classify_kinetics(systems[name])
    assert cls.kind == PL_RDK and cls.ndk_nodes == ()


def test_schmitz_single_binary_monospecies_node(systems):
    sys = systems["schmitz"]
    cls = classify_kinetics(sys)
    assert cls.kind == PL_NDK and cls.minimally_ndk
    (node,) = cls.ndk_nodes
    assert sys.net.complex_label(node.reactant) == "M1"
    assert node.binary and node.monospecies
    assert [[sys.net.labels[j] for j in g] for g in node.cf_subsets] == [["R2"], ["R8"]]


def test_example4_binary_node(systems):
    sys = systems["example4"]
    cls = classify_kinetics(sys)
    assert cls.kind == PL_NDK
    (node,) = cls.ndk_nodes
    assert sys.net.complex_label(node.reactant) == "X1"
    assert node.binary and node.monospecies and cls.minimally_ndk


@pytest.mark.parametrize(
    "name, expected",
    [
        ("example1", {(frozenset({"R1", "R2"}), "A2")}),
        ("idhkp", {(frozenset({"R1", "R5"}), "I"), (frozenset({"R1", "R6"}), "I")}),
        ("schmitz", {(frozenset({"R2", "R8"}), "M1")}),
        ("example4", {(frozenset({"R1", "R4"}), "X1"), (frozenset({"R2", "R4"}), "X3")}),
        ("ab_mass_action", set()),
    ],
)
def test_sf_pairs(systems, name, expected):
    assert expected <= _pairs(systems[name])
    if name in ("example1", "schmitz", "ab_mass_action"):
        assert _pairs(systems[name]) == expected


def test_sf_pair_filters(systems):
    sys = systems["example1"]
    assert _pairs(sys, filter="same_linkage_class") == _pairs(sys)
    # every complex of a weakly reversible network is terminal
    assert _pairs(sys, filter="nonterminal_only") == set()
    with pytest.raises(ValueError):
        find_sf_pairs(sys, filter="bogus")


def test_minimal_but_not_binary():
    net = network_from_reactions(
        ["A", "B", "C"],
        [("R1", {"A": 1}, {"B": 1}), ("R2", {"A": 1}, {"C": 1}), ("R3", {"A": 1}, {"B": 1, "C": 1}),
         ("R4", {"B": 1}, {"A": 1})],
    )
    sys = KineticSystem.from_orders(net, [{"A": 1}, {"A": 1}, {"A": 2}, {"B": 1}])
    cls = classify_kinetics(sys)
    (node,) = cls.ndk_nodes
    assert node.minimal and not node.binary and cls.minimally_ndk


def test_tolerance_merges_nearby_rows():
    net = network_from_reactions(["A", "B"], [("R1", {"A": 1}, {"B": 1}), ("R2", {"A": 1}, {"B": 2})])
    sys = KineticSystem.from_orders(net, [{"A": "0.5"}, {"A": "0.5000000001"}])
    assert classify_kinetics(sys).kind == PL_NDK
    assert classify_kinetics(sys, tol=1e-6).kind == PL_RDK


@settings(max_examples=100, deadline=None)
@given(kinetic_systems())
def test_sf_relation_is_symmetric_and_single_coordinate(sys):
    for p in find_sf_pairs(sys):
        a, b = sys.F[p.reaction_a], sys.F[p.reaction_b]
        diff = [sp for sp, x, y in zip(sys.net.species, a, b) if x != y]
        assert diff == [p.species]
        assert p.reaction_a < p.reaction_b
    swapped = KineticSystem(sys.net, sys.F[::-1]) if sys.net.r > 1 else sys
    # reversing the rows of F reverses which reaction holds which row but keeps the row pairs
    rows = {frozenset((sys.F[p.reaction_a], sys.F[p.reaction_b])) for p in find_sf_pairs(sys)}
    rows_swapped = {frozenset((swapped.F[p.reaction_a], swapped.F[p.reaction_b])) for p in find_sf_pairs(swapped)}
    assert rows == rows_swapped


@settings(max_examples=100, deadline=None)
@given(kinetic_systems())
def test_nonterminal_filter_subset(sys):
    all_pairs = set(find_sf_pairs(sys))
    nonterminal = set(structural_summary(sys.net).nonterminal_complexes)
    for p in find_sf_pairs(sys, filter="nonterminal_only"):
        assert p in all_pairs
        assert sys.net.reactions[p.reaction_a].reactant in nonterminal
        assert sys.net.reactions[p.reaction_b].reactant in nonterminal


def test_t_tilde(systems):
    sys = systems["example1"]
    tt = t_tilde(sys)
    mat = tt.matrix()
    assert len(mat) == 3 and len(mat[0]) == sys.net.n
    # column of complex A2 is the kinetic order row of R3, A3 is a reactant of R4
    a2 = [i for i in range(sys.net.n) if sys.net.complex_label(i) == "A2"][0]
    assert [row[a2] for row in mat] == [Fraction(0), Fraction(1), Fraction(0)]
    with pytest.raises(KineticsError):
        t_tilde(systems["schmitz"])


def test_kinetic_system_validation(systems):
    net = systems["example1"].net
    with pytest.raises(KineticsError):
        KineticSystem(net, [[1, 0, 0]])
    with pytest.raises(KineticsError):
        KineticSystem(net, [[1, 0]] * 4)
    with pytest.raises(KineticsError):
        KineticSystem.from_orders(net, [{"Z": 1}] * 4)
    with pytest.raises((KineticsError, ValueError)):
        KineticSystem(net, systems["example1"].F, k=[1, -1, 1, 1])


def test_mass_action_rows_equal_reactants(systems):
    sys = systems["ab_mass_action"]
    assert KineticSystem.mass_action(sys.net).F == sys.F
    assert sys.has_numeric_rates
