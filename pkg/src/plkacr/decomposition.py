"""Subnetworks and the independence properties of reaction-set partitions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .kinetics import KineticSystem
from .model import StructuralSummary, build_network, linkage_partitions, structural_summary


class DecompositionError(ValueError):
    pass


@dataclass(frozen=True)
class Decomposition:
    """Partition of reaction indices; parts sorted and ordered by least index."""

    parts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        parts = tuple(sorted((tuple(sorted(p)) for p in self.parts), key=lambda p: p[0] if p else -1))
        object.__setattr__(self, "parts", parts)

    @classmethod
    def from_labels(cls, sys: KineticSystem, parts: Iterable[Iterable[str]]) -> "Decomposition":
        out = []
        for part in parts:
            idx = []
            for label in part:
                try:
                    idx.append(sys.net.reaction_index(label))
                except KeyError:
                    raise DecompositionError(f"unknown reaction label {label!r}") from None
            out.append(tuple(idx))
        return cls(tuple(out))

    def validate(self, r: int) -> None:
        problems = []
        if any(not p for p in self.parts):
            problems.append("empty part")
        counts = [0] * r
        for p in self.parts:
            for j in p:
                if not 0 <= j < r:
                    problems.append(f"reaction index {j} out of range")
                else:
                    counts[j] += 1
        overlaps = [j for j, c in enumerate(counts) if c > 1]
        gaps = [j for j, c in enumerate(counts) if c == 0]
        if overlaps:
            problems.append(f"reactions in more than one part: {overlaps}")
        if gaps:
            problems.append(f"reactions in no part: {gaps}")
        if problems:
            raise DecompositionError("not a partition of the reactions: " + "; ".join(problems))

    def labels(self, sys: KineticSystem) -> list[list[str]]:
        return [[sys.net.reactions[j].label for j in p] for p in self.parts]


@dataclass(frozen=True)
class Subsystem:
    """An induced subsystem plus maps back to parent indices.

    ``external_species`` lists parent species outside the subnetwork that
    still carry nonzero kinetic orders in its reactions.
    """

    system: KineticSystem
    reactions: tuple[int, ...]
    complexes: tuple[int, ...]
    external_species: tuple[str, ...]


def subnetwork_of(sys: KineticSystem, reactions: Iterable[Union[int, str]]) -> Subsystem:
    net = sys.net
    idx = sorted({net.reaction_index(j) if isinstance(j, str) else j for j in reactions})
    if not idx:
        raise DecompositionError("a subnetwork needs at least one reaction")
    if idx[0] < 0 or idx[-1] >= net.r:
        raise DecompositionError("reaction index out of range")
    cplx = sorted({c for j in idx for c in (net.reactions[j].reactant, net.reactions[j].product)})
    support = set().union(*(net.complexes[c].support for c in cplx))
    species = tuple(sp for sp in net.species if sp in support)
    keep = [net.species.index(sp) for sp in species]
    external = tuple(
        sp
        for i, sp in enumerate(net.species)
        if sp not in support and any(sys.F[j][i] for j in idx)
    )
    pos = {c: i for i, c in enumerate(cplx)}
    sub_net = build_network(
        species,
        [net.complexes[c] for c in cplx],
        [(pos[net.reactions[j].reactant], pos[net.reactions[j].product], net.reactions[j].label) for j in idx],
    )
    F = tuple(tuple(sys.F[j][i] for i in keep) for j in idx)
    k = None if sys.k is None else tuple(sys.k[j] for j in idx)
    return Subsystem(KineticSystem(sub_net, F, k), tuple(idx), tuple(cplx), external)


@dataclass(frozen=True)
class DecompositionReport:
    decomposition: Decomposition
    parent: StructuralSummary
    parts: tuple[StructuralSummary, ...]
    part_complexes: tuple[tuple[int, ...], ...]
    s_sum: int
    incidence_sum: int
    delta_sum: int
    independent: bool
    incidence_independent: bool
    bi_independent: bool
    c_decomposition: bool
    deficiency_relation: str
    issues: tuple[str, ...]

    @property
    def consistent(self) -> bool:
        return not self.issues


def check_decomposition(sys: KineticSystem, decomp: Decomposition) -> DecompositionReport:
    """Exact independence tests for a partition, cross-checked against known identities.

    Any identity that fails (deficiency inequalities, the C-decomposition
    structure property, ...) lands in ``issues``; an empty tuple means the
    report is internally consistent.
    """
    decomp.validate(sys.net.r)
    parent = structural_summary(sys.net)
    subs = [subnetwork_of(sys, p) for p in decomp.parts]
    parts = tuple(structural_summary(s.system.net) for s in subs)
    s_sum = sum(p.s for p in parts)
    inc_sum = sum(p.n - p.l for p in parts)
    delta_sum = sum(p.delta for p in parts)
    independent = parent.s == s_sum
    incidence = parent.n - parent.l == inc_sum
    seen: set[int] = set()
    c_decomp = True
    for s in subs:
        if seen & set(s.complexes):
            c_decomp = False
        seen |= set(s.complexes)
    relation = "=" if parent.delta == delta_sum else ("<" if parent.delta < delta_sum else ">")

    issues = []
    if parent.s > s_sum:
        issues.append("rank exceeds the sum of part ranks")
    if parent.n - parent.l > inc_sum:
        issues.append("incidence rank exceeds the sum over parts")
    if independent and parent.delta > delta_sum:
        issues.append("independent decomposition with deficiency above the sum of part deficiencies")
    if incidence and parent.delta < delta_sum:
        issues.append("incidence independent decomposition with deficiency below the sum")
    bi = independent and incidence
    if bi and relation != "=":
        issues.append("bi-independent decomposition without additive deficiency")
    if (independent or incidence) and relation == "=" and not bi:
        issues.append("additive deficiency without bi-independence")
    lc_of = {c: i for i, lc in enumerate(linkage_partitions(sys.net).linkage_classes) for c in lc}
    unions = all(
        {c for c in range(sys.net.n) if lc_of[c] in {lc_of[x] for x in s.complexes}} == set(s.complexes)
        for s in subs
    )
    # disjoint complex sets force each part to be a union of linkage classes;
    # the converse fails when parts reuse the same linkage classes
    if c_decomp and not unions:
        issues.append("C-decomposition whose parts are not unions of linkage classes")
    if c_decomp and not incidence:
        issues.append("C-decomposition that is not incidence independent")
    if parent.delta == 0 and independent and not incidence:
        issues.append("independent decomposition of a deficiency zero network is not incidence independent")

    return DecompositionReport(
        decomposition=decomp,
        parent=parent,
        parts=parts,
        part_complexes=tuple(s.complexes for s in subs),
        s_sum=s_sum,
        incidence_sum=inc_sum,
        delta_sum=delta_sum,
        independent=independent,
        incidence_independent=incidence,
        bi_independent=bi,
        c_decomposition=c_decomp,
        deficiency_relation=relation,
        issues=tuple(issues),
    )


def linkage_class_decomposition(sys: KineticSystem) -> Decomposition:
    lcs = linkage_partitions(sys.net).linkage_classes
    lc_of = {c: i for i, lc in enumerate(lcs) for c in lc}
    parts: list[list[int]] = [[] for _ in lcs]
    for j, rx in enumerate(sys.net.reactions):
        parts[lc_of[rx.reactant]].append(j)
    return Decomposition(tuple(tuple(p) for p in parts))


def part_residuals(
    sys: KineticSystem, decomp: Decomposition, k: Sequence[float], c: Sequence[float]
) -> list[tuple[float, float]]:
    """``(max |f_i(c)|, max |g_i(c)|)`` for each part, evaluated in the parent's species space."""
    from .numerics import evaluate

    rates = evaluate(sys, k, c)
    net = sys.net
    out = []
    for part in decomp.parts:
        f = np.zeros(net.m)
        g = np.zeros(net.n)
        for j in part:
            vec = np.array([float(x) for x in net.reaction_vector(j)])
            f += rates.K[j] * vec
            g[net.reactions[j].product] += rates.K[j]
            g[net.reactions[j].reactant] -= rates.K[j]
        out.append((float(np.max(np.abs(f))), float(np.max(np.abs(g)))))
    return out
