"""Power-law kinetics: kinetic-order matrices, NDK nodes and SF-pairs."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence, Union

import numpy as np

from .linalg import to_fraction
from .model import Network, linkage_partitions, structural_summary

Rate = Union[Fraction, float, str]

PL_RDK = "PL-RDK"
PL_NDK = "PL-NDK"


class KineticsError(ValueError):
    pass


def _read_rate(value) -> Rate:
    if isinstance(value, str):
        try:
            q = to_fraction(value)
        except (ValueError, ArithmeticError):
            if not value.strip():
                raise KineticsError("empty rate symbol") from None
            return value.strip()
    elif isinstance(value, float):
        q = value
    else:
        q = to_fraction(value)
    if not q > 0:
        raise KineticsError(f"rate constants must be positive, got {value!r}")
    return q


@dataclass(frozen=True)
class KineticSystem:
    """A network with kinetic-order matrix ``F`` (one row per reaction).

    ``k`` is optional; entries are positive rationals, floats, or opaque
    symbols (strings).  Without ``k`` a reaction's rate is the symbol given by
    its label.
    """

    net: Network
    F: tuple[tuple[Fraction, ...], ...]
    k: tuple[Rate, ...] | None = None

    def __post_init__(self):
        F = tuple(tuple(to_fraction(x) for x in row) for row in self.F)
        if len(F) != self.net.r:
            raise KineticsError(f"F has {len(F)} rows for {self.net.r} reactions")
        for j, row in enumerate(F):
            if len(row) != self.net.m:
                raise KineticsError(
                    f"F row for {self.net.reactions[j].label} has {len(row)} entries, expected {self.net.m}"
                )
        object.__setattr__(self, "F", F)
        if self.k is not None:
            k = tuple(_read_rate(v) for v in self.k)
            if len(k) != self.net.r:
                raise KineticsError(f"rate vector has {len(k)} entries for {self.net.r} reactions")
            object.__setattr__(self, "k", k)

    @classmethod
    def mass_action(cls, net: Network, k=None) -> "KineticSystem":
        F = tuple(net.reactant_of(j).vector(net.species) for j in range(net.r))
        return cls(net, F, None if k is None else tuple(k))

    @classmethod
    def from_orders(cls, net: Network, orders: Sequence[dict], k=None) -> "KineticSystem":
        """``orders[j]`` maps species to kinetic order; missing entries are 0."""
        F = []
        for j, od in enumerate(orders):
            unknown = set(od) - set(net.species)
            if unknown:
                raise KineticsError(
                    f"kinetic order of {net.reactions[j].label} uses unknown species {sorted(unknown)[0]!r}"
                )
            F.append(tuple(to_fraction(od.get(sp, 0)) for sp in net.species))
        return cls(net, tuple(F), None if k is None else tuple(k))

    def row(self, j: int) -> tuple[Fraction, ...]:
        return self.F[j]

    def row_dict(self, j: int) -> dict[str, Fraction]:
        return {sp: x for sp, x in zip(self.net.species, self.F[j]) if x}

    def rate_symbol(self, j: int) -> Rate:
        return self.net.reactions[j].label if self.k is None else self.k[j]

    @property
    def has_numeric_rates(self) -> bool:
        return self.k is not None and all(not isinstance(v, str) for v in self.k)

    def numeric_rates(self) -> np.ndarray:
        if not self.has_numeric_rates:
            raise KineticsError("system carries no numeric rate vector")
        return np.array([float(v) for v in self.k], dtype=float)

    def with_rates(self, k) -> "KineticSystem":
        return KineticSystem(self.net, self.F, None if k is None else tuple(k))

    def F_array(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.F], dtype=float).reshape(
            self.net.r, self.net.m
        )


def _rows_equal(a, b, tol) -> bool:
    if tol is None:
        return a == b
    return all(abs(float(x) - float(y)) <= tol for x, y in zip(a, b))


def _differing(a, b, tol) -> list[int]:
    if tol is None:
        return [i for i, (x, y) in enumerate(zip(a, b)) if x != y]
    return [i for i, (x, y) in enumerate(zip(a, b)) if abs(float(x) - float(y)) > tol]


@dataclass(frozen=True)
class NDKNode:
    reactant: int
    cf_subsets: tuple[tuple[int, ...], ...]
    minimal: bool
    binary: bool
    monospecies: bool


@dataclass(frozen=True)
class KineticsClassification:
    kind: str
    ndk_nodes: tuple[NDKNode, ...]
    cf_subsets: dict[int, tuple[tuple[int, ...], ...]]

    @property
    def minimally_ndk(self) -> bool:
        return self.kind == PL_NDK and len(self.ndk_nodes) == 1 and self.ndk_nodes[0].minimal


def cf_subsets(sys: KineticSystem, tol: float | None = None) -> dict[int, tuple[tuple[int, ...], ...]]:
    """Group each reactant complex's outgoing reactions by kinetic-order row."""
    out: dict[int, list[list[int]]] = {}
    for j, rx in enumerate(sys.net.reactions):
        groups = out.setdefault(rx.reactant, [])
        for g in groups:
            if _rows_equal(sys.F[g[0]], sys.F[j], tol):
                g.append(j)
                break
        else:
            groups.append([j])
    return {c: tuple(tuple(g) for g in gs) for c, gs in sorted(out.items())}


def classify_kinetics(sys: KineticSystem, tol: float | None = None) -> KineticsClassification:
    """PL-RDK / PL-NDK classification with the NDK nodes and their CF-subsets.

    ``tol`` loosens kinetic-order equality; the default compares exactly.
    """
    subsets = cf_subsets(sys, tol)
    nodes = []
    for c, groups in subsets.items():
        if len(groups) < 2:
            continue
        two = len(groups) == 2
        nodes.append(
            NDKNode(
                reactant=c,
                cf_subsets=groups,
                minimal=two and any(len(g) == 1 for g in groups),
                binary=two and all(len(g) == 1 for g in groups),
                monospecies=len(sys.net.complexes[c].support) == 1,
            )
        )
    return KineticsClassification(PL_NDK if nodes else PL_RDK, tuple(nodes), subsets)


@dataclass(frozen=True)
class SFPair:
    reaction_a: int
    reaction_b: int
    species: str
    both_nonterminal_reactants: bool
    same_linkage_class: bool


SFFilter = Literal["all", "nonterminal_only", "same_linkage_class"]


def find_sf_pairs(
    sys: KineticSystem, filter: SFFilter = "all", tol: float | None = None
) -> list[SFPair]:
    """All reaction pairs whose kinetic-order rows differ in exactly one species."""
    if filter not in ("all", "nonterminal_only", "same_linkage_class"):
        raise ValueError(f"unknown filter {filter!r}")
    net = sys.net
    summary = structural_summary(net)
    nonterminal = set(summary.nonterminal_complexes)
    lc_of = {
        c: i for i, lc in enumerate(linkage_partitions(net).linkage_classes) for c in lc
    }
    pairs = []
    for a in range(net.r):
        for b in range(a + 1, net.r):
            diff = _differing(sys.F[a], sys.F[b], tol)
            if len(diff) != 1:
                continue
            ya, yb = net.reactions[a].reactant, net.reactions[b].reactant
            pair = SFPair(
                reaction_a=a,
                reaction_b=b,
                species=net.species[diff[0]],
                both_nonterminal_reactants=ya in nonterminal and yb in nonterminal,
                same_linkage_class=lc_of[ya] == lc_of[yb],
            )
            if filter == "nonterminal_only" and not pair.both_nonterminal_reactants:
                continue
            if filter == "same_linkage_class" and not pair.same_linkage_class:
                continue
            pairs.append(pair)
    return pairs


@dataclass(frozen=True)
class TTildeMatrix:
    """Kinetic-order vector per complex; zero for complexes that are not reactants."""

    species: tuple[str, ...]
    cols: dict[int, tuple[Fraction, ...]]

    def matrix(self) -> list[list[Fraction]]:
        n = len(self.cols)
        return [[self.cols[c][i] for c in range(n)] for i in range(len(self.species))]


def t_tilde(sys: KineticSystem) -> TTildeMatrix:
    if classify_kinetics(sys).kind != PL_RDK:
        raise KineticsError("T-tilde is undefined for NDK nodes (system is PL-NDK)")
    zero = tuple(Fraction(0) for _ in sys.net.species)
    cols = {c: zero for c in range(sys.net.n)}
    for j, rx in enumerate(sys.net.reactions):
        cols[rx.reactant] = sys.F[j]
    return TTildeMatrix(sys.net.species, cols)
