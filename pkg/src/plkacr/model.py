"""Reaction networks with exact stoichiometry and their structural indices."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Union

from . import graph
from .linalg import format_fraction, rank, to_fraction


class NetworkError(ValueError):
    """Invalid network input.  ``offender`` names the culprit when known."""

    def __init__(self, message: str, offender: object = None):
        super().__init__(message)
        self.offender = offender


@dataclass(frozen=True)
class Complex:
    """Non-negative species combination, stored sparsely and sorted by species id."""

    coeffs: tuple[tuple[str, Fraction], ...] = ()

    @classmethod
    def of(cls, value: Union["Complex", Mapping[str, object]]) -> "Complex":
        if isinstance(value, Complex):
            return value
        items = []
        for sp, c in value.items():
            q = to_fraction(c)
            if q < 0:
                raise NetworkError(f"negative coefficient {c} for species {sp!r}", sp)
            if q:
                items.append((str(sp), q))
        return cls(tuple(sorted(items)))

    def __getitem__(self, species: str) -> Fraction:
        for sp, c in self.coeffs:
            if sp == species:
                return c
        return Fraction(0)

    @property
    def support(self) -> frozenset[str]:
        return frozenset(sp for sp, _ in self.coeffs)

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.coeffs)

    def __add__(self, other: "Complex") -> "Complex":
        total = self.as_dict()
        for sp, c in other.coeffs:
            total[sp] = total.get(sp, Fraction(0)) + c
        return Complex.of(total)

    def scaled(self, factor) -> "Complex":
        f = to_fraction(factor)
        return Complex.of({sp: c * f for sp, c in self.coeffs})

    def vector(self, species: Sequence[str]) -> tuple[Fraction, ...]:
        d = self.as_dict()
        return tuple(d.get(sp, Fraction(0)) for sp in species)

    def label(self, order: Sequence[str] | None = None) -> str:
        if not self.coeffs:
            return "0"
        d = self.as_dict()
        keys = [sp for sp in order if sp in d] if order is not None else sorted(d)
        parts = []
        for sp in keys:
            c = d[sp]
            parts.append(sp if c == 1 else f"{format_fraction(c)}{sp}")
        return " + ".join(parts)

    def __str__(self) -> str:
        return self.label()


@dataclass(frozen=True)
class Reaction:
    reactant: int
    product: int
    label: str


@dataclass(frozen=True)
class Network:
    """A validated network.  Build through :func:`build_network`."""

    species: tuple[str, ...]
    complexes: tuple[Complex, ...]
    reactions: tuple[Reaction, ...]

    @property
    def m(self) -> int:
        return len(self.species)

    @property
    def n(self) -> int:
        return len(self.complexes)

    @property
    def r(self) -> int:
        return len(self.reactions)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(rx.label for rx in self.reactions)

    @property
    def arcs(self) -> tuple[tuple[int, int], ...]:
        return tuple((rx.reactant, rx.product) for rx in self.reactions)

    def reaction_index(self, label: str) -> int:
        for j, rx in enumerate(self.reactions):
            if rx.label == label:
                return j
        raise KeyError(f"no reaction labelled {label!r}")

    def species_index(self, sp: str) -> int:
        try:
            return self.species.index(sp)
        except ValueError:
            raise KeyError(f"unknown species {sp!r}") from None

    def complex_label(self, i: int) -> str:
        return self.complexes[i].label(self.species)

    def reactant_of(self, j: int) -> Complex:
        return self.complexes[self.reactions[j].reactant]

    def product_of(self, j: int) -> Complex:
        return self.complexes[self.reactions[j].product]

    def reaction_vector(self, j: int) -> tuple[Fraction, ...]:
        y = self.reactant_of(j).vector(self.species)
        yp = self.product_of(j).vector(self.species)
        return tuple(b - a for a, b in zip(y, yp))

    def describe_reaction(self, j: int) -> str:
        rx = self.reactions[j]
        return f"{rx.label}: {self.complex_label(rx.reactant)} -> {self.complex_label(rx.product)}"


ReactionSpec = Union[Reaction, tuple]


def build_network(
    species: Iterable[str],
    complexes: Iterable[Union[Complex, Mapping[str, object]]],
    reactions: Iterable[ReactionSpec],
) -> Network:
    """Validate inputs and return a canonical :class:`Network`.

    ``reactions`` holds :class:`Reaction` objects or ``(reactant, product,
    label)`` tuples indexing into ``complexes``.  Complexes with equal
    coefficient maps are merged; surviving indices follow first appearance.
    """
    species = tuple(species)
    seen: set[str] = set()
    for sp in species:
        if not isinstance(sp, str) or not sp:
            raise NetworkError(f"species id must be a non-empty string, got {sp!r}", sp)
        if sp in seen:
            raise NetworkError(f"duplicate species id {sp!r}", sp)
        seen.add(sp)

    raw = [Complex.of(c) for c in complexes]
    for c in raw:
        unknown = c.support - seen
        if unknown:
            bad = sorted(unknown)[0]
            raise NetworkError(f"complex {c} uses undeclared species {bad!r}", bad)

    canon: list[Complex] = []
    position: dict[Complex, int] = {}
    remap = []
    for c in raw:
        if c not in position:
            position[c] = len(canon)
            canon.append(c)
        remap.append(position[c])

    rxns: list[Reaction] = []
    labels: set[str] = set()
    for item in reactions:
        rx = item if isinstance(item, Reaction) else Reaction(*item)
        if not isinstance(rx.label, str) or not rx.label:
            raise NetworkError(f"reaction label must be a non-empty string, got {rx.label!r}", rx.label)
        for end in (rx.reactant, rx.product):
            if not isinstance(end, int) or not 0 <= end < len(raw):
                raise NetworkError(f"reaction {rx.label} refers to missing complex {end!r}", rx.label)
        if rx.label in labels:
            raise NetworkError(f"duplicate reaction label {rx.label!r}", rx.label)
        labels.add(rx.label)
        a, b = remap[rx.reactant], remap[rx.product]
        if a == b:
            raise NetworkError(f"reaction {rx.label} is a loop on {canon[a]}", rx.label)
        rxns.append(Reaction(a, b, rx.label))
    if not rxns:
        raise NetworkError("network has no reactions")

    used = {rx.reactant for rx in rxns} | {rx.product for rx in rxns}
    for i, c in enumerate(canon):
        if i not in used:
            raise NetworkError(f"complex {c} takes part in no reaction", c)
    covered = set().union(*(c.support for c in canon))
    for sp in species:
        if sp not in covered:
            raise NetworkError(f"species {sp!r} occurs in no complex", sp)

    return Network(species, tuple(canon), tuple(rxns))


def network_from_reactions(
    species: Iterable[str],
    reactions: Iterable[tuple[str, Mapping[str, object], Mapping[str, object]]],
) -> Network:
    """Build a network from ``(label, reactant_map, product_map)`` triples."""
    complexes: list[Complex] = []
    specs = []
    for label, lhs, rhs in reactions:
        complexes.extend([Complex.of(lhs), Complex.of(rhs)])
        specs.append((len(complexes) - 2, len(complexes) - 1, label))
    return build_network(species, complexes, specs)


@dataclass(frozen=True)
class LinkagePartitions:
    linkage_classes: tuple[tuple[int, ...], ...]
    strong_linkage_classes: tuple[tuple[int, ...], ...]
    terminal_strong_linkage_classes: tuple[tuple[int, ...], ...]


@lru_cache(maxsize=256)
def linkage_partitions(net: Network) -> LinkagePartitions:
    lcs = graph.weak_components(net.n, net.arcs)
    sccs = graph.strong_components(net.n, net.arcs)
    terminal = graph.terminal_components(sccs, net.arcs)
    return LinkagePartitions(
        tuple(map(tuple, lcs)), tuple(map(tuple, sccs)), tuple(map(tuple, terminal))
    )


@dataclass(frozen=True)
class StructuralSummary:
    n: int
    l: int  # noqa: E741
    sl: int
    t: int
    s: int
    delta: int
    weakly_reversible: bool
    terminal_complexes: tuple[int, ...]
    nonterminal_complexes: tuple[int, ...]


def stoichiometric_rank(net: Network) -> int:
    return rank(net.reaction_vector(j) for j in range(net.r))


@lru_cache(maxsize=256)
def structural_summary(net: Network) -> StructuralSummary:
    parts = linkage_partitions(net)
    s = stoichiometric_rank(net)
    terminal = sorted(i for cls in parts.terminal_strong_linkage_classes for i in cls)
    nonterminal = sorted(set(range(net.n)) - set(terminal))
    l = len(parts.linkage_classes)  # noqa: E741
    sl = len(parts.strong_linkage_classes)
    delta = net.n - l - s
    assert delta >= 0, "deficiency must be non-negative"
    return StructuralSummary(
        n=net.n,
        l=l,
        sl=sl,
        t=len(parts.terminal_strong_linkage_classes),
        s=s,
        delta=delta,
        weakly_reversible=sl == l,
        terminal_complexes=tuple(terminal),
        nonterminal_complexes=tuple(nonterminal),
    )


@dataclass(frozen=True)
class LinearMaps:
    """``Y`` (m x n), ``Ia`` (n x r) and ``N = Y Ia`` (m x r), exact entries."""

    Y: tuple[tuple[Fraction, ...], ...]
    Ia: tuple[tuple[Fraction, ...], ...]
    N: tuple[tuple[Fraction, ...], ...]


def linear_maps(net: Network) -> LinearMaps:
    cols = [c.vector(net.species) for c in net.complexes]
    Y = tuple(tuple(col[i] for col in cols) for i in range(net.m))
    Ia = [[Fraction(0)] * net.r for _ in range(net.n)]
    for j, rx in enumerate(net.reactions):
        Ia[rx.reactant][j] -= 1
        Ia[rx.product][j] += 1
    N = tuple(
        tuple(sum((Y[i][c] * Ia[c][j] for c in range(net.n)), Fraction(0)) for j in range(net.r))
        for i in range(net.m)
    )
    return LinearMaps(Y, tuple(map(tuple, Ia)), N)
