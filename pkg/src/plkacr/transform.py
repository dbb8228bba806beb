"""Reaction translation, CF-RM+ and a dynamic-equivalence check."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .kinetics import PL_RDK, KineticSystem, Rate, classify_kinetics
from .linalg import same_column_span
from .model import Complex, build_network, linear_maps

EQUIVALENCE_TOL = 1e-12
MAX_MULTIPLIER = 10_000


class TransformError(ValueError):
    pass


@dataclass(frozen=True)
class Move:
    label: str
    multiplier: int
    reactant: Complex
    product: Complex


@dataclass(frozen=True)
class TransformRecord:
    source: KineticSystem
    result: KineticSystem
    moves: tuple[Move, ...]
    kept: dict[int, tuple[int, ...]] = field(default_factory=dict)
    notes: tuple[str, ...] = ()


def _reaction(sys: KineticSystem, reaction: Union[int, str]) -> int:
    if isinstance(reaction, str):
        return sys.net.reaction_index(reaction)
    if not 0 <= reaction < sys.net.r:
        raise TransformError(f"no reaction with index {reaction}")
    return reaction


def _rebuild(sys: KineticSystem, replaced: dict[int, tuple[Complex, Complex]]) -> KineticSystem:
    """Swap endpoints of the given reactions, dropping complexes left unused."""
    net = sys.net
    ends = []
    for j, rx in enumerate(net.reactions):
        if j in replaced:
            ends.append(replaced[j])
        else:
            ends.append((net.complexes[rx.reactant], net.complexes[rx.product]))
    used = {c for pair in ends for c in pair}
    order = [c for c in net.complexes if c in used]
    for pair in ends:
        for c in pair:
            if c not in order:
                order.append(c)
    idx = {c: i for i, c in enumerate(order)}
    specs = [(idx[a], idx[b], rx.label) for (a, b), rx in zip(ends, net.reactions)]
    new_net = build_network(net.species, order, specs)
    return KineticSystem(new_net, sys.F, sys.k)


def _fresh_multiplier(y: Complex, products: list[Complex], existing: set[Complex], start: int = 1) -> int:
    if not y.coeffs:
        raise TransformError("cannot translate a reaction whose reactant is the zero complex")
    for a in range(start, MAX_MULTIPLIER):
        shift = y.scaled(a)
        new = [y + shift] + [p + shift for p in products]
        if len(set(new)) == len(new) and not any(c in existing for c in new):
            return a
    raise TransformError(f"no fresh multiplier below {MAX_MULTIPLIER} for {y}")


def translate_reaction(sys: KineticSystem, reaction: Union[int, str], a: int) -> KineticSystem:
    """Replace ``y -> y'`` by ``y + a*y -> y' + a*y``, keeping its kinetic order and rate."""
    if isinstance(a, bool) or not isinstance(a, int) or a < 1:
        raise TransformError(f"multiplier must be a positive integer, got {a!r}")
    j = _reaction(sys, reaction)
    y, yp = sys.net.reactant_of(j), sys.net.product_of(j)
    if not y.coeffs:
        raise TransformError("cannot translate a reaction whose reactant is the zero complex")
    shift = y.scaled(a)
    return _rebuild(sys, {j: (y + shift, yp + shift)})


def cf_rm_plus(
    sys: KineticSystem,
    force_translate: Union[int, str, None] = None,
    multiplier: int | None = None,
) -> TransformRecord:
    """Transform a PL-NDK system into a dynamically equivalent PL-RDK one.

    At every NDK node the first CF-subset of maximal size (ties go to the
    subset holding the lowest reaction index) stays put.  Each other subset
    is moved as a block: all its reactions get the same multiplier ``a``, the
    least ``a >= 1`` for which the shared new reactant ``(1 + a) y`` and
    every new product ``y' + a y`` are absent from the complexes present so
    far.

    ``force_translate`` names one reaction to move regardless of kinetics,
    with ``multiplier`` or else the least fresh one.  A PL-RDK input without
    it comes back unchanged.
    """
    net = sys.net
    existing = set(net.complexes)
    replaced: dict[int, tuple[Complex, Complex]] = {}
    moves: list[Move] = []
    kept: dict[int, tuple[int, ...]] = {}
    notes: list[str] = []

    if force_translate is not None:
        j = _reaction(sys, force_translate)
        y, yp = net.reactant_of(j), net.product_of(j)
        if multiplier is None:
            a = _fresh_multiplier(y, [yp], existing)
        else:
            a = multiplier
            if _fresh_multiplier(y, [yp], existing, start=a) != a:
                raise TransformError(f"multiplier {a} does not give fresh complexes for {net.reactions[j].label}")
        shift = y.scaled(a)
        replaced[j] = (y + shift, yp + shift)
        moves.append(Move(net.reactions[j].label, a, *replaced[j]))
        notes.append(f"forced translation of {net.reactions[j].label}")
    else:
        cls = classify_kinetics(sys)
        if cls.kind == PL_RDK:
            return TransformRecord(sys, sys, (), {}, ("input is already PL-RDK; nothing to do",))
        if multiplier is not None:
            raise TransformError("a fixed multiplier needs force_translate")
        for node in cls.ndk_nodes:
            biggest = max(len(s) for s in node.cf_subsets)
            keep = next(s for s in node.cf_subsets if len(s) == biggest)
            kept[node.reactant] = keep
            if sum(len(s) == biggest for s in node.cf_subsets) > 1:
                notes.append(
                    f"tie among maximal CF-subsets at {net.complex_label(node.reactant)}; kept the one with "
                    f"{net.reactions[keep[0]].label}"
                )
            y = net.complexes[node.reactant]
            for subset in node.cf_subsets:
                if subset is keep:
                    continue
                products = [net.product_of(j) for j in subset]
                a = _fresh_multiplier(y, products, existing)
                shift = y.scaled(a)
                for j, yp in zip(subset, products):
                    replaced[j] = (y + shift, yp + shift)
                    existing.update(replaced[j])
                    moves.append(Move(net.reactions[j].label, a, *replaced[j]))

    result = _rebuild(sys, replaced)
    return TransformRecord(sys, result, tuple(moves), kept, tuple(notes))


@dataclass(frozen=True)
class TransformChecks:
    result_rdk: bool
    kinetic_orders_preserved: bool
    same_stoichiometric_subspace: bool
    dynamically_equivalent: bool

    def __bool__(self) -> bool:
        return (
            self.kinetic_orders_preserved
            and self.same_stoichiometric_subspace
            and self.dynamically_equivalent
        )


def check_transform(record: TransformRecord) -> TransformChecks:
    src, res = record.source, record.result
    f_same = {
        rx.label: src.F[j] for j, rx in enumerate(src.net.reactions)
    } == {rx.label: res.F[j] for j, rx in enumerate(res.net.reactions)}
    same_s = src.net.species == res.net.species and same_column_span(
        linear_maps(src.net).N, linear_maps(res.net).N
    )
    return TransformChecks(
        result_rdk=classify_kinetics(res).kind == PL_RDK,
        kinetic_orders_preserved=f_same,
        same_stoichiometric_subspace=same_s,
        dynamically_equivalent=bool(dynamically_equivalent(src, res)),
    )


class EquivalenceError(ValueError):
    pass


@dataclass(frozen=True)
class Discrepancy:
    species: str
    kinetic_order: tuple[Fraction, ...]
    left: dict
    right: dict


@dataclass(frozen=True)
class EquivalenceReport:
    equivalent: bool
    discrepancies: tuple[Discrepancy, ...]

    def __bool__(self) -> bool:
        return self.equivalent


def _ode_terms(sys: KineticSystem, species: tuple[str, ...]):
    """Per species: kinetic-order row -> linear combination of rate symbols.

    Numeric rates collect under the key ``""``.
    """
    terms: dict[str, dict[tuple, dict[str, Union[Fraction, float]]]] = {sp: {} for sp in species}
    pos = {sp: sys.net.species.index(sp) for sp in species}
    for j in range(sys.net.r):
        vec = sys.net.reaction_vector(j)
        row = tuple(sys.F[j][pos[sp]] for sp in species)
        rate: Rate = sys.rate_symbol(j)
        key, scale = (rate, Fraction(1)) if isinstance(rate, str) else ("", rate)
        for sp in species:
            coeff = vec[pos[sp]]
            if not coeff:
                continue
            comb = terms[sp].setdefault(row, {})
            comb[key] = comb.get(key, 0) + scale * coeff
    return terms


def _close(a, b) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    a, b = float(a), float(b)
    return abs(a - b) <= EQUIVALENCE_TOL * max(1.0, abs(a), abs(b))


def _combs_equal(p: dict, q: dict) -> bool:
    return all(_close(p.get(key, 0), q.get(key, 0)) for key in set(p) | set(q))


def dynamically_equivalent(left: KineticSystem, right: KineticSystem) -> EquivalenceReport:
    """Whether two systems produce the same species formation rate function.

    Reaction rates act as opaque symbols (the rate entry if it is a string,
    else the reaction label when no rates are set).  Numeric rates compare
    exactly when rational, else to a relative 1e-12.
    """
    if set(left.net.species) != set(right.net.species):
        raise EquivalenceError(
            f"species sets differ: {sorted(left.net.species)} vs {sorted(right.net.species)}"
        )
    species = left.net.species
    lt, rt = _ode_terms(left, species), _ode_terms(right, species)
    bad = []
    for sp in species:
        for row in sorted(set(lt[sp]) | set(rt[sp])):
            p, q = lt[sp].get(row, {}), rt[sp].get(row, {})
            if not _combs_equal(p, q):
                bad.append(Discrepancy(sp, row, p, q))
    return EquivalenceReport(not bad, tuple(bad))
