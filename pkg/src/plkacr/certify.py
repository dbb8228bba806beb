"""Sufficient conditions for ACR and BCR, with re-checkable certificates.

Every certificate records which rule fired, the SF-pair (and subnetwork or
NDK node) that witnesses it, and the equilibrium assumptions it rests on.
Nothing here proves an equilibrium exists; that has to come from the
caller, either asserted or backed by a converged numerical state.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .decomposition import (
    Decomposition,
    check_decomposition,
    subnetwork_of,
)
from .kinetics import (
    PL_RDK,
    KineticSystem,
    SFPair,
    classify_kinetics,
    find_sf_pairs,
)
from .model import structural_summary
from .transform import TransformError, cf_rm_plus

log = logging.getLogger(__name__)

ASSERTED = "asserted"
NUMERIC = "numeric-evidence"
UNKNOWN = "unknown"

ACR = "ACR"
BCR = "BCR"

SF_PLRDK_D1 = "SF-PLRDK-d1"
DZ_D0 = "DZ-d0"
DZ_MONOSPECIES = "DZ-monospecies-corollary"
DZ_RESTRICTED = "DZ-appendix-restricted"
DECOMP_ACR = "decomp-ACR"
DECOMP_BCR = "decomp-BCR"

_NEEDS_BALANCED = {DZ_MONOSPECIES, DECOMP_BCR}


class CertificationError(ValueError):
    pass


@dataclass(frozen=True)
class Evidence:
    status: str = UNKNOWN
    state: Optional[tuple[float, ...]] = None
    residual: Optional[float] = None

    def __post_init__(self):
        if self.status not in (ASSERTED, NUMERIC, UNKNOWN):
            raise ValueError(f"unknown evidence status {self.status!r}")
        if self.status == NUMERIC and (self.state is None or self.residual is None):
            raise ValueError("numeric evidence needs a witness state and its residual")

    @property
    def known(self) -> bool:
        return self.status != UNKNOWN


@dataclass(frozen=True)
class AssumptionLedger:
    positive_equilibrium: Evidence = field(default_factory=Evidence)
    complex_balanced_equilibrium: Evidence = field(default_factory=Evidence)
    absolutely_complex_balanced: bool = False

    @classmethod
    def asserting(
        cls, positive: bool = False, complex_balanced: bool = False, acb: bool = False
    ) -> "AssumptionLedger":
        return cls(
            Evidence(ASSERTED) if positive else Evidence(),
            Evidence(ASSERTED) if complex_balanced else Evidence(),
            acb,
        )

    @classmethod
    def from_steady_states(cls, steady, base: "AssumptionLedger | None" = None, cb_tol: float = 1e-8):
        """Fill unknown entries of ``base`` from a :class:`~plkacr.numerics.SteadyStateSet`."""
        base = base or cls()
        pos, cb = base.positive_equilibrium, base.complex_balanced_equilibrium
        if len(steady) and not pos.known:
            pos = Evidence(NUMERIC, tuple(map(float, steady.states[0])), float(steady.residuals[0]))
        if not cb.known:
            for state, g in zip(steady.states, steady.g_residuals):
                if g <= cb_tol:
                    cb = Evidence(NUMERIC, tuple(map(float, state)), float(g))
                    break
        return cls(pos, cb, base.absolutely_complex_balanced)

    def positive(self) -> Evidence:
        # a complex balanced equilibrium is in particular a positive equilibrium
        if self.positive_equilibrium.known:
            return self.positive_equilibrium
        return self.complex_balanced_equilibrium


@dataclass(frozen=True)
class RobustnessCertificate:
    kind: str
    species: str
    theorem: str
    witnesses: dict
    assumptions: AssumptionLedger
    conditional: bool
    notes: tuple[str, ...] = ()


def _required(theorem: str, ledger: AssumptionLedger) -> Evidence:
    if theorem in _NEEDS_BALANCED:
        return ledger.complex_balanced_equilibrium
    return ledger.positive()


def _pair_witness(sys: KineticSystem, pair: SFPair) -> dict:
    labels = sys.net.labels
    return {
        "reactions": [labels[pair.reaction_a], labels[pair.reaction_b]],
        "species": pair.species,
        "both_nonterminal_reactants": pair.both_nonterminal_reactants,
        "same_linkage_class": pair.same_linkage_class,
    }


def _emit(out, seen, kind, species, theorem, witnesses, ledger, notes=()):
    key = (kind, species, theorem)
    if key in seen:
        return
    seen.add(key)
    ev = _required(theorem, ledger)
    notes = tuple(notes)
    if not ev.known:
        needed = "complex balanced" if theorem in _NEEDS_BALANCED else "positive"
        notes += (f"conditional: no {needed} equilibrium asserted or found",)
    out.append(
        RobustnessCertificate(kind, species, theorem, witnesses, ledger, not ev.known, notes)
    )


def _by_species(pairs: Iterable[SFPair]) -> dict[str, list[SFPair]]:
    grouped: dict[str, list[SFPair]] = {}
    for p in pairs:
        grouped.setdefault(p.species, []).append(p)
    return grouped


def _caveats(sys: KineticSystem, translated: KineticSystem | None, pair: SFPair) -> list[str]:
    """Gaps between a deficiency-zero certificate and the arguments behind it.

    Both were found to matter on concrete systems: an SF-pair across linkage
    classes, and a minimal NDK node whose CF-RM+ transform leaves the pair's
    reactants terminal.  Either can come with equilibria that vary in the
    certified species.
    """
    notes = []
    if not pair.same_linkage_class:
        notes.append("caveat: the SF-pair joins two linkage classes; the restricted argument does not cover it")
    if translated is not None:
        labels = sys.net.labels
        want = {labels[pair.reaction_a], labels[pair.reaction_b]}
        tl = translated.net.labels
        still = [
            p
            for p in find_sf_pairs(translated, "nonterminal_only")
            if {tl[p.reaction_a], tl[p.reaction_b]} == want
        ]
        if not still:
            notes.append(
                "caveat: after CF-RM+ the SF-pair's reactants are not both nonterminal, "
                "so the deficiency-one argument does not apply"
            )
    return notes


def _best(sys, translated, ps: list[SFPair]) -> tuple[SFPair, list[str]]:
    scored = [(p, _caveats(sys, translated, p)) for p in ps]
    return min(scored, key=lambda item: len(item[1]))


def certify_single(
    sys: KineticSystem, ledger: AssumptionLedger, reasons: list[str] | None = None
) -> list[RobustnessCertificate]:
    """Apply the whole-network ACR rules, in this order.

    a. deficiency one, PL-RDK, SF-pair between nonterminal reactants;
    b. deficiency zero, PL-RDK or minimally PL-NDK, any SF-pair;
    c. deficiency zero, minimally PL-NDK with a monospecies node ``nX``,
       SF-pair in ``X`` across its two CF-subsets (needs a complex
       balanced equilibrium);
    d. deficiency zero, PL-RDK, SF-pair inside one linkage class.

    Rule d is the narrower kernel-based argument; it is reported on its own
    so the two routes stay traceable.  Why nothing fired is appended to
    ``reasons`` when given.
    """
    reasons = reasons if reasons is not None else []
    summary = structural_summary(sys.net)
    cls = classify_kinetics(sys)
    pairs = find_sf_pairs(sys)
    rdk = cls.kind == PL_RDK
    out: list[RobustnessCertificate] = []
    seen: set = set()

    if not pairs:
        reasons.append("no SF-pair: no two kinetic-order rows differ in exactly one species")
    if summary.delta == 1:
        if not rdk:
            reasons.append("deficiency one but PL-NDK: the deficiency-one rule needs PL-RDK")
        else:
            good = [p for p in pairs if p.both_nonterminal_reactants]
            if pairs and not good:
                reasons.append("deficiency one, but no SF-pair joins two nonterminal reactant complexes")
            for sp, ps in _by_species(good).items():
                _emit(out, seen, ACR, sp, SF_PLRDK_D1, {"sf_pair": _pair_witness(sys, ps[0])}, ledger)
    elif summary.delta == 0:
        translated = None
        if cls.minimally_ndk:
            try:
                translated = cf_rm_plus(sys).result
            except TransformError:
                pass
        if rdk or cls.minimally_ndk:
            for sp, ps in _by_species(pairs).items():
                pair, notes = _best(sys, translated, ps)
                _emit(out, seen, ACR, sp, DZ_D0, {"sf_pair": _pair_witness(sys, pair)}, ledger, notes)
        else:
            reasons.append("deficiency zero but PL-NDK beyond a single minimal NDK node")
        if cls.minimally_ndk and cls.ndk_nodes[0].monospecies:
            node = cls.ndk_nodes[0]
            (x,) = sys.net.complexes[node.reactant].support
            first, second = (set(s) for s in node.cf_subsets)
            across = [
                p
                for p in pairs
                if p.species == x
                and ({p.reaction_a, p.reaction_b} & first)
                and ({p.reaction_a, p.reaction_b} & second)
            ]
            if across:
                pair, notes = _best(sys, translated, across)
                _emit(
                    out,
                    seen,
                    ACR,
                    x,
                    DZ_MONOSPECIES,
                    {"sf_pair": _pair_witness(sys, pair), "ndk_node": sys.net.complex_label(node.reactant)},
                    ledger,
                    notes,
                )
            else:
                reasons.append(
                    f"monospecies NDK node {sys.net.complex_label(node.reactant)} has no SF-pair in {x} "
                    "across its CF-subsets (kinetic orders off the node's species differ)"
                )
        if rdk:
            for sp, ps in _by_species(p for p in pairs if p.same_linkage_class).items():
                _emit(out, seen, ACR, sp, DZ_RESTRICTED, {"sf_pair": _pair_witness(sys, ps[0])}, ledger)
    else:
        reasons.append(f"deficiency {summary.delta}: whole-network rules need deficiency zero or one")

    for c in out:
        log.debug("certificate %s(%s) via %s", c.kind, c.species, c.theorem)
    return out


def _part_qualifies(sub: KineticSystem) -> tuple[list[SFPair], str]:
    summary = structural_summary(sub.net)
    cls = classify_kinetics(sub)
    if summary.delta == 0 and (cls.kind == PL_RDK or cls.minimally_ndk):
        return find_sf_pairs(sub), ""
    if summary.delta == 1 and cls.kind == PL_RDK:
        return find_sf_pairs(sub, "nonterminal_only"), ""
    kind = "minimally PL-NDK" if cls.minimally_ndk else cls.kind
    return [], f"deficiency {summary.delta}, {kind}"


def certify_with_decomposition(
    sys: KineticSystem,
    decomp: Decomposition,
    ledger: AssumptionLedger,
    reasons: list[str] | None = None,
) -> list[RobustnessCertificate]:
    """ACR through an independent decomposition, BCR through an incidence independent one.

    A part qualifies when it is deficiency zero and PL-RDK or minimally
    PL-NDK (any SF-pair), or deficiency one and PL-RDK with an SF-pair
    between nonterminal reactants of the part.  The nonterminal requirement
    is stricter than needed for the plain "of SF-type" wording but keeps the
    deficiency-one case sound.
    """
    reasons = reasons if reasons is not None else []
    report = check_decomposition(sys, decomp)
    if report.issues:
        raise CertificationError("decomposition report is inconsistent: " + "; ".join(report.issues))
    if not (report.independent or report.incidence_independent):
        reasons.append("decomposition is neither independent nor incidence independent")
        return []

    parent_delta = report.parent.delta
    out: list[RobustnessCertificate] = []
    seen: set = set()
    for i, part in enumerate(decomp.parts):
        sub = subnetwork_of(sys, part)
        labels = list(sub.system.net.labels)
        if sub.external_species:
            reasons.append(
                f"part {i} depends kinetically on species outside it ({', '.join(sub.external_species)}); skipped"
            )
            continue
        pairs, why = _part_qualifies(sub.system)
        if why:
            reasons.append(f"part {i} does not qualify: {why}")
            continue
        if not pairs:
            reasons.append(f"part {i} has no usable SF-pair")
            continue
        notes = []
        if parent_delta >= 2:
            notes.append(f"parent network has higher deficiency ({parent_delta})")
            if report.bi_independent and any(
                p.delta > 1 for j, p in enumerate(report.parts) if j != i
            ):
                notes.append("bi-independent with another part of deficiency above one: deficiencies add up")
        for sp, ps in _by_species(pairs).items():
            base = {
                "sf_pair": _pair_witness(sub.system, ps[0]),
                "part": i,
                "part_reactions": labels,
                "part_deficiency": report.parts[i].delta,
                "decomposition": decomp.labels(sys),
                "independent": report.independent,
                "incidence_independent": report.incidence_independent,
            }
            if report.independent:
                _emit(out, seen, ACR, sp, DECOMP_ACR, dict(base), ledger, notes)
            if report.incidence_independent:
                bcr_notes = list(notes)
                bcr_notes.append(
                    "hypothesis used: incidence independence, not independence"
                )
                if ledger.absolutely_complex_balanced:
                    bcr_notes.append("absolutely complex balanced asserted: BCR and ACR coincide here")
                _emit(out, seen, BCR, sp, DECOMP_BCR, dict(base), ledger, bcr_notes)
    return out


def recheck(cert: RobustnessCertificate, sys: KineticSystem) -> bool:
    """Re-derive a certificate's hypotheses from its witnesses alone."""
    w = cert.witnesses
    if "part_reactions" in w:
        decomp = Decomposition.from_labels(sys, w["decomposition"])
        report = check_decomposition(sys, decomp)
        if cert.theorem == DECOMP_ACR and not report.independent:
            return False
        if cert.theorem == DECOMP_BCR and not report.incidence_independent:
            return False
        target = subnetwork_of(sys, w["part_reactions"]).system
        if target.net.labels != tuple(w["part_reactions"]):
            return False
        pairs, why = _part_qualifies(target)
        if why:
            return False
    else:
        target = sys
        summary = structural_summary(sys.net)
        cls = classify_kinetics(sys)
        rdk = cls.kind == PL_RDK
        if cert.theorem == SF_PLRDK_D1:
            pairs = find_sf_pairs(sys, "nonterminal_only") if summary.delta == 1 and rdk else []
        elif cert.theorem == DZ_D0:
            pairs = find_sf_pairs(sys) if summary.delta == 0 and (rdk or cls.minimally_ndk) else []
        elif cert.theorem == DZ_RESTRICTED:
            pairs = find_sf_pairs(sys, "same_linkage_class") if summary.delta == 0 and rdk else []
        elif cert.theorem == DZ_MONOSPECIES:
            ok = summary.delta == 0 and cls.minimally_ndk and cls.ndk_nodes[0].monospecies
            node = cls.ndk_nodes[0] if ok else None
            if not ok or sys.net.complex_label(node.reactant) != w.get("ndk_node"):
                return False
            pairs = find_sf_pairs(sys)
        else:
            return False
    a, b = w["sf_pair"]["reactions"]
    labels = target.net.labels
    wanted = {labels.index(a), labels.index(b)} if a in labels and b in labels else None
    if wanted is None:
        return False
    match = [p for p in pairs if {p.reaction_a, p.reaction_b} == wanted and p.species == cert.species]
    if not match:
        return False
    required = _required(cert.theorem, cert.assumptions)
    return cert.conditional == (not required.known)


def birch_check(certs: Sequence[RobustnessCertificate], sys: KineticSystem) -> bool:
    """True when every species carries an unconditional ACR certificate.

    Only the sufficient direction: a missing certificate says nothing.
    """
    covered = {c.species for c in certs if c.kind == ACR and not c.conditional}
    return bool(sys.net.species) and all(sp in covered for sp in sys.net.species)


@dataclass(frozen=True)
class SFPairStructure:
    species: str
    shared_support: dict[str, bool]
    x_in_union: bool
    reactants_differ_only_in_x: Optional[bool]
    warnings: tuple[str, ...]


def sf_pair_structure(sys: KineticSystem, pair: Union[SFPair, tuple]) -> SFPairStructure:
    """Support relations between the reactant complexes of an SF-pair.

    For each other species ``Y``: ``Y`` in one reactant support iff in the
    other; the pair's species lies in the union of the supports; and, when
    every stoichiometric coefficient is 0 or 1, the reactants differ only
    in that species.  Violations come back as warnings, since kinetic orders
    need not follow reactant supports.
    """
    net = sys.net
    if isinstance(pair, SFPair):
        a, b = pair.reaction_a, pair.reaction_b
    else:
        a, b = (net.reaction_index(x) if isinstance(x, str) else x for x in pair)
    diff = [i for i, (p, q) in enumerate(zip(sys.F[a], sys.F[b])) if p != q]
    if len(diff) != 1:
        raise CertificationError(
            f"{net.reactions[a].label} and {net.reactions[b].label} do not form an SF-pair"
        )
    x = net.species[diff[0]]
    if isinstance(pair, SFPair) and pair.species != x:
        raise CertificationError(f"SF-pair is in {x}, not {pair.species}")
    y, yp = net.reactant_of(a), net.reactant_of(b)
    shared = {sp: (sp in y.support) == (sp in yp.support) for sp in net.species if sp != x}
    in_union = x in (y.support | yp.support)
    binary = all(c in (0, 1) for cplx in net.complexes for _, c in cplx.coeffs)
    only_x = None
    if binary:
        only_x = all(y[sp] == yp[sp] for sp in net.species if sp != x)
    warnings = []
    broken = sorted(sp for sp, ok in shared.items() if not ok)
    if broken:
        warnings.append(f"support mismatch outside {x}: {', '.join(broken)}")
    if not in_union:
        warnings.append(f"{x} lies in neither reactant support")
    if only_x is False:
        warnings.append(f"0/1 stoichiometry, yet the reactants differ outside {x}")
    return SFPairStructure(x, shared, in_union, only_x, tuple(warnings))
