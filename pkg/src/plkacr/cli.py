"""Command line front end.

Exit codes: 0 success, 2 input error, 3 internal invariant breach.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys as _sys
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import netfile
from .certify import (
    AssumptionLedger,
    CertificationError,
    Evidence,
    RobustnessCertificate,
    birch_check,
    certify_single,
    certify_with_decomposition,
    recheck,
    sf_pair_structure,
)
from .decomposition import (
    Decomposition,
    DecompositionError,
    check_decomposition,
    linkage_class_decomposition,
)
from .kinetics import KineticSystem, classify_kinetics, find_sf_pairs
from .linalg import format_fraction, to_fraction
from .model import NetworkError, linkage_partitions, structural_summary
from .numerics import find_steady_states, verify_robustness
from .transform import TransformError, cf_rm_plus, check_transform

REPORT_SCHEMA = 1
EXIT_OK, EXIT_INPUT, EXIT_BREACH = 0, 2, 3

log = logging.getLogger("plkacr")


class InputError(Exception):
    pass


class InvariantBreach(Exception):
    pass


def _plain(x: Any) -> Any:
    if isinstance(x, Fraction):
        return format_fraction(x)
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


def _dump(report: dict) -> str:
    return json.dumps(_plain(report), indent=2, sort_keys=True) + "\n"


# -- report sections ------------------------------------------------------


def _summary(sys: KineticSystem) -> dict:
    s = structural_summary(sys.net)
    lp = linkage_partitions(sys.net)
    lab = sys.net.complex_label
    return {
        "species": list(sys.net.species),
        "complexes": [lab(i) for i in range(sys.net.n)],
        "n": s.n,
        "l": s.l,
        "sl": s.sl,
        "t": s.t,
        "s": s.s,
        "deficiency": s.delta,
        "weakly_reversible": s.weakly_reversible,
        "linkage_classes": [[lab(c) for c in lc] for lc in lp.linkage_classes],
        "terminal_strong_linkage_classes": [
            [lab(c) for c in cls] for cls in lp.terminal_strong_linkage_classes
        ],
        "nonterminal_complexes": [lab(c) for c in s.nonterminal_complexes],
    }


def _classification(sys: KineticSystem) -> dict:
    cls = classify_kinetics(sys)
    labels = sys.net.labels
    lab = sys.net.complex_label
    return {
        "kind": cls.kind,
        "minimally_ndk": cls.minimally_ndk,
        "ndk_nodes": [
            {
                "reactant": lab(node.reactant),
                "cf_subsets": [[labels[j] for j in g] for g in node.cf_subsets],
                "minimal": node.minimal,
                "binary": node.binary,
                "monospecies": node.monospecies,
            }
            for node in cls.ndk_nodes
        ],
    }


def _sf_pairs(sys: KineticSystem) -> list[dict]:
    labels = sys.net.labels
    out = []
    for p in find_sf_pairs(sys):
        structure = sf_pair_structure(sys, p)
        out.append(
            {
                "reactions": [labels[p.reaction_a], labels[p.reaction_b]],
                "species": p.species,
                "both_nonterminal_reactants": p.both_nonterminal_reactants,
                "same_linkage_class": p.same_linkage_class,
                "warnings": list(structure.warnings),
            }
        )
    return out


def _evidence(e: Evidence) -> dict:
    return {"status": e.status, "state": e.state, "residual": e.residual}


def _certificate(c: RobustnessCertificate) -> dict:
    a = c.assumptions
    return {
        "kind": c.kind,
        "species": c.species,
        "theorem": c.theorem,
        "conditional": c.conditional,
        "witnesses": c.witnesses,
        "assumptions": {
            "positive_equilibrium": _evidence(a.positive_equilibrium),
            "complex_balanced_equilibrium": _evidence(a.complex_balanced_equilibrium),
            "absolutely_complex_balanced": a.absolutely_complex_balanced,
        },
        "notes": list(c.notes),
    }


def _decomposition(sys: KineticSystem, decomp: Decomposition) -> dict:
    rep = check_decomposition(sys, decomp)
    return {
        "parts": decomp.labels(sys),
        "parent_deficiency": rep.parent.delta,
        "part_deficiencies": [p.delta for p in rep.parts],
        "part_ranks": [p.s for p in rep.parts],
        "rank": rep.parent.s,
        "rank_sum": rep.s_sum,
        "incidence_rank": rep.parent.n - rep.parent.l,
        "incidence_rank_sum": rep.incidence_sum,
        "independent": rep.independent,
        "incidence_independent": rep.incidence_independent,
        "bi_independent": rep.bi_independent,
        "c_decomposition": rep.c_decomposition,
        "deficiency_relation": f"deficiency {rep.deficiency_relation} sum of part deficiencies",
        "issues": list(rep.issues),
    }


# -- input helpers --------------------------------------------------------


def _load_network(path: str) -> KineticSystem:
    try:
        return netfile.load(path)
    except (netfile.NetworkFileError, NetworkError) as exc:
        raise InputError(str(exc)) from None


def _load_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text(), parse_float=Decimal)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _load_rates(path: str, sys: KineticSystem) -> np.ndarray:
    """``{"rates": {label: value}}``, ``{"rates": [...]}`` or a bare list, in reaction order."""
    doc = _load_json(path)
    rates = doc.get("rates") if isinstance(doc, dict) else doc
    labels = sys.net.labels
    if isinstance(rates, dict):
        missing = [l for l in labels if l not in rates]
        extra = sorted(set(rates) - set(labels))
        if missing or extra:
            raise InputError(f"{path}: rates missing for {missing}, unknown labels {extra}")
        values = [rates[l] for l in labels]
    elif isinstance(rates, list):
        if len(rates) != len(labels):
            raise InputError(f"{path}: expected {len(labels)} rates, got {len(rates)}")
        values = rates
    else:
        raise InputError(f"{path}: expected a 'rates' object or list")
    try:
        k = np.array([float(to_fraction(v)) for v in values])
    except (ValueError, TypeError, ArithmeticError) as exc:
        raise InputError(f"{path}: {exc}") from None
    if np.any(k <= 0):
        raise InputError(f"{path}: rate constants must be positive")
    return k


def _rates_for(args, sys: KineticSystem) -> np.ndarray:
    if args.rates:
        return _load_rates(args.rates, sys)
    if sys.has_numeric_rates:
        return sys.numeric_rates()
    raise InputError("numeric rates needed: pass a rates file or put numeric rates in the network file")


def _load_decomposition(path: str, sys: KineticSystem) -> Decomposition:
    doc = _load_json(path)
    parts = doc.get("parts") if isinstance(doc, dict) else doc
    if not isinstance(parts, list) or not all(
        isinstance(p, list) and all(isinstance(x, str) for x in p) for p in parts
    ):
        raise InputError(f"{path}: expected a list of lists of reaction labels")
    try:
        decomp = Decomposition.from_labels(sys, parts)
        decomp.validate(sys.net.r)
    except DecompositionError as exc:
        raise InputError(f"{path}: {exc}") from None
    return decomp


# -- commands -------------------------------------------------------------


def cmd_analyze(args) -> dict:
    sys = _load_network(args.network)
    return {
        "summary": _summary(sys),
        "classification": _classification(sys),
        "sf_pairs": _sf_pairs(sys),
    }


def cmd_classify(args) -> dict:
    sys = _load_network(args.network)
    return {"classification": _classification(sys), "sf_pairs": _sf_pairs(sys)}


def cmd_transform(args) -> dict:
    sys = _load_network(args.network)
    try:
        record = cf_rm_plus(sys, force_translate=args.force_translate, multiplier=args.multiplier)
    except (TransformError, KeyError) as exc:
        raise InputError(str(exc).strip("'\"")) from None
    checks = check_transform(record)
    report = {
        "moves": [
            {
                "reaction": mv.label,
                "multiplier": mv.multiplier,
                "reactant": mv.reactant.label(sys.net.species),
                "product": mv.product.label(sys.net.species),
            }
            for mv in record.moves
        ],
        "notes": list(record.notes),
        "checks": {
            "result_rdk": checks.result_rdk,
            "kinetic_orders_preserved": checks.kinetic_orders_preserved,
            "same_stoichiometric_subspace": checks.same_stoichiometric_subspace,
            "dynamically_equivalent": checks.dynamically_equivalent,
        },
        "before": _summary(sys),
        "after": _summary(record.result),
        "after_classification": _classification(record.result),
    }
    if not checks:
        raise InvariantBreach("transformed system fails the equivalence checks: " + json.dumps(report["checks"]))
    if args.write:
        netfile.dump(record.result, args.write)
        report["written"] = args.write
    else:
        report["transformed_network"] = netfile.to_document(record.result)
    return report


def cmd_decompose(args) -> dict:
    sys = _load_network(args.network)
    if args.decomposition:
        decomp = _load_decomposition(args.decomposition, sys)
        source = "file"
    else:
        decomp = linkage_class_decomposition(sys)
        source = "linkage classes"
    report = _decomposition(sys, decomp)
    if report["issues"]:
        raise InvariantBreach("decomposition identities violated: " + "; ".join(report["issues"]))
    return {"source": source, "decomposition": report}


def _verification(sys, k, species, trials, seed) -> tuple[dict, Any]:
    steady = find_steady_states(sys, k, trials=trials, seed=seed)
    checks = {
        sp: verify_robustness(sys, k, sp, steady=steady) for sp in species
    }
    block = {
        "rates": list(k),
        "trials": trials,
        "seed": seed,
        "converged_runs": len(steady.converged),
        "distinct_states": [list(s) for s in steady.states],
        "residuals": list(steady.residuals),
        "g_residuals": list(steady.g_residuals),
        "species": {
            sp: {
                "acr_spread": c.acr_spread,
                "bcr_spread": c.bcr_spread,
                "states_used": c.states_used,
                "balanced_states_used": c.balanced_states_used,
                "acr": c.acr_verdict,
                "bcr": c.bcr_verdict,
            }
            for sp, c in checks.items()
        },
    }
    return block, steady


def cmd_certify(args) -> dict:
    sys = _load_network(args.network)
    decomp = _load_decomposition(args.decomposition, sys) if args.decomposition else None
    assume = set(args.assume or ())
    ledger = AssumptionLedger.asserting(
        positive="positive-equilibrium" in assume,
        complex_balanced="complex-balanced" in assume,
        acb="absolutely-complex-balanced" in assume,
    )
    report: dict = {}
    steady = None
    if args.verify:
        k = _load_rates(args.verify, sys)
        block, steady = _verification(sys, k, list(sys.net.species), args.trials, args.seed)
        report["verification"] = block
        ledger = AssumptionLedger.from_steady_states(steady, ledger)

    reasons: list[str] = []
    certs = certify_single(sys, ledger, reasons)
    if decomp is not None:
        try:
            certs += certify_with_decomposition(sys, decomp, ledger, reasons)
        except (DecompositionError, CertificationError) as exc:
            raise InputError(str(exc)) from None
        report["decomposition"] = _decomposition(sys, decomp)

    for c in certs:
        if not recheck(c, sys):
            raise InvariantBreach(f"certificate {c.kind}({c.species}) via {c.theorem} fails its own recheck")

    report["certificates"] = [_certificate(c) for c in certs]
    report["birch"] = birch_check(certs, sys)
    report["reasons"] = reasons
    if not certs:
        report["reasons"].append("no certificate fired")

    if steady is not None:
        agreement = []
        per_species = report["verification"]["species"]
        for c in certs:
            verdict = per_species[c.species]["acr" if c.kind == "ACR" else "bcr"]
            agreement.append(
                {"kind": c.kind, "species": c.species, "theorem": c.theorem, "numeric": verdict}
            )
        report["agreement"] = agreement
        report["disagreements"] = [a for a in agreement if a["numeric"] == "fail"]
    return report


def cmd_verify(args) -> dict:
    sys = _load_network(args.network)
    k = _rates_for(args, sys)
    species = args.species or list(sys.net.species)
    for sp in species:
        if sp not in sys.net.species:
            raise InputError(f"unknown species {sp!r}")
    block, _ = _verification(sys, k, species, args.trials, args.seed)
    return {"verification": block}


# -- text rendering -------------------------------------------------------


def _text(command: str, report: dict) -> str:
    lines: list[str] = []
    s = report.get("summary")
    if s:
        lines.append(
            f"n={s['n']} l={s['l']} s={s['s']} deficiency={s['deficiency']} "
            f"t={s['t']} weakly reversible={'yes' if s['weakly_reversible'] else 'no'}"
        )
    c = report.get("classification")
    if c:
        kind = c["kind"] + (" (minimally NDK)" if c["minimally_ndk"] else "")
        lines.append(f"kinetics: {kind}")
        for node in c["ndk_nodes"]:
            flags = [f for f in ("minimal", "binary", "monospecies") if node[f]]
            lines.append(f"  NDK node {node['reactant']}: {node['cf_subsets']} {' '.join(flags)}")
    for p in report.get("sf_pairs", ()):
        lines.append(f"SF-pair {{{', '.join(p['reactions'])}}} in {p['species']}")
    if command == "transform":
        for mv in report["moves"]:
            lines.append(f"moved {mv['reaction']} (a={mv['multiplier']}): {mv['reactant']} -> {mv['product']}")
        lines += [f"note: {n}" for n in report["notes"]]
        a = report["after"]
        lines.append(f"after: n={a['n']} l={a['l']} s={a['s']} deficiency={a['deficiency']}")
        lines.append("checks: " + ", ".join(f"{k}={v}" for k, v in sorted(report["checks"].items())))
        if "written" in report:
            lines.append(f"wrote {report['written']}")
    d = report.get("decomposition")
    if d:
        lines.append(f"decomposition {d['parts']}")
        for key in ("independent", "incidence_independent", "bi_independent", "c_decomposition"):
            lines.append(f"  {key}: {d[key]}")
        lines.append(f"  {d['deficiency_relation']} ({d['parent_deficiency']} vs {d['part_deficiencies']})")
    v = report.get("verification")
    if v:
        lines.append(f"steady states: {v['converged_runs']} converged runs, {len(v['distinct_states'])} distinct")
        for sp, r in v["species"].items():
            lines.append(f"  {sp}: ACR {r['acr']} (spread {r['acr_spread']}), BCR {r['bcr']}")
    for cert in report.get("certificates", ()):
        tag = " [conditional]" if cert["conditional"] else ""
        lines.append(f"{cert['kind']}({cert['species']}) via {cert['theorem']}{tag}")
    if "certificates" in report:
        lines += [f"reason: {r}" for r in report["reasons"]]
    for bad in report.get("disagreements", ()):
        lines.append(
            f"WARNING: {bad['kind']}({bad['species']}) certified via {bad['theorem']} "
            "but the numeric check found different values"
        )
    return "\n".join(lines) + "\n"


# -- entry point ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("json", "text"), default="json")
    common.add_argument("network", help="network file (JSON)")

    p = argparse.ArgumentParser(prog="plkacr", description="Power-law kinetic network analysis")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("analyze", parents=[common], help="structure, kinetics class and SF-pairs")
    sub.add_parser("classify", parents=[common], help="kinetics class and SF-pairs")

    t = sub.add_parser("transform", parents=[common], help="CF-RM+ to a PL-RDK system")
    t.add_argument("--force-translate", metavar="LABEL")
    t.add_argument("--multiplier", type=int)
    t.add_argument("--write", metavar="PATH", help="write the transformed network here")

    d = sub.add_parser("decompose", parents=[common], help="check a reaction partition")
    d.add_argument("--decomposition", metavar="FILE", help="default: linkage classes")

    c = sub.add_parser("certify", parents=[common], help="ACR/BCR certificates")
    c.add_argument("--decomposition", metavar="FILE")
    c.add_argument(
        "--assume",
        action="append",
        choices=("positive-equilibrium", "complex-balanced", "absolutely-complex-balanced"),
    )
    c.add_argument("--verify", metavar="RATES", help="rates file; adds a numeric check")
    c.add_argument("--trials", type=int, default=20)
    c.add_argument("--seed", type=int, default=0)

    v = sub.add_parser("verify", parents=[common], help="numeric ACR/BCR spreads")
    v.add_argument("--rates", metavar="FILE")
    v.add_argument("--species", action="append")
    v.add_argument("--trials", type=int, default=20)
    v.add_argument("--seed", type=int, default=0)
    return p


COMMANDS = {
    "analyze": cmd_analyze,
    "classify": cmd_classify,
    "transform": cmd_transform,
    "decompose": cmd_decompose,
    "certify": cmd_certify,
    "verify": cmd_verify,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    if getattr(args, "trials", 1) < 1:
        print("error: --trials must be positive", file=_sys.stderr)
        return EXIT_INPUT
    try:
        report = COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_INPUT
    except InvariantBreach as exc:
        print(f"invariant breach: {exc}", file=_sys.stderr)
        return EXIT_BREACH
    report = {"schema": REPORT_SCHEMA, "command": args.command, "network": args.network, **report}
    out = _dump(report) if args.output == "json" else _text(args.command, report)
    _sys.stdout.write(out)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
