"""Read and write the JSON network file format.

A network file looks like::

    {"schema": 1,
     "species": ["A", "B"],
     "reactions": [
        {"label": "R1", "reactant": {"A": "1"}, "product": {"B": "1"},
         "kinetic_order": {"A": "0.5"}, "rate": "2"}]}

Numbers may be JSON numbers or decimal strings and are read exactly.
Missing ``kinetic_order`` entries are 0; a reaction with no
``kinetic_order`` key at all gets mass-action orders.  ``rate`` is optional
and may be a positive number or a symbol.
"""

from __future__ import annotations

import json
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Any

from .kinetics import KineticsError, KineticSystem
from .linalg import format_fraction, to_fraction
from .model import Complex, NetworkError, build_network

SCHEMA_VERSION = 1


class NetworkFileError(ValueError):
    pass


def _number(value: Any, where: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str, Decimal)):
        raise NetworkFileError(f"{where}: expected a number or decimal string, got {value!r}")
    try:
        return to_fraction(value)
    except (ValueError, ArithmeticError) as exc:
        raise NetworkFileError(f"{where}: {exc}") from None


def _coeff_map(obj: Any, where: str) -> dict[str, Fraction]:
    if not isinstance(obj, dict):
        raise NetworkFileError(f"{where}: expected an object mapping species to numbers")
    return {str(sp): _number(v, f"{where}.{sp}") for sp, v in obj.items()}


def loads(text: str) -> KineticSystem:
    try:
        doc = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise NetworkFileError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return from_document(doc)


def load(path: str | Path) -> KineticSystem:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise NetworkFileError(f"{path}: {exc.strerror}") from None
    try:
        return loads(text)
    except NetworkFileError as exc:
        raise NetworkFileError(f"{path}: {exc}") from None


def from_document(doc: Any) -> KineticSystem:
    if not isinstance(doc, dict):
        raise NetworkFileError("top level must be a JSON object")
    schema = doc.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise NetworkFileError(f"unsupported schema {schema!r}")
    species = doc.get("species")
    if not isinstance(species, list) or not all(isinstance(s, str) for s in species):
        raise NetworkFileError("'species' must be a list of strings")
    rxs = doc.get("reactions")
    if not isinstance(rxs, list) or not rxs:
        raise NetworkFileError("'reactions' must be a non-empty list")

    complexes: list[Complex] = []
    specs = []
    orders: list[dict | None] = []
    rates: list[Any] = []
    for i, item in enumerate(rxs):
        if not isinstance(item, dict):
            raise NetworkFileError(f"reactions[{i}]: expected an object")
        label = item.get("label")
        where = f"reactions[{i}] ({label})"
        if not isinstance(label, str) or not label:
            raise NetworkFileError(f"reactions[{i}]: missing label")
        for key in ("reactant", "product"):
            if key not in item:
                raise NetworkFileError(f"{where}: missing {key!r}")
        try:
            lhs = Complex.of(_coeff_map(item["reactant"], f"{where}.reactant"))
            rhs = Complex.of(_coeff_map(item["product"], f"{where}.product"))
        except NetworkError as exc:
            raise NetworkFileError(f"{where}: {exc}") from None
        complexes += [lhs, rhs]
        specs.append((len(complexes) - 2, len(complexes) - 1, label))
        orders.append(
            _coeff_map(item["kinetic_order"], f"{where}.kinetic_order")
            if "kinetic_order" in item
            else None
        )
        rate = item.get("rate")
        if rate is not None and not isinstance(rate, (str, int, Decimal)) or isinstance(rate, bool):
            raise NetworkFileError(f"{where}: rate must be a number or symbol")
        rates.append(rate)

    try:
        net = build_network(species, complexes, specs)
    except NetworkError as exc:
        raise NetworkFileError(str(exc)) from None

    rows = [
        od if od is not None else net.reactant_of(j).as_dict() for j, od in enumerate(orders)
    ]
    k = None
    if any(r is not None for r in rates):
        k = [r if r is not None else net.reactions[j].label for j, r in enumerate(rates)]
        k = [str(r) if isinstance(r, Decimal) else r for r in k]
    try:
        return KineticSystem.from_orders(net, rows, k)
    except (KineticsError, ValueError) as exc:
        raise NetworkFileError(str(exc)) from None


def _rate_out(v) -> Any:
    if isinstance(v, Fraction):
        return format_fraction(v)
    if isinstance(v, float):
        return repr(v)
    return v


def to_document(sys: KineticSystem) -> dict:
    net = sys.net
    reactions = []
    for j, rx in enumerate(net.reactions):
        entry = {
            "label": rx.label,
            "reactant": {sp: format_fraction(c) for sp, c in net.complexes[rx.reactant].coeffs},
            "product": {sp: format_fraction(c) for sp, c in net.complexes[rx.product].coeffs},
            "kinetic_order": {sp: format_fraction(x) for sp, x in sys.row_dict(j).items()},
        }
        if sys.k is not None:
            entry["rate"] = _rate_out(sys.k[j])
        reactions.append(entry)
    return {"schema": SCHEMA_VERSION, "species": list(net.species), "reactions": reactions}


def dumps(sys: KineticSystem) -> str:
    return json.dumps(to_document(sys), indent=2, sort_keys=True) + "\n"


def dump(sys: KineticSystem, path: str | Path) -> None:
    Path(path).write_text(dumps(sys))
