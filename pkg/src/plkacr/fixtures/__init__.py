"""Networks from the worked examples, shipped as network files."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from ..kinetics import KineticSystem
from ..netfile import loads

NETWORKS = (
    "example1",
    "idhkp",
    "schmitz",
    "example4",
    "ab_mass_action",
    "synthetic_higher_deficiency",
)


def path(name: str) -> Path:
    if not name.endswith(".json"):
        name += ".json"
    return Path(str(resources.files(__name__).joinpath(name)))


def load(name: str) -> KineticSystem:
    return loads(path(name).read_text())


def load_json(name: str):
    return json.loads(path(name).read_text())
