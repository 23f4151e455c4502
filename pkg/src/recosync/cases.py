"""Bundled case studies: a manufacturing cell and a flexible manufacturing system."""
from __future__ import annotations

from importlib import resources
from pathlib import Path

from .autfile import read_aut
from .recovery import PLANT, make_recoverable, read_bindings

CASES = {"small-factory": "small_factory", "fms": "fms"}


def fixture_dir(name: str = "") -> Path:
    root = Path(str(resources.files("recosync") / "fixtures"))
    return root / CASES.get(name, name) if name else root


def load_dir(path, recoverable=True):
    """Read ``recovery.txt`` in ``path`` and the models it lists.

    Returns ``(plants, specs)`` in manifest order, with recovery events
    added unless ``recoverable`` is false.
    """
    path = Path(path)
    plants, specs = [], []
    for b in read_bindings(path / "recovery.txt"):
        a = read_aut(path / f"{b.automaton}.aut")
        if recoverable:
            a = make_recoverable(a, b.event)
        (plants if b.kind == PLANT else specs).append(a)
    return plants, specs


def load_case(name: str, recoverable=True):
    if name not in CASES:
        raise KeyError(f"unknown case {name!r}; choose from {', '.join(CASES)}")
    return load_dir(fixture_dir(name), recoverable)


#: Reference figures for the FMS modular supervisors, in specification order
#: with E7 and E8 merged: (name, states, transitions, recovery transitions, |w|).
FMS_MODULAR = (
    ("S1", 18, 94, 36, 3),
    ("S2", 18, 94, 54, 3),
    ("S3", 18, 90, 54, 3),
    ("S4", 21, 105, 63, 3),
    ("S5", 44, 253, 132, 3),
    ("S6", 44, 253, 132, 3),
    ("S7,8", 260, 2441, 1560, 6),
)
FMS_MERGE = ("E7", "E8")

#: Reference monolithic figures: states, transitions, recovery transitions, |w|.
FMS_MONOLITHIC = (70272, 1434804, 1054080, 16)

SMALL_FACTORY_NAMES = ("S1", "S2")
SMALL_FACTORY_SCENARIO = "sec5a.scn"
