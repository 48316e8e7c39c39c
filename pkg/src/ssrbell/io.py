"""JSON state files.

Pure state::

    {"kind": "pure", "dim_a": 2, "dim_b": 2, "entries": [[index, re, im], ...]}

Density operator::

    {"kind": "density", "dim_a": 2, "dim_b": 2, "entries": [[row, col, re, im], ...]}

Minimal-reference shorthand::

    {"kind": "minimal", "p00": 0.25, "p11": 0.25, "p_phi": 0.5, "r0": 0.7071..., "r1": 0.7071...}

Omitted entries are zero. Floats are written with ``repr`` so a save/load
round trip is exact.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

import numpy as np

from .fock import DensityOperator, FockCutoff, PureState
from .reference import MinimalReference, minimal_to_density

FORMATS = ("json",)


class StateFileError(ValueError):
    """A state file cannot be parsed."""


def state_to_dict(state: Union[PureState, DensityOperator]) -> dict:
    c = state.cutoff
    if isinstance(state, PureState):
        entries = [[int(i), float(z.real), float(z.imag)] for i, z in enumerate(state.amps) if z != 0]
        return {"kind": "pure", "dim_a": c.dim_a, "dim_b": c.dim_b, "entries": entries}
    rows, cols = np.nonzero(state.mat)
    entries = [[int(i), int(j), float(state.mat[i, j].real), float(state.mat[i, j].imag)]
               for i, j in zip(rows, cols)]
    return {"kind": "density", "dim_a": c.dim_a, "dim_b": c.dim_b, "entries": entries}


def save_state(state, path, format: str = "json") -> None:
    if format not in FORMATS:
        raise StateFileError(f"unsupported state format {format!r}")
    Path(path).write_text(json.dumps(state_to_dict(state), indent=1) + "\n")


def state_from_dict(doc: dict) -> Union[PureState, DensityOperator]:
    try:
        kind = doc["kind"]
        if kind == "minimal":
            m = MinimalReference(*(float(doc[k]) for k in ("p00", "p11", "p_phi", "r0", "r1")))
            return minimal_to_density(m)
        cut = FockCutoff(int(doc["dim_a"]), int(doc["dim_b"]))
        entries = doc["entries"]
        if kind == "pure":
            amps = np.zeros(cut.dim, dtype=complex)
            for i, re, im in entries:
                amps[int(i)] += complex(re, im)
            return PureState(cut, amps)
        if kind == "density":
            mat = np.zeros((cut.dim, cut.dim), dtype=complex)
            for i, j, re, im in entries:
                mat[int(i), int(j)] += complex(re, im)
            return DensityOperator(cut, mat)
    except (KeyError, TypeError, IndexError) as exc:
        raise StateFileError(f"malformed state record: {exc!r}") from exc
    raise StateFileError(f"unknown state kind {kind!r}")


def load_state(path, format: str = "json") -> Union[PureState, DensityOperator]:
    """Load and validate; invariant violations raise StateValidationError."""
    if format not in FORMATS:
        raise StateFileError(f"unsupported state format {format!r}")
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise StateFileError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise StateFileError(f"{path}: expected a JSON object")
    return state_from_dict(doc)
