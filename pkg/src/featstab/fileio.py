"""File formats: similarity CSV, ensemble files, and data CSV.

Similarity and data matrices are plain CSV with a header row of feature ids.
An ensemble file starts with ``#universe: id1,id2,...`` followed by one line
per selected set (comma-separated ids; an empty line is the empty set).
Floats are written with ``repr`` so output is byte-stable and round-trips.
"""

from __future__ import annotations

from pathlib import Path
from typing import Union

import numpy as np

from .core import (
    FeatureSet,
    FeatureUniverse,
    SelectionEnsemble,
    SimilarityMatrix,
    validate_similarity_matrix,
)
from .errors import ParseError
from .similarity import DataMatrix

_UNIVERSE_PREFIX = "#universe:"

PathLike = Union[str, Path]


def _read_lines(path: PathLike) -> list[str]:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [line.rstrip("\r") for line in lines]


def _parse_header_ids(path: PathLike, line: str, lineno: int) -> FeatureUniverse:
    ids = [token.strip() for token in line.split(",")]
    if any(not token for token in ids):
        raise ParseError(str(path), lineno, "empty feature id in header")
    if len(set(ids)) != len(ids):
        raise ParseError(str(path), lineno, "duplicate feature id in header")
    return FeatureUniverse(tuple(ids))


def _parse_float_row(path: PathLike, line: str, lineno: int, expected: int) -> list[float]:
    tokens = line.split(",")
    if len(tokens) != expected:
        raise ParseError(
            str(path), lineno, f"expected {expected} values, got {len(tokens)}"
        )
    row = []
    for token in tokens:
        try:
            row.append(float(token))
        except ValueError:
            raise ParseError(
                str(path), lineno, f"not a number: {token.strip()!r}"
            ) from None
    return row


def read_similarity_csv(path: PathLike) -> SimilarityMatrix:
    """Parse and validate a similarity matrix CSV."""
    lines = _read_lines(path)
    if not lines:
        raise ParseError(str(path), 1, "empty file")
    universe = _parse_header_ids(path, lines[0], 1)
    p = universe.p
    if len(lines) - 1 != p:
        raise ParseError(
            str(path), len(lines) + 1, f"expected {p} data rows, got {len(lines) - 1}"
        )
    rows = [
        _parse_float_row(path, line, lineno, p)
        for lineno, line in enumerate(lines[1:], start=2)
    ]
    return validate_similarity_matrix(np.array(rows, dtype=float), universe)


def similarity_csv_text(sim: SimilarityMatrix) -> str:
    lines = [",".join(sim.universe.ids)]
    for row in sim.values:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def write_similarity_csv(sim: SimilarityMatrix, path: PathLike) -> None:
    Path(path).write_text(similarity_csv_text(sim), encoding="utf-8")


def read_ensemble_file(path: PathLike) -> SelectionEnsemble:
    """Parse an ensemble file: universe header plus one line per set."""
    lines = _read_lines(path)
    if not lines or not lines[0].startswith(_UNIVERSE_PREFIX):
        raise ParseError(
            str(path), 1, f"first line must start with {_UNIVERSE_PREFIX!r}"
        )
    universe = _parse_header_ids(path, lines[0][len(_UNIVERSE_PREFIX):], 1)
    known = set(universe.ids)
    sets = []
    for lineno, line in enumerate(lines[1:], start=2):
        if line == "":
            sets.append(FeatureSet.of(()))
            continue
        tokens = [token.strip() for token in line.split(",")]
        if any(not token for token in tokens):
            raise ParseError(str(path), lineno, "empty feature id")
        unknown = [t for t in tokens if t not in known]
        if unknown:
            raise ParseError(
                str(path), lineno, f"feature ids not in universe: {unknown}"
            )
        if len(set(tokens)) != len(tokens):
            raise ParseError(str(path), lineno, "duplicate feature id in set")
        sets.append(FeatureSet.of(tokens))
    return SelectionEnsemble(universe=universe, sets=tuple(sets))


def ensemble_file_text(ensemble: SelectionEnsemble) -> str:
    order = {fid: k for k, fid in enumerate(ensemble.universe.ids)}
    lines = [_UNIVERSE_PREFIX + " " + ",".join(ensemble.universe.ids)]
    for s in ensemble.sets:
        lines.append(",".join(sorted(s.members, key=order.__getitem__)))
    return "\n".join(lines) + "\n"


def write_ensemble_file(ensemble: SelectionEnsemble, path: PathLike) -> None:
    Path(path).write_text(ensemble_file_text(ensemble), encoding="utf-8")


def read_data_csv(path: PathLike) -> DataMatrix:
    """Parse a data matrix CSV: feature-id header plus one row per observation."""
    lines = _read_lines(path)
    if not lines:
        raise ParseError(str(path), 1, "empty file")
    universe = _parse_header_ids(path, lines[0], 1)
    rows = [
        _parse_float_row(path, line, lineno, universe.p)
        for lineno, line in enumerate(lines[1:], start=2)
    ]
    values = np.array(rows, dtype=float).reshape(len(rows), universe.p)
    return DataMatrix(universe=universe, values=values)
