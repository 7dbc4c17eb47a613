"""Versioned text description of matroids (JSON or YAML), round-tripping losslessly.

A description is a mapping with a ``kind`` tag and kind-specific fields::

    {"kind": "uniform", "n": 5, "k": 2}
    {"kind": "graphic", "num_vertices": 3, "edges": [[0, 1], [1, 2], [2, 0]]}
    {"kind": "partition", "blocks": [[0, 1], [2]], "capacities": [1, 1]}
    {"kind": "explicit", "n": 3, "independent_sets": [[0, 1], [2]]}
    {"kind": "union", "parts": [<matroid>, ...]}
    {"kind": "extended_kfold", "base": <matroid>, "k": 2}
    {"kind": "restriction", "parent": <matroid>, "subset": [0, 2]}

Top-level documents carry ``schema_version``; nested ones may omit it.
Optional ``labels`` (one string per element) are preserved.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import yaml

from ..errors import InputError
from .base import Matroid
from .families import ExplicitMatroid, GraphicMatroid, PartitionMatroid, Restriction, UniformMatroid
from .union import ExtendedKFoldUnion, ParallelExtension, UnionMatroid

SCHEMA_VERSION = 1
KINDS = ("uniform", "graphic", "partition", "explicit", "union", "extended_kfold", "restriction", "parallel")

_FIELDS = {
    "uniform": {"n", "k"},
    "graphic": {"num_vertices", "edges"},
    "partition": {"blocks", "capacities"},
    "explicit": {"n", "independent_sets"},
    "union": {"parts"},
    "extended_kfold": {"base", "k"},
    "restriction": {"parent", "subset"},
    "parallel": {"base", "k"},
}


def to_dict(m: Matroid, top: bool = True) -> dict[str, Any]:
    d = m.to_dict()
    if m.ground.labels is not None and m.kind in ("uniform", "graphic", "partition", "explicit"):
        d["labels"] = list(m.ground.labels)
    if top:
        d = {"schema_version": SCHEMA_VERSION, **d}
    return d


def from_dict(d: Any) -> Matroid:
    if not isinstance(d, dict):
        raise InputError("matroid description must be a mapping")
    version = d.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise InputError(f"unsupported matroid schema_version {version!r}")
    kind = d.get("kind")
    if kind not in _FIELDS:
        raise InputError(f"unknown matroid kind {kind!r}; expected one of {', '.join(KINDS)}")
    allowed = _FIELDS[kind] | {"kind", "schema_version", "labels"}
    extra = set(d) - allowed
    missing = _FIELDS[kind] - set(d)
    if extra:
        raise InputError(f"unknown fields for {kind}: {sorted(extra)}")
    if missing:
        raise InputError(f"missing fields for {kind}: {sorted(missing)}")
    labels = d.get("labels")
    try:
        if kind == "uniform":
            return UniformMatroid(int(d["n"]), int(d["k"]), labels)
        if kind == "graphic":
            return GraphicMatroid(int(d["num_vertices"]), [tuple(e) for e in d["edges"]], labels)
        if kind == "partition":
            return PartitionMatroid(d["blocks"], d["capacities"], labels)
        if kind == "explicit":
            return ExplicitMatroid(int(d["n"]), d["independent_sets"], labels)
        if kind == "union":
            return UnionMatroid([from_dict(p) for p in d["parts"]])
        if kind == "extended_kfold":
            return ExtendedKFoldUnion(from_dict(d["base"]), int(d["k"]))
        if kind == "parallel":
            return ParallelExtension(from_dict(d["base"]), int(d["k"]))
        return Restriction(from_dict(d["parent"]), d["subset"])
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed {kind} description: {exc}") from exc


def dumps(m: Matroid) -> str:
    return json.dumps(to_dict(m), sort_keys=True, indent=2) + "\n"


def loads(text: str) -> Matroid:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise InputError(f"cannot parse matroid description: {exc}") from exc
    return from_dict(data)


def load(path: str | Path) -> Matroid:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    return loads(text)


def save(m: Matroid, path: str | Path) -> None:
    Path(path).write_text(dumps(m), encoding="utf-8")
