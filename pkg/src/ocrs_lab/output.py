"""Deterministic writers and the atomic run directory with its manifest."""
from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import shutil
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

SCHEMA_VERSION = 1


def plain(obj: Any) -> Any:
    """Convert numpy scalars/arrays, tuples and sets into JSON types; NaN and inf become None."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(plain(v) for v in obj)
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(plain(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path: Path, obj: dict) -> None:
    payload = {"schema_version": SCHEMA_VERSION, **obj}
    path.write_text(dumps(payload), encoding="utf-8")


def _cell(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (np.integer, int)):
        return str(int(v))
    if isinstance(v, (np.floating, float)):
        return repr(float(v)) if math.isfinite(float(v)) else ""
    return "" if v is None else str(v)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def config_hash(config: dict) -> str:
    return hashlib.sha256(json.dumps(plain(config), sort_keys=True).encode("utf-8")).hexdigest()


def now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class RunDirectory:
    """Outputs are written to a sibling temp directory and moved into place only on success."""

    def __init__(self, out: str | Path):
        self.out = Path(out).resolve()
        self.tmp: Path | None = None

    def __enter__(self) -> Path:
        self.out.parent.mkdir(parents=True, exist_ok=True)
        self.tmp = Path(tempfile.mkdtemp(prefix=f".{self.out.name}.", dir=self.out.parent))
        return self.tmp

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None:
            shutil.rmtree(self.tmp, ignore_errors=True)
            return False
        old = None
        if self.out.exists():
            old = self.out.with_name(f".{self.out.name}.old-{os.getpid()}")
            os.replace(self.out, old)
        os.replace(self.tmp, self.out)
        if old is not None:
            shutil.rmtree(old, ignore_errors=True)
        return False


def write_manifest(directory: Path, *, command: str, config: dict, seed: int, threads: int, version: str,
                   started: str, backend: str) -> dict:
    files = []
    for p in sorted(directory.rglob("*")):
        if p.is_file() and p.name != "manifest.json":
            files.append({"path": p.relative_to(directory).as_posix(), "sha256": sha256_file(p),
                          "bytes": p.stat().st_size})
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "tool": "ocrs-lab",
        "version": version,
        "command": command,
        "config_hash": config_hash(config),
        "config": plain(config),
        "seed": seed,
        "threads": threads,
        "kernel_backend": backend,
        "started": started,
        "finished": now(),
        "files": files,
    }
    (directory / "manifest.json").write_text(dumps(manifest), encoding="utf-8")
    return manifest
