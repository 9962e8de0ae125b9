"""Versioned JSON cache for level tables.

One document per (d, M, k, backend); EXACT weights are serialized as decimal
strings so arbitrary-precision counts round-trip, and the byte layout is
deterministic (sorted keys, compact separators, LF) so identical parameters
always reproduce identical files.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .model import Backend, LevelTable, ModelParams

FORMAT_VERSION = 1


def default_cache_dir() -> Path:
    env = os.environ.get("LIPTREE_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "liptree"


def cache_path(cache_dir: Path, params: ModelParams, backend: Backend) -> Path:
    name = f"table_d{params.d}_M{params.M}_k{params.k}_{backend.value}_v{FORMAT_VERSION}.json"
    return Path(cache_dir) / name


def tables_to_doc(tables: list[LevelTable]) -> dict:
    params = tables[-1].params
    backend = tables[-1].backend
    levels = []
    for table in tables:
        entry: dict = {"level": table.level}
        if backend is Backend.EXACT:
            entry["weights_t0_to_jM"] = [str(w) for w in table.weights]
        else:
            entry["normalizer_log"] = float(table.normalizer_log)
            entry["weights_t0_to_jM"] = [float(w) for w in table.weights]
        levels.append(entry)
    return {
        "format_version": FORMAT_VERSION,
        "d": params.d,
        "M": params.M,
        "k": params.k,
        "backend": backend.value,
        "levels": levels,
    }


def doc_to_tables(doc: dict) -> list[LevelTable]:
    if doc.get("format_version") != FORMAT_VERSION:
        raise ValueError(
            f"unsupported cache format_version {doc.get('format_version')!r}, "
            f"expected {FORMAT_VERSION}"
        )
    params = ModelParams(d=doc["d"], M=doc["M"], k=doc["k"])
    backend = Backend(doc["backend"])
    tables = []
    for entry in doc["levels"]:
        level = entry["level"]
        if backend is Backend.EXACT:
            weights: "list[int] | np.ndarray" = [int(w) for w in entry["weights_t0_to_jM"]]
            table = LevelTable(params, level, backend, weights)
        else:
            weights = np.asarray(entry["weights_t0_to_jM"], dtype=float)
            table = LevelTable(params, level, backend, weights, entry["normalizer_log"])
        if len(entry["weights_t0_to_jM"]) != level * params.M + 1:
            raise ValueError(f"level {level} has wrong support length")
        tables.append(table)
    if [t.level for t in tables] != list(range(1, params.k + 1)):
        raise ValueError("cache document is missing levels")
    return tables


def save_tables(tables: list[LevelTable], path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = json.dumps(tables_to_doc(tables), sort_keys=True, separators=(",", ":"))
    path.write_text(payload + "\n")


def load_tables(path: Path) -> list[LevelTable]:
    return doc_to_tables(json.loads(Path(path).read_text()))
