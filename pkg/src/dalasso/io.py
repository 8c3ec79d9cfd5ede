"""CSV/JSON persistence with fixed 17-significant-digit float formatting."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import fields
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .linalg import DesignMatrix
from .models import Dataset, HyperParams
from .sampler import ChainRecord, SampleStore, SamplerConfig


def fmt_float(x: float) -> str:
    s = format(float(x), ".17g")
    if s.lstrip("-").isdigit():
        s += ".0"
    return s


def _to_json(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_to_json(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_to_json(v, indent, level + 1) for v in seq) + "]"
        items = [pad + _to_json(v, indent, level + 1) for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _to_json(obj, indent, 0) + "\n"


def write_json(obj, path) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParameterError(f"{path}: invalid JSON ({exc})") from exc


# ---------------------------------------------------------------------------
# datasets
# ---------------------------------------------------------------------------


def sidecar_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".json")


def write_dataset(data: Dataset, csv_path) -> None:
    csv_path = Path(csv_path)
    header = ["y"] + [f"x{j}" for j in range(1, data.p + 1)]
    lines = [",".join(header)]
    for yi, row in zip(data.y, data.X.covariates):
        lines.append(",".join(fmt_float(v) for v in (yi, *row)))
    csv_path.write_text("\n".join(lines) + "\n")
    h = data.hyper
    write_json({"kind": data.kind, "lambda": h.lam, "theta": h.theta, "gamma": h.gamma},
               sidecar_path(csv_path))


def read_dataset(csv_path) -> Dataset:
    csv_path = Path(csv_path)
    meta_path = sidecar_path(csv_path)
    if not meta_path.exists():
        raise ParameterError(f"missing sidecar {meta_path}")
    meta = read_json(meta_path)
    with csv_path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][0] != "y" or len(rows[0]) < 2:
        raise ParameterError(f"{csv_path}: expected header 'y,x1,...,xp'")
    body = np.array(rows[1:], dtype=np.float64)
    if body.ndim != 2 or body.shape[0] == 0:
        raise ParameterError(f"{csv_path}: no data rows")
    try:
        hyper = HyperParams(float(meta["lambda"]), float(meta["theta"]),
                            None if meta.get("gamma") is None else float(meta["gamma"]))
        kind = meta["kind"]
    except KeyError as exc:
        raise ParameterError(f"{meta_path}: missing key {exc}") from exc
    return Dataset(kind, body[:, 0], DesignMatrix.from_covariates(body[:, 1:]), hyper)


def read_config(path) -> SamplerConfig:
    raw = read_json(path)
    known = {f.name for f in fields(SamplerConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ParameterError(f"unknown config keys: {sorted(unknown)}")
    try:
        return SamplerConfig(**{k: int(v) for k, v in raw.items()})
    except TypeError as exc:
        raise ParameterError(str(exc)) from exc


# ---------------------------------------------------------------------------
# samples
# ---------------------------------------------------------------------------


def write_samples(store: SampleStore, path) -> None:
    header = ["chain", "iter", "alpha"] + [f"b{j}" for j in range(1, store.p + 1)]
    lines = [",".join(header)]
    for rec in store.chains:
        for it, row in zip(rec.iters, rec.draws):
            lines.append(",".join([str(rec.chain), str(int(it))] + [fmt_float(v) for v in row]))
    Path(path).write_text("\n".join(lines) + "\n")


def read_samples(path) -> SampleStore:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:3] != ["chain", "iter", "alpha"]:
        raise ParameterError(f"{path}: expected header 'chain,iter,alpha,b1,...'")
    p = len(rows[0]) - 3
    if len(rows) == 1:
        return SampleStore(p, [])
    body = np.array(rows[1:], dtype=np.float64)
    chains = []
    for c in np.unique(body[:, 0]).astype(int):
        sel = body[:, 0] == c
        chains.append(ChainRecord(int(c), body[sel, 1].astype(np.int64), body[sel, 2:].copy()))
    return SampleStore(p, chains)
