"""RunRecord CSV/JSON serialization and seed derivation."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path
from typing import Iterable, Sequence

from .driver import RunRecord
from .graph import bits_to_str

SCHEMA_VERSION = 1
SCHEMA_LINE = f"# dapo-qaoa-records v{SCHEMA_VERSION}"
COLUMNS = ("algo", "instance", "seed", "p", "F", "ratio", "x_measured", "x_search",
           "delta", "rzz_layer", "rzz_cum", "fallback")

# canonical algorithm order; also the legend order in reports
ALGO_ORDER = (
    "dapo",
    "vanilla",
    "optimal-phase",
    "random-sparse",
    "sparsifier:uniform-random",
    "sparsifier:degree-proportional",
    "sparsifier:spanning-tree-first",
    "dropout",
)


class SchemaError(ValueError):
    pass


def derive_seed(master: int, role: str, index: int = 0) -> int:
    """``hash64(master, role, index)``: first 8 bytes of BLAKE2b, masked to 63 bits."""
    digest = hashlib.blake2b(f"{master}|{role}|{index}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") & ((1 << 63) - 1)


def fmt_float(v: float | None) -> str:
    return "" if v is None else f"{v:.9g}"


def record_row(algo: str, instance: str, seed: int, r: RunRecord) -> dict:
    return {
        "algo": algo,
        "instance": instance,
        "seed": str(seed),
        "p": str(r.layer),
        "F": fmt_float(r.best_value),
        "ratio": fmt_float(r.ratio),
        "x_measured": bits_to_str(r.x_measured),
        "x_search": bits_to_str(r.x_after_search),
        "delta": fmt_float(r.search_delta),
        "rzz_layer": str(r.rzz_this_layer),
        "rzz_cum": str(r.rzz_cumulative),
        "fallback": "1" if r.fallback_used else "0",
    }


def sidecar_entry(algo: str, instance: str, seed: int, r: RunRecord) -> dict:
    entry = {"algo": algo, "instance": instance, "seed": seed, "p": r.layer,
             "params": [float(fmt_float(v)) for v in r.params], "source": r.source}
    if r.phase is not None:
        entry["phase_terms"] = [[t.i, t.j, t.coeff] for t in r.phase.terms]
    return entry


def algo_rank(algo: str) -> int:
    return ALGO_ORDER.index(algo) if algo in ALGO_ORDER else len(ALGO_ORDER)


def sort_key(row: dict):
    return (row["instance"], algo_rank(row["algo"]), row["algo"], int(row["seed"]), int(row["p"]))


def rows_to_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    buf.write(SCHEMA_LINE + "\n")
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in sorted(rows, key=sort_key):
        writer.writerow(row)
    return buf.getvalue()


def write_records(path: Path, rows: Sequence[dict], sidecar: Sequence[dict]) -> None:
    path = Path(path)
    path.write_text(rows_to_csv(rows), encoding="ascii")
    side = sorted(sidecar, key=lambda e: (e["instance"], algo_rank(e["algo"]), e["algo"],
                                           e["seed"], e["p"]))
    path.with_suffix(".json").write_text(json.dumps(side, indent=1) + "\n", encoding="ascii")


def read_records(path: Path) -> list[dict]:
    """Parse a records CSV, rejecting unknown schema versions and column sets."""
    lines = Path(path).read_text(encoding="ascii").splitlines()
    if not lines or not lines[0].startswith("# dapo-qaoa-records"):
        raise SchemaError(f"{path}: missing schema line")
    if lines[0].strip() != SCHEMA_LINE:
        raise SchemaError(f"{path}: unsupported schema {lines[0].strip()!r}")
    reader = csv.DictReader(lines[1:])
    header = reader.fieldnames or []
    for col in COLUMNS:
        if col not in header:
            raise SchemaError(f"{path}: missing column {col!r}")
    for col in header:
        if col not in COLUMNS:
            raise SchemaError(f"{path}: unknown column {col!r}")
    return list(reader)
