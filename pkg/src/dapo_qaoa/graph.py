"""Graphs, cuts, exhaustive MaxCut and 1-bit-flip neighborhood search.

Assignments are tuples of 0/1 ints. Bit ``k`` of an assignment maps to the
``k``-th most significant bit of the basis index, so lexicographic order on
bitstrings equals numeric order on indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

Assignment = tuple[int, ...]
Edge = tuple[int, int, float]

MAX_BRUTE_FORCE_VERTICES = 30
_CHUNK_BITS = 20


class GraphFormatError(ValueError):
    """Raised for malformed edge-list text; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Graph:
    n_vertices: int
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        if self.n_vertices < 1:
            raise ValueError("graph needs at least one vertex")
        seen = set()
        for i, j, _ in self.edges:
            if not 0 <= i < j < self.n_vertices:
                raise ValueError(f"edge ({i}, {j}) violates 0 <= i < j < {self.n_vertices}")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))

    @classmethod
    def from_edges(cls, n_vertices: int, edges: Iterable[Sequence]) -> "Graph":
        """Build a graph from ``(i, j)`` or ``(i, j, w)`` items, normalizing to ``i < j``."""
        norm = []
        for e in edges:
            i, j = int(e[0]), int(e[1])
            w = float(e[2]) if len(e) > 2 else 1.0
            if i > j:
                i, j = j, i
            norm.append((i, j, w))
        return cls(n_vertices, tuple(norm))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def total_weight(self) -> float:
        return sum(w for _, _, w in self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * self.n_vertices
        for i, j, _ in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def subgraph(self, edges: Iterable[Edge]) -> "Graph":
        return Graph(self.n_vertices, tuple(sorted(edges)))

    def to_text(self) -> str:
        lines = [f"{self.n_vertices} {self.n_edges}"]
        for i, j, w in self.edges:
            lines.append(f"{i} {j}" if w == 1.0 else f"{i} {j} {w!r}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CutReport:
    value: float
    cut_edges: tuple[Edge, ...]


def parse_graph(source: str) -> Graph:
    """Parse the ``n m`` / ``i j [w]`` edge-list format; ``#`` lines are comments."""
    header = None
    edges: list[Edge] = []
    seen: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 2:
                raise GraphFormatError("header must be 'n m'", lineno)
            try:
                header = (int(parts[0]), int(parts[1]))
            except ValueError:
                raise GraphFormatError("header fields must be integers", lineno) from None
            if header[0] < 1 or header[1] < 0:
                raise GraphFormatError("need n >= 1 and m >= 0", lineno)
            continue
        if len(parts) not in (2, 3):
            raise GraphFormatError("edge line must be 'i j' or 'i j w'", lineno)
        try:
            i, j = int(parts[0]), int(parts[1])
            w = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError:
            raise GraphFormatError("malformed number", lineno) from None
        n = header[0]
        if not (0 <= i < n and 0 <= j < n):
            raise GraphFormatError(f"vertex index out of range [0, {n})", lineno)
        if i == j:
            raise GraphFormatError("self-loop", lineno)
        key = (min(i, j), max(i, j))
        if key in seen:
            raise GraphFormatError(f"duplicate edge {key} (first at line {seen[key]})", lineno)
        seen[key] = lineno
        edges.append((key[0], key[1], w))
    if header is None:
        raise GraphFormatError("missing header")
    if len(edges) != header[1]:
        raise GraphFormatError(f"header declares {header[1]} edges, found {len(edges)}")
    return Graph(header[0], tuple(edges))


def complement(x: Sequence[int]) -> Assignment:
    return tuple(1 - b for b in x)


def bits_to_str(x: Sequence[int]) -> str:
    return "".join(str(int(b)) for b in x)


def str_to_bits(s: str) -> Assignment:
    return tuple(int(c) for c in s)


def index_to_bits(z: int, n: int) -> Assignment:
    return tuple((z >> (n - 1 - k)) & 1 for k in range(n))


def bits_to_index(x: Sequence[int]) -> int:
    z = 0
    for b in x:
        z = (z << 1) | int(b)
    return z


def cut_value(g: Graph, x: Sequence[int]) -> CutReport:
    if len(x) != g.n_vertices:
        raise ValueError(f"assignment has {len(x)} bits, graph has {g.n_vertices} vertices")
    cut = tuple(e for e in g.edges if x[e[0]] != x[e[1]])
    return CutReport(sum(w for _, _, w in cut), cut)


def _cut_values_chunk(g: Graph, start: int, stop: int) -> np.ndarray:
    n = g.n_vertices
    z = np.arange(start, stop, dtype=np.int64)
    vals = np.zeros(stop - start)
    for i, j, w in g.edges:
        bi = (z >> (n - 1 - i)) & 1
        bj = (z >> (n - 1 - j)) & 1
        vals += w * (bi ^ bj)
    return vals


def brute_force_max_cut(g: Graph) -> tuple[float, Assignment]:
    """Exact MaxCut by enumeration.

    Only assignments with ``x_0 = 0`` are scanned (cuts are complement
    symmetric). Among ties the lexicographically smallest bitstring wins.
    """
    n = g.n_vertices
    if n > MAX_BRUTE_FORCE_VERTICES:
        raise ValueError(f"{n} vertices exceeds the exhaustive bound of {MAX_BRUTE_FORCE_VERTICES}")
    half = 1 << (n - 1)
    best_val, best_z = -np.inf, 0
    chunk = 1 << _CHUNK_BITS
    for start in range(0, half, chunk):
        vals = _cut_values_chunk(g, start, min(half, start + chunk))
        k = int(np.argmax(vals))
        # strict '>' keeps the earliest (smallest) index across chunks
        if vals[k] > best_val:
            best_val, best_z = float(vals[k]), start + k
    return best_val, index_to_bits(best_z, n)


def neighborhood(x: Sequence[int]) -> list[Assignment]:
    """All single-bit flips of ``x``, ordered by flipped bit index."""
    x = tuple(int(b) for b in x)
    return [x[:k] + (1 - x[k],) + x[k + 1:] for k in range(len(x))]


def neighborhood_search(
    objective: Callable[[Assignment], float], x: Sequence[int]
) -> tuple[Assignment, float]:
    """One scan over the 1-flip neighborhood, accepting only a strict improvement.

    Returns ``(x_best, delta)`` with ``delta = f(x_best) - f(x) >= 0``. Ties
    among the best improving neighbors go to the lowest flipped bit.
    """
    x = tuple(int(b) for b in x)
    f0 = objective(x)
    best, best_val = x, f0
    for y in neighborhood(x):
        v = objective(y)
        if v > best_val:
            best, best_val = y, v
    return best, best_val - f0
