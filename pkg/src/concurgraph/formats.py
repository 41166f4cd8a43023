"""Graph file formats.

Text (``AdjacencyGraph``): the header line, then ``n``, ``m``, the ``n`` offsets
and the ``m`` targets, one integer per line.

Binary (``CGR1``), little-endian::

    magic   4 bytes  b"CGR1"
    flags   u32      bit 0 set: graph is symmetric
    n       u64
    m       u64
    offsets (n + 1) x u64
    targets m x u32

Loading canonicalises neighbour lists (sorted, no duplicates, no self-loops),
so ``write(load(f))`` is the canonical form of ``f``.
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .graph import Graph, build_csr

TEXT_HEADER = "AdjacencyGraph"
BINARY_MAGIC = b"CGR1"
_BIN_HEADER = struct.Struct("<4sIQQ")
FLAG_SYMMETRIC = 1


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class HeaderError(ParseError):
    pass


class CountError(ParseError):
    pass


class TargetRangeError(ParseError):
    pass


def _edges_from_csr(n: int, offsets: np.ndarray, targets: np.ndarray) -> np.ndarray:
    src = np.repeat(np.arange(n, dtype=np.int64), np.diff(offsets))
    return np.stack([src, targets.astype(np.int64)], axis=1)


def _int_line(text: str, lineno: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"expected an integer, got {text!r}", lineno) from None


def load_adjacency_text(path, symmetric: bool = False) -> Graph:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != TEXT_HEADER:
        got = lines[0].strip() if lines else ""
        raise HeaderError(f"expected {TEXT_HEADER!r}, got {got!r}", 1)
    if len(lines) < 3:
        raise CountError("missing vertex or edge count", len(lines) + 1)
    n = _int_line(lines[1].strip(), 2)
    m = _int_line(lines[2].strip(), 3)
    if n < 0 or m < 0:
        raise CountError("counts must be non-negative", 2 if n < 0 else 3)
    body = [ln.strip() for ln in lines[3:]]
    while body and body[-1] == "":
        body.pop()
    if len(body) != n + m:
        raise CountError(f"expected {n} offsets and {m} targets, found {len(body)} values", 4 + min(len(body), n + m))
    values = np.empty(n + m, np.int64)
    for i, text in enumerate(body):
        values[i] = _int_line(text, 4 + i)
    offsets = np.empty(n + 1, np.int64)
    offsets[:n] = values[:n]
    offsets[n] = m
    targets = values[n:]
    if n and offsets[0] != 0:
        raise ParseError("first offset must be 0", 4)
    bad = np.flatnonzero(np.diff(offsets) < 0)
    if bad.size:
        raise ParseError("offsets must be non-decreasing and at most m", 4 + int(bad[0]) + 1)
    bad = np.flatnonzero((targets < 0) | (targets >= n))
    if bad.size:
        i = int(bad[0])
        raise TargetRangeError(f"target {targets[i]} outside [0, {n})", 4 + n + i)
    return build_csr(n, _edges_from_csr(n, offsets, targets), directed=not symmetric)


def write_adjacency_text(g: Graph, path) -> None:
    with open(path, "w") as f:
        f.write(f"{TEXT_HEADER}\n{g.n}\n{g.m}\n")
        if g.n:
            f.write("\n".join(map(str, g.offsets[:-1].tolist())) + "\n")
        if g.m:
            f.write("\n".join(map(str, g.targets.tolist())) + "\n")


def write_binary(g: Graph, path) -> None:
    flags = FLAG_SYMMETRIC if g.symmetric else 0
    with open(path, "wb") as f:
        f.write(_BIN_HEADER.pack(BINARY_MAGIC, flags, g.n, g.m))
        f.write(g.offsets.astype("<u8").tobytes())
        f.write(g.targets.astype("<u4").tobytes())


def load_binary(path) -> Graph:
    data = Path(path).read_bytes()
    if len(data) < _BIN_HEADER.size:
        raise HeaderError("file shorter than the binary header")
    magic, flags, n, m = _BIN_HEADER.unpack_from(data)
    if magic != BINARY_MAGIC:
        raise HeaderError(f"bad magic {magic!r}")
    need = _BIN_HEADER.size + 8 * (n + 1) + 4 * m
    if len(data) != need:
        raise CountError(f"expected {need} bytes for n={n}, m={m}, found {len(data)}")
    pos = _BIN_HEADER.size
    offsets = np.frombuffer(data, "<u8", n + 1, pos).astype(np.int64)
    targets = np.frombuffer(data, "<u4", m, pos + 8 * (n + 1)).astype(np.int64)
    if offsets[0] != 0 or offsets[-1] != m or np.any(np.diff(offsets) < 0):
        raise CountError("offsets are not a valid CSR index")
    if m and targets.max() >= n:
        raise TargetRangeError(f"target {int(targets.max())} outside [0, {n})")
    symmetric = bool(flags & FLAG_SYMMETRIC)
    return build_csr(n, _edges_from_csr(n, offsets, targets), directed=not symmetric)


def load_graph(path, symmetric: bool = False) -> Graph:
    """Load by content: binary if the file starts with the magic, else text."""
    with open(path, "rb") as f:
        head = f.read(4)
    if head == BINARY_MAGIC:
        return load_binary(path)
    return load_adjacency_text(path, symmetric=symmetric)


def save_graph(g: Graph, path) -> None:
    """Write binary for ``.bin`` paths, text otherwise."""
    if str(path).endswith(".bin"):
        write_binary(g, path)
    else:
        write_adjacency_text(g, path)
