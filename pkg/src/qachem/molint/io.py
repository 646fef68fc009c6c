"""Integral interchange files.

Plain text, whitespace separated::

    n_spatial 2
    n_electrons 2          # optional
    core_energy 0.7137
    h
    <n rows of n values, row-major>
    g
    <n**4 values, flat index p*n^3 + q*n^2 + r*n + s, <pq|rs> convention>

Lets external integrals bypass the built-in engine.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .scf import ActiveSpaceIntegrals


def dump_integrals(path, ints: ActiveSpaceIntegrals) -> None:
    n = ints.n_spatial
    lines = [f"n_spatial {n}", f"n_electrons {ints.n_active_electrons}",
             f"core_energy {ints.core_energy!r}", "h"]
    lines += [" ".join(repr(float(v)) for v in row) for row in ints.h]
    lines.append("g")
    flat = ints.g.reshape(-1)
    lines += [" ".join(repr(float(v)) for v in flat[i:i + n]) for i in range(0, flat.size, n)]
    Path(path).write_text("\n".join(lines) + "\n")


def load_integrals(path, n_electrons: int | None = None) -> ActiveSpaceIntegrals:
    text = Path(path).read_text()
    header: dict[str, str] = {}
    blocks: dict[str, list[float]] = {}
    current = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line in ("h", "g"):
            current = line
            blocks[current] = []
            continue
        if current is None:
            key, value = line.split(None, 1)
            header[key] = value
        else:
            blocks[current].extend(float(tok) for tok in line.split())
    n = int(header["n_spatial"])
    h = np.array(blocks.get("h", []))
    g = np.array(blocks.get("g", []))
    if h.size != n * n or g.size != n ** 4:
        raise ValueError(f"integral file {path}: expected {n * n} h and {n ** 4} g values, "
                         f"got {h.size} and {g.size}")
    if n_electrons is None:
        if "n_electrons" not in header:
            raise ValueError(f"integral file {path} has no n_electrons; pass it explicitly")
        n_electrons = int(header["n_electrons"])
    return ActiveSpaceIntegrals(tuple(range(n)), (), h.reshape(n, n), g.reshape(n, n, n, n),
                                float(header["core_energy"]), int(n_electrons))
