"""Pauli strings stored as (x-mask, z-mask) bit pairs.

Qubit ``q`` is bit ``q`` of both masks: (0,0)=I, (1,0)=X, (0,1)=Z, (1,1)=Y.
Basis state index is ``sum(b_q << q)`` (qubit 0 least significant).
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse

AXES = ("X", "Y", "Z")
HERMITICITY_TOL = 1e-10


class NonHermitianError(ValueError):
    pass


def _popcount(v: int) -> int:
    return bin(v).count("1")


def pauli_product(x1: int, z1: int, x2: int, z2: int) -> tuple[int, int, int]:
    """Return (x, z, k) with P1 P2 = i^k P(x, z)."""
    y1, y2 = x1 & z1, x2 & z2
    xo1, xo2 = x1 & ~z1, x2 & ~z2
    zo1, zo2 = z1 & ~x1, z2 & ~x2
    k = (_popcount(y1 & zo2) - _popcount(y1 & xo2)
         + _popcount(xo1 & y2) - _popcount(xo1 & zo2)
         + _popcount(zo1 & xo2) - _popcount(zo1 & y2))
    return x1 ^ x2, z1 ^ z2, k % 4


_IPOW = (1, 1j, -1, -1j)


def masks_from_factors(factors: Mapping[int, str]) -> tuple[int, int]:
    x = z = 0
    for q, axis in factors.items():
        if axis not in AXES:
            raise ValueError(f"unknown Pauli axis {axis!r}")
        if axis in ("X", "Y"):
            x |= 1 << q
        if axis in ("Z", "Y"):
            z |= 1 << q
    return x, z


def factors_from_masks(x: int, z: int) -> dict[int, str]:
    out = {}
    q = 0
    m = x | z
    while m >> q:
        if (m >> q) & 1:
            xb, zb = (x >> q) & 1, (z >> q) & 1
            out[q] = "Y" if xb and zb else ("X" if xb else "Z")
        q += 1
    return out


def pauli_label(x: int, z: int) -> str:
    f = factors_from_masks(x, z)
    return " ".join(f"{a}{q}" for q, a in sorted(f.items())) or "I"


def parse_label(label: str) -> tuple[int, int]:
    factors = {}
    for tok in label.split():
        if tok == "I":
            continue
        axis, q = tok[0].upper(), int(tok[1:])
        if q in factors:
            raise ValueError(f"qubit {q} appears twice in {label!r}")
        factors[q] = axis
    return masks_from_factors(factors)


@dataclass(frozen=True)
class PauliTerm:
    """One weighted Pauli string; ``factors`` maps qubit -> axis."""

    factors: tuple[tuple[int, str], ...]
    coefficient: complex

    @classmethod
    def from_masks(cls, x: int, z: int, coefficient) -> "PauliTerm":
        return cls(tuple(sorted(factors_from_masks(x, z).items())), coefficient)

    @property
    def factor_map(self) -> dict[int, str]:
        return dict(self.factors)

    @property
    def masks(self) -> tuple[int, int]:
        return masks_from_factors(self.factor_map)

    def __mul__(self, other: "PauliTerm") -> "PauliTerm":
        x1, z1 = self.masks
        x2, z2 = other.masks
        x, z, k = pauli_product(x1, z1, x2, z2)
        return PauliTerm.from_masks(x, z, _IPOW[k] * self.coefficient * other.coefficient)


class PauliSum:
    """Mutable complex-weighted sum of Pauli strings (accumulator)."""

    def __init__(self, terms: Mapping[tuple[int, int], complex] | None = None):
        self.terms: dict[tuple[int, int], complex] = dict(terms or {})

    @classmethod
    def identity(cls, coefficient=1.0) -> "PauliSum":
        return cls({(0, 0): complex(coefficient)})

    @classmethod
    def single(cls, x: int, z: int, coefficient=1.0) -> "PauliSum":
        return cls({(x, z): complex(coefficient)})

    def copy(self) -> "PauliSum":
        return PauliSum(self.terms)

    def add_term(self, x: int, z: int, c: complex) -> None:
        self.terms[(x, z)] = self.terms.get((x, z), 0.0) + c

    def __iadd__(self, other: "PauliSum") -> "PauliSum":
        for key, c in other.terms.items():
            self.terms[key] = self.terms.get(key, 0.0) + c
        return self

    def __add__(self, other: "PauliSum") -> "PauliSum":
        out = self.copy()
        out += other
        return out

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + other.scale(-1.0)

    def scale(self, s: complex) -> "PauliSum":
        return PauliSum({k: s * c for k, c in self.terms.items()})

    def __mul__(self, other: "PauliSum") -> "PauliSum":
        out: dict[tuple[int, int], complex] = {}
        for (x1, z1), c1 in self.terms.items():
            for (x2, z2), c2 in other.terms.items():
                x, z, k = pauli_product(x1, z1, x2, z2)
                out[(x, z)] = out.get((x, z), 0.0) + _IPOW[k] * c1 * c2
        return PauliSum(out)

    def dagger(self) -> "PauliSum":
        return PauliSum({k: c.conjugate() for k, c in self.terms.items()})

    def simplify(self, tol: float = 1e-12) -> "PauliSum":
        return PauliSum({k: c for k, c in self.terms.items() if abs(c) > tol})

    def n_qubits(self) -> int:
        m = 0
        for x, z in self.terms:
            m |= x | z
        return m.bit_length()

    def to_matrix(self, n_qubits: int, sparse: bool = False):
        return _pauli_matrix(self.terms.items(), n_qubits, sparse)


def _pauli_matrix(items, n_qubits: int, sparse: bool):
    dim = 1 << n_qubits
    idx = np.arange(dim, dtype=np.int64)
    rows, cols, vals = [], [], []
    for (x, z), c in items:
        if c == 0:
            continue
        ny = _popcount(x & z)
        parity = np.zeros(dim, dtype=np.int64)
        zz = z
        q = 0
        while zz:
            if zz & 1:
                parity ^= (idx >> q) & 1
            zz >>= 1
            q += 1
        vals.append(c * _IPOW[ny % 4] * (1 - 2 * parity))
        rows.append(idx ^ x)
        cols.append(idx)
    if not vals:
        return scipy.sparse.csr_matrix((dim, dim), dtype=complex) if sparse else np.zeros((dim, dim), complex)
    m = scipy.sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)).tocsr()
    return m if sparse else m.toarray()


class QubitHamiltonian:
    """Collected Hermitian Pauli sum with real coefficients.

    Built from a ``PauliSum``; imaginary parts above ``HERMITICITY_TOL`` raise
    ``NonHermitianError``. Treat instances as immutable.
    """

    def __init__(self, n_qubits: int, terms: Mapping[tuple[int, int], complex] | PauliSum,
                 tol: float = HERMITICITY_TOL, drop: float = 1e-14):
        if isinstance(terms, PauliSum):
            terms = terms.terms
        self.n_qubits = int(n_qubits)
        coeffs: dict[tuple[int, int], float] = {}
        for (x, z), c in terms.items():
            c = complex(c)
            if abs(c.imag) > tol:
                raise NonHermitianError(
                    f"term {pauli_label(x, z)} has imaginary coefficient {c.imag:.3e}")
            if (x | z) >> self.n_qubits:
                raise ValueError(f"term {pauli_label(x, z)} exceeds {self.n_qubits} qubits")
            if abs(c.real) > drop:
                coeffs[(x, z)] = coeffs.get((x, z), 0.0) + c.real
        self._coeffs = coeffs

    @classmethod
    def from_terms(cls, n_qubits: int, terms: Iterable[PauliTerm]) -> "QubitHamiltonian":
        acc = PauliSum()
        for t in terms:
            x, z = t.masks
            acc.add_term(x, z, t.coefficient)
        return cls(n_qubits, acc)

    @classmethod
    def from_dict(cls, n_qubits: int, mapping: Mapping[str, float]) -> "QubitHamiltonian":
        """``{"Z0 X1": 0.5, "I": -1.0}`` style construction."""
        acc = PauliSum()
        for label, c in mapping.items():
            acc.add_term(*parse_label(label), c)
        return cls(n_qubits, acc)

    @property
    def coefficients(self) -> dict[tuple[int, int], float]:
        return dict(self._coeffs)

    @property
    def terms(self) -> list[PauliTerm]:
        return [PauliTerm.from_masks(x, z, c) for (x, z), c in sorted(self._coeffs.items())]

    def __len__(self) -> int:
        return len(self._coeffs)

    def constant(self) -> float:
        return self._coeffs.get((0, 0), 0.0)

    def to_pauli_sum(self) -> PauliSum:
        return PauliSum({k: complex(c) for k, c in self._coeffs.items()})

    def collected(self) -> "QubitHamiltonian":
        return QubitHamiltonian(self.n_qubits, self._coeffs)

    def to_matrix(self, sparse: bool = False):
        return _pauli_matrix(self._coeffs.items(), self.n_qubits, sparse)

    def diagonal(self) -> np.ndarray:
        """<b|H|b> for every basis index b."""
        dim = 1 << self.n_qubits
        idx = np.arange(dim, dtype=np.int64)
        out = np.zeros(dim)
        for (x, z), c in self._coeffs.items():
            if x:
                continue
            parity = np.zeros(dim, dtype=np.int64)
            for q in range(self.n_qubits):
                if (z >> q) & 1:
                    parity ^= (idx >> q) & 1
            out += c * (1 - 2 * parity)
        return out

    def expectation(self, vec: np.ndarray) -> complex:
        vec = np.asarray(vec, dtype=complex)
        return complex(np.vdot(vec, self.to_matrix(sparse=True) @ vec))

    def __eq__(self, other) -> bool:
        return (isinstance(other, QubitHamiltonian) and self.n_qubits == other.n_qubits
                and self._coeffs == other._coeffs)

    def allclose(self, other: "QubitHamiltonian", atol: float = 1e-10) -> bool:
        keys = set(self._coeffs) | set(other._coeffs)
        return all(abs(self._coeffs.get(k, 0.0) - other._coeffs.get(k, 0.0)) <= atol for k in keys)

    def __repr__(self) -> str:
        return f"QubitHamiltonian(n_qubits={self.n_qubits}, terms={len(self)})"

    def dumps(self) -> str:
        lines = [f"n_qubits {self.n_qubits}"]
        for (x, z), c in sorted(self._coeffs.items(), key=lambda kv: (_popcount(kv[0][0] | kv[0][1]), kv[0])):
            lines.append(f"{c!r} {pauli_label(x, z)}")
        return "\n".join(lines) + "\n"

    def dump(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def loads(cls, text: str) -> "QubitHamiltonian":
        n = None
        acc = PauliSum()
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("n_qubits"):
                n = int(line.split()[1])
                continue
            coef, _, label = line.partition(" ")
            acc.add_term(*parse_label(label), complex(coef.replace("i", "j")))
        if n is None:
            n = acc.n_qubits()
        return cls(n, acc)

    @classmethod
    def load(cls, path) -> "QubitHamiltonian":
        return cls.loads(Path(path).read_text())
