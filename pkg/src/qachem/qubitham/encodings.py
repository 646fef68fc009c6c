"""Jordan-Wigner and Bravyi-Kitaev encodings as linear binary encodings.

A linear encoding stores qubit bits ``b = beta @ n (mod 2)`` for occupation
vector ``n``. With ``U(p)`` the qubits flipped when mode p changes (column p
of beta), ``F(p)`` the qubits whose parity is n_p and ``P(p)`` the qubits
whose parity is n_0 + ... + n_{p-1}::

    a_p^+ = X_U(p) Z_P(p) (1 + Z_F(p)) / 2
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fermion import FermionOperator
from .pauli import PauliSum, QubitHamiltonian

ENCODINGS = ("JW", "BK")


def _gf2_inverse(M: np.ndarray) -> np.ndarray:
    n = M.shape[0]
    A = np.concatenate([M.astype(np.uint8) % 2, np.eye(n, dtype=np.uint8)], axis=1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if A[r, col]), None)
        if pivot is None:
            raise ValueError("encoding matrix is singular over GF(2)")
        A[[col, pivot]] = A[[pivot, col]]
        for r in range(n):
            if r != col and A[r, col]:
                A[r] ^= A[col]
    return A[:, n:]


def bk_matrix(n: int) -> np.ndarray:
    """Fenwick-tree Bravyi-Kitaev matrix: qubit q holds the parity of modes
    (q+1) - lowbit(q+1) .. q."""
    beta = np.zeros((n, n), dtype=np.uint8)
    for q in range(n):
        low = (q + 1) & -(q + 1)
        beta[q, q + 1 - low:q + 1] = 1
    return beta


def encoding_matrix(encoding: str, n: int) -> np.ndarray:
    encoding = encoding.upper()
    if encoding == "JW":
        return np.eye(n, dtype=np.uint8)
    if encoding == "BK":
        return bk_matrix(n)
    raise ValueError(f"unknown encoding {encoding!r}; choose from {ENCODINGS}")


def _mask(bits) -> int:
    return sum(1 << int(q) for q in np.flatnonzero(bits))


class LinearEncoding:
    def __init__(self, beta: np.ndarray):
        self.beta = np.asarray(beta, dtype=np.uint8)
        inv = _gf2_inverse(self.beta)
        n = self.beta.shape[0]
        prefix = np.cumsum(inv, axis=0) % 2
        self._sets = [(_mask(self.beta[:, p]), _mask(inv[p]), _mask(prefix[p - 1]) if p else 0)
                      for p in range(n)]

    @property
    def n_modes(self) -> int:
        return self.beta.shape[0]

    def raising(self, p: int) -> PauliSum:
        u, f, par = self._sets[p]
        proj = PauliSum({(0, 0): 0.5, (0, f): 0.5})
        return PauliSum.single(u, 0) * PauliSum.single(0, par) * proj

    def lowering(self, p: int) -> PauliSum:
        return self.raising(p).dagger()

    def encode_bits(self, occupations) -> tuple[int, ...]:
        n = np.asarray(occupations, dtype=int)
        return tuple(int(b) for b in (self.beta.astype(int) @ n) % 2)


def get_encoding(encoding: str, n_modes: int) -> LinearEncoding:
    return LinearEncoding(encoding_matrix(encoding, n_modes))


def transform(op: FermionOperator, encoding: str | LinearEncoding = "JW") -> PauliSum:
    """Encode ``op`` as a (possibly non-Hermitian) Pauli sum."""
    enc = encoding if isinstance(encoding, LinearEncoding) else get_encoding(encoding, op.n_modes)
    cache: dict[tuple[int, bool], PauliSum] = {}
    out = PauliSum()
    for key, coeff in op.terms.items():
        acc = PauliSum.identity(coeff)
        for mode, raising in key:
            if (mode, raising) not in cache:
                cache[mode, raising] = enc.raising(mode) if raising else enc.lowering(mode)
            acc = acc * cache[mode, raising]
        out += acc
    return out.simplify(1e-14)


def jordan_wigner(op: FermionOperator) -> QubitHamiltonian:
    return QubitHamiltonian(op.n_modes, transform(op, "JW"))


def bravyi_kitaev(op: FermionOperator) -> QubitHamiltonian:
    return QubitHamiltonian(op.n_modes, transform(op, "BK"))


def encode(op: FermionOperator, encoding: str) -> QubitHamiltonian:
    return QubitHamiltonian(op.n_modes, transform(op, encoding))


@dataclass(frozen=True)
class ReferenceState:
    bits: tuple[int, ...]

    @property
    def n_qubits(self) -> int:
        return len(self.bits)

    @property
    def index(self) -> int:
        return sum(b << q for q, b in enumerate(self.bits))

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


def hf_reference(encoding: str, n_modes: int, n_electrons: int) -> ReferenceState:
    """Aufbau determinant (lowest ``n_electrons`` modes filled) in qubit bits."""
    if not 0 <= n_electrons <= n_modes:
        raise ValueError(f"cannot place {n_electrons} electrons in {n_modes} modes")
    occ = [1] * n_electrons + [0] * (n_modes - n_electrons)
    return ReferenceState(get_encoding(encoding, n_modes).encode_bits(occ))
