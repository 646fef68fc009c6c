"""Removing Z-only qubits and dense exact diagonalization."""
from __future__ import annotations

from typing import Sequence

import numpy as np
import scipy.linalg

from .encodings import ReferenceState
from .pauli import PauliSum, QubitHamiltonian

MAX_DENSE_QUBITS = 14


class NotTaperableError(ValueError):
    pass


class CapacityError(ValueError):
    pass


def z_only_qubits(H: QubitHamiltonian) -> list[int]:
    flipped = 0
    for x, _ in H.coefficients:
        flipped |= x
    return [q for q in range(H.n_qubits) if not (flipped >> q) & 1]


def taper_fixed_qubits(H: QubitHamiltonian, reference: ReferenceState,
                       qubits: Sequence[int] | None = None
                       ) -> tuple[QubitHamiltonian, list[tuple[int, int]]]:
    """Substitute Z_q -> (-1)^b_q on qubits never flipped by any term.

    ``qubits`` defaults to every such qubit. Returns the compacted Hamiltonian
    and ``(qubit, eigenvalue)`` pairs for what was removed.
    """
    if reference.n_qubits != H.n_qubits:
        raise ValueError(f"reference has {reference.n_qubits} bits, H has {H.n_qubits} qubits")
    candidates = z_only_qubits(H)
    if qubits is None:
        qubits = candidates
    else:
        bad = sorted(set(qubits) - set(candidates))
        if bad:
            raise NotTaperableError(f"qubits {bad} carry X or Y factors")
    qubits = sorted(set(qubits))
    if not qubits:
        return H, []
    eig = {q: 1 - 2 * reference.bits[q] for q in qubits}
    keep = [q for q in range(H.n_qubits) if q not in eig]
    new_index = {q: i for i, q in enumerate(keep)}
    acc = PauliSum()
    for (x, z), c in H.coefficients.items():
        sign = 1
        for q, e in eig.items():
            if (z >> q) & 1:
                sign *= e
        nx = nz = 0
        for q in keep:
            if (x >> q) & 1:
                nx |= 1 << new_index[q]
            if (z >> q) & 1:
                nz |= 1 << new_index[q]
        acc.add_term(nx, nz, sign * c)
    return QubitHamiltonian(len(keep), acc), [(q, eig[q]) for q in qubits]


def taper_reference(reference: ReferenceState, removed: Sequence[tuple[int, int]]) -> ReferenceState:
    gone = {q for q, _ in removed}
    return ReferenceState(tuple(b for q, b in enumerate(reference.bits) if q not in gone))


def exact_diagonalize(H: QubitHamiltonian) -> tuple[float, np.ndarray]:
    """Lowest eigenvalue and normalized eigenvector by dense Hermitian eigensolver."""
    if H.n_qubits > MAX_DENSE_QUBITS:
        raise CapacityError(f"{H.n_qubits} qubits exceeds dense limit {MAX_DENSE_QUBITS}")
    M = H.to_matrix()
    if not np.iscomplexobj(M) or np.abs(M.imag).max(initial=0.0) == 0.0:
        M = M.real
    w, v = scipy.linalg.eigh(M, subset_by_index=[0, 0])
    vec = v[:, 0]
    return float(w[0]), vec / np.linalg.norm(vec)


def diagonal_minimum(H: QubitHamiltonian) -> tuple[float, int]:
    """min_b <b|H|b> and the minimizing basis index (ties: lowest index)."""
    d = H.diagonal()
    i = int(np.argmin(d))
    return float(d[i]), i
