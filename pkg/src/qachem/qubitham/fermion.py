"""Second-quantized operators built from spin-orbital integrals."""
from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np

Ladder = tuple[tuple[int, bool], ...]


class FermionOperator:
    """Sum of products of ladder operators.

    Each key is a sequence of ``(mode, raising)`` pairs read left to right as an
    operator product; the empty key is the identity.
    """

    def __init__(self, n_modes: int, terms: Mapping[Ladder, complex] | None = None):
        self.n_modes = int(n_modes)
        self.terms: dict[Ladder, complex] = {}
        for key, c in (terms or {}).items():
            self.add(key, c)

    def add(self, key: Iterable[tuple[int, bool]], c: complex) -> None:
        key = tuple((int(m), bool(r)) for m, r in key)
        for m, _ in key:
            if not 0 <= m < self.n_modes:
                raise ValueError(f"mode {m} outside 0..{self.n_modes - 1}")
        self.terms[key] = self.terms.get(key, 0.0) + complex(c)

    def __add__(self, other: "FermionOperator") -> "FermionOperator":
        out = FermionOperator(max(self.n_modes, other.n_modes), self.terms)
        for k, c in other.terms.items():
            out.add(k, c)
        return out

    def __mul__(self, other):
        if isinstance(other, FermionOperator):
            out = FermionOperator(max(self.n_modes, other.n_modes))
            for k1, c1 in self.terms.items():
                for k2, c2 in other.terms.items():
                    out.add(k1 + k2, c1 * c2)
            return out
        return FermionOperator(self.n_modes, {k: other * c for k, c in self.terms.items()})

    __rmul__ = __mul__

    def dagger(self) -> "FermionOperator":
        return FermionOperator(self.n_modes, {
            tuple((m, not r) for m, r in reversed(k)): c.conjugate() for k, c in self.terms.items()})

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        """Term-wise check: the adjoint of each term is present with the
        conjugate coefficient."""
        for key, c in self.terms.items():
            adj = tuple((m, not r) for m, r in reversed(key))
            if abs(self.terms.get(adj, 0.0) - c.conjugate()) > tol:
                return False
        return True

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        return f"FermionOperator(n_modes={self.n_modes}, terms={len(self)})"


def ladder(mode: int, raising: bool, n_modes: int | None = None) -> FermionOperator:
    return FermionOperator(n_modes if n_modes is not None else mode + 1, {((mode, raising),): 1.0})


def spin_orbital_integrals(h: np.ndarray, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Expand spatial integrals to interleaved spin orbitals (2p = alpha, 2p+1 = beta).

    ``g`` is in <pq|rs> order; spin must match between p,r and between q,s.
    """
    n = h.shape[0]
    m = 2 * n
    spin = np.arange(m) % 2
    space = np.arange(m) // 2
    hs = h[np.ix_(space, space)] * (spin[:, None] == spin[None, :])
    gs = g[np.ix_(space, space, space, space)]
    mask = (spin[:, None, None, None] == spin[None, None, :, None]) & \
           (spin[None, :, None, None] == spin[None, None, None, :])
    return hs, gs * mask


class IntegralValidationError(ValueError):
    pass


def build_fermionic(h: np.ndarray, g: np.ndarray, core_energy: float = 0.0,
                    tol: float = 1e-10, drop: float = 1e-14) -> FermionOperator:
    """H = core + sum h_pq a_p^+ a_q + 1/2 sum <pq|rs> a_p^+ a_q^+ a_s a_r (spin orbitals)."""
    h = np.asarray(h)
    g = np.asarray(g)
    m = h.shape[0]
    if h.shape != (m, m) or g.shape != (m, m, m, m):
        raise IntegralValidationError(f"integral shapes {h.shape}, {g.shape} are inconsistent")
    if np.abs(h - h.conj().T).max(initial=0.0) > tol:
        raise IntegralValidationError("one-body integrals are not Hermitian")
    if np.abs(g - g.transpose(2, 3, 0, 1).conj()).max(initial=0.0) > tol:
        raise IntegralValidationError("two-body integrals violate <pq|rs> = <rs|pq>*")
    op = FermionOperator(m)
    if core_energy:
        op.add((), core_energy)
    for p, q in zip(*np.nonzero(np.abs(h) > drop)):
        op.add(((p, True), (q, False)), h[p, q])
    for p, q, r, s in zip(*np.nonzero(np.abs(g) > drop)):
        if p == q or r == s:
            continue
        op.add(((p, True), (q, True), (s, False), (r, False)), 0.5 * g[p, q, r, s])
    return op
