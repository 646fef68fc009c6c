"""Restricted Hartree-Fock, MO integral transform and frozen-core active spaces."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .integrals import IntegralSet

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SCFResult:
    mo_coefficients: np.ndarray
    orbital_energies: np.ndarray
    e_hf_total: float
    e_electronic: float
    density: np.ndarray
    converged: bool
    iterations: int
    n_electrons: int


def _fock(hcore, eri_chem, D):
    J = np.einsum("pqrs,rs->pq", eri_chem, D)
    K = np.einsum("prqs,rs->pq", eri_chem, D)
    return hcore + J - 0.5 * K


def scf_rhf(ints: IntegralSet, n_electrons: int, *, max_iter: int = 200, diis_size: int = 8,
            e_tol: float = 1e-10, d_tol: float = 1e-8) -> SCFResult:
    """Closed-shell Roothaan SCF from the core-Hamiltonian guess, DIIS accelerated.

    Returns the last iterate with ``converged=False`` if the thresholds are not
    met within ``max_iter``.
    """
    if n_electrons % 2 or n_electrons < 0:
        raise ValueError(f"RHF needs an even, non-negative electron count, got {n_electrons}")
    if n_electrons > 2 * ints.n_spatial:
        raise ValueError(f"{n_electrons} electrons do not fit in {ints.n_spatial} orbitals")
    nocc = n_electrons // 2
    S, H, eri = ints.S, ints.hcore, ints.eri_chem

    def diagonalize(F):
        eps, C = scipy.linalg.eigh(F, S)
        return eps, C

    def density(C):
        Co = C[:, :nocc]
        return 2.0 * Co @ Co.T

    eps, C = diagonalize(H)
    D = density(C)
    e_old = None
    focks, errors = [], []
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        F = _fock(H, eri, D)
        e_el = 0.5 * float(np.sum(D * (H + F)))
        err = F @ D @ S - S @ D @ F
        focks.append(F)
        errors.append(err)
        if len(focks) > diis_size:
            focks.pop(0)
            errors.pop(0)
        F_use = _diis(focks, errors) if len(focks) > 1 else F
        eps, C = diagonalize(F_use)
        D_new = density(C)
        d_change = float(np.sqrt(np.mean((D_new - D) ** 2)))
        D = D_new
        if e_old is not None and abs(e_el - e_old) < e_tol and d_change < d_tol:
            converged = True
            break
        e_old = e_el
    # final consistent energy and orbitals from the converged density
    F = _fock(H, eri, D)
    eps, C = diagonalize(F)
    D = density(C)
    e_el = 0.5 * float(np.sum(D * (H + _fock(H, eri, D))))
    if not converged:
        log.warning("RHF not converged after %d iterations", it)
    return SCFResult(C, eps, e_el + ints.nuclear_repulsion, e_el, D, converged, it, n_electrons)


def _diis(focks, errors):
    m = len(focks)
    B = -np.ones((m + 1, m + 1))
    B[m, m] = 0.0
    for i in range(m):
        for j in range(m):
            B[i, j] = float(np.sum(errors[i] * errors[j]))
    rhs = np.zeros(m + 1)
    rhs[m] = -1.0
    try:
        c = np.linalg.solve(B, rhs)
    except np.linalg.LinAlgError:
        return focks[-1]
    return sum(ci * Fi for ci, Fi in zip(c[:m], focks))


@dataclass(frozen=True)
class MOIntegrals:
    """Spatial MO integrals: ``h[p, q]`` one-body, ``g[p, q, r, s]`` = <pq|rs>."""

    h: np.ndarray
    g: np.ndarray
    nuclear_repulsion: float

    @property
    def n_spatial(self) -> int:
        return self.h.shape[0]


def mo_transform(ints: IntegralSet, C: np.ndarray) -> MOIntegrals:
    C = np.asarray(C, dtype=float)
    n = ints.n_spatial
    if C.ndim != 2 or C.shape[0] != n:
        raise ValueError(f"coefficient matrix shape {C.shape} does not match {n} AOs")
    h = C.T @ ints.hcore @ C
    g = np.einsum("pqrs,pi,qj,rk,sl->ijkl", ints.eri, C, C, C, C, optimize=True)
    return MOIntegrals(h, g, ints.nuclear_repulsion)


class ActiveSpaceError(ValueError):
    pass


@dataclass(frozen=True)
class ActiveSpaceIntegrals:
    active: tuple[int, ...]
    frozen: tuple[int, ...]
    h: np.ndarray
    g: np.ndarray
    core_energy: float
    n_active_electrons: int

    @property
    def n_spatial(self) -> int:
        return len(self.active)


def active_space(mo: MOIntegrals, frozen: Sequence[int], active: Sequence[int] | None,
                 n_electrons: int) -> ActiveSpaceIntegrals:
    """Fold doubly occupied ``frozen`` orbitals into a constant and an effective
    one-body operator over ``active`` (default: every non-frozen orbital)."""
    frozen = tuple(sorted(set(int(f) for f in frozen)))
    if active is None:
        active = [p for p in range(mo.n_spatial) if p not in frozen]
    active = tuple(int(a) for a in active)
    if len(set(active)) != len(active):
        raise ActiveSpaceError("duplicate active orbital")
    if set(frozen) & set(active):
        raise ActiveSpaceError(f"orbitals {sorted(set(frozen) & set(active))} both frozen and active")
    for idx in frozen + active:
        if not 0 <= idx < mo.n_spatial:
            raise ActiveSpaceError(f"orbital index {idx} out of range")
    n_act_el = n_electrons - 2 * len(frozen)
    if n_act_el < 0 or n_act_el % 2:
        raise ActiveSpaceError(f"{n_act_el} active electrons: need an even, non-negative count")
    if n_act_el > 2 * len(active):
        raise ActiveSpaceError(f"{n_act_el} electrons do not fit in {len(active)} active orbitals")
    h, g = mo.h, mo.g
    f = list(frozen)
    core = mo.nuclear_repulsion + 2.0 * float(np.sum(h[f, f]))
    for a in f:
        for b in f:
            core += 2.0 * g[a, b, a, b] - g[a, b, b, a]
    ix = np.array(active, dtype=int)
    h_eff = h[np.ix_(ix, ix)].copy()
    for a in f:
        h_eff += 2.0 * g[np.ix_(ix, [a], ix, [a])][:, 0, :, 0] - g[np.ix_(ix, [a], [a], ix)][:, 0, 0, :]
    g_act = g[np.ix_(ix, ix, ix, ix)].copy()
    return ActiveSpaceIntegrals(active, frozen, h_eff, g_act, float(core), n_act_el)


def full_space(mo: MOIntegrals, n_electrons: int) -> ActiveSpaceIntegrals:
    return active_space(mo, (), None, n_electrons)
