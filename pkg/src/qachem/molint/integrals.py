"""One- and two-electron integrals over contracted Cartesian Gaussians.

McMurchie-Davidson: products of Gaussians are expanded in Hermite Gaussians
(``hermite_e``); Coulomb-type integrals reduce to Hermite integrals
``R_tuv`` built from the Boys function.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .basis import CARTESIAN, ContractedShell, Geometry, UnsupportedFeatureError, build_basis
from .boys import boys_array


class CoincidentNucleiError(ValueError):
    pass


@dataclass(frozen=True)
class IntegralSet:
    """AO integrals in Hartree. ``eri[i, j, k, l]`` is <ij|kl> (physicist order)."""

    n_spatial: int
    S: np.ndarray
    T: np.ndarray
    V: np.ndarray
    eri: np.ndarray
    nuclear_repulsion: float

    @property
    def hcore(self) -> np.ndarray:
        return self.T + self.V

    @property
    def eri_chem(self) -> np.ndarray:
        """Chemist-order (ij|kl) view."""
        return self.eri.transpose(0, 2, 1, 3)


def nuclear_repulsion(geometry: Geometry) -> float:
    """Sum over atom pairs of Z_A Z_B / |R_A - R_B| (Hartree)."""
    coords, charges = geometry.coords, geometry.charges
    total = 0.0
    for a in range(len(charges)):
        for b in range(a + 1, len(charges)):
            d = float(np.linalg.norm(coords[a] - coords[b]))
            if d < 1e-10:
                raise CoincidentNucleiError(f"atoms {a} and {b} coincide")
            total += charges[a] * charges[b] / d
    return total


def hermite_e(i: int, j: int, a: float, b: float, xab: float) -> np.ndarray:
    """Hermite expansion coefficients E^{ij}_t, t = 0..i+j, for one Cartesian axis.

    ``xab`` is A_x - B_x.
    """
    p = a + b
    mu = a * b / p
    xpa = -b * xab / p
    xpb = a * xab / p
    table = {(0, 0): np.array([math.exp(-mu * xab * xab)])}

    def get(ii, jj):
        if (ii, jj) in table:
            return table[(ii, jj)]
        if ii > 0:
            prev, shift = get(ii - 1, jj), xpa
        else:
            prev, shift = get(ii, jj - 1), xpb
        n = len(prev)
        out = np.zeros(n + 1)
        # E_t = E_{t-1}/(2p) + X_P? E_t + (t+1) E_{t+1}
        out[1:] += prev / (2 * p)
        out[:n] += shift * prev
        out[: n - 1] += np.arange(1, n) * prev[1:]
        table[(ii, jj)] = out
        return out

    return get(i, j)


def hermite_r(order: int, alpha: float, pc: np.ndarray) -> np.ndarray:
    """Hermite Coulomb integrals R^0_{tuv} for t+u+v <= order, shape (order+1,)*3."""
    x, y, z = pc
    r2 = float(pc @ pc)
    fn = boys_array(order, alpha * r2)
    R = np.zeros((order + 1, order + 1, order + 1, order + 1))
    for n in range(order + 1):
        R[n, 0, 0, 0] = (-2.0 * alpha) ** n * fn[n]
    for s in range(1, order + 1):
        for t in range(s + 1):
            for u in range(s - t + 1):
                v = s - t - u
                for n in range(order - s + 1):
                    if t > 0:
                        val = x * R[n + 1, t - 1, u, v]
                        if t > 1:
                            val += (t - 1) * R[n + 1, t - 2, u, v]
                    elif u > 0:
                        val = y * R[n + 1, t, u - 1, v]
                        if u > 1:
                            val += (u - 1) * R[n + 1, t, u - 2, v]
                    else:
                        val = z * R[n + 1, t, u, v - 1]
                        if v > 1:
                            val += (v - 1) * R[n + 1, t, u, v - 2]
                    R[n, t, u, v] = val
    return R[0]


def _pair_data(sa: ContractedShell, sb: ContractedShell):
    """Per primitive pair: exponent sum, center P, coefficient product and the
    Hermite tensors E_tuv for every component pair of the two shells."""
    A, B = np.asarray(sa.center), np.asarray(sb.center)
    comps_a, comps_b = CARTESIAN[sa.L], CARTESIAN[sb.L]
    out = []
    for a, ca in zip(sa.exponents, sa.coefficients):
        for b, cb in zip(sb.exponents, sb.coefficients):
            p = a + b
            P = (a * A + b * B) / p
            E = {}
            for ia, la in enumerate(comps_a):
                for ib, lb in enumerate(comps_b):
                    ex = [hermite_e(la[k], lb[k], a, b, A[k] - B[k]) for k in range(3)]
                    E[ia, ib] = np.einsum("i,j,k->ijk", *ex)
            out.append((p, P, ca * cb, E, a, b))
    return out


def _one_electron_block(sa, sb, geometry):
    comps_a, comps_b = CARTESIAN[sa.L], CARTESIAN[sb.L]
    A, B = np.asarray(sa.center), np.asarray(sb.center)
    na, nb = len(comps_a), len(comps_b)
    S = np.zeros((na, nb))
    T = np.zeros((na, nb))
    V = np.zeros((na, nb))
    coords, charges = geometry.coords, geometry.charges
    for a, ca in zip(sa.exponents, sa.coefficients):
        for b, cb in zip(sb.exponents, sb.coefficients):
            p = a + b
            P = (a * A + b * B) / p
            pref = (math.pi / p) ** 1.5
            lmax = sa.L + sb.L
            Rs = [hermite_r(lmax, p, P - C) for C in coords]
            for ia, la in enumerate(comps_a):
                for ib, lb in enumerate(comps_b):
                    # 1-D overlaps with b's exponent raised/lowered by 2 for kinetic terms
                    s1 = []
                    t1 = []
                    for k in range(3):
                        i, j = la[k], lb[k]
                        xab = A[k] - B[k]
                        s0 = hermite_e(i, j, a, b, xab)[0]
                        sp2 = hermite_e(i, j + 2, a, b, xab)[0]
                        sm2 = hermite_e(i, j - 2, a, b, xab)[0] if j >= 2 else 0.0
                        s1.append(s0)
                        t1.append(-2 * b * b * sp2 + b * (2 * j + 1) * s0 - 0.5 * j * (j - 1) * sm2)
                    sx, sy, sz = s1
                    S[ia, ib] += ca * cb * pref * sx * sy * sz
                    T[ia, ib] += ca * cb * pref * (t1[0] * sy * sz + sx * t1[1] * sz + sx * sy * t1[2])
                    ex = [hermite_e(la[k], lb[k], a, b, A[k] - B[k]) for k in range(3)]
                    Etuv = np.einsum("i,j,k->ijk", *ex)
                    sh = Etuv.shape
                    for Z, R in zip(charges, Rs):
                        V[ia, ib] -= ca * cb * Z * 2 * math.pi / p * float(
                            np.sum(Etuv * R[: sh[0], : sh[1], : sh[2]]))
    return S, T, V


def _eri_block(pab, pcd, shape):
    """(ab|cd) block over the components of four shells."""
    out = np.zeros(shape)
    for p, P, cab, Eab, _, _ in pab:
        for q, Q, ccd, Ecd, _, _ in pcd:
            alpha = p * q / (p + q)
            pref = 2 * math.pi ** 2.5 / (p * q * math.sqrt(p + q)) * cab * ccd
            lab = max(sum(e.shape) - 3 for e in Eab.values())
            lcd = max(sum(e.shape) - 3 for e in Ecd.values())
            R = hermite_r(lab + lcd, alpha, P - Q)
            for (ia, ib), E1 in Eab.items():
                t1, u1, v1 = E1.shape
                for (ic, id_), E2 in Ecd.items():
                    acc = 0.0
                    for (tau, nu, phi), e2 in np.ndenumerate(E2):
                        if e2 == 0.0:
                            continue
                        sign = -1.0 if (tau + nu + phi) % 2 else 1.0
                        acc += sign * e2 * float(np.sum(
                            E1 * R[tau:tau + t1, nu:nu + u1, phi:phi + v1]))
                    out[ia, ib, ic, id_] += pref * acc
    return out


def integrals(geometry: Geometry, shells: Sequence[ContractedShell] | None = None) -> IntegralSet:
    """Overlap, kinetic, nuclear-attraction and repulsion integrals for ``geometry``.

    ``shells`` defaults to STO-3G placed on every atom.
    """
    shells = build_basis(geometry) if shells is None else list(shells)
    for sh in shells:
        if sh.L not in CARTESIAN:
            raise UnsupportedFeatureError(f"angular momentum L={sh.L} not supported")
    offsets = np.cumsum([0] + [sh.size for sh in shells])
    n = int(offsets[-1])
    S = np.zeros((n, n))
    T = np.zeros((n, n))
    V = np.zeros((n, n))
    ns = len(shells)
    for i in range(ns):
        for j in range(i + 1):
            s, t, v = _one_electron_block(shells[i], shells[j], geometry)
            bi, bj = slice(offsets[i], offsets[i + 1]), slice(offsets[j], offsets[j + 1])
            for M, blk in ((S, s), (T, t), (V, v)):
                M[bi, bj] = blk
                M[bj, bi] = blk.T
    # symmetrize the diagonal blocks exactly
    for M in (S, T, V):
        M[:] = np.triu(M) + np.triu(M, 1).T

    pairs = [(i, j) for i in range(ns) for j in range(i + 1)]
    pdata = {ij: _pair_data(shells[ij[0]], shells[ij[1]]) for ij in pairs}
    chem = np.zeros((n, n, n, n))
    for x, (i, j) in enumerate(pairs):
        for (k, l) in pairs[: x + 1]:
            shape = (shells[i].size, shells[j].size, shells[k].size, shells[l].size)
            blk = _eri_block(pdata[(i, j)], pdata[(k, l)], shape)
            for ia, ib, ic, id_ in itertools.product(*(range(d) for d in shape)):
                a, b = offsets[i] + ia, offsets[j] + ib
                c, d = offsets[k] + ic, offsets[l] + id_
                _fill8(chem, a, b, c, d, blk[ia, ib, ic, id_])
    eri = np.ascontiguousarray(chem.transpose(0, 2, 1, 3))
    return IntegralSet(n, S, T, V, eri, nuclear_repulsion(geometry))


def _fill8(chem, a, b, c, d, val):
    for (p, q, r, s) in ((a, b, c, d), (b, a, c, d), (a, b, d, c), (b, a, d, c),
                         (c, d, a, b), (d, c, a, b), (c, d, b, a), (d, c, b, a)):
        chem[p, q, r, s] = val

