"""r-copy mapping of a qubit Hamiltonian onto classical spin polynomials.

Each of ``r`` copies holds one computational basis state ``b_j`` (spins
``z_{i,j} = 1 - 2 b_{i,j}``) and a sign spin ``s_j``; the represented state is
``psi = sum_j s_j |b_j>``. Then

    <psi|H|psi> = sum_{j,k} s_j s_k sum_t c_t prod_i f_i(z_ij, z_ik)

with per-qubit factors

    I: (1 + z_ij z_ik)/2      X: (1 - z_ij z_ik)/2
    Z: (z_ij + z_ik)/2        Y: i (z_ik - z_ij)/2

and the norm is the same sum for the identity operator.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
import numpy as np

from .poly import CompiledPolynomial, SpinPolynomial
from .quad import quadratize, record_pairs
from .qubitham.pauli import QubitHamiltonian

log = logging.getLogger(__name__)

IMAG_TOL = 1e-10


class MappingError(ValueError):
    pass


class DegenerateRunError(RuntimeError):
    pass


def zvar(qubit: int, copy: int) -> tuple:
    return ("z", qubit, copy)


def svar(copy: int) -> tuple:
    return ("s", copy)


@dataclass(frozen=True)
class CopyConfig:
    """``bits[i, j]`` and ``signs[j]`` are +1/-1 spins; column j is copy j+1."""

    bits: np.ndarray
    signs: np.ndarray

    @property
    def n(self) -> int:
        return self.bits.shape[0]

    @property
    def r(self) -> int:
        return self.bits.shape[1]

    def assignment(self) -> dict:
        out = {zvar(i, j + 1): int(self.bits[i, j]) for i in range(self.n) for j in range(self.r)}
        out.update({svar(j + 1): int(self.signs[j]) for j in range(self.r)})
        return out

    @classmethod
    def from_assignment(cls, assignment, n: int, r: int) -> "CopyConfig":
        bits = np.ones((n, r), dtype=np.int8)
        signs = np.ones(r, dtype=np.int8)
        for i in range(n):
            for j in range(r):
                bits[i, j] = assignment.get(zvar(i, j + 1), 1)
        for j in range(r):
            signs[j] = assignment.get(svar(j + 1), 1)
        return cls(bits, signs)

    @classmethod
    def random(cls, n: int, r: int, rng: np.random.Generator) -> "CopyConfig":
        return cls(rng.choice(np.array([-1, 1], dtype=np.int8), size=(n, r)),
                   rng.choice(np.array([-1, 1], dtype=np.int8), size=r))

    @classmethod
    def uniform(cls, basis_bits, r: int) -> "CopyConfig":
        """Every copy in basis state ``basis_bits`` (0/1 per qubit) with sign +1."""
        z = 1 - 2 * np.asarray(basis_bits, dtype=np.int8)
        return cls(np.repeat(z[:, None], r, axis=1), np.ones(r, dtype=np.int8))


@dataclass
class CopyInstance:
    energy_poly: SpinPolynomial
    norm_poly: SpinPolynomial
    n: int
    r: int
    offset: float = 0.0
    _compiled: dict = field(default_factory=dict, repr=False)

    @property
    def variables(self) -> list:
        """Canonical order: copy bits by (qubit, copy), then signs."""
        zs = [zvar(i, j) for i in range(self.n) for j in range(1, self.r + 1)]
        return zs + [svar(j) for j in range(1, self.r + 1)]

    def compiled(self) -> tuple[CompiledPolynomial, CompiledPolynomial]:
        if not self._compiled:
            vs = self.variables
            self._compiled["e"] = self.energy_poly.compile(vs)
            self._compiled["n"] = self.norm_poly.compile(vs)
        return self._compiled["e"], self._compiled["n"]

    def config_vector(self, config: CopyConfig) -> np.ndarray:
        return np.concatenate([config.bits.reshape(-1), config.signs]).astype(float)

    def shifted(self, lam: float) -> SpinPolynomial:
        """energy_poly - lam * norm_poly."""
        return self.energy_poly - self.norm_poly * lam


def _factor(axis: str | None, same_copy: bool, zj, zk) -> dict:
    """Per-qubit factor as {monomial: complex coefficient}."""
    if same_copy:
        if axis is None:
            return {(): 1.0}
        if axis == "Z":
            return {(zj,): 1.0}
        return {}
    if axis is None:
        return {(): 0.5, (zj, zk): 0.5}
    if axis == "X":
        return {(): 0.5, (zj, zk): -0.5}
    if axis == "Z":
        return {(zj,): 0.5, (zk,): 0.5}
    return {(zk,): 0.5j, (zj,): -0.5j}


def _pair_polynomial(H_terms, n: int, j: int, k: int, out: dict) -> None:
    same = j == k
    sign = () if same else (svar(j), svar(k))
    for factors, coeff in H_terms:
        poly = {sign: complex(coeff)}
        for i in range(n):
            f = _factor(factors.get(i), same, zvar(i, j), zvar(i, k))
            if not f:
                poly = {}
                break
            if len(f) == 1 and () in f:
                continue
            poly = {m1 + m2: c1 * c2 for m1, c1 in poly.items() for m2, c2 in f.items()}
        for m, c in poly.items():
            key = tuple(sorted(m))
            out[key] = out.get(key, 0.0) + c


def _to_real(acc: dict, what: str) -> SpinPolynomial:
    terms = {}
    const = 0.0
    for m, c in acc.items():
        if abs(c.imag) > IMAG_TOL:
            raise MappingError(f"{what}: imaginary coefficient {c.imag:.3e} on {m}; "
                               f"input is not Hermitian")
        if m:
            terms[m] = c.real
        else:
            const += c.real
    return SpinPolynomial(const, terms).prune(1e-14)


def map_to_polynomials(H: QubitHamiltonian, r: int) -> CopyInstance:
    """Energy and norm polynomials of the r-copy representation of ``H``."""
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    n = H.n_qubits
    H_terms = [(t.factor_map, t.coefficient) for t in H.terms]
    id_terms = [({}, 1.0)]
    e_acc: dict = {}
    n_acc: dict = {}
    for j in range(1, r + 1):
        for k in range(1, r + 1):
            _pair_polynomial(H_terms, n, j, k, e_acc)
            _pair_polynomial(id_terms, n, j, k, n_acc)
    return CopyInstance(_to_real(e_acc, "energy"), _to_real(n_acc, "norm"), n, r, H.constant())


def reconstruct_state(config: CopyConfig, n: int | None = None, r: int | None = None) -> np.ndarray:
    """sum_j s_j |b_j>, unnormalized; basis index has qubit i at bit i."""
    n = config.n if n is None else n
    r = config.r if r is None else r
    vec = np.zeros(1 << n, dtype=complex)
    weights = 1 << np.arange(n)
    for j in range(r):
        bits = (1 - config.bits[:, j]) // 2
        vec[int(bits @ weights)] += config.signs[j]
    return vec


def zero_norm_tolerance(r: int) -> float:
    return 1e-9 * r


def rayleigh_quotient(instance: CopyInstance, config: CopyConfig) -> float | None:
    """energy/norm for ``config``; ``None`` when the represented state vanishes."""
    e_c, n_c = instance.compiled()
    x = instance.config_vector(config)
    norm = float(n_c(x))
    if norm < zero_norm_tolerance(instance.r):
        return None
    return float(e_c(x)) / norm


def rayleigh_quotients(instance: CopyInstance, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batch version on rows in ``instance.variables`` order; NaN marks zero norm."""
    e_c, n_c = instance.compiled()
    e = e_c(values)
    nrm = n_c(values)
    q = np.full(len(nrm), np.nan)
    ok = nrm >= zero_norm_tolerance(instance.r)
    q[ok] = e[ok] / nrm[ok]
    return q, nrm


@dataclass
class ShiftStep:
    lam: float
    best_quotient: float | None
    n_samples: int
    n_zero_norm: int
    n_model_vars: int
    retries: int = 0


@dataclass
class VariationalResult:
    energy: float
    config: CopyConfig | None
    trace: list[ShiftStep]

    @property
    def iterations(self) -> int:
        return len(self.trace)


def _as_copy_config(instance: CopyInstance, row: np.ndarray) -> CopyConfig:
    nr = instance.n * instance.r
    return CopyConfig(row[:nr].reshape(instance.n, instance.r).astype(np.int8),
                      row[nr:].astype(np.int8))


def sign_gauge(instance: CopyInstance) -> dict:
    """Pin s_1 = +1; negating every sign spin leaves both polynomials unchanged."""
    return {svar(1): 1} if instance.r > 1 else {}


def solve_polynomial(instance: CopyInstance, lam: float, fix_sign: bool = True):
    """The polynomial actually handed to quadratization for shift ``lam``."""
    F = instance.shifted(lam)
    return F.substitute(sign_gauge(instance)) if fix_sign else F


def variational_minimize(instance: CopyInstance, sampler, lam0: float, eps: float = 1e-4,
                         max_iter: int = 50, max_retries: int = 3,
                         penalty_policy="tight", start: CopyConfig | None = None,
                         fix_sign: bool = True) -> VariationalResult:
    """Shift loop: minimize F = E - lam*N, move lam to the best sampled quotient,
    stop when the improvement falls below ``eps``.

    Each F is quadratized (the substitution order of the first iteration is
    replayed afterwards) and handed to ``sampler.sample``; every returned
    configuration is scored by its Rayleigh quotient. ``start`` (e.g. the
    Hartree-Fock configuration) is scored before the first solve. With
    ``fix_sign`` the first sign spin is pinned to +1 before quadratization.
    Variables missing from the quadratic model take their incumbent values.
    """
    lam = float(lam0)
    best_q = np.inf
    best_cfg = None
    if start is not None:
        q0 = rayleigh_quotient(instance, start)
        if q0 is not None:
            best_q, best_cfg = q0, start
    trace: list[ShiftStep] = []
    inst_vars = instance.variables
    pairs = None
    pinned = sign_gauge(instance) if fix_sign else {}
    for _ in range(max_iter):
        model, record = quadratize(solve_polynomial(instance, lam, fix_sign), penalty_policy, pairs)
        if pairs is None:
            pairs = record_pairs(record)
        col = {v: c for c, v in enumerate(model.variables)}
        for attempt in range(max_retries + 1):
            samples = sampler.sample(model)
            # F does not depend on pinned variables or ones cancelled out of it, so
            # they keep the incumbent's values (+1 before there is an incumbent)
            base = instance.config_vector(best_cfg) if best_cfg is not None else 1.0
            full = np.empty((len(samples), len(inst_vars)))
            full[:] = base
            for t, v in enumerate(inst_vars):
                if v in col:
                    full[:, t] = samples.configurations[:, col[v]]
                elif v in pinned:
                    full[:, t] = pinned[v]
            q, _ = rayleigh_quotients(instance, full)
            finite = np.isfinite(q)
            if finite.any():
                break
            log.info("shift loop: all %d samples have zero norm (attempt %d)", len(q), attempt)
        else:
            raise DegenerateRunError(
                f"sampler returned only zero-norm configurations after {max_retries + 1} attempts")
        i = int(np.nanargmin(q))
        step_best = float(q[i])
        trace.append(ShiftStep(lam, step_best, len(q), int((~finite).sum()), model.num_variables,
                               attempt))
        if step_best < best_q:
            best_q = step_best
            best_cfg = _as_copy_config(instance, full[i])
        if step_best < lam - eps:
            lam = step_best
            continue
        break
    energy = best_q if np.isfinite(best_q) else lam
    return VariationalResult(float(energy), best_cfg, trace)
