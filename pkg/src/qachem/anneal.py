"""Samplers for spin-domain quadratic models.

Both samplers follow one contract: ``sampler.sample(model) -> SampleSet``
where ``model`` is a SPIN ``QuadraticModel`` and every returned energy equals
``model.energies`` at the returned configuration.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Protocol

import numba
import numpy as np

from .quad import QuadraticModel, to_spin

MAX_BRUTE_FORCE_VARS = 26


class CapacityError(ValueError):
    pass


@dataclass
class SampleSet:
    """Unique configurations sorted by energy, with multiplicities."""

    variables: list
    configurations: np.ndarray
    energies: np.ndarray
    multiplicities: np.ndarray
    info: dict = field(default_factory=dict)

    @classmethod
    def from_samples(cls, variables, samples: np.ndarray, energies: np.ndarray, info=None,
                     aggregate: bool = True) -> "SampleSet":
        samples = np.asarray(samples, dtype=np.int8).reshape(len(energies), len(variables))
        energies = np.asarray(energies, dtype=float)
        if aggregate and len(samples):
            uniq, inverse, counts = np.unique(samples, axis=0, return_inverse=True, return_counts=True)
            inverse = inverse.reshape(-1)
            en = np.empty(len(uniq))
            en[inverse] = energies
            samples, energies, mult = uniq, en, counts
        else:
            mult = np.ones(len(energies), dtype=np.int64)
        # stable sort by energy, then by configuration for determinism
        keys = [samples[:, c] for c in range(samples.shape[1] - 1, -1, -1)] + [energies]
        order = np.lexsort(keys) if len(energies) else np.zeros(0, dtype=int)
        return cls(list(variables), samples[order], energies[order], np.asarray(mult)[order], info or {})

    def __len__(self) -> int:
        return len(self.energies)

    @property
    def first(self) -> tuple[dict, float]:
        return dict(zip(self.variables, (int(v) for v in self.configurations[0]))), float(self.energies[0])

    @property
    def lowest_energy(self) -> float:
        return float(self.energies[0])

    def lowest(self, atol: float = 1e-9) -> "SampleSet":
        keep = self.energies <= self.energies[0] + atol
        return SampleSet(self.variables, self.configurations[keep], self.energies[keep],
                         self.multiplicities[keep], dict(self.info))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["energy", "multiplicity", "configuration"])
        for e, m, c in zip(self.energies, self.multiplicities, self.configurations):
            w.writerow([repr(float(e)), int(m), "".join("1" if s < 0 else "0" for s in c)])
        return buf.getvalue()


class Sampler(Protocol):
    def sample(self, model: QuadraticModel) -> SampleSet: ...


# --------------------------------------------------------------------------
# exhaustive enumeration

@numba.njit(cache=True)
def _enumerate_kernel(h, nbr_ptr, nbr_idx, nbr_w, n, n_low, offset, tol, max_keep):
    """Gray-code sweep over the low ``n_low`` spins for every setting of the
    high ones; base energy recomputed per block to bound drift."""
    best = np.inf
    keep = np.empty(max_keep, dtype=np.int64)
    keep_e = np.empty(max_keep)
    n_keep = 0
    s = np.empty(n, dtype=np.int64)
    field_ = np.empty(n)
    n_high = n - n_low
    for high in range(1 << n_high):
        for i in range(n):
            s[i] = 1
        for i in range(n_high):
            if (high >> i) & 1:
                s[n_low + i] = -1
        e = offset
        for i in range(n):
            f = h[i]
            for p in range(nbr_ptr[i], nbr_ptr[i + 1]):
                f += nbr_w[p] * s[nbr_idx[p]]
            field_[i] = f
            e += s[i] * h[i]
            for p in range(nbr_ptr[i], nbr_ptr[i + 1]):
                if nbr_idx[p] > i:
                    e += nbr_w[p] * s[i] * s[nbr_idx[p]]
        code = 0
        for step in range(1 << n_low):
            if step > 0:
                # flip the bit that changes in the Gray code
                i = 0
                t = step
                while (t & 1) == 0:
                    t >>= 1
                    i += 1
                e -= 2.0 * s[i] * field_[i]
                s[i] = -s[i]
                for p in range(nbr_ptr[i], nbr_ptr[i + 1]):
                    field_[nbr_idx[p]] += 2.0 * nbr_w[p] * s[i]
                code ^= 1 << i
            if e < best - tol:
                best = e
                n_keep = 0
            if e <= best + tol:
                if n_keep < max_keep:
                    keep[n_keep] = code | (high << n_low)
                    keep_e[n_keep] = e
                    n_keep += 1
    return best, keep[:n_keep], keep_e[:n_keep]


def _neighbors(model: QuadraticModel):
    h, rows, cols, J = model.arrays()
    n = len(h)
    deg = np.zeros(n + 1, dtype=np.int64)
    np.add.at(deg, rows + 1, 1)
    np.add.at(deg, cols + 1, 1)
    ptr = np.cumsum(deg)
    idx = np.empty(ptr[-1], dtype=np.int64)
    w = np.empty(ptr[-1])
    fill = ptr[:-1].copy()
    for a, b, c in zip(rows, cols, J):
        idx[fill[a]] = b
        w[fill[a]] = c
        fill[a] += 1
        idx[fill[b]] = a
        w[fill[b]] = c
        fill[b] += 1
    return h, ptr, idx, w


def brute_force_min(model: QuadraticModel, tol: float | None = None, max_keep: int = 4096) -> SampleSet:
    """Exact ground states of a model with at most 26 variables (all degenerate minima)."""
    model = to_spin(model)
    n = model.num_variables
    if n > MAX_BRUTE_FORCE_VARS:
        raise CapacityError(f"{n} variables exceeds exhaustive limit {MAX_BRUTE_FORCE_VARS}")
    if n == 0:
        return SampleSet.from_samples([], np.zeros((1, 0)), np.array([model.offset]),
                                      {"solver": "exact"})
    scale = max(1.0, model.max_abs_coefficient())
    tol = 1e-9 * scale if tol is None else tol
    h, ptr, idx, w = _neighbors(model)
    n_low = min(n, 16)
    best, codes, _ = _enumerate_kernel(h, ptr, idx, w, n, n_low, model.offset, tol, max_keep)
    configs = 1 - 2 * ((codes[:, None] >> np.arange(n)[None, :]) & 1).astype(np.int8)
    energies = model.energies(configs)
    keep = energies <= energies.min() + tol
    return SampleSet.from_samples(model.variables, configs[keep], energies[keep],
                                  {"solver": "exact", "truncated": len(codes) >= max_keep})


class ExactSolver:
    """Sampler-contract wrapper around ``brute_force_min``."""

    def sample(self, model: QuadraticModel) -> SampleSet:
        return brute_force_min(model)


# --------------------------------------------------------------------------
# simulated annealing

@dataclass(frozen=True)
class AnnealConfig:
    reads: int = 1000
    sweeps: int = 1000
    beta_start: float = 0.1
    beta_end: float = 50.0
    schedule: str = "geometric"
    seed: int = 0

    def __post_init__(self):
        if self.reads < 1 or self.sweeps < 1:
            raise ValueError("reads and sweeps must be >= 1")
        if not 0 < self.beta_start < self.beta_end:
            raise ValueError("need 0 < beta_start < beta_end")
        if self.schedule not in ("linear", "geometric"):
            raise ValueError(f"unknown schedule {self.schedule!r}")

    def betas(self) -> np.ndarray:
        if self.sweeps == 1:
            return np.array([self.beta_end])
        if self.schedule == "geometric":
            return np.geomspace(self.beta_start, self.beta_end, self.sweeps)
        return np.linspace(self.beta_start, self.beta_end, self.sweeps)


@numba.njit(cache=True)
def _anneal_kernel(h, nbr_ptr, nbr_idx, nbr_w, betas, seeds, offset):
    n = len(h)
    reads = len(seeds)
    out = np.empty((reads, n), dtype=np.int8)
    tracked = np.empty(reads)
    s = np.empty(n, dtype=np.int64)
    field_ = np.empty(n)
    order = np.arange(n)
    for r in range(reads):
        np.random.seed(seeds[r])
        for i in range(n):
            s[i] = 1 if np.random.random() < 0.5 else -1
        e = offset
        for i in range(n):
            f = h[i]
            for p in range(nbr_ptr[i], nbr_ptr[i + 1]):
                f += nbr_w[p] * s[nbr_idx[p]]
            field_[i] = f
        for i in range(n):
            e += s[i] * h[i]
            for p in range(nbr_ptr[i], nbr_ptr[i + 1]):
                if nbr_idx[p] > i:
                    e += nbr_w[p] * s[i] * s[nbr_idx[p]]
        for b in range(len(betas)):
            beta = betas[b]
            # Fisher-Yates shuffle for a random sweep order
            for i in range(n - 1, 0, -1):
                j = np.random.randint(0, i + 1)
                t = order[i]
                order[i] = order[j]
                order[j] = t
            for k in range(n):
                i = order[k]
                de = -2.0 * s[i] * field_[i]
                if de <= 0.0 or np.random.random() < math.exp(-beta * de):
                    s[i] = -s[i]
                    e += de
                    for p in range(nbr_ptr[i], nbr_ptr[i + 1]):
                        field_[nbr_idx[p]] += 2.0 * nbr_w[p] * s[i]
        for i in range(n):
            out[r, i] = s[i]
        tracked[r] = e
    return out, tracked


def read_seeds(seed: int, reads: int) -> np.ndarray:
    """One deterministic sub-seed per read, derived from (seed, read index)."""
    ss = np.random.SeedSequence(seed)
    return np.array([c.generate_state(1, dtype=np.uint32)[0] for c in ss.spawn(reads)], dtype=np.int64)


def simulated_anneal(model: QuadraticModel, config: AnnealConfig = AnnealConfig()) -> SampleSet:
    """Single-spin-flip Metropolis annealing; one independent chain per read."""
    model = to_spin(model)
    n = model.num_variables
    if n == 0:
        return SampleSet.from_samples([], np.zeros((config.reads, 0)),
                                      np.full(config.reads, model.offset), {"solver": "sa"})
    h, ptr, idx, w = _neighbors(model)
    seeds = read_seeds(config.seed, config.reads)
    samples, tracked = _anneal_kernel(h, ptr, idx, w, config.betas(), seeds, model.offset)
    energies = model.energies(samples)
    info = {"solver": "sa", "reads": config.reads, "sweeps": config.sweeps,
            "max_tracking_error": float(np.max(np.abs(tracked - energies)))}
    return SampleSet.from_samples(model.variables, samples, energies, info)


class SimulatedAnnealer:
    """Sampler-contract wrapper; ``scale_beta`` divides the beta schedule by the
    model's largest coefficient so it applies to dimensionless energies."""

    def __init__(self, config: AnnealConfig = AnnealConfig(), scale_beta: bool = False):
        self.config = config
        self.scale_beta = scale_beta
        self.calls = 0

    def sample(self, model: QuadraticModel) -> SampleSet:
        cfg = self.config
        # distinct but deterministic seed per call
        cfg = AnnealConfig(cfg.reads, cfg.sweeps, cfg.beta_start, cfg.beta_end, cfg.schedule,
                           cfg.seed + 7919 * self.calls)
        self.calls += 1
        if self.scale_beta:
            scale = max(model.max_abs_coefficient(), 1e-300)
            cfg = AnnealConfig(cfg.reads, cfg.sweeps, cfg.beta_start / scale, cfg.beta_end / scale,
                               cfg.schedule, cfg.seed)
        return simulated_anneal(model, cfg)
