"""End-to-end scans: molecule -> integrals -> qubit Hamiltonian -> Ising -> energies."""
from __future__ import annotations

import csv
import io
import logging
import math
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .anneal import AnnealConfig, ExactSolver, SampleSet, SimulatedAnnealer
from .chimera import ChimeraGraph, Embedding, best_of_k, build_chimera, embed_model, unembed
from .isingmap import (CopyConfig, CopyInstance, map_to_polynomials, solve_polynomial,
                       variational_minimize)
from .molint import (ANGSTROM_TO_BOHR, Geometry, active_space, diatomic, integrals,
                     mo_transform, scf_rhf)
from .quad import PENALTY_POLICIES, QuadraticModel, quadratize
from .qubitham import (ENCODINGS, QubitHamiltonian, ReferenceState, build_fermionic, encode,
                       exact_diagonalize, hf_reference, spin_orbital_integrals, taper_fixed_qubits,
                       taper_reference)

log = logging.getLogger(__name__)

MOLECULES = {"H2": ("H", "H"), "LiH": ("Li", "H")}
DEFAULT_GRIDS = {"H2": (0.3, 2.5), "LiH": (0.8, 3.0)}
SOLVERS = ("exact", "sa")
UNITS = ("angstrom", "bohr")


class ValidationError(ValueError):
    pass


@dataclass(frozen=True)
class ScanSpec:
    molecule: str = "H2"
    distances: tuple[float, ...] = (0.7414,)
    unit: str = "angstrom"
    basis: str = "sto-3g"
    r: int = 1
    frozen: tuple[int, ...] = ()
    active: tuple[int, ...] | None = None
    encoding: str = "BK"
    taper: bool = True
    solver: str = "exact"
    anneal: AnnealConfig = AnnealConfig()
    penalty: str = "tight"
    eps: float = 1e-4
    embed_k: int = 0
    chimera_size: int = 16
    chain_strength: float | None = None
    solve_embedded: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.molecule not in MOLECULES and not Path(self.molecule).is_file():
            raise ValidationError(f"unknown molecule {self.molecule!r}: use one of "
                                  f"{sorted(MOLECULES)} or a geometry file")
        if self.basis.lower().replace("-", "") != "sto3g":
            raise ValidationError(f"unsupported basis {self.basis!r}; only STO-3G ships")
        if not self.distances:
            raise ValidationError("empty distance grid")
        d = np.asarray(self.distances, dtype=float)
        if np.any(~np.isfinite(d)) or np.any(d <= 0) or np.any(np.diff(d) <= 0):
            raise ValidationError("distances must be positive and strictly increasing")
        if self.unit not in UNITS:
            raise ValidationError(f"unit must be one of {UNITS}")
        if self.r < 1:
            raise ValidationError("r must be >= 1")
        if self.encoding.upper() not in ENCODINGS:
            raise ValidationError(f"encoding must be one of {ENCODINGS}")
        if self.solver not in SOLVERS:
            raise ValidationError(f"solver must be one of {SOLVERS}")
        if self.penalty not in PENALTY_POLICIES:
            raise ValidationError(f"penalty must be one of {PENALTY_POLICIES}")
        if self.embed_k < 0 or self.chimera_size < 1:
            raise ValidationError("embed_k must be >= 0 and chimera_size >= 1")
        if self.solve_embedded and self.embed_k < 1:
            raise ValidationError("solving on the embedded model needs embed_k >= 1")
        if self.chain_strength is not None and self.chain_strength <= 0:
            raise ValidationError("chain strength must be positive")


def distance_grid(dmin: float, dmax: float, steps: int) -> tuple[float, ...]:
    if steps < 1:
        raise ValidationError("steps must be >= 1")
    if steps == 1:
        return (float(dmin),)
    if not dmax > dmin:
        raise ValidationError("dmax must exceed dmin")
    return tuple(float(x) for x in np.linspace(dmin, dmax, steps))


def read_geometry_file(path, unit: str = "angstrom") -> list[tuple[str, np.ndarray]]:
    """Lines ``Element x y z``; blank lines and ``#`` comments ignored."""
    atoms = []
    scale = ANGSTROM_TO_BOHR if unit == "angstrom" else 1.0
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        if len(line) != 4:
            raise ValidationError(f"bad geometry line {raw!r}")
        atoms.append((line[0], np.array([float(x) for x in line[1:]]) * scale))
    if len(atoms) < 2:
        raise ValidationError("geometry file needs at least two atoms")
    return atoms


def build_geometry(spec: ScanSpec, distance: float) -> Geometry:
    """Built-in diatomics along z; for a geometry file, atom 1 is moved along
    the atom 0 -> atom 1 axis to ``distance`` (other atoms stay put)."""
    if spec.molecule in MOLECULES:
        a, b = MOLECULES[spec.molecule]
        return diatomic(a, b, distance, spec.unit)
    atoms = read_geometry_file(spec.molecule, spec.unit)
    scale = ANGSTROM_TO_BOHR if spec.unit == "angstrom" else 1.0
    axis = atoms[1][1] - atoms[0][1]
    norm = np.linalg.norm(axis)
    if norm == 0:
        raise ValidationError("first two atoms coincide")
    atoms[1] = (atoms[1][0], atoms[0][1] + axis / norm * distance * scale)
    return Geometry.from_atoms([(el, pos) for el, pos in atoms], unit="bohr")


# --------------------------------------------------------------------------
# per-point compilation

@dataclass
class CompiledPoint:
    distance: float
    e_hf: float
    scf_converged: bool
    hamiltonian: QubitHamiltonian
    reference: ReferenceState
    n_electrons: int


def compile_point(spec: ScanSpec, distance: float) -> CompiledPoint:
    geom = build_geometry(spec, distance)
    ints = integrals(geom)
    ne = geom.n_electrons
    scf = scf_rhf(ints, ne)
    mo = mo_transform(ints, scf.mo_coefficients)
    act = active_space(mo, spec.frozen, spec.active, ne)
    h, g = spin_orbital_integrals(act.h, act.g)
    op = build_fermionic(h, g, act.core_energy)
    enc = spec.encoding.upper()
    H = encode(op, enc)
    ref = hf_reference(enc, op.n_modes, act.n_active_electrons)
    if spec.taper:
        H, removed = taper_fixed_qubits(H, ref)
        ref = taper_reference(ref, removed)
    return CompiledPoint(float(distance), float(scf.e_hf_total), scf.converged, H, ref,
                         act.n_active_electrons)


def reference_config(ref: ReferenceState, r: int) -> CopyConfig:
    return CopyConfig.uniform(ref.bits, r)


# --------------------------------------------------------------------------
# samplers

class EmbeddedSampler:
    """Samples the chain-penalized physical model and majority-votes back.

    Conforms to the sampler contract on the logical model: returned energies
    are logical-model energies of the unembedded configurations.
    """

    def __init__(self, inner, embedding: Embedding, target: ChimeraGraph,
                 chain_strength: float | None = None):
        self.inner = inner
        self.embedding = embedding
        self.target = target
        self.chain_strength = chain_strength

    def sample(self, model: QuadraticModel) -> SampleSet:
        em = embed_model(model, self.embedding, self.target, self.chain_strength)
        phys = self.inner.sample(em.physical)
        logical = unembed(phys.configurations, em.physical.variables, self.embedding,
                          model.variables)
        logical = np.repeat(logical, phys.multiplicities, axis=0)
        info = dict(phys.info, embedded=True, chain_strength=em.chain_strength)
        return SampleSet.from_samples(model.variables, logical, model.energies(logical), info)


def make_sampler(spec: ScanSpec, seed: int):
    if spec.solver == "exact":
        return ExactSolver()
    cfg = spec.anneal
    return SimulatedAnnealer(AnnealConfig(cfg.reads, cfg.sweeps, cfg.beta_start, cfg.beta_end,
                                          cfg.schedule, seed))


def derived_seed(seed: int, *keys: int) -> int:
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1)[0])


# --------------------------------------------------------------------------
# rows

@dataclass
class ScanRow:
    distance: float
    e_hf: float
    e_exact: float
    e_anneal: float
    n_qubits_logical: int
    n_vars_post_reduction: int
    n_physical_qubits: int | None
    terms_pre_reduction: int
    terms_post_reduction: int
    iterations: int
    status: str = "ok"
    wall_time: float = field(default=0.0, compare=False)


# wall time is excluded so identical runs give byte-identical tables
CSV_COLUMNS = [f.name for f in fields(ScanRow) if f.name != "wall_time"]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def rows_to_csv(rows: Sequence[ScanRow], columns: Sequence[str] = CSV_COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        d = asdict(row)
        w.writerow([_fmt(d[c]) for c in columns])
    return buf.getvalue()


@dataclass
class CompileResult:
    """Compile path (no solve) for one (point, r)."""

    instance: CopyInstance
    model: QuadraticModel
    terms_pre: int
    embedding: Embedding | None
    embedding_failures: int
    target: ChimeraGraph | None


def count_terms(model: QuadraticModel) -> int:
    return sum(1 for c in model.linear.values() if c != 0.0) + len(model.edges())


def compile_ising(H: QubitHamiltonian, r: int, lam: float, penalty: str = "tight",
                  embed_k: int = 0, chimera_size: int = 16, seed: int = 0,
                  grow_chimera: bool = False) -> CompileResult:
    """Map, quadratize at shift ``lam`` and optionally embed (best of ``embed_k``).

    With ``grow_chimera`` the target is enlarged, if needed, to the smallest
    square Chimera that holds the native clique layout for the model.
    """
    inst = map_to_polynomials(H, r)
    F = solve_polynomial(inst, lam)
    model, _ = quadratize(F, penalty)
    emb, failures, target = None, 0, None
    if embed_k > 0:
        size = chimera_size
        if grow_chimera:
            size = max(size, -(-model.num_variables // 4))
        target = build_chimera(size, size, 4)
        rep = best_of_k(model.edges(), target, embed_k, seed, model.variables)
        emb, failures = rep.embedding, rep.failures
    return CompileResult(inst, model, len(F), emb, failures, target)


def run_point(spec: ScanSpec, index: int, distance: float,
              dump_hamiltonian: Path | None = None, dump_ising: Path | None = None) -> ScanRow:
    t0 = time.perf_counter()
    nan = float("nan")
    try:
        pt = compile_point(spec, distance)
    except Exception as exc:  # noqa: BLE001 - isolate per-row failures
        log.warning("distance %g: compile failed: %s", distance, exc)
        return ScanRow(distance, nan, nan, nan, 0, 0, None, 0, 0, 0, f"failed: {exc}",
                       time.perf_counter() - t0)
    H = pt.hamiltonian
    if dump_hamiltonian is not None:
        H.dump(dump_hamiltonian / f"hamiltonian_{index:03d}.txt")
    e_exact = float(exact_diagonalize(H)[0])
    if not pt.scf_converged:
        return ScanRow(distance, pt.e_hf, e_exact, nan, H.n_qubits, 0, None, 0, 0, 0,
                       "failed: scf not converged", time.perf_counter() - t0)
    seed = derived_seed(spec.seed, index)
    status = "ok"
    try:
        comp = compile_ising(H, spec.r, pt.e_hf, spec.penalty, spec.embed_k, spec.chimera_size,
                             seed)
    except Exception as exc:  # noqa: BLE001
        return ScanRow(distance, pt.e_hf, e_exact, nan, H.n_qubits, 0, None, 0, 0, 0,
                       f"failed: {exc}", time.perf_counter() - t0)
    if dump_ising is not None:
        comp.instance.energy_poly.dump(dump_ising / f"energy_{index:03d}.txt")
        comp.instance.norm_poly.dump(dump_ising / f"norm_{index:03d}.txt")
        comp.model.dump(dump_ising / f"ising_{index:03d}.txt")
        if comp.embedding is not None:
            comp.embedding.dump(dump_ising / f"embedding_{index:03d}.txt")
    n_phys = comp.embedding.num_qubits if comp.embedding is not None else None
    if spec.embed_k > 0 and comp.embedding is None:
        status = "failed: no embedding"
    sampler = make_sampler(spec, seed)
    if spec.solve_embedded:
        if comp.embedding is None:
            return ScanRow(distance, pt.e_hf, e_exact, nan, H.n_qubits, comp.model.num_variables,
                           None, comp.terms_pre, count_terms(comp.model), 0, status,
                           time.perf_counter() - t0)
        sampler = EmbeddedSampler(sampler, comp.embedding, comp.target, spec.chain_strength)
    try:
        res = variational_minimize(comp.instance, sampler, pt.e_hf, eps=spec.eps,
                                   penalty_policy=spec.penalty,
                                   start=reference_config(pt.reference, spec.r))
        e_anneal, iterations = res.energy, res.iterations
    except Exception as exc:  # noqa: BLE001
        e_anneal, iterations, status = nan, 0, f"failed: {exc}"
    return ScanRow(distance, pt.e_hf, e_exact, e_anneal, H.n_qubits, comp.model.num_variables,
                   n_phys, comp.terms_pre, count_terms(comp.model), iterations, status,
                   time.perf_counter() - t0)


def run_scan(spec: ScanSpec, dump_hamiltonian=None, dump_ising=None,
             on_row: Callable[[ScanRow], None] | None = None) -> list[ScanRow]:
    """One row per distance, in grid order; ``on_row`` sees each row as it completes."""
    dh = Path(dump_hamiltonian) if dump_hamiltonian else None
    di = Path(dump_ising) if dump_ising else None
    for p in (dh, di):
        if p is not None:
            p.mkdir(parents=True, exist_ok=True)
    rows = []
    for i, d in enumerate(spec.distances):
        row = run_point(spec, i, d, dh, di)
        rows.append(row)
        if on_row is not None:
            on_row(row)
    return rows


# --------------------------------------------------------------------------
# qubit scaling

@dataclass
class ScalingRow:
    r: int
    logical_vars: int
    physical_qubits: int | None
    terms_pre_reduction: int
    terms_post_reduction: int
    chimera_size: int | None
    failed_attempts: int
    status: str = "ok"


SCALING_COLUMNS = ["r", "logical_vars", "physical_qubits", "terms_pre_reduction",
                   "terms_post_reduction", "chimera_size", "failed_attempts", "status"]


def loglog_slope(r_values: Sequence[float], counts: Sequence[float | None]) -> float:
    pts = [(r, c) for r, c in zip(r_values, counts) if c]
    if len(pts) < 2:
        return float("nan")
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    return float(np.polyfit(x, y, 1)[0])


def scaling_report(spec: ScanSpec, r_values: Sequence[int], embed_k: int = 100,
                   grow_chimera: bool = False) -> tuple[list[ScalingRow], float]:
    """Compile path per r at the first grid distance; returns rows and the
    log-log slope of physical qubits against r."""
    if not r_values:
        raise ValidationError("r list must be non-empty")
    pt = compile_point(spec, spec.distances[0])
    rows = []
    for r in r_values:
        if r < 1:
            raise ValidationError("r must be >= 1")
        comp = compile_ising(pt.hamiltonian, r, pt.e_hf, spec.penalty, embed_k,
                             spec.chimera_size, spec.seed, grow_chimera)
        emb = comp.embedding
        status = "ok" if emb is not None or embed_k == 0 else "failed: no embedding"
        rows.append(ScalingRow(r, comp.model.num_variables, emb.num_qubits if emb else None,
                               comp.terms_pre, count_terms(comp.model),
                               comp.target.M if comp.target is not None else None,
                               comp.embedding_failures, status))
    slope = loglog_slope([row.r for row in rows], [row.physical_qubits for row in rows])
    return rows, slope


def scaling_to_csv(rows: Sequence[ScalingRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCALING_COLUMNS)
    for row in rows:
        d = asdict(row)
        w.writerow([_fmt(d[c]) for c in SCALING_COLUMNS])
    return buf.getvalue()
