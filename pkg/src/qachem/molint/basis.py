"""Geometries, contracted Gaussian shells and the bundled STO-3G table."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Sequence

import numpy as np

ANGSTROM_TO_BOHR = 1.8897259886

ELEMENT_CHARGE = {"H": 1, "He": 2, "Li": 3}

# Cartesian exponents (lx, ly, lz) for each function of a shell, in order.
CARTESIAN = {0: [(0, 0, 0)], 1: [(1, 0, 0), (0, 1, 0), (0, 0, 1)]}


class UnsupportedFeatureError(ValueError):
    """Raised for angular momenta or elements the engine does not handle."""


@dataclass(frozen=True)
class Atom:
    symbol: str
    charge: int
    position: tuple[float, float, float]


@dataclass(frozen=True)
class Geometry:
    """Nuclear framework; positions in Bohr."""

    atoms: tuple[Atom, ...]

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("geometry needs at least one atom")
        for atom in self.atoms:
            if atom.charge < 1:
                raise ValueError(f"nuclear charge must be >= 1, got {atom.charge}")
            if not all(math.isfinite(c) for c in atom.position):
                raise ValueError(f"non-finite position for {atom.symbol}")

    @classmethod
    def from_atoms(cls, atoms: Iterable[tuple], unit: str = "bohr") -> "Geometry":
        """Build from ``(symbol, (x, y, z))`` or ``(symbol, Z, (x, y, z))`` tuples."""
        scale = _unit_scale(unit)
        out = []
        for rec in atoms:
            if len(rec) == 2:
                symbol, pos = rec
                charge = ELEMENT_CHARGE[symbol]
            else:
                symbol, charge, pos = rec
            out.append(Atom(symbol, int(charge), tuple(float(c) * scale for c in pos)))
        return cls(tuple(out))

    @property
    def charges(self) -> np.ndarray:
        return np.array([a.charge for a in self.atoms], dtype=float)

    @property
    def coords(self) -> np.ndarray:
        return np.array([a.position for a in self.atoms], dtype=float)

    @property
    def n_electrons(self) -> int:
        return int(sum(a.charge for a in self.atoms))


def _unit_scale(unit: str) -> float:
    unit = unit.lower()
    if unit in ("bohr", "au"):
        return 1.0
    if unit in ("angstrom", "ang", "a"):
        return ANGSTROM_TO_BOHR
    raise ValueError(f"unknown length unit {unit!r}")


def diatomic(a: str, b: str, distance: float, unit: str = "bohr") -> Geometry:
    """Two atoms on the z axis, the first at the origin."""
    return Geometry.from_atoms([(a, (0.0, 0.0, 0.0)), (b, (0.0, 0.0, distance))], unit=unit)


@dataclass(frozen=True)
class ContractedShell:
    """A contracted Cartesian shell. ``coefficients`` already include primitive
    normalization and are rescaled so every function has unit self-overlap."""

    center: tuple[float, float, float]
    L: int
    exponents: tuple[float, ...]
    coefficients: tuple[float, ...]
    atom_index: int = 0

    def __post_init__(self):
        if self.L not in CARTESIAN:
            raise UnsupportedFeatureError(f"angular momentum L={self.L} not supported")
        if any(e <= 0 for e in self.exponents):
            raise ValueError("Gaussian exponents must be positive")

    @property
    def size(self) -> int:
        return len(CARTESIAN[self.L])


@dataclass(frozen=True)
class BasisFunction:
    center: np.ndarray = field(repr=False)
    lmn: tuple[int, int, int]
    exponents: np.ndarray = field(repr=False)
    coefficients: np.ndarray = field(repr=False)
    shell_index: int = 0


def parse_basis(text: str) -> dict[str, list[tuple[int, list[float], list[float]]]]:
    """Parse ``element L e1 c1 e2 c2 e3 c3`` records; ``#`` starts a comment."""
    table: dict[str, list] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 8:
            raise ValueError(f"basis line {lineno}: expected 8 fields, got {len(parts)}")
        element, L = parts[0], int(parts[1])
        nums = [float(p) for p in parts[2:]]
        table.setdefault(element, []).append((L, nums[0::2], nums[1::2]))
    return table


def load_sto3g() -> dict[str, list[tuple[int, list[float], list[float]]]]:
    text = resources.files("qachem.molint").joinpath("sto3g.txt").read_text()
    return parse_basis(text)


def _primitive_norm(alpha: float, L: int) -> float:
    # Norm of x^L exp(-alpha r^2) for L <= 1 along one Cartesian axis.
    return (2.0 * alpha / math.pi) ** 0.75 * (4.0 * alpha) ** (L / 2.0)


def _contracted_self_overlap(exps: Sequence[float], coefs: Sequence[float], L: int) -> float:
    s = 0.0
    for a, ca in zip(exps, coefs):
        for b, cb in zip(exps, coefs):
            p = a + b
            s += ca * cb * (math.pi / p) ** 1.5 * (0.5 / p) ** L
    return s


def make_shell(center, L: int, exponents, raw_coefficients, atom_index: int = 0) -> ContractedShell:
    coefs = [c * _primitive_norm(a, L) for a, c in zip(exponents, raw_coefficients)]
    norm = _contracted_self_overlap(exponents, coefs, L)
    coefs = [c / math.sqrt(norm) for c in coefs]
    return ContractedShell(tuple(float(x) for x in center), L, tuple(float(e) for e in exponents),
                           tuple(coefs), atom_index)


def build_basis(geometry: Geometry, table=None) -> list[ContractedShell]:
    """Place the basis table's shells on every atom of ``geometry``."""
    table = load_sto3g() if table is None else table
    shells = []
    for idx, atom in enumerate(geometry.atoms):
        if atom.symbol not in table:
            raise UnsupportedFeatureError(f"no basis data for element {atom.symbol}")
        for L, exps, coefs in table[atom.symbol]:
            shells.append(make_shell(atom.position, L, exps, coefs, idx))
    return shells


def basis_functions(shells: Sequence[ContractedShell]) -> list[BasisFunction]:
    funcs = []
    for si, shell in enumerate(shells):
        for lmn in CARTESIAN[shell.L]:
            funcs.append(BasisFunction(np.asarray(shell.center), lmn, np.asarray(shell.exponents),
                                       np.asarray(shell.coefficients), si))
    return funcs
