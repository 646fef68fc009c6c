"""Multilinear polynomials over spin (+1/-1) or boolean (0/1) variables.

Variables are sortable, hashable labels. Copy bits are ``("z", qubit, copy)``,
sign spins ``("s", copy)`` and quadratization ancillas ``("y", k)``; copies
are numbered from 1.
"""
from __future__ import annotations

from pathlib import Path
from typing import Hashable, Iterable, Mapping

import numpy as np

Var = Hashable
Monomial = tuple


def var_name(v) -> str:
    if isinstance(v, tuple):
        return "_".join(str(p) for p in v)
    return str(v)


def parse_var(name: str):
    parts = name.split("_")
    if len(parts) > 1 and all(p.lstrip("-").isdigit() for p in parts[1:]):
        return (parts[0],) + tuple(int(p) for p in parts[1:])
    return name


class MultilinearPolynomial:
    """``constant + sum_m coeff_m * prod_{v in m} v`` with each variable at most
    once per monomial. Spin-domain products reduce with v*v = 1, boolean ones
    with v*v = v."""

    domain = "spin"

    def __init__(self, constant: float = 0.0, terms: Mapping[Monomial, float] | None = None,
                 drop: float = 0.0):
        self.constant = float(constant)
        self.terms: dict[Monomial, float] = {}
        for mono, c in (terms or {}).items():
            self._add(mono, c)
        if drop >= 0:
            self.prune(drop)

    def _add(self, mono: Iterable[Var], c: float) -> None:
        key = self._reduce(mono)
        if not key:
            self.constant += c
        else:
            self.terms[key] = self.terms.get(key, 0.0) + c

    def _reduce(self, mono: Iterable[Var]) -> Monomial:
        if self.domain == "spin":
            out: set = set()
            for v in mono:
                out ^= {v}
            return tuple(sorted(out))
        return tuple(sorted(set(mono)))

    def prune(self, tol: float = 0.0) -> "MultilinearPolynomial":
        self.terms = {m: c for m, c in self.terms.items() if abs(c) > tol}
        return self

    def copy(self):
        out = type(self)()
        out.constant = self.constant
        out.terms = dict(self.terms)
        return out

    @property
    def variables(self) -> list:
        vs: set = set()
        for m in self.terms:
            vs.update(m)
        return sorted(vs)

    @property
    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other):
        out = self.copy()
        if isinstance(other, MultilinearPolynomial):
            if other.domain != self.domain:
                raise ValueError("cannot add polynomials over different domains")
            out.constant += other.constant
            for m, c in other.terms.items():
                out.terms[m] = out.terms.get(m, 0.0) + c
        else:
            out.constant += float(other)
        return out.prune()

    def __sub__(self, other):
        return self + (other * -1.0 if isinstance(other, MultilinearPolynomial) else -float(other))

    def __mul__(self, s: float):
        out = type(self)()
        out.constant = self.constant * s
        out.terms = {m: c * s for m, c in self.terms.items()}
        return out.prune()

    __rmul__ = __mul__

    def evaluate(self, assignment: Mapping[Var, int]) -> float:
        total = self.constant
        for m, c in self.terms.items():
            p = 1
            for v in m:
                p *= assignment[v]
            total += c * p
        return total

    def substitute(self, values: Mapping[Var, int]) -> "MultilinearPolynomial":
        """Fix some variables to constants (spins +-1 or booleans 0/1)."""
        out = type(self)(self.constant)
        for m, c in self.terms.items():
            rest = []
            for v in m:
                if v in values:
                    c = c * values[v]
                else:
                    rest.append(v)
            if c != 0.0:
                out._add(rest, c)
        return out.prune()

    def compile(self, variables: list | None = None) -> "CompiledPolynomial":
        return CompiledPolynomial(self, variables)

    def allclose(self, other: "MultilinearPolynomial", atol: float = 1e-10) -> bool:
        if abs(self.constant - other.constant) > atol:
            return False
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.terms.get(k, 0.0) - other.terms.get(k, 0.0)) <= atol for k in keys)

    def dumps(self) -> str:
        lines = [f"# domain {self.domain}", f"{self.constant!r}"]
        for m, c in sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0])):
            lines.append(f"{c!r} " + " ".join(var_name(v) for v in m))
        return "\n".join(lines) + "\n"

    def dump(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def loads(cls, text: str):
        out = cls()
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            out._add([parse_var(p) for p in parts[1:]], float(parts[0]))
        return out.prune()

    def __repr__(self) -> str:
        return (f"{type(self).__name__}(vars={len(self.variables)}, terms={len(self)}, "
                f"degree={self.degree})")


class SpinPolynomial(MultilinearPolynomial):
    domain = "spin"


class BooleanPolynomial(MultilinearPolynomial):
    domain = "boolean"


class CompiledPolynomial:
    """Vectorized evaluation of a polynomial on batches of assignments."""

    def __init__(self, poly: MultilinearPolynomial, variables: list | None = None):
        self.variables = list(variables) if variables is not None else poly.variables
        index = {v: i for i, v in enumerate(self.variables)}
        self.constant = poly.constant
        self.by_degree: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        groups: dict[int, list] = {}
        for m, c in poly.terms.items():
            groups.setdefault(len(m), []).append(([index[v] for v in m], c))
        for d, items in groups.items():
            idx = np.array([i for i, _ in items], dtype=np.int64).reshape(len(items), d)
            coef = np.array([c for _, c in items])
            self.by_degree[d] = (idx, coef)

    def __call__(self, values: np.ndarray) -> np.ndarray:
        """``values`` has shape (batch, n_vars) or (n_vars,)."""
        values = np.asarray(values, dtype=float)
        single = values.ndim == 1
        if single:
            values = values[None, :]
        out = np.full(values.shape[0], self.constant)
        for idx, coef in self.by_degree.values():
            out += np.prod(values[:, idx], axis=2) @ coef
        return out[0] if single else out
