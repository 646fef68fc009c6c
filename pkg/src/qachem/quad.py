"""Quadratization of multilinear polynomials and the 2-local model type.

Reduction works on booleans: the most frequent variable pair (x_a, x_b) in
monomials of degree >= 3 is replaced by an ancilla y together with the
penalty M (x_a x_b - 2 x_a y - 2 x_b y + 3 y), which is 0 when y = x_a x_b
and >= M otherwise.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .poly import BooleanPolynomial, MultilinearPolynomial, SpinPolynomial, parse_var, var_name

SPIN, BINARY = "SPIN", "BINARY"


def to_boolean(poly: MultilinearPolynomial) -> BooleanPolynomial:
    """Substitute z = 1 - 2x into a spin polynomial."""
    if poly.domain == "boolean":
        return poly.copy()
    out = BooleanPolynomial(poly.constant)
    for mono, c in poly.terms.items():
        for k in range(len(mono) + 1):
            w = c * (-2.0) ** k
            for sub in itertools.combinations(mono, k):
                out._add(sub, w)
    return out.prune(1e-13)


def to_spin_polynomial(poly: MultilinearPolynomial) -> SpinPolynomial:
    """Substitute x = (1 - z)/2 into a boolean polynomial."""
    if poly.domain == "spin":
        return poly.copy()
    out = SpinPolynomial(poly.constant)
    for mono, c in poly.terms.items():
        d = len(mono)
        w = c / 2.0 ** d
        for k in range(d + 1):
            for sub in itertools.combinations(mono, k):
                out._add(sub, w * (-1.0) ** k)
    return out.prune(1e-13)


@dataclass
class QuadraticModel:
    """sum_i h_i v_i + sum_{i<j} J_ij v_i v_j + offset over spins or booleans.

    ``quadratic`` keys are ordered by position in ``variables``.
    """

    variables: list
    linear: dict = field(default_factory=dict)
    quadratic: dict = field(default_factory=dict)
    offset: float = 0.0
    domain: str = SPIN

    def __post_init__(self):
        self._index = {v: i for i, v in enumerate(self.variables)}
        if len(self._index) != len(self.variables):
            raise ValueError("duplicate variable in QuadraticModel")
        quad = {}
        for (u, v), c in self.quadratic.items():
            if u == v:
                raise ValueError(f"self-coupling on {u!r}")
            key = (u, v) if self._index[u] < self._index[v] else (v, u)
            quad[key] = quad.get(key, 0.0) + c
        self.quadratic = quad

    @property
    def num_variables(self) -> int:
        return len(self.variables)

    def index(self, v) -> int:
        return self._index[v]

    def edges(self) -> list[tuple]:
        return [k for k, c in self.quadratic.items() if c != 0.0]

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(h, rows, cols, J) with rows < cols as integer indices."""
        h = np.array([self.linear.get(v, 0.0) for v in self.variables])
        if self.quadratic:
            rows = np.array([self._index[u] for u, _ in self.quadratic], dtype=np.int64)
            cols = np.array([self._index[v] for _, v in self.quadratic], dtype=np.int64)
            J = np.array(list(self.quadratic.values()))
        else:
            rows = cols = np.zeros(0, dtype=np.int64)
            J = np.zeros(0)
        return h, rows, cols, J

    def energies(self, values: np.ndarray) -> np.ndarray:
        """Energy of each row of ``values`` (columns in ``variables`` order)."""
        values = np.atleast_2d(np.asarray(values, dtype=float))
        h, rows, cols, J = self.arrays()
        return self.offset + values @ h + (values[:, rows] * values[:, cols]) @ J

    def energy(self, assignment: Mapping) -> float:
        e = self.offset
        for v, c in self.linear.items():
            e += c * assignment[v]
        for (u, v), c in self.quadratic.items():
            e += c * assignment[u] * assignment[v]
        return float(e)

    def max_abs_coefficient(self) -> float:
        vals = [abs(c) for c in self.linear.values()] + [abs(c) for c in self.quadratic.values()]
        return max(vals, default=0.0)

    def as_polynomial(self) -> MultilinearPolynomial:
        cls = SpinPolynomial if self.domain == SPIN else BooleanPolynomial
        terms = {(v,): c for v, c in self.linear.items()}
        terms.update({k: c for k, c in self.quadratic.items()})
        return cls(self.offset, terms)

    @classmethod
    def from_polynomial(cls, poly: MultilinearPolynomial, variables: Sequence | None = None
                        ) -> "QuadraticModel":
        if poly.degree > 2:
            raise ValueError(f"polynomial has degree {poly.degree}; reduce it first")
        variables = list(variables) if variables is not None else poly.variables
        lin, quad = {}, {}
        for m, c in poly.terms.items():
            if len(m) == 1:
                lin[m[0]] = lin.get(m[0], 0.0) + c
            else:
                quad[m] = quad.get(m, 0.0) + c
        return cls(variables, lin, quad, poly.constant, SPIN if poly.domain == "spin" else BINARY)

    def dumps(self) -> str:
        lines = [f"domain {self.domain}", "variables " + " ".join(var_name(v) for v in self.variables)]
        for v in self.variables:
            if self.linear.get(v, 0.0):
                lines.append(f"h {var_name(v)} {self.linear[v]!r}")
        for (u, v), c in self.quadratic.items():
            lines.append(f"J {var_name(u)} {var_name(v)} {c!r}")
        lines.append(f"offset {self.offset!r}")
        return "\n".join(lines) + "\n"

    def dump(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def loads(cls, text: str) -> "QuadraticModel":
        domain, variables, lin, quad, offset = SPIN, None, {}, {}, 0.0
        seen: list = []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tag, *rest = line.split()
            if tag == "domain":
                domain = rest[0].upper()
            elif tag == "variables":
                variables = [parse_var(t) for t in rest]
            elif tag == "h":
                v = parse_var(rest[0])
                lin[v] = lin.get(v, 0.0) + float(rest[1])
                seen.append(v)
            elif tag == "J":
                u, v = parse_var(rest[0]), parse_var(rest[1])
                quad[(u, v)] = quad.get((u, v), 0.0) + float(rest[2])
                seen += [u, v]
            elif tag == "offset":
                offset = float(rest[0])
            else:
                raise ValueError(f"unknown model line {line!r}")
        if variables is None:
            variables = sorted(set(seen), key=var_name)
        return cls(variables, lin, quad, offset, domain)

    @classmethod
    def load(cls, path) -> "QuadraticModel":
        return cls.loads(Path(path).read_text())


def to_spin(model: QuadraticModel) -> QuadraticModel:
    """Boolean model -> spin model via x = (1 - z)/2 (value preserving)."""
    if model.domain == SPIN:
        return model
    lin = {v: 0.0 for v in model.variables}
    quad = {}
    offset = model.offset
    for v, c in model.linear.items():
        offset += c / 2
        lin[v] -= c / 2
    for (u, v), c in model.quadratic.items():
        offset += c / 4
        lin[u] -= c / 4
        lin[v] -= c / 4
        quad[(u, v)] = c / 4
    lin = {v: c for v, c in lin.items() if c != 0.0}
    return QuadraticModel(list(model.variables), lin, quad, offset, SPIN)


def to_binary(model: QuadraticModel) -> QuadraticModel:
    """Spin model -> boolean model via z = 1 - 2x."""
    if model.domain == BINARY:
        return model
    lin = {v: 0.0 for v in model.variables}
    quad = {}
    offset = model.offset
    for v, c in model.linear.items():
        offset += c
        lin[v] -= 2 * c
    for (u, v), c in model.quadratic.items():
        offset += c
        lin[u] -= 2 * c
        lin[v] -= 2 * c
        quad[(u, v)] = 4 * c
    lin = {v: c for v, c in lin.items() if c != 0.0}
    return QuadraticModel(list(model.variables), lin, quad, offset, BINARY)


@dataclass(frozen=True)
class Substitution:
    a: object
    b: object
    ancilla: object
    penalty: float


@dataclass
class ReductionRecord:
    substitutions: list[Substitution] = field(default_factory=list)
    original_variables: list = field(default_factory=list)

    @property
    def ancillas(self) -> list:
        return [s.ancilla for s in self.substitutions]

    def __len__(self) -> int:
        return len(self.substitutions)


# Penalty policies: "global" -> 1 + sum|c| of the boolean input; "local" ->
# 1 + sum|c| of the monomials that receive the ancilla; "tight" -> 1 + a bound
# on |D| where D is the ancilla's cofactor, taken as the coefficient 1-norm of
# D rewritten over spins (each spin monomial is bounded by 1). All three keep
# every global minimum ancilla-consistent. A number or a callable
# (pair, affected [(rest monomial, coefficient)], input coefficient sum) -> M
# is used as given.
PenaltyPolicy = str | float | Callable
PENALTY_POLICIES = ("global", "local", "tight")


def _cofactor_spin_norm(affected) -> float:
    spin: dict = {}
    for rest, c in affected:
        w = c / 2.0 ** len(rest)
        for k in range(len(rest) + 1):
            for sub in itertools.combinations(rest, k):
                spin[sub] = spin.get(sub, 0.0) + w * (-1.0) ** k
    return sum(abs(c) for c in spin.values())


def _penalty(policy, pair, affected: list[tuple], total: float) -> float:
    if callable(policy):
        return float(policy(pair, affected, total))
    if isinstance(policy, (int, float)):
        return float(policy)
    if policy == "global":
        return 1.0 + total
    if policy == "local":
        return 1.0 + sum(abs(c) for _, c in affected)
    if policy == "tight":
        return 1.0 + _cofactor_spin_norm(affected)
    raise ValueError(f"unknown penalty policy {policy!r}")


def _ancilla_factory(existing):
    taken = {v for v in existing if isinstance(v, tuple) and v and v[0] == "y"}
    k = 0
    while True:
        k += 1
        if ("y", k) not in taken:
            yield ("y", k)


def reduce_degree(poly: MultilinearPolynomial, penalty_policy: PenaltyPolicy = "global",
                  pairs: Sequence[tuple] | None = None
                  ) -> tuple[QuadraticModel, ReductionRecord]:
    """Pair-substitution quadratization; returns a BINARY model.

    ``pairs`` replays a previous record's substitution order (same ancilla
    names) instead of the greedy search, recomputing penalties under the
    policy; used when only coefficients change between calls.
    """
    bpoly = to_boolean(poly)
    originals = bpoly.variables
    order = {v: i for i, v in enumerate(originals)}
    total = sum(abs(c) for c in bpoly.terms.values())

    monos: dict[int, list] = {}
    coef: dict[int, float] = {}
    by_var: dict = {}
    pair_count: Counter = Counter()
    quadratic_part: dict[tuple, float] = {}

    def key_of(m):
        return tuple(sorted(m, key=order.__getitem__))

    def add_quadratic(m, c):
        k = key_of(m)
        quadratic_part[k] = quadratic_part.get(k, 0.0) + c

    next_id = 0
    high_index: dict[tuple, int] = {}

    def add_high(m, c):
        nonlocal next_id
        k = key_of(m)
        if k in high_index:
            coef[high_index[k]] += c
            return
        mid = next_id
        next_id += 1
        monos[mid] = list(k)
        coef[mid] = c
        high_index[k] = mid
        for v in k:
            by_var.setdefault(v, set()).add(mid)
        for u, v in itertools.combinations(k, 2):
            pair_count[(u, v)] += 1

    def remove_high(mid):
        k = tuple(monos.pop(mid))
        c = coef.pop(mid)
        del high_index[k]
        for v in k:
            by_var[v].discard(mid)
        for u, v in itertools.combinations(k, 2):
            pair_count[(u, v)] -= 1
            if pair_count[(u, v)] == 0:
                del pair_count[(u, v)]
        return k, c

    for m, c in bpoly.terms.items():
        if len(m) >= 3:
            add_high(m, c)
        else:
            add_quadratic(m, c)

    record = ReductionRecord(original_variables=list(originals))
    names = _ancilla_factory(originals)
    replay = list(pairs) if pairs is not None else None
    step = 0
    while monos:
        if replay is not None:
            if step >= len(replay):
                raise ValueError("replayed substitution list does not fully reduce the polynomial")
            a, b, y = replay[step]
            if (a, b) not in pair_count and (b, a) not in pair_count:
                step += 1
                continue
            if order[a] > order[b]:
                a, b = b, a
        else:
            best = max(pair_count.values())
            a, b = min(p for p, n in pair_count.items() if n == best)
            y = next(names)
        step += 1
        order[y] = len(order)
        affected = sorted(by_var[a] & by_var[b])
        M = _penalty(penalty_policy, (a, b),
                     [(tuple(v for v in monos[mid] if v != a and v != b), coef[mid])
                      for mid in affected], total)
        for mid in affected:
            k, c = remove_high(mid)
            new = [v for v in k if v != a and v != b] + [y]
            if len(new) >= 3:
                add_high(new, c)
            else:
                add_quadratic(new, c)
        add_quadratic((a, b), M)
        add_quadratic((a, y), -2 * M)
        add_quadratic((b, y), -2 * M)
        add_quadratic((y,), 3 * M)
        record.substitutions.append(Substitution(a, b, y, M))

    variables = list(originals) + record.ancillas
    lin, quad = {}, {}
    for m, c in quadratic_part.items():
        if c == 0.0:
            continue
        if len(m) == 1:
            lin[m[0]] = c
        else:
            quad[m] = c
    return QuadraticModel(variables, lin, quad, bpoly.constant, BINARY), record


def record_pairs(record: ReductionRecord) -> list[tuple]:
    return [(s.a, s.b, s.ancilla) for s in record.substitutions]


def lift_solution(assignment: Mapping, record: ReductionRecord, domain: str = BINARY
                  ) -> tuple[dict, bool]:
    """Drop ancillas; the flag is False if any ancilla disagrees with x_a * x_b."""
    as_bool = (lambda v: v) if domain == BINARY else (lambda v: (1 - v) // 2)
    values = {v: as_bool(int(assignment[v])) for v in assignment}
    consistent = all(values[s.ancilla] == values[s.a] * values[s.b] for s in record.substitutions)
    ancillas = set(record.ancillas)
    out = {v: assignment[v] for v in assignment if v not in ancillas}
    return out, consistent


def complete_ancillas(assignment: Mapping, record: ReductionRecord, domain: str = BINARY) -> dict:
    """Extend an original-variable assignment with consistent ancilla values."""
    out = dict(assignment)
    for s in record.substitutions:
        if domain == BINARY:
            out[s.ancilla] = out[s.a] * out[s.b]
        else:
            xa, xb = (1 - out[s.a]) // 2, (1 - out[s.b]) // 2
            out[s.ancilla] = 1 - 2 * (xa * xb)
    return out


def quadratize(poly: MultilinearPolynomial, penalty_policy: PenaltyPolicy = "global",
               pairs: Sequence[tuple] | None = None) -> tuple[QuadraticModel, ReductionRecord]:
    """Spin-domain 2-local model for ``poly`` (reduce_degree followed by to_spin)."""
    model, record = reduce_degree(poly, penalty_policy, pairs)
    return to_spin(model), record
