"""Chimera target graphs, heuristic minor embedding and chain construction.

Vertex ``((i*N + j)*2 + u)*L + k`` is qubit k on side u of cell (i, j). Side 0
qubits couple to the same qubit of cell (i+1, j), side 1 qubits to cell
(i, j+1); the two sides of a cell form a complete bipartite K_{L,L}.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse
from scipy.sparse.csgraph import dijkstra

from .poly import parse_var, var_name
from .quad import SPIN, QuadraticModel, to_spin


class EmbeddingError(ValueError):
    pass


@dataclass(frozen=True)
class ChimeraGraph:
    M: int
    N: int
    L: int
    edges: tuple[tuple[int, int], ...] = field(repr=False)

    @property
    def num_vertices(self) -> int:
        return 2 * self.M * self.N * self.L

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def vertex(self, i: int, j: int, u: int, k: int) -> int:
        return ((i * self.N + j) * 2 + u) * self.L + k

    def coordinates(self, q: int) -> tuple[int, int, int, int]:
        k = q % self.L
        rest = q // self.L
        u = rest % 2
        cell = rest // 2
        return cell // self.N, cell % self.N, u, k

    def adjacency(self) -> scipy.sparse.csr_matrix:
        e = np.array(self.edges, dtype=np.int64).reshape(-1, 2)
        n = self.num_vertices
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        return scipy.sparse.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))

    def edge_set(self) -> frozenset:
        return frozenset(self.edges)


def chimera_edge_count(M: int, N: int, L: int) -> int:
    return M * N * L * L + L * M * (N - 1) + L * N * (M - 1)


def build_chimera(M: int, N: int | None = None, L: int = 4) -> ChimeraGraph:
    N = M if N is None else N
    if min(M, N, L) < 1:
        raise ValueError("Chimera dimensions must be >= 1")
    g = ChimeraGraph(M, N, L, ())
    edges = []
    for i in range(M):
        for j in range(N):
            for k in range(L):
                for k2 in range(L):
                    edges.append((g.vertex(i, j, 0, k), g.vertex(i, j, 1, k2)))
                if i + 1 < M:
                    edges.append((g.vertex(i, j, 0, k), g.vertex(i + 1, j, 0, k)))
                if j + 1 < N:
                    edges.append((g.vertex(i, j, 1, k), g.vertex(i, j + 1, 1, k)))
    return ChimeraGraph(M, N, L, tuple(sorted(edges)))


# --------------------------------------------------------------------------
# embeddings

@dataclass(frozen=True)
class Embedding:
    chains: Mapping[Hashable, tuple[int, ...]]

    @property
    def num_qubits(self) -> int:
        return sum(len(c) for c in self.chains.values())

    @property
    def max_chain_length(self) -> int:
        return max((len(c) for c in self.chains.values()), default=0)

    def dumps(self) -> str:
        return "".join(f"{var_name(v)}: {' '.join(str(q) for q in c)}\n"
                       for v, c in self.chains.items())

    def dump(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def loads(cls, text: str) -> "Embedding":
        chains = {}
        for raw in text.splitlines():
            if not raw.strip():
                continue
            name, _, qs = raw.partition(":")
            chains[parse_var(name.strip())] = tuple(int(q) for q in qs.split())
        return cls(chains)


def is_valid_embedding(embedding: Embedding, logical_edges: Iterable[tuple],
                       target_edges: Iterable[tuple[int, int]],
                       variables: Iterable | None = None) -> tuple[bool, str]:
    """Check disjointness, chain connectivity and edge coverage by brute force."""
    adj: dict[int, set] = {}
    for a, b in target_edges:
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    chains = {v: set(c) for v, c in embedding.chains.items()}
    needed = set(variables) if variables is not None else set()
    logical_edges = list(logical_edges)
    for u, v in logical_edges:
        needed.update((u, v))
    for v in needed:
        if not chains.get(v):
            return False, f"no chain for {v!r}"
    owner: dict[int, Hashable] = {}
    for v, c in chains.items():
        for q in c:
            if q not in adj and len(c) > 1:
                return False, f"qubit {q} of {v!r} is not a target vertex"
            if q in owner:
                return False, f"qubit {q} shared by {owner[q]!r} and {v!r}"
            owner[q] = v
    for v, c in chains.items():
        start = next(iter(c))
        seen = {start}
        stack = [start]
        while stack:
            q = stack.pop()
            for p in adj.get(q, ()):
                if p in c and p not in seen:
                    seen.add(p)
                    stack.append(p)
        if seen != c:
            return False, f"chain of {v!r} is disconnected"
    for u, v in logical_edges:
        if not any(p in chains[v] for q in chains[u] for p in adj.get(q, ())):
            return False, f"no coupler between chains of {u!r} and {v!r}"
    return True, "ok"


def clique_chains(target: ChimeraGraph, n: int, rng: np.random.Generator | None = None
                  ) -> list[tuple[int, ...]] | None:
    """``n`` chains realizing K_n in a corner block of ``target``.

    Chain (b, k) runs along side-1 qubit k of cells (b, 0..b) and side-0 qubit
    k of cells (b..m-1, b); chains meet pairwise inside cell (max(b, b'),
    min(b, b')). With ``rng`` the block is moved to a random offset and mapped
    through random Chimera automorphisms (reflections, transpose on square
    grids, a shore permutation). Returns ``None`` if the target is too small.
    """
    L = target.L
    m = max(1, -(-n // L))
    if m > min(target.M, target.N):
        return None
    flip_i = flip_j = transpose = False
    i0 = j0 = 0
    perm = np.arange(L)
    if rng is not None:
        i0 = int(rng.integers(target.M - m + 1))
        j0 = int(rng.integers(target.N - m + 1))
        flip_i, flip_j = bool(rng.integers(2)), bool(rng.integers(2))
        transpose = target.M == target.N and bool(rng.integers(2))
        perm = rng.permutation(L)

    def qubit(i, j, u, k):
        if flip_i:
            i = m - 1 - i
        if flip_j:
            j = m - 1 - j
        if transpose:
            i, j, u = j, i, 1 - u
        return target.vertex(i0 + i, j0 + j, u, int(perm[k]))

    chains = []
    for b in range(m):
        for k in range(L):
            chain = [qubit(b, j, 1, k) for j in range(b + 1)]
            chain += [qubit(i, b, 0, k) for i in range(b, m)]
            chains.append(tuple(sorted(chain)))
    return chains[:n]


class _Embedder:
    """Chain placement with overlap penalties and rip-up passes."""

    def __init__(self, variables: list, logical_edges: list, target: ChimeraGraph,
                 rng: np.random.Generator, passes: int):
        self.vars = list(variables)
        self.rank = {v: i for i, v in enumerate(self.vars)}
        self.nbrs: dict = {v: set() for v in self.vars}
        for u, v in logical_edges:
            if u != v:
                self.nbrs[u].add(v)
                self.nbrs[v].add(u)
        A = target.adjacency()
        self.indptr, self.indices = A.indptr, A.indices
        self.n = target.num_vertices
        self.target = target
        self.rng = rng
        self.passes = passes
        self.chains: dict = {}
        self.usage = np.zeros(self.n, dtype=np.int64)
        self.alpha0 = 2.0
        self.alpha = self.alpha0
        self.alpha_growth = 1.3
        self.noise = 1.0
        mid_i, mid_j = (target.M - 1) / 2, (target.N - 1) / 2
        cells = [(i, j) for i in range(target.M) for j in range(target.N)
                 if abs(i - mid_i) <= 1 and abs(j - mid_j) <= 1]
        self.central = np.array([target.vertex(i, j, u, k) for i, j in cells
                                 for u in range(2) for k in range(target.L)])

    def _weights(self) -> np.ndarray:
        return np.power(self.alpha, np.minimum(self.usage, 30).astype(float))

    def _place(self, v) -> None:
        old = self.chains.pop(v, ())
        for q in old:
            self.usage[q] -= 1
        placed = [u for u in sorted(self.nbrs[v], key=self.rank.__getitem__) if u in self.chains]
        node_w = self._weights()
        if not placed:
            free = np.flatnonzero(self.usage == self.usage.min())
            if not self.chains:
                # start near the middle so chains can grow in every direction
                free = self.central
            chain = {int(self.rng.choice(free))}
        else:
            G = scipy.sparse.csr_matrix((node_w[self.indices], self.indices, self.indptr),
                                        shape=(self.n, self.n))
            total = node_w + self.rng.random(self.n) * self.noise
            preds = []
            for u in placed:
                src = np.fromiter(self.chains[u], dtype=np.int64)
                dist, pred, _ = dijkstra(G, indices=src, min_only=True, return_predecessors=True)
                # dist includes the root's own weight; count it once overall
                total = total + dist - node_w
                total[src] = np.inf
                preds.append((u, pred))
            root = int(np.argmin(total))
            if not np.isfinite(total[root]):
                raise EmbeddingError("target graph too small or disconnected")
            chain = {root}
            for u, pred in preds:
                cu = set(self.chains[u])
                q = root
                while q not in cu:
                    chain.add(q)
                    q = int(pred[q])
                    if q < 0:
                        raise EmbeddingError("unreachable chain")
        self.chains[v] = tuple(sorted(chain))
        for q in chain:
            self.usage[q] += 1

    def _overlap(self) -> int:
        return int(np.maximum(self.usage - 1, 0).sum())

    def _initial_order(self) -> list:
        # randomized breadth-first order keeps each new chain next to a placed neighbour
        order, seen = [], set()
        for start in self.rng.permutation(len(self.vars)):
            v0 = self.vars[start]
            if v0 in seen:
                continue
            seen.add(v0)
            frontier = [v0]
            while frontier:
                v = frontier.pop(int(self.rng.integers(len(frontier))))
                order.append(v)
                for u in sorted(self.nbrs[v], key=self.rank.__getitem__):
                    if u not in seen:
                        seen.add(u)
                        frontier.append(u)
        return order

    def _seed_chains(self, strategy: str) -> bool:
        self.chains = {}
        self.usage[:] = 0
        self.alpha = self.alpha0
        if strategy == "clique":
            chains = clique_chains(self.target, len(self.vars), self.rng)
            if chains is None:
                return False
            for v, i in zip(self.vars, self.rng.permutation(len(self.vars))):
                self.chains[v] = chains[i]
                self.usage[list(chains[i])] += 1
            # start refinement with overlaps already expensive
            self.alpha = float(max(2 * len(self.vars), 8))
            return True
        for v in self._initial_order():
            self._place(v)
        return True

    def _snapshot(self, best):
        if self._overlap() == 0:
            emb = Embedding({v: self.chains[v] for v in self.vars})
            if best is None or emb.num_qubits < best.num_qubits:
                return emb
        return best

    def run(self, strategy: str) -> Embedding | None:
        if not self._seed_chains(strategy):
            return None
        best = self._snapshot(None)
        for _ in range(self.passes):
            for i in self.rng.permutation(len(self.vars)):
                self._place(self.vars[i])
            best = self._snapshot(best)
            self.alpha *= self.alpha_growth
        return best


EMBEDDING_STRATEGIES = ("grow", "clique", "auto")
DENSE_GRAPH = 0.6


def find_embedding(logical_edges: Iterable[tuple], target: ChimeraGraph, seed: int = 0,
                   variables: Sequence | None = None, passes: int = 8,
                   strategy: str = "auto") -> Embedding | None:
    """Heuristic minor embedding; ``None`` when no overlap-free embedding was found.

    Initial chains come from randomized breadth-first chain growth ("grow")
    or from a randomly placed native clique layout ("clique"); "auto" tries
    growth first (clique layout directly for graphs denser than
    ``DENSE_GRAPH``) and falls back to the clique layout. Then every pass rips
    up each chain in random order and re-grows it: the root minimizes the
    summed weighted distance to the neighbouring chains and the chain is the
    union of those shortest paths. A qubit used by ``u`` other chains costs
    ``alpha**u`` with ``alpha`` rising every pass, so overlaps are allowed
    while searching but squeezed out. The smallest overlap-free state seen is
    returned.
    """
    if strategy not in EMBEDDING_STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    logical_edges = [tuple(e) for e in logical_edges]
    if variables is None:
        seen = {}
        for e in logical_edges:
            for v in e:
                seen.setdefault(v, None)
        variables = list(seen)
    variables = list(variables)
    if not variables:
        return Embedding({})
    if len(variables) > target.num_vertices:
        return None
    rng = np.random.default_rng(seed)
    if strategy == "auto":
        n = len(variables)
        density = len({frozenset(e) for e in logical_edges if e[0] != e[1]}) / max(1, n * (n - 1) / 2)
        # growth rarely clears its overlaps on near-complete graphs
        strategy = "clique" if density > DENSE_GRAPH and n > target.L else "auto"
    emb = None
    if strategy in ("grow", "auto"):
        emb = _Embedder(variables, logical_edges, target, rng, passes).run("grow")
    if emb is None and strategy in ("clique", "auto"):
        emb = _Embedder(variables, logical_edges, target, rng, passes).run("clique")
    if emb is None:
        return None
    ok, why = is_valid_embedding(emb, logical_edges, target.edges, variables)
    if not ok:
        raise EmbeddingError(f"embedder produced an invalid embedding: {why}")
    return emb


@dataclass
class EmbeddingReport:
    embedding: Embedding | None
    attempts: int
    failures: int
    qubit_counts: list


def best_of_k(logical_edges: Iterable[tuple], target: ChimeraGraph, k: int = 100, seed: int = 0,
              variables: Sequence | None = None, passes: int = 8,
              strategy: str = "auto") -> EmbeddingReport:
    """Smallest embedding (total chain qubits) over ``k`` seeded attempts.

    Attempt ``t`` uses seed ``seed + t``; ties keep the earliest attempt.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    logical_edges = [tuple(e) for e in logical_edges]
    best = None
    counts = []
    failures = 0
    for t in range(k):
        emb = find_embedding(logical_edges, target, seed + t, variables, passes, strategy)
        if emb is None:
            failures += 1
            counts.append(None)
            continue
        counts.append(emb.num_qubits)
        if best is None or emb.num_qubits < best.num_qubits:
            best = emb
    return EmbeddingReport(best, k, failures, counts)


# --------------------------------------------------------------------------
# embedded models

@dataclass
class EmbeddedModel:
    physical: QuadraticModel
    embedding: Embedding
    chain_strength: float
    chain_offset: float

    def unembed(self, samples: np.ndarray, variables: Sequence) -> np.ndarray:
        return unembed(samples, self.physical.variables, self.embedding, variables)


def default_chain_strength(model: QuadraticModel) -> float:
    return 2.0 * to_spin(model).max_abs_coefficient()


def embed_model(model: QuadraticModel, embedding: Embedding, target: ChimeraGraph,
                chain_strength: float | None = None) -> EmbeddedModel:
    """Spread a spin model over chains: fields split evenly, each logical
    coupling on one coupler between the chains, -chain_strength on every
    coupler inside a chain."""
    model = to_spin(model)
    if chain_strength is None:
        chain_strength = default_chain_strength(model)
    edge_set = target.edge_set()
    missing = [v for v in model.variables if v not in embedding.chains]
    if missing:
        raise EmbeddingError(f"variables without chains: {missing[:5]}")
    qubits = sorted(q for v in model.variables for q in embedding.chains[v])
    lin: dict[int, float] = {}
    quad: dict[tuple[int, int], float] = {}
    for v in model.variables:
        chain = embedding.chains[v]
        share = model.linear.get(v, 0.0) / len(chain)
        if share:
            for q in chain:
                lin[q] = lin.get(q, 0.0) + share
    for (u, v), c in model.quadratic.items():
        edge = next(((a, b) if a < b else (b, a) for a in embedding.chains[u]
                     for b in embedding.chains[v] if ((a, b) if a < b else (b, a)) in edge_set), None)
        if edge is None:
            raise EmbeddingError(f"no coupler between chains of {u!r} and {v!r}")
        quad[edge] = quad.get(edge, 0.0) + c
    n_chain_edges = 0
    for v in model.variables:
        chain = sorted(embedding.chains[v])
        for i, a in enumerate(chain):
            for b in chain[i + 1:]:
                if (a, b) in edge_set:
                    quad[(a, b)] = quad.get((a, b), 0.0) - chain_strength
                    n_chain_edges += 1
    physical = QuadraticModel(qubits, lin, quad, model.offset, SPIN)
    return EmbeddedModel(physical, embedding, float(chain_strength),
                         -float(chain_strength) * n_chain_edges)


def unembed(samples: np.ndarray, physical_variables: Sequence[int], embedding: Embedding,
            variables: Sequence) -> np.ndarray:
    """Majority vote per chain; ties resolve to +1."""
    samples = np.atleast_2d(np.asarray(samples))
    col = {q: i for i, q in enumerate(physical_variables)}
    out = np.empty((samples.shape[0], len(variables)), dtype=np.int8)
    for t, v in enumerate(variables):
        idx = [col[q] for q in embedding.chains[v]]
        total = samples[:, idx].sum(axis=1)
        out[:, t] = np.where(total >= 0, 1, -1)
    return out


def chain_break_fraction(samples: np.ndarray, physical_variables: Sequence[int],
                         embedding: Embedding) -> float:
    samples = np.atleast_2d(np.asarray(samples))
    col = {q: i for i, q in enumerate(physical_variables)}
    broken = 0
    for chain in embedding.chains.values():
        block = samples[:, [col[q] for q in chain]]
        broken += int(np.sum(block.min(axis=1) != block.max(axis=1)))
    return broken / max(1, samples.shape[0] * len(embedding.chains))
