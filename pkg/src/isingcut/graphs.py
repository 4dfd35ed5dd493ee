"""Base combinatorial graphs: parsing, generators, cuts, and an exact MAX-CUT oracle.

Graphs are simple and undirected with vertices 0..n-1. Cut assignments are
plain numpy vectors with entries in {-1, +1}; the cut value of an assignment
is the number of edges whose endpoints carry different signs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAXCUT_ENUM_LIMIT = 30  # max_cut_exact enumerates 2^(n-1) bipartitions


class GraphParseError(ValueError):
    """Base class for edge-list parsing failures."""


class MalformedLineError(GraphParseError):
    """A line does not match the expected 'u v' / 'n m' format."""


class LoopEdgeError(GraphParseError):
    """An edge joins a vertex to itself."""


class DuplicateEdgeError(GraphParseError):
    """The same edge is listed twice."""


class VertexRangeError(GraphParseError):
    """A vertex id lies outside [0, n)."""


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n-1.

    Edges are stored as a sorted tuple of (u, v) pairs with u < v.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    _degrees: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        seen = set()
        deg = np.zeros(self.n, dtype=np.int64)
        for (u, v) in self.edges:
            if u == v:
                raise LoopEdgeError(f"loop edge at vertex {u}")
            if not (0 <= u < v < self.n):
                raise VertexRangeError(f"edge ({u}, {v}) outside vertex range [0, {self.n})")
            if (u, v) in seen:
                raise DuplicateEdgeError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
            deg[u] += 1
            deg[v] += 1
        object.__setattr__(self, "edges", tuple(sorted(self.edges)))
        object.__setattr__(self, "_degrees", deg)
        self._degrees.setflags(write=False)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def degrees(self) -> np.ndarray:
        return self._degrees

    @property
    def max_degree(self) -> int:
        return int(self._degrees.max()) if self.n else 0

    def is_regular(self, d: int) -> bool:
        return self.n > 0 and bool(np.all(self._degrees == d))

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for (u, v) in self.edges:
            a[u, v] = a[v, u] = 1.0
        return a

    def neighbor_lists(self) -> list[np.ndarray]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for (u, v) in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return [np.array(sorted(x), dtype=np.int64) for x in nbrs]

    def adjacency_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) arrays of the neighbor structure, for kernels."""
        lists = self.neighbor_lists()
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        for v, lst in enumerate(lists):
            indptr[v + 1] = indptr[v] + lst.size
        indices = np.concatenate(lists) if self.n else np.zeros(0, dtype=np.int64)
        return indptr, indices.astype(np.int64)

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.edges:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        e = np.array(self.edges, dtype=np.int64)
        return e[:, 0], e[:, 1]


def from_edges(n: int, edges) -> Graph:
    return Graph(n, tuple((int(u), int(v)) for (u, v) in edges))


def parse_graph(text: str) -> Graph:
    """Parse the edge-list format: first line 'n m', then m lines 'u v' with u < v."""
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln and not ln.startswith("#")]
    if not lines:
        raise MalformedLineError("empty graph document")
    head = lines[0].split()
    if len(head) != 2:
        raise MalformedLineError(f"header must be 'n m', got {lines[0]!r}")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise MalformedLineError(f"non-integer header {lines[0]!r}") from exc
    if n < 0 or m < 0:
        raise MalformedLineError("negative counts in header")
    if len(lines) - 1 != m:
        raise MalformedLineError(f"expected {m} edge lines, found {len(lines) - 1}")
    edges = []
    for ln in lines[1:]:
        toks = ln.split()
        if len(toks) != 2:
            raise MalformedLineError(f"edge line must be 'u v', got {ln!r}")
        try:
            u, v = int(toks[0]), int(toks[1])
        except ValueError as exc:
            raise MalformedLineError(f"non-integer edge line {ln!r}") from exc
        if u == v:
            raise LoopEdgeError(f"loop edge at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise VertexRangeError(f"edge ({u}, {v}) outside vertex range [0, {n})")
        if u > v:
            raise MalformedLineError(f"edge line must have u < v, got {ln!r}")
        edges.append((u, v))
    return Graph(n, tuple(edges))


def graph_to_text(g: Graph) -> str:
    lines = [f"{g.n} {g.num_edges}"]
    lines.extend(f"{u} {v}" for (u, v) in g.edges)
    return "\n".join(lines) + "\n"


def complete_graph(n: int) -> Graph:
    return from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return from_edges(n, [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)])


def complete_bipartite(a: int, b: int) -> Graph:
    return from_edges(a + b, [(u, a + v) for u in range(a) for v in range(b)])


def random_regular(n: int, d: int, seed: int, max_attempts: int = 10_000) -> Graph:
    """Random d-regular simple graph via the pairing model, restarting on collision.

    Deterministic for a given seed. Raises ValueError for infeasible (n, d) and
    RuntimeError if no simple pairing is found within max_attempts restarts.
    """
    if n <= d:
        raise ValueError(f"infeasible: need n > d, got n={n}, d={d}")
    if (n * d) % 2 != 0:
        raise ValueError(f"infeasible: n*d must be even, got n={n}, d={d}")
    rng = np.random.Generator(np.random.Philox(seed))
    stubs = np.repeat(np.arange(n), d)
    for _ in range(max_attempts):
        perm = rng.permutation(stubs)
        pairs = perm.reshape(-1, 2)
        lo = np.minimum(pairs[:, 0], pairs[:, 1])
        hi = np.maximum(pairs[:, 0], pairs[:, 1])
        if np.any(lo == hi):
            continue
        key = lo * n + hi
        if np.unique(key).size != key.size:
            continue
        return from_edges(n, list(zip(lo.tolist(), hi.tolist())))
    raise RuntimeError(f"pairing model failed after {max_attempts} attempts for n={n}, d={d}")


def signs_to_string(signs: np.ndarray) -> str:
    return "".join("+" if s > 0 else "-" for s in np.asarray(signs))


def signs_from_string(text: str) -> np.ndarray:
    if any(ch not in "+-" for ch in text):
        raise ValueError(f"sign string may contain only '+' and '-', got {text!r}")
    return np.array([1 if ch == "+" else -1 for ch in text], dtype=np.int64)


def cut_size(g: Graph, signs: np.ndarray) -> int:
    """Number of bichromatic edges under the +/-1 assignment."""
    signs = np.asarray(signs)
    if signs.shape != (g.n,):
        raise ValueError(f"assignment length {signs.shape} does not match n={g.n}")
    eu, ev = g.edge_arrays()
    return int(np.count_nonzero(signs[eu] != signs[ev]))


def _decode_mask(mask: int, n: int) -> np.ndarray:
    # vertex 0 fixed on side -1; vertex k (k>=1) sits at bit n-1-k so that
    # increasing mask order is lexicographic order on the sign tuple
    s = np.full(n, -1, dtype=np.int64)
    for k in range(1, n):
        if (mask >> (n - 1 - k)) & 1:
            s[k] = 1
    return s


def max_cut_exact(g: Graph, chunk: int = 1 << 16) -> tuple[int, np.ndarray]:
    """Exact MAX-CUT by enumeration over 2^(n-1) bipartitions (vertex 0 fixed).

    Returns (size, witness). Ties are broken by the lexicographically smallest
    witness in (-1 < +1) tuple order with vertex 0 on side -1.
    """
    n = g.n
    if n > MAXCUT_ENUM_LIMIT:
        raise ValueError(f"instance too large: n={n} exceeds enumeration limit {MAXCUT_ENUM_LIMIT}")
    if n == 0:
        return 0, np.zeros(0, dtype=np.int64)
    eu, ev = g.edge_arrays()
    shift_u = (n - 1 - eu).astype(np.uint64)
    shift_v = (n - 1 - ev).astype(np.uint64)
    total = 1 << (n - 1)
    best_size = -1
    best_mask = 0
    for start in range(0, total, chunk):
        masks = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        cuts = np.zeros(masks.size, dtype=np.int64)
        for su, sv in zip(shift_u, shift_v):
            cuts += (((masks >> su) ^ (masks >> sv)) & np.uint64(1)).astype(np.int64)
        k = int(np.argmax(cuts))  # first occurrence = smallest mask in chunk
        if cuts[k] > best_size:
            best_size = int(cuts[k])
            best_mask = int(masks[k])
    return best_size, _decode_mask(best_mask, n)
