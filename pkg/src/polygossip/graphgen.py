"""Graph families, gossip matrices, and shortest-path ball utilities.

Vertices are always indexed 0..n-1. Grid-like families index vertices
lexicographically (row-major) over their coordinates so that CSV output is
comparable across runs.
"""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import IO, Iterator, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import EstimationError, GenerationError, SpecificationError

__all__ = [
    "Graph",
    "GraphSpec",
    "GossipMatrix",
    "generate",
    "largest_component",
    "build_gossip_matrix",
    "balls",
    "hausdorff_estimate",
    "dump_graph",
    "load_graph",
]

GRAPH_FAMILIES = (
    "grid",
    "torus",
    "percolation_bond",
    "random_geometric",
    "random_regular",
    "random_tree",
    "path",
    "cycle",
    "complete",
)

_RANDOM_FAMILIES = ("percolation_bond", "random_geometric", "random_regular", "random_tree")

_REGULAR_RETRIES = 1000


@dataclass
class Graph:
    """Undirected graph in adjacency-list form (sorted neighbor lists)."""

    n: int
    adjacency: list[list[int]]
    edge_count: int

    def degrees(self) -> np.ndarray:
        return np.array([len(nb) for nb in self.adjacency], dtype=np.int64)

    def edges(self) -> Iterator[tuple[int, int]]:
        """All undirected edges as (u, v) with u < v, lexicographic order."""
        for u in range(self.n):
            for v in self.adjacency[u]:
                if u < v:
                    yield (u, v)

    def adjacency_csr(self) -> sp.csr_matrix:
        rows, cols = [], []
        for u in range(self.n):
            rows.extend([u] * len(self.adjacency[u]))
            cols.extend(self.adjacency[u])
        data = np.ones(len(rows))
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def is_regular(self) -> bool:
        deg = self.degrees()
        return self.n > 0 and bool(np.all(deg == deg[0]))

    def validate(self) -> None:
        """Check symmetry, index range, sortedness, no loops/duplicates."""
        if len(self.adjacency) != self.n:
            raise SpecificationError("adjacency length does not match n")
        count = 0
        for v, nbrs in enumerate(self.adjacency):
            if list(nbrs) != sorted(set(nbrs)):
                raise SpecificationError(f"neighbor list of {v} not sorted/deduplicated")
            for w in nbrs:
                if not (0 <= w < self.n):
                    raise SpecificationError(f"neighbor index {w} out of range")
                if w == v:
                    raise SpecificationError(f"self-loop at {v}")
                if v not in self.adjacency[w]:
                    raise SpecificationError(f"asymmetric edge ({v},{w})")
            count += len(nbrs)
        if count != 2 * self.edge_count:
            raise SpecificationError("edge_count inconsistent with adjacency")


@dataclass(frozen=True)
class GraphSpec:
    """Parameters selecting one graph from a family.

    dims applies to grid/torus/percolation_bond; n to the size-parameterized
    families; d is the degree for random_regular and the ambient dimension for
    random_geometric; p the edge-keep probability; radius the connection
    radius. Generation is deterministic given the seed.
    """

    family: str
    dims: tuple[int, ...] = ()
    n: int = 0
    d: int = 0
    p: float = 0.0
    radius: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(x) for x in self.dims))

    def validate(self) -> None:
        if self.family not in GRAPH_FAMILIES:
            raise SpecificationError(f"unknown graph family {self.family!r}")
        if self.family in ("grid", "torus", "percolation_bond"):
            if not self.dims or any(m < 1 for m in self.dims):
                raise SpecificationError("dims must be a nonempty list of positive sides")
        if self.family in ("path", "cycle", "complete", "random_regular",
                           "random_tree", "random_geometric") and self.n < 1:
            raise SpecificationError("n must be >= 1")
        if self.family == "percolation_bond" and not (0.0 <= self.p <= 1.0):
            raise SpecificationError("edge-keep probability p must lie in [0, 1]")
        if self.family == "random_geometric":
            if self.radius <= 0:
                raise SpecificationError("radius must be > 0")
            if self.d < 1:
                raise SpecificationError("ambient dimension d must be >= 1")
        if self.family == "random_regular":
            if self.d < 1 or self.d >= self.n:
                raise SpecificationError("random_regular requires 1 <= d < n")
            if (self.n * self.d) % 2 != 0:
                raise SpecificationError("random_regular requires n*d even")
        if self.family == "cycle" and self.n < 3:
            raise SpecificationError("cycle requires n >= 3")


def _graph_from_edges(n: int, edges) -> Graph:
    adjacency: list[list[int]] = [[] for _ in range(n)]
    edge_set = set()
    for u, v in edges:
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        if key in edge_set:
            continue
        edge_set.add(key)
        adjacency[u].append(v)
        adjacency[v].append(u)
    for nbrs in adjacency:
        nbrs.sort()
    return Graph(n=n, adjacency=adjacency, edge_count=len(edge_set))


def _grid_edges(dims: Sequence[int], periodic: bool):
    """Nearest-neighbor edges of a (periodic) box, row-major vertex order."""
    dims = tuple(dims)
    n = int(np.prod(dims))
    strides = np.cumprod((1,) + dims[::-1][:-1])[::-1]

    def to_index(coord):
        return int(sum(c * s for c, s in zip(coord, strides)))

    for flat in range(n):
        coord = []
        rem = flat
        for s in strides:
            coord.append(rem // s)
            rem %= s
        for axis, m in enumerate(dims):
            if coord[axis] + 1 < m:
                nxt = list(coord)
                nxt[axis] += 1
                yield (flat, to_index(nxt))
            elif periodic and m > 2:
                nxt = list(coord)
                nxt[axis] = 0
                yield (flat, to_index(nxt))


def _prufer_tree(n: int, rng: np.random.Generator) -> Graph:
    """Uniform labeled tree from a random Prüfer sequence."""
    if n == 1:
        return _graph_from_edges(1, [])
    if n == 2:
        return _graph_from_edges(2, [(0, 1)])
    seq = rng.integers(0, n, size=n - 2)
    degree = np.ones(n, dtype=np.int64)
    for x in seq:
        degree[x] += 1
    edges = []
    # smallest-leaf-first decoding
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, int(x)))
        degree[leaf] -= 1
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, int(x))
    u = heapq.heappop(leaves)
    v = heapq.heappop(leaves)
    edges.append((u, v))
    return _graph_from_edges(n, edges)


def _random_regular(n: int, d: int, rng: np.random.Generator) -> Graph:
    """Configuration-model pairing, resampled until the multigraph is simple."""
    stubs = np.repeat(np.arange(n), d)
    for _ in range(_REGULAR_RETRIES):
        perm = rng.permutation(stubs)
        pairs = perm.reshape(-1, 2)
        seen = set()
        ok = True
        for a, b in pairs:
            a, b = int(a), int(b)
            if a == b:
                ok = False
                break
            key = (min(a, b), max(a, b))
            if key in seen:
                ok = False
                break
            seen.add(key)
        if ok:
            return _graph_from_edges(n, ((int(a), int(b)) for a, b in pairs))
    raise GenerationError(
        f"no simple {d}-regular pairing found for n={n} after {_REGULAR_RETRIES} retries"
    )


def _random_geometric(n: int, dim: int, radius: float, rng: np.random.Generator) -> Graph:
    points = rng.random((n, dim))
    diff = points[:, None, :] - points[None, :, :]
    dist2 = np.einsum("ijk,ijk->ij", diff, diff)
    iu, ju = np.triu_indices(n, k=1)
    # strict inequality; ties have probability zero
    mask = dist2[iu, ju] < radius * radius
    return _graph_from_edges(n, zip(iu[mask].tolist(), ju[mask].tolist()))


def generate(spec: GraphSpec) -> Graph:
    """Build the graph selected by `spec` (deterministic given spec.seed)."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    fam = spec.family
    if fam == "grid":
        return _graph_from_edges(int(np.prod(spec.dims)), _grid_edges(spec.dims, periodic=False))
    if fam == "torus":
        return _graph_from_edges(int(np.prod(spec.dims)), _grid_edges(spec.dims, periodic=True))
    if fam == "percolation_bond":
        full = list(_grid_edges(spec.dims, periodic=False))
        keep = rng.random(len(full)) < spec.p
        kept = [e for e, k in zip(full, keep) if k]
        return _graph_from_edges(int(np.prod(spec.dims)), kept)
    if fam == "random_geometric":
        return _random_geometric(spec.n, spec.d, spec.radius, rng)
    if fam == "random_regular":
        return _random_regular(spec.n, spec.d, rng)
    if fam == "random_tree":
        return _prufer_tree(spec.n, rng)
    if fam == "path":
        return _graph_from_edges(spec.n, ((i, i + 1) for i in range(spec.n - 1)))
    if fam == "cycle":
        return _graph_from_edges(spec.n, [(i, (i + 1) % spec.n) for i in range(spec.n)])
    if fam == "complete":
        return _graph_from_edges(
            spec.n, ((i, j) for i in range(spec.n) for j in range(i + 1, spec.n))
        )
    raise SpecificationError(f"unknown graph family {fam!r}")


def connected_components(g: Graph) -> list[list[int]]:
    """Vertex lists of connected components, each sorted ascending."""
    seen = np.zeros(g.n, dtype=bool)
    comps = []
    for start in range(g.n):
        if seen[start]:
            continue
        comp = [start]
        seen[start] = True
        dq = deque([start])
        while dq:
            u = dq.popleft()
            for w in g.adjacency[u]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    dq.append(w)
        comps.append(sorted(comp))
    return comps


def largest_component(g: Graph) -> tuple[Graph, np.ndarray]:
    """Induced subgraph on the largest component plus an old->new index map.

    Ties between equal-size components go to the one containing the smallest
    original vertex index. Dropped vertices map to -1.
    """
    comps = connected_components(g)
    comps.sort(key=lambda c: (-len(c), c[0]))
    chosen = comps[0] if comps else []
    index_map = np.full(g.n, -1, dtype=np.int64)
    for new, old in enumerate(chosen):
        index_map[old] = new
    adjacency = [
        sorted(int(index_map[w]) for w in g.adjacency[old]) for old in chosen
    ]
    edge_count = sum(len(a) for a in adjacency) // 2
    return Graph(n=len(chosen), adjacency=adjacency, edge_count=edge_count), index_map


@dataclass
class GossipMatrix:
    """Sparse symmetric nonnegative stochastic matrix supported on a graph.

    Each undirected off-diagonal entry is stored once ((u, v) with u < v), so
    the matrix equals its transpose exactly.
    """

    n: int
    diag: np.ndarray
    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_w: np.ndarray
    _csr: sp.csr_matrix | None = field(default=None, repr=False, compare=False)

    def matrix(self) -> sp.csr_matrix:
        if self._csr is None:
            rows = np.concatenate([self.edge_u, self.edge_v, np.arange(self.n)])
            cols = np.concatenate([self.edge_v, self.edge_u, np.arange(self.n)])
            vals = np.concatenate([self.edge_w, self.edge_w, self.diag])
            self._csr = sp.csr_matrix((vals, (rows, cols)), shape=(self.n, self.n))
        return self._csr

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.matrix() @ x

    def to_dense(self) -> np.ndarray:
        return self.matrix().toarray()

    def row_sums(self) -> np.ndarray:
        out = self.diag.copy()
        np.add.at(out, self.edge_u, self.edge_w)
        np.add.at(out, self.edge_v, self.edge_w)
        return out


def build_gossip_matrix(g: Graph, kind: str, d_max: int | None = None) -> GossipMatrix:
    """Standard gossip matrices on a graph.

    kind:
      uniform_degree      W = I + (A - D)/d_max, d_max defaulting to the max
                          degree (an override larger than the max is allowed,
                          e.g. the ambient lattice degree for a percolation
                          subgraph)
      adjacency_over_d    W = A/d on a d-regular graph
      max_neighbor_degree W_vw = 1/max(deg v, deg w) off-diagonal, diagonal
                          chosen to make rows sum to 1
    """
    deg = g.degrees()
    eu, ev = [], []
    for u, v in g.edges():
        eu.append(u)
        ev.append(v)
    eu = np.array(eu, dtype=np.int64)
    ev = np.array(ev, dtype=np.int64)

    if kind == "uniform_degree":
        max_deg = int(deg.max()) if g.n else 0
        if d_max is None:
            d_max = max(max_deg, 1)
        if d_max < max_deg:
            raise SpecificationError(
                f"d_max override {d_max} is below the graph's maximum degree {max_deg}"
            )
        inv = 1.0 / d_max
        ew = np.full(len(eu), inv)
        diag = 1.0 - deg * inv
    elif kind == "adjacency_over_d":
        if not g.is_regular() or (g.n > 0 and len(g.adjacency[0]) == 0):
            raise SpecificationError("adjacency_over_d requires a regular graph with d >= 1")
        d = len(g.adjacency[0])
        ew = np.full(len(eu), 1.0 / d)
        diag = np.zeros(g.n)
    elif kind == "max_neighbor_degree":
        ew = 1.0 / np.maximum(deg[eu], deg[ev])
        diag = np.ones(g.n)
        np.subtract.at(diag, eu, ew)
        np.subtract.at(diag, ev, ew)
        # the sum telescopes to >= 0 exactly; clear the rounding dust
        diag = np.maximum(diag, 0.0)
    else:
        raise SpecificationError(f"unknown gossip matrix kind {kind!r}")
    return GossipMatrix(n=g.n, diag=diag, edge_u=eu, edge_v=ev, edge_w=ew)


def balls(g: Graph, v: int, t_max: int) -> tuple[list[int], list[list[int]]]:
    """BFS ball sizes |B_t(v)| for t = 0..t_max plus the distance-t frontiers."""
    if not (0 <= v < g.n):
        raise SpecificationError(f"vertex {v} out of range")
    if t_max < 0:
        raise SpecificationError("t_max must be >= 0")
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[v] = 0
    frontier = [v]
    frontiers = [[v]]
    sizes = [1]
    for _ in range(t_max):
        nxt = []
        for u in frontier:
            for w in g.adjacency[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    nxt.append(w)
        nxt.sort()
        frontiers.append(nxt)
        sizes.append(sizes[-1] + len(nxt))
        frontier = nxt
    return sizes, frontiers


def hausdorff_estimate(g: Graph, v: int, t_range: Sequence[int]) -> float:
    """Growth exponent of |B_t(v)|: least-squares slope of ln|B_t| vs ln t.

    Only t >= 1 with |B_t(v)| < n/2 are used (pre-saturation regime).
    """
    ts = sorted({int(t) for t in t_range if t >= 1})
    if not ts:
        raise EstimationError("empty t range")
    sizes, _ = balls(g, v, max(ts))
    usable = [(t, sizes[t]) for t in ts if sizes[t] < 0.5 * g.n]
    if len(usable) < 2:
        raise EstimationError("fewer than 2 pre-saturation ball sizes in range")
    lt = np.log([t for t, _ in usable])
    ls = np.log([s for _, s in usable])
    return float(np.polyfit(lt, ls, 1)[0])


def dump_graph(g: Graph, f: IO[str]) -> None:
    """Line-oriented dump: first line "n m", then one "u v" line per edge (u < v)."""
    f.write(f"{g.n} {g.edge_count}\n")
    for u, v in g.edges():
        f.write(f"{u} {v}\n")


def load_graph(f: IO[str]) -> Graph:
    header = f.readline().split()
    if len(header) != 2:
        raise SpecificationError("graph dump must start with a 'n m' line")
    n, m = int(header[0]), int(header[1])
    edges = []
    for _ in range(m):
        parts = f.readline().split()
        if len(parts) != 2:
            raise SpecificationError("malformed edge line in graph dump")
        edges.append((int(parts[0]), int(parts[1])))
    g = _graph_from_edges(n, edges)
    if g.edge_count != m:
        raise SpecificationError("duplicate or self-loop edges in graph dump")
    return g
