"""Measurement graphs of logical supports, with certified expansion.

The measurement graph puts one vertex on each qubit a logical acts on and
one edge through every check that meets the support, pairing the (even)
overlap off two by two.  Padding edges may be added to make the graph a
certified expander; they carry no check and are marked with ``None``.

Expansion is certified two ways: exact subset enumeration of the vertex
Cheeger constant min |boundary(S)| / |S| for small graphs, and the spectral
bound lambda_2 / 2 on the conductance form at scale, lifted to the vertex
form by the minimum degree.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from cone_surgeon.chain import CellComplex, graph_complex
from cone_surgeon.codes import CssCode, StabilizerCode, yz_overlap_pairs
from cone_surgeon.f2core import F2Vector

EXACT_CHEEGER_LIMIT = 22

CheegerValue = Union[Fraction, float]


class CertificationError(RuntimeError):
    """Raised when augmentation cannot certify the requested expansion."""

    def __init__(self, target: CheegerValue, method: str, value: CheegerValue):
        super().__init__(
            f"could not certify Cheeger >= {target}; best {method} value {value}"
        )
        self.target = target
        self.method = method
        self.value = value


# -------------------------------------------------------------------- graphs


@dataclass(frozen=True)
class Graph:
    """An undirected multigraph without self-loops."""

    vertices: tuple
    edges: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        known = set(self.vertices)
        if len(known) != len(self.vertices):
            raise ValueError("duplicate vertex labels")
        for e in self.edges:
            if len(e) != 2:
                raise ValueError(f"edge {e!r} is not a pair")
            u, v = e
            if u == v:
                raise ValueError(f"self-loop on {u!r}")
            if u not in known or v not in known:
                raise ValueError(f"edge {e!r} has an unknown endpoint")

    def degrees(self) -> dict:
        deg = {v: 0 for v in self.vertices}
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def degree(self, v) -> int:
        return self.degrees()[v]

    def max_degree(self) -> int:
        return max(self.degrees().values(), default=0)

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        adj: dict = {v: [] for v in self.vertices}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.vertices)

    def to_complex(self) -> CellComplex:
        """The graph as a 1-complex; edges are labeled by their position."""
        return graph_complex(self.vertices, tuple(range(len(self.edges))), self.edges)


@dataclass(frozen=True)
class MeasurementGraph:
    """A graph on a logical's support with its check and qubit attachments.

    ``f0`` sends each vertex to its data qubit (injectively); ``f1[j]`` is
    the check index edge ``j`` came from, or ``None`` for padding edges
    added by augmentation.
    """

    graph: Graph
    f0: dict
    f1: tuple
    cheeger_certificate: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "f1", tuple(self.f1))
        if set(self.f0) != set(self.graph.vertices):
            raise ValueError("f0 keys differ from the vertex set")
        images = list(self.f0.values())
        if len(set(images)) != len(images):
            raise ValueError("f0 is not injective")
        if len(self.f1) != len(self.graph.edges):
            raise ValueError("f1 length differs from the edge count")

    @property
    def check_edges(self) -> tuple:
        """Indices of edges that carry a check (f1 not None)."""
        return tuple(j for j, c in enumerate(self.f1) if c is not None)


# --------------------------------------------------------------- certificates


def _popcount_u32(a: "np.ndarray") -> "np.ndarray":
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(a)
    table = np.array([bin(i).count("1") for i in range(256)], dtype=np.uint8)
    return table[a.view(np.uint8).reshape(a.size, 4)].sum(axis=1)


def cheeger_exact(g: Graph) -> CheegerValue:
    """Exact vertex Cheeger constant min over subsets of |boundary| / |S|.

    Enumerates every subset with 1 <= |S| <= |V|/2, so the vertex count is
    hard-capped; larger graphs should use :func:`cheeger_spectral_lb`.  The
    scan runs in float and the winner is re-checked exactly, so the result
    is an exact Fraction (or inf for a single vertex, where no cut exists).
    """
    n = len(g.vertices)
    if n > EXACT_CHEEGER_LIMIT:
        raise ValueError(
            f"|V| = {n} > {EXACT_CHEEGER_LIMIT}: exact enumeration infeasible,"
            " use cheeger_spectral_lb"
        )
    if n == 0:
        raise ValueError("empty graph has no Cheeger constant")
    if n == 1:
        return math.inf
    idx = {v: i for i, v in enumerate(g.vertices)}
    pairs = [(idx[u], idx[v]) for u, v in g.edges]
    half = n // 2
    best: Optional[Fraction] = None
    chunk = 1 << 20
    for start in range(0, 1 << n, chunk):
        masks = np.arange(start, min(start + chunk, 1 << n), dtype=np.uint32)
        size = _popcount_u32(masks)
        keep = (size >= 1) & (size <= half)
        if not keep.any():
            continue
        masks = masks[keep]
        size = size[keep]
        cut = np.zeros(masks.shape, dtype=np.uint32)
        for u, v in pairs:
            cut += ((masks >> np.uint32(u)) ^ (masks >> np.uint32(v))) & np.uint32(1)
        ratio = cut / size
        near = np.nonzero(ratio <= ratio.min() + 1e-9)[0][:64]
        for i in near:
            val = Fraction(int(cut[i]), int(size[i]))
            if best is None or val < best:
                best = val
        if best == 0:
            break
    assert best is not None
    return best


def cheeger_spectral_lb(g: Graph) -> float:
    """Spectral lower bound lambda_2 / 2 on the conductance-form constant.

    lambda_2 is the second-smallest eigenvalue of the normalized Laplacian;
    the bounded quantity is min |boundary(S)| / vol(S), which under-counts
    the vertex form by at most the minimum degree.  Disconnected graphs
    return 0.
    """
    n = len(g.vertices)
    if n == 0:
        raise ValueError("empty graph has no Cheeger constant")
    if n == 1:
        return math.inf
    if not g.is_connected():
        return 0.0
    idx = {v: i for i, v in enumerate(g.vertices)}
    adj = np.zeros((n, n))
    for u, v in g.edges:
        adj[idx[u], idx[v]] += 1
        adj[idx[v], idx[u]] += 1
    dinv = 1.0 / np.sqrt(adj.sum(axis=1))
    lap = np.eye(n) - dinv[:, None] * adj * dinv[None, :]
    vals = np.linalg.eigvalsh(lap)
    return max(0.0, float(vals[1]) / 2.0)


def certify_expansion(g: Graph) -> tuple:
    """(method, value) lower-bounding the vertex Cheeger constant.

    Small graphs get the exact constant; larger ones the spectral bound
    scaled by the minimum degree, since vol(S) >= deg_min * |S| makes the
    vertex form at least deg_min times the conductance form.
    """
    if len(g.vertices) <= EXACT_CHEEGER_LIMIT:
        return ("exact", cheeger_exact(g))
    deg_min = min(g.degrees().values())
    if deg_min == 0:
        return ("spectral", 0.0)
    return ("spectral", deg_min * cheeger_spectral_lb(g))


# ------------------------------------------------------------- construction


def build_measurement_graph(
    code: Union[CssCode, StabilizerCode], ell: F2Vector
) -> MeasurementGraph:
    """Graph on the support of a logical, one edge per check overlap pair.

    Every check meeting the support must do so evenly (otherwise X(ell) is
    not a logical and a ValueError surfaces); its overlap is paired off
    sorted-consecutively and each pair becomes an edge attached to that
    check.  For CSS codes the X-checks never contribute, so edges index
    rows of Hz directly.
    """
    if ell.len != code.n:
        raise ValueError("support length != qubit count")
    if isinstance(code, CssCode):
        per_check = []
        for i, row in enumerate(code.hz.row_masks()):
            overlap = F2Vector.from_mask(code.n, row & ell.mask).support
            if len(overlap) % 2:
                raise ValueError(f"Z-check {i} meets the support oddly; not a logical")
            per_check.append(
                [(overlap[j], overlap[j + 1]) for j in range(0, len(overlap), 2)]
            )
    else:
        per_check = yz_overlap_pairs(code, ell)
    vertices = ell.support
    edges = []
    f1 = []
    for i, pairs in enumerate(per_check):
        for a, b in pairs:
            edges.append((a, b))
            f1.append(i)
    graph = Graph(vertices, tuple(edges))
    return MeasurementGraph(
        graph, {q: q for q in vertices}, tuple(f1), certify_expansion(graph)
    )


def verify_measurement_graph(
    mg: MeasurementGraph, code: Union[CssCode, StabilizerCode], ell: F2Vector
) -> bool:
    """Check the vertex/support bijection and per-check pair partitions."""
    if sorted(mg.f0.values()) != list(ell.support):
        return False
    if isinstance(code, CssCode):
        check_masks = code.hz.row_masks()
    else:
        check_masks = [g.z_support.mask for g in code.generators]
    used: dict = {}
    for j, c in enumerate(mg.f1):
        if c is None:
            continue
        if not 0 <= c < len(check_masks):
            return False
        u, v = mg.graph.edges[j]
        used.setdefault(c, []).extend((mg.f0[u], mg.f0[v]))
    for c, qubits in used.items():
        overlap = F2Vector.from_mask(code.n, check_masks[c] & ell.mask).support
        if sorted(qubits) != list(overlap):
            return False
    for c in range(len(check_masks)):
        if c not in used:
            if check_masks[c] & ell.mask:
                return False
    return True


# --------------------------------------------------------------- augmentation


def augment_expander(
    mg: MeasurementGraph,
    degree_cap: int,
    target_h: CheegerValue,
    seed: int,
    rounds: int = 64,
) -> MeasurementGraph:
    """Pad with random matchings until expansion certifies at target_h.

    The input certificate is checked first, so an already-expanding graph
    comes back unchanged.  Each round shuffles the degree-deficient
    vertices and pairs them off consecutively (multi-edges allowed, never
    self-loops); new edges map to no check.  Runs out of budget or head
    room -> CertificationError carrying the best certified value.
    """
    graph = mg.graph
    deg = graph.degrees()
    if degree_cap < graph.max_degree() + 1:
        raise ValueError(
            f"degree cap {degree_cap} leaves no head room over max degree"
            f" {graph.max_degree()}"
        )
    method, value = certify_expansion(graph)
    if value >= target_h:
        return MeasurementGraph(graph, mg.f0, mg.f1, (method, value))
    rng = random.Random(seed)
    edges = list(graph.edges)
    f1 = list(mg.f1)
    best = (method, value)
    for _ in range(rounds):
        deficient = [v for v in graph.vertices if deg[v] < degree_cap]
        rng.shuffle(deficient)
        if len(deficient) < 2:
            break
        for i in range(0, len(deficient) - 1, 2):
            u, v = deficient[i], deficient[i + 1]
            edges.append((u, v))
            f1.append(None)
            deg[u] += 1
            deg[v] += 1
        graph = Graph(mg.graph.vertices, tuple(edges))
        method, value = certify_expansion(graph)
        if value >= target_h:
            return MeasurementGraph(graph, mg.f0, tuple(f1), (method, value))
        if value > best[1]:
            best = (method, value)
    raise CertificationError(target_h, best[0], best[1])


# ------------------------------------------------------------------- export


def to_edgelist_text(mg: MeasurementGraph) -> str:
    """One line per edge: "u v check" with ``*`` marking padding edges."""
    lines = []
    for (u, v), c in zip(mg.graph.edges, mg.f1):
        lines.append(f"{u} {v} {'*' if c is None else c}")
    return "\n".join(lines) + ("\n" if lines else "")


def to_dot(mg: MeasurementGraph) -> str:
    lines = ["graph measurement {"]
    for v in mg.graph.vertices:
        lines.append(f'  "{v}" [qubit="{mg.f0[v]}"];')
    for (u, v), c in zip(mg.graph.edges, mg.f1):
        attr = ' [style=dashed, label="*"]' if c is None else f' [label="{c}"]'
        lines.append(f'  "{u}" -- "{v}"{attr};')
    lines.append("}")
    return "\n".join(lines) + "\n"
