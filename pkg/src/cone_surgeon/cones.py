"""Cone complexes that contract a graph through ladders of relabeled trees.

The pipeline embeds a bounded-degree graph into a contractible 2-complex of
near-linear size: route the leaf relabeling with a sorting network
(:func:`swap_schedule`), glue consecutive trees to their interpolation
complex by a mapping cone (:func:`interpolation_cone`,
:func:`sequence_cone`), deform every graph edge onto a leaf-to-leaf path
(:func:`parsimonious_cone`), and finally attach dangling repetition chains
so the original edges themselves become cells (:func:`cellulate`,
:func:`cellulated_cone`).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from cone_surgeon.chain import (
    CellComplex,
    ChainMap,
    graph_complex,
    lift_map,
    mapping_cone,
    shift_up,
)
from cone_surgeon.f2core import F2Matrix
from cone_surgeon.trees import (
    EMPTY_WORD,
    LabeledTree,
    PermSeq,
    Swap,
    Word,
    branching_set,
    build_tree,
    interpolation_cells,
    interpolation_data,
    omega_branch,
    omega_w,
    truncation_set,
    wlen,
    word_str,
)

VARIANTS = ("full", "pruned", "pruned_star")


# ------------------------------------------------------------- direct sums


def _direct_sum(blocks: Sequence[tuple[str, CellComplex]]):
    """Disjoint union of labeled complexes.

    Returns the summed complex and a map block name -> (offset2, offset1,
    offset0) locating each block's cells inside the sum.
    """
    offsets: dict[str, tuple[int, int, int]] = {}
    labels2: list = []
    labels1: list = []
    labels0: list = []
    masks2: list[int] = []
    masks1: list[int] = []
    for name, cx in blocks:
        o2, o1, o0 = len(labels2), len(labels1), len(labels0)
        offsets[name] = (o2, o1, o0)
        masks2.extend(m << o2 for m in cx.d2.row_masks())
        masks1.extend(m << o1 for m in cx.d1.row_masks())
        labels2.extend(f"{name}/{lbl}" for lbl in cx.labels2)
        labels1.extend(f"{name}/{lbl}" for lbl in cx.labels1)
        labels0.extend(f"{name}/{lbl}" for lbl in cx.labels0)
    d2 = F2Matrix.from_rowmasks(len(labels1), len(labels2), masks2)
    d1 = F2Matrix.from_rowmasks(len(labels0), len(labels1), masks1)
    return CellComplex(tuple(labels2), tuple(labels1), tuple(labels0), d2, d1), offsets


# --------------------------------------------------------------- schedules


@dataclass(frozen=True)
class SwapSchedule:
    """Layers of disjoint adjacent transpositions realizing a block rotation.

    Applying ``layers`` in order to an ``h0 + h1``-symbol string moves the
    leading ``h0`` symbols behind the trailing ``h1`` ones.
    """

    h0: int
    h1: int
    layers: tuple[Swap, ...]

    @property
    def h(self) -> int:
        return self.h0 + self.h1

    def rotation_perm(self) -> tuple[int, ...]:
        """Images of the target permutation: slot i moves to (i - h0) mod h."""
        h = self.h
        return tuple((i - self.h0) % h for i in range(h))

    def composed(self) -> PermSeq:
        out = PermSeq.identity(self.h)
        for sig in self.layers:
            out = sig.as_permseq().compose(out)
        return out

    def padded(self, n: int) -> "SwapSchedule":
        """Same rotation with leading trivial layers to reach ``n`` in total."""
        if n < len(self.layers):
            raise ValueError("cannot pad below the current layer count")
        pad = tuple(Swap(self.h) for _ in range(n - len(self.layers)))
        return SwapSchedule(self.h0, self.h1, pad + self.layers)


def swap_schedule(h0: int, h1: int) -> SwapSchedule:
    """Odd-even transposition layers for the two-block rotation.

    Each pass swaps out-of-order neighbors at alternating parities, so every
    layer is a valid non-interacting Swap and at most ``h0 + h1`` layers are
    emitted.  The result is verified by composing the layers.
    """
    if h0 < 1 or h1 < 1:
        raise ValueError("both block lengths must be >= 1")
    h = h0 + h1
    target = tuple((i - h0) % h for i in range(h))
    arr = list(range(h))
    layers: list[Swap] = []
    parity = 0
    for _ in range(h + 1):
        if all(target[v] == pos for pos, v in enumerate(arr)):
            break
        moved = set()
        for k in range(parity, h - 1, 2):
            if target[arr[k]] > target[arr[k + 1]]:
                arr[k], arr[k + 1] = arr[k + 1], arr[k]
                moved.add(k + 1)  # 1-indexed left slot
        if moved:
            layers.append(Swap(h, frozenset(moved)))
        parity ^= 1
    sched = SwapSchedule(h0, h1, tuple(layers))
    if len(layers) > h or sched.composed().perm(h) != target:
        raise AssertionError("transposition routing failed to realize the rotation")
    return sched


def _swap_between(prev: PermSeq, nxt: PermSeq) -> Swap:
    """The Swap layer carrying one label sequence to the next."""
    if prev.h != nxt.h:
        raise ValueError("height mismatch")
    h = prev.h
    delta = nxt.compose(prev.inverse())
    p = delta.perm(h)
    idx = set()
    i = 0
    while i < h:
        if p[i] == i:
            i += 1
        elif i + 1 < h and p[i] == i + 1 and p[i + 1] == i:
            idx.add(i + 1)
            i += 2
        else:
            raise ValueError("labels do not differ by one swap layer")
    sig = Swap(h, frozenset(idx))
    if sig.as_permseq() != delta:
        raise ValueError("labels do not differ by one swap layer")
    return sig


# ------------------------------------------------------- deformation paths


@dataclass(frozen=True)
class CellPath:
    """A walk in a complex: 0-cell labels and the 1-cell labels joining them."""

    vertices: tuple
    edges: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        if len(self.vertices) != len(self.edges) + 1:
            raise ValueError("path has mismatched vertex/edge counts")

    def __len__(self) -> int:
        return len(self.edges)

    def reversed(self) -> "CellPath":
        return CellPath(tuple(reversed(self.vertices)), tuple(reversed(self.edges)))

    def join(self, other: "CellPath") -> "CellPath":
        if self.vertices[-1] != other.vertices[0]:
            raise ValueError("paths do not share an endpoint")
        return CellPath(self.vertices + other.vertices[1:], self.edges + other.edges)

    def retagged(self, side: str = "D") -> "CellPath":
        """The same walk after the host complex was coned (labels re-tagged)."""
        return CellPath(
            tuple((side, v) for v in self.vertices),
            tuple((side, e) for e in self.edges),
        )


@dataclass(frozen=True)
class ConeResult:
    """A host complex carrying a recorded deformation of a graph.

    ``vertex_cells`` sends graph vertices to 0-cells, ``paths`` sends each
    graph edge to its deformation walk, and ``edge_cells`` (populated by
    :func:`cellulate`) sends each graph edge to the single 1-cell whose
    boundary is exactly the edge's endpoint cells.
    """

    complex: CellComplex
    graph: CellComplex
    vertex_cells: dict
    paths: dict
    edge_cells: dict

    @property
    def deformation(self) -> "Deformation":
        return Deformation(
            base=self.graph,
            paths={e: p.vertices for e, p in self.paths.items()},
            length=max((len(p) for p in self.paths.values()), default=0),
            congestion=deformation_congestion(self.paths),
        )


@dataclass(frozen=True)
class Deformation:
    """Summary view of a recorded deformation: walks by vertex, plus stats."""

    base: CellComplex
    paths: dict
    length: int
    congestion: int


def deformation_congestion(paths: Mapping) -> int:
    """Max number of deformation walks through any single 1-cell."""
    counts = Counter(lbl for p in paths.values() for lbl in p.edges)
    return max(counts.values(), default=0)


def graph_max_degree(G: CellComplex) -> int:
    return G.d1.max_row_weight()


def verify_embedding(result: ConeResult) -> bool:
    """Check the recorded deformation/subgraph data against the host.

    Vertex cells must be distinct, every path must be an incident chain of
    host cells joining its edge's endpoint cells, and every cellulated edge
    cell must bound exactly those endpoint cells.
    """
    host, G = result.complex, result.graph
    cells = [result.vertex_cells.get(v) for v in G.labels0]
    if None in cells or len(set(cells)) != len(cells):
        return False
    if any(c not in host.index0 for c in cells):
        return False
    for j, e in enumerate(G.labels1):
        sup = G.d1.col_support(j)
        ends = {result.vertex_cells[G.labels0[r]] for r in sup}
        p = result.paths.get(e)
        cell = result.edge_cells.get(e)
        if p is None and cell is None:
            return False
        if p is not None:
            if {p.vertices[0], p.vertices[-1]} != ends:
                return False
            for k, lbl in enumerate(p.edges):
                if lbl not in host.index1:
                    return False
                col = host.d1.col_support(host.index1[lbl])
                if {host.labels0[r] for r in col} != {p.vertices[k], p.vertices[k + 1]}:
                    return False
        if cell is not None:
            if cell not in host.index1:
                return False
            col = host.d1.col_support(host.index1[cell])
            if {host.labels0[r] for r in col} != ends:
                return False
    return True


# ------------------------------------------------------ interpolation cones


@dataclass(frozen=True)
class _Step:
    """One rung of the ladder: trees related by ``sigma`` plus their
    interpolation complex and its parent bookkeeping."""

    sigma: Swap
    tree_prime: LabeledTree
    tree: LabeledTree
    interp: CellComplex
    vkeys: tuple
    ekeys: tuple
    parents: dict
    depth: dict
    kv: dict
    ke: dict
    b_tau: Optional[frozenset]
    b_sig: Optional[frozenset]


def _make_step(
    tree_prime: LabeledTree,
    tree: LabeledTree,
    sigma: Swap,
    variant: str,
    adjacency: str,
) -> _Step:
    tau = tree.labels
    std = tree.leaves
    interp, vkeys, ekeys, parents = interpolation_data(
        None, tau, sigma, variant, adjacency, std_leaves=std
    )
    depth: dict = {}
    for k in vkeys:
        depth[k] = 0 if k[0] == EMPTY_WORD else depth[parents[k]] + 1
    b_tau = b_sig = None
    if variant == "pruned_star":
        b_tau = branching_set(std)
        b_sig = branching_set(tree_prime.leaves)
    return _Step(
        sigma=sigma,
        tree_prime=tree_prime,
        tree=tree,
        interp=interp,
        vkeys=tuple(vkeys),
        ekeys=tuple(ekeys),
        parents=parents,
        depth=depth,
        kv={k: i for i, k in enumerate(vkeys)},
        ke={k: i for i, k in enumerate(ekeys)},
        b_tau=b_tau,
        b_sig=b_sig,
    )


def _interp_path_edges(parents: dict, depth: dict, a, b) -> list:
    """Interpolation edge keys (one per child vertex) joining vertices a, b."""
    out = []
    while depth[a] > depth[b]:
        out.append(a)
        a = parents[a]
    while depth[b] > depth[a]:
        out.append(b)
        b = parents[b]
    while a != b:
        out.append(a)
        a = parents[a]
        out.append(b)
        b = parents[b]
    return out


def _emit_step(
    step: _Step,
    variant: str,
    adjacency: str,
    off: Mapping[str, int],
    ents1: list,
    ents0: list,
) -> None:
    """Append the attachment entries of one ladder rung.

    Vertices of each tree copy map to the matching tree vertex plus the
    star-collapsed interpolation class of their word.  Edges additionally
    carry the interpolation edges closing the square: under ``balanced``
    adjacency the unique class-to-class path, under ``longest`` the single
    class edge plus the extra edge toward the strictly deeper branching
    truncation of the mirrored word (when that side wins).
    """
    sig = step.sigma
    for j, w in enumerate(step.tree_prime.vertex_words):
        col = off["DTp0"] + j
        ents0.append((off["Tp0"] + j, col))
        ents0.append((off["S0"] + step.kv[sig.star_key(sig.apply_int(w))], col))
    for j, s in enumerate(step.tree.vertex_words):
        col = off["DT0"] + j
        ents0.append((off["T0"] + j, col))
        ents0.append((off["S0"] + step.kv[sig.star_key(s)], col))
    for j, w in enumerate(step.tree_prime.edge_words):
        col = off["DTp1"] + j
        ents1.append((off["Tp1"] + j, col))
        x = sig.apply_int(w)
        if variant != "pruned_star":
            ents1.append((off["S1"] + step.ke[sig.star_key(x)], col))
        elif adjacency == "longest":
            ents1.append((off["S1"] + step.ke[sig.star_key(x)], col))
            a = omega_branch(step.b_tau, x)
            if wlen(a) > wlen(omega_branch(step.b_sig, w)):
                ents1.append((off["S1"] + step.ke[sig.star_key(a)], col))
        else:
            start = sig.star_key(x)
            stop = sig.star_key(sig.apply_int(omega_branch(step.b_sig, w)))
            for k in _interp_path_edges(step.parents, step.depth, start, stop):
                ents1.append((off["S1"] + step.ke[k], col))
    for j, s in enumerate(step.tree.edge_words):
        col = off["DT1"] + j
        ents1.append((off["T1"] + j, col))
        if variant != "pruned_star":
            ents1.append((off["S1"] + step.ke[sig.star_key(s)], col))
        elif adjacency == "longest":
            ents1.append((off["S1"] + step.ke[sig.star_key(s)], col))
            b = sig.apply_int(omega_branch(step.b_sig, sig.apply_int(s)))
            if wlen(b) > wlen(omega_branch(step.b_tau, s)):
                ents1.append((off["S1"] + step.ke[sig.star_key(b)], col))
        else:
            start = sig.star_key(s)
            stop = sig.star_key(omega_branch(step.b_tau, s))
            for k in _interp_path_edges(step.parents, step.depth, start, stop):
                ents1.append((off["S1"] + step.ke[k], col))


def interpolation_cone(
    tree_prime: LabeledTree,
    interp: CellComplex,
    tree: LabeledTree,
    variant: str,
    sigma: Optional[Swap] = None,
    adjacency: Optional[str] = None,
) -> tuple[CellComplex, ChainMap]:
    """Cone of the attachment joining two trees through their interpolation.

    The domain is a fresh copy of each tree; the target is T' + S + T.  The
    swap is recovered from the label difference unless given explicitly.
    ``adjacency`` picks how the attachment's S-edge terms are emitted; by
    default the mode is inferred from the interpolation complex, preferring
    ``longest`` (whose indicator-form terms can fail to commute with the
    boundaries on rare leaf sets — that failure raises; pass ``"balanced"``
    to emit path-form terms instead, valid on every instance).
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if tree.variant != variant or tree_prime.variant != variant:
        raise ValueError("variant mismatch between the trees and the request")
    if tree.h != tree_prime.h:
        raise ValueError("height mismatch")
    if sigma is None:
        sigma = _swap_between(tree.labels, tree_prime.labels)
    elif sigma.as_permseq() != tree_prime.labels.compose(tree.labels.inverse()):
        raise ValueError("sigma does not carry the tree labels to the primed labels")
    if tree.leaves is not None:
        expect = frozenset(sigma.apply_int(w) for w in tree.leaves)
        if tree_prime.leaves != expect:
            raise ValueError("tree leaf sets are not related by the swap")
    tries = ("longest", "balanced") if adjacency is None else (adjacency,)
    step = None
    for adj in tries:
        cand = _make_step(tree_prime, tree, sigma, variant, adj)
        if cand.interp == interp:
            step, adjacency = cand, adj
            break
    if step is None:
        raise ValueError("interpolation complex does not match the trees")
    target, toff = _direct_sum(
        [("Tp", tree_prime.complex), ("S", interp), ("T", tree.complex)]
    )
    domain, doff = _direct_sum(
        [("TpS", tree_prime.complex), ("ST", tree.complex)]
    )
    off = {
        "Tp1": toff["Tp"][1],
        "Tp0": toff["Tp"][2],
        "S1": toff["S"][1],
        "S0": toff["S"][2],
        "T1": toff["T"][1],
        "T0": toff["T"][2],
        "DTp1": doff["TpS"][1],
        "DTp0": doff["TpS"][2],
        "DT1": doff["ST"][1],
        "DT0": doff["ST"][2],
    }
    ents1: list[tuple[int, int]] = []
    ents0: list[tuple[int, int]] = []
    _emit_step(step, variant, adjacency, off, ents1, ents0)
    g1 = F2Matrix(len(target.labels1), len(domain.labels1), ents1)
    g0 = F2Matrix(len(target.labels0), len(domain.labels0), ents0)
    g = lift_map(ChainMap(domain, target, g1=g1, g0=g0))
    return mapping_cone(g), g


def sequence_cone(
    trees: Sequence[LabeledTree],
    variant: str,
    adjacency: str = "balanced",
):
    """Cone over a whole ladder of swap-related trees.

    Returns the cone and, per full-length leaf (as its display word), the
    walk joining that leaf's vertex across every tree: two 1-cells per rung,
    hopping through the rung's interpolation class.  A single tree is
    returned as-is with trivial walks.
    """
    trees = list(trees)
    if not trees:
        raise ValueError("empty tree sequence")
    h = trees[0].h
    for t in trees:
        if t.h != h or t.variant != variant:
            raise ValueError("trees disagree on height or variant")
    if variant == "full":
        displays = [Word.from_packed((1 << h) | b) for b in range(1 << h)]
    else:
        inv0 = trees[0].labels.inverse()
        displays = [Word.from_packed(inv0.apply_int(w)) for w in sorted(trees[0].leaves)]
    vmaps = [
        {w: lbl for w, lbl in zip(t.vertex_words, t.complex.labels0)} for t in trees
    ]
    n = len(trees) - 1
    if n == 0:
        paths = {}
        for d in displays:
            u = trees[0].labels.apply_int(d.packed())
            paths[str(d)] = CellPath((vmaps[0][u],), ())
        return trees[0].complex, paths

    steps: dict[int, _Step] = {}
    for i in range(1, n + 1):
        sig = _swap_between(trees[i - 1].labels, trees[i].labels)
        if trees[i - 1].leaves is not None:
            expect = frozenset(sig.apply_int(w) for w in trees[i - 1].leaves)
            if trees[i].leaves != expect:
                raise ValueError("tree leaf sets are not related by the swaps")
        steps[i] = _make_step(trees[i], trees[i - 1], sig, variant, adjacency)

    tblocks = [(f"T{n}", trees[n].complex)]
    dblocks = []
    for i in range(n, 0, -1):
        tblocks.append((f"S{i}", steps[i].interp))
        tblocks.append((f"T{i - 1}", trees[i - 1].complex))
        dblocks.append((f"T{i}S{i}", trees[i].complex))
        dblocks.append((f"S{i}T{i - 1}", trees[i - 1].complex))
    target, toff = _direct_sum(tblocks)
    domain, doff = _direct_sum(dblocks)
    ents1: list[tuple[int, int]] = []
    ents0: list[tuple[int, int]] = []
    for i in range(1, n + 1):
        off = {
            "Tp1": toff[f"T{i}"][1],
            "Tp0": toff[f"T{i}"][2],
            "S1": toff[f"S{i}"][1],
            "S0": toff[f"S{i}"][2],
            "T1": toff[f"T{i - 1}"][1],
            "T0": toff[f"T{i - 1}"][2],
            "DTp1": doff[f"T{i}S{i}"][1],
            "DTp0": doff[f"T{i}S{i}"][2],
            "DT1": doff[f"S{i}T{i - 1}"][1],
            "DT0": doff[f"S{i}T{i - 1}"][2],
        }
        _emit_step(steps[i], variant, adjacency, off, ents1, ents0)
    g1 = F2Matrix(len(target.labels1), len(domain.labels1), ents1)
    g0 = F2Matrix(len(target.labels0), len(domain.labels0), ents0)
    g = lift_map(ChainMap(domain, target, g1=g1, g0=g0))
    cone = mapping_cone(g)

    paths = {}
    for d in displays:
        u = trees[0].labels.apply_int(d.packed())
        verts = [("D", f"T0/{vmaps[0][u]}")]
        edges = []
        for i in range(1, n + 1):
            step = steps[i]
            u_prev = u
            u = step.sigma.apply_int(u_prev)
            key = step.sigma.star_key(u_prev)
            edges.append(("A", f"S{i}T{i - 1}/{vmaps[i - 1][u_prev]}"))
            verts.append(("D", f"S{i}/{step.interp.labels0[step.kv[key]]}"))
            edges.append(("A", f"T{i}S{i}/{vmaps[i][u]}"))
            verts.append(("D", f"T{i}/{vmaps[i][u]}"))
        paths[str(d)] = CellPath(tuple(verts), tuple(edges))
    return cone, paths


# ------------------------------------------------------- graph deformation


def _graph_data(G: CellComplex):
    """(vertices, edges, endpoints, neighbor map) of a graph complex."""
    if G.labels2:
        raise ValueError("expected a graph (1-complex)")
    verts = list(G.labels0)
    edges = list(G.labels1)
    endpoints = {}
    nbrs: dict = {v: [] for v in verts}
    for j, e in enumerate(edges):
        sup = G.d1.col_support(j)
        if len(sup) != 2:
            raise ValueError(f"edge {e!r} does not have two distinct endpoints")
        a, b = verts[sup[0]], verts[sup[1]]
        endpoints[e] = (a, b)
        nbrs[a].append((b, e))
        nbrs[b].append((a, e))
    return verts, edges, endpoints, nbrs


def _bipartition(verts: Sequence, nbrs: Mapping) -> dict:
    """2-coloring by breadth-first search, deterministic per sorted roots."""
    color: dict = {}
    for root in sorted(verts):
        if root in color:
            continue
        color[root] = 0
        queue = [root]
        while queue:
            v = queue.pop()
            for nb, _ in nbrs[v]:
                if nb not in color:
                    color[nb] = color[v] ^ 1
                    queue.append(nb)
                elif color[nb] == color[v]:
                    raise ValueError("graph is not bipartite")
    return color


def _lcp(words: Iterable[int]) -> int:
    """Longest common prefix of packed words."""
    out = None
    for w in words:
        if out is None:
            out = w
            continue
        while wlen(out) > wlen(w):
            out = omega_w(out)
        v = w
        while wlen(v) > wlen(out):
            v = omega_w(v)
        while out != v:
            out = omega_w(out)
            v = omega_w(v)
    if out is None:
        raise ValueError("no words")
    return out


def _tree_parent(tree: LabeledTree):
    if tree.variant == "pruned_star":
        bset = branching_set(tree.leaves)
        return lambda w: omega_branch(bset, w)
    return omega_w


def parsimonious_cone(
    G: CellComplex,
    variant: str = "pruned_star",
    adjacency: str = "balanced",
) -> ConeResult:
    """Contractible complex hosting a bounded-length deformation of ``G``.

    ``G`` must be bipartite.  Edges become leaf words (part-0 id bits then
    part-1 id bits), the rotation exchanging the two id blocks is routed as
    a swap schedule padded with leading trivial layers to exactly ``h``
    rungs, and each edge deforms to: descend from the part-0 identification
    vertex to the leaf, hop across every rung, ascend to the part-1
    identification vertex.  Full/pruned variants identify vertices with
    their id-prefix cells (walks of length exactly 3h); pruned_star uses the
    deepest shared branching prefix instead, so walks may be shorter.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    verts, edges, endpoints, nbrs = _graph_data(G)
    if not edges:
        raise ValueError("graph has no edges")
    color = _bipartition(verts, nbrs)
    deg = {v: len(nbrs[v]) for v in verts}
    if variant == "pruned_star" and min(deg.values()) < 2:
        raise ValueError("pruned_star deformation needs minimum degree 2")
    if variant == "pruned" and min(deg.values()) < 1:
        raise ValueError("pruned deformation forbids isolated vertices")
    part0 = sorted(v for v in verts if color[v] == 0)
    part1 = sorted(v for v in verts if color[v] == 1)
    sid0 = {v: i for i, v in enumerate(part0)}
    sid1 = {v: i for i, v in enumerate(part1)}
    h0 = max(1, math.ceil(math.log2(max(1, len(part0)))))
    h1 = max(1, math.ceil(math.log2(max(1, len(part1)))))
    h = h0 + h1
    eword = {}
    for e, (a, b) in endpoints.items():
        v0, v1 = (a, b) if color[a] == 0 else (b, a)
        eword[e] = (1 << h) | (sid0[v0] << h1) | sid1[v1]
    displays = [Word.from_packed(w) for w in sorted(set(eword.values()))]

    sched = swap_schedule(h0, h1).padded(h)
    taus = [PermSeq.identity(h)]
    for sig in sched.layers:
        taus.append(sig.as_permseq().compose(taus[-1]))
    leaves_arg = None if variant == "full" else displays
    seq = [build_tree(h, t, leaves_arg, variant) for t in taus]
    cone, leafpaths = sequence_cone(seq, variant, adjacency)
    n = len(sched.layers)

    t0, tn = seq[0], seq[-1]
    vmap0 = {w: lbl for w, lbl in zip(t0.vertex_words, t0.complex.labels0)}
    emap0 = {w: lbl for w, lbl in zip(t0.edge_words, t0.complex.labels1)}
    vmapn = {w: lbl for w, lbl in zip(tn.vertex_words, tn.complex.labels0)}
    emapn = {w: lbl for w, lbl in zip(tn.edge_words, tn.complex.labels1)}
    parent0 = _tree_parent(t0)
    parentn = _tree_parent(tn)
    rot = taus[-1]

    iota0 = {}
    for v in part0:
        if variant == "pruned_star":
            iota0[v] = _lcp(eword[e] for _, e in nbrs[v])
        else:
            iota0[v] = (1 << h0) | sid0[v]
    iota1 = {}
    for v in part1:
        if variant == "pruned_star":
            iota1[v] = _lcp(rot.apply_int(eword[e]) for _, e in nbrs[v])
        else:
            iota1[v] = (1 << h1) | sid1[v]
    vertex_cells = {}
    for v in part0:
        vertex_cells[v] = ("D", f"T0/{vmap0[iota0[v]]}")
    for v in part1:
        vertex_cells[v] = ("D", f"T{n}/{vmapn[iota1[v]]}")

    paths = {}
    for e in edges:
        a, b = endpoints[e]
        v0, v1 = (a, b) if color[a] == 0 else (b, a)
        w = eword[e]
        chain = [w]
        while chain[-1] != iota0[v0]:
            if chain[-1] == EMPTY_WORD:
                raise AssertionError("identification vertex missed in the base tree")
            chain.append(parent0(chain[-1]))
        chain.reverse()
        desc_v = [("D", f"T0/{vmap0[x]}") for x in chain]
        desc_e = [("D", f"T0/{emap0[x]}") for x in chain[1:]]
        climb = [rot.apply_int(w)]
        while climb[-1] != iota1[v1]:
            if climb[-1] == EMPTY_WORD:
                raise AssertionError("identification vertex missed in the top tree")
            climb.append(parentn(climb[-1]))
        asc_v = [("D", f"T{n}/{vmapn[x]}") for x in climb]
        asc_e = [("D", f"T{n}/{emapn[x]}") for x in climb[:-1]]
        mid = leafpaths[word_str(w)]
        paths[e] = CellPath(
            tuple(desc_v) + mid.vertices[1:] + tuple(asc_v[1:]),
            tuple(desc_e) + mid.edges + tuple(asc_e),
        )
    return ConeResult(cone, G, vertex_cells, paths, {})


def bipartite_lift(G: CellComplex):
    """2-subdivision of ``G`` after padding low-degree vertices with chains.

    Extra edges are first added so that every vertex has degree >= 2, then
    every edge (original and padding) is subdivided through a fresh midpoint
    vertex, which makes the result bipartite with parts (vertices,
    midpoints) and midpoint degree exactly 2.  Returns the lifted graph and
    a provenance map original edge -> (first half, midpoint, second half).
    """
    verts, edges, endpoints, nbrs = _graph_data(G)
    if len(verts) < 2:
        raise ValueError("need at least two vertices to pad degrees")
    deg = Counter()
    for a, b in endpoints.values():
        deg[a] += 1
        deg[b] += 1
    slots: list = []
    for v in sorted(verts):
        slots.extend([v] * max(0, 2 - deg[v]))
    existing = set(edges)
    pads: list[tuple] = []
    tail = 0
    while slots:
        a = slots.pop(0)
        j = next((k for k, b in enumerate(slots) if b != a), None)
        if j is None:
            others = [v for v in sorted(verts) if v != a]
            b = others[tail % len(others)]
            tail += 1
        else:
            b = slots.pop(j)
        pads.append((a, b))
    pad_edges = []
    i = 0
    for a, b in pads:
        while f"pad:{i}" in existing:
            i += 1
        pad_edges.append((f"pad:{i}", a, b))
        existing.add(f"pad:{i}")

    lift_verts = list(verts)
    lift_edges = []
    lift_ends = []
    provenance = {}
    for e, (a, b) in list(endpoints.items()) + [(e, (a, b)) for e, a, b in pad_edges]:
        m = f"m:{e}"
        lift_verts.append(m)
        lift_edges.extend([f"{e}:a", f"{e}:b"])
        lift_ends.extend([(a, m), (m, b)])
        provenance[e] = (f"{e}:a", m, f"{e}:b")
    return graph_complex(lift_verts, lift_edges, lift_ends), provenance


# --------------------------------------------------------------- cellulation


def _dangling_chain(nbits: int) -> CellComplex:
    """Path-shaped complex with one open end (trivial homology)."""
    lab1 = tuple(f"1:{i}" for i in range(1, nbits + 1))
    lab0 = tuple(f"0:{i}" for i in range(1, nbits + 1))
    ents = []
    for i in range(1, nbits + 1):
        ents.append((i - 1, i - 1))
        if i + 1 <= nbits:
            ents.append((i, i - 1))
    d1 = F2Matrix(nbits, nbits, ents)
    return CellComplex((), lab1, lab0, F2Matrix.zeros(nbits, 0), d1)


def cellulate(result: ConeResult) -> ConeResult:
    """Attach one dangling chain per deformed edge and take the cone.

    The chain's cells interleave along the recorded walk from both ends, so
    its first 0-cell becomes a 1-cell of the new complex whose boundary is
    exactly the walk's two endpoints: the deformed graph edge reappears as a
    genuine cell.  Homology is unchanged; walks of length 1 already are
    edges and get no chain.
    """
    host = result.complex
    for e in sorted(result.paths):
        p = result.paths[e]
        if len(p.edges) == 0:
            raise ValueError(f"empty deformation walk for edge {e!r}")
        for k, lbl in enumerate(p.edges):
            j = host.index1.get(lbl)
            a = host.index0.get(p.vertices[k])
            b = host.index0.get(p.vertices[k + 1])
            if j is None or a is None or b is None:
                raise ValueError(f"walk of edge {e!r} references unknown cells")
            if set(host.d1.col_support(j)) != {a, b}:
                raise ValueError(f"walk of edge {e!r} is not an incident chain")

    rblocks = []
    hits1 = []  # (block, local 1-cell index, host 1-cell labels)
    hits0 = []  # (block, local 0-cell index, host 0-cell labels)
    edge_cells = {}
    for e in sorted(result.paths):
        p = result.paths[e]
        L = len(p.edges)
        if L == 1:
            edge_cells[e] = p.edges[0]
            continue
        name = f"R[{e}]"
        rblocks.append((name, _dangling_chain(L - 1)))
        V, E = p.vertices, p.edges
        n = L
        for i in range(1, L):
            hits0.append((name, i - 1, (V[i // 2], V[n - (i + 1) // 2 + 1])))
            if i == L - 1:
                m = (n + 1) // 2
                hit = (E[m - 1], E[m])
            elif i % 2 == 1:
                hit = (E[(i - 1) // 2],)
            else:
                hit = (E[n - i // 2],)
            hits1.append((name, i - 1, hit))
        edge_cells[e] = ("A", f"{name}/0:1")

    if not rblocks:
        return ConeResult(
            host,
            result.graph,
            dict(result.vertex_cells),
            dict(result.paths),
            edge_cells,
        )

    domain, doff = _direct_sum(rblocks)
    ents2 = [
        (host.index1[lbl], doff[name][1] + j)
        for name, j, hit in hits1
        for lbl in hit
    ]
    ents1 = [
        (host.index0[lbl], doff[name][2] + j)
        for name, j, hit in hits0
        for lbl in hit
    ]
    g = ChainMap(
        shift_up(domain),
        host,
        g2=F2Matrix(len(host.labels1), len(domain.labels1), ents2),
        g1=F2Matrix(len(host.labels0), len(domain.labels0), ents1),
        shift=-1,
    )
    cone = mapping_cone(g)
    vertex_cells = {v: ("D", lbl) for v, lbl in result.vertex_cells.items()}
    paths = {e: p.retagged() for e, p in result.paths.items()}
    edge_cells = {
        e: (("D", lbl) if len(result.paths[e].edges) == 1 else lbl)
        for e, lbl in edge_cells.items()
    }
    return ConeResult(cone, result.graph, vertex_cells, paths, edge_cells)


def _reduced_join(pa: CellPath, pb: CellPath) -> CellPath:
    """Concatenate two walks, canceling the backtrack at the junction.

    When both walks enter the shared endpoint through the same tree branch
    the doubled tail is null-homotopic (and vanishes as a mod-2 chain), so
    it is stripped before joining.
    """
    if pa.vertices[-1] != pb.vertices[0]:
        raise ValueError("paths do not share an endpoint")
    va, ea = list(pa.vertices), list(pa.edges)
    vb, eb = list(pb.vertices), list(pb.edges)
    cut = 0
    while cut < len(ea) and cut < len(eb) and ea[-1 - cut] == eb[cut]:
        cut += 1
    if cut:
        va, ea = va[: len(va) - cut], ea[: len(ea) - cut]
        vb, eb = vb[cut:], eb[cut:]
    return CellPath(tuple(va) + tuple(vb[1:]), tuple(ea) + tuple(eb))


def cellulated_cone(
    G: CellComplex,
    variant: str = "pruned_star",
    adjacency: str = "balanced",
) -> ConeResult:
    """Host complex containing ``G`` itself as a subgraph.

    Pipeline: pad-and-subdivide to a bipartite graph, deform it into a
    contractible cone, stitch each original edge's two half-walks at the
    midpoint identification, and cellulate so every original edge becomes a
    1-cell with its own endpoints.
    """
    lift, provenance = bipartite_lift(G)
    inner = parsimonious_cone(lift, variant, adjacency)
    vertex_cells = {v: inner.vertex_cells[v] for v in G.labels0}
    paths = {}
    for e in G.labels1:
        ea, mid, eb = provenance[e]
        pa, pb = inner.paths[ea], inner.paths[eb]
        mcell = inner.vertex_cells[mid]
        if pa.vertices[0] == mcell:
            pa = pa.reversed()
        if pb.vertices[-1] == mcell:
            pb = pb.reversed()
        paths[e] = _reduced_join(pa, pb)
    stitched = ConeResult(inner.complex, G, vertex_cells, paths, {})
    return cellulate(stitched)


def cellulated_c0_size(G: CellComplex, variant: str = "pruned_star") -> int:
    """dim C0 of :func:`cellulated_cone` without assembling any matrices.

    Cellulation adds no 0-cells and the ladder cone's 0-cells are exactly
    the target blocks' vertices, so the count is the sum of tree and
    interpolation vertex counts over the padded schedule.  Kept in lockstep
    with the full pipeline (the test suite cross-checks them); used where
    only sizes matter, e.g. scaling tables at sizes too large to multiply
    out.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    lift, _ = bipartite_lift(G)
    verts, edges, endpoints, nbrs = _graph_data(lift)
    if not edges:
        raise ValueError("graph has no edges")
    color = _bipartition(verts, nbrs)
    part0 = sorted(v for v in verts if color[v] == 0)
    part1 = sorted(v for v in verts if color[v] == 1)
    sid0 = {v: i for i, v in enumerate(part0)}
    sid1 = {v: i for i, v in enumerate(part1)}
    h0 = max(1, math.ceil(math.log2(max(1, len(part0)))))
    h1 = max(1, math.ceil(math.log2(max(1, len(part1)))))
    h = h0 + h1
    std = set()
    for e, (a, b) in endpoints.items():
        v0, v1 = (a, b) if color[a] == 0 else (b, a)
        std.add((1 << h) | (sid0[v0] << h1) | sid1[v1])
    std = frozenset(std)

    def tree_vertices(leafset: frozenset) -> int:
        if variant == "full":
            return (1 << (h + 1)) - 1
        if variant == "pruned":
            return len(truncation_set(leafset))
        return len(branching_set(leafset))

    sched = swap_schedule(h0, h1).padded(h)
    tau = PermSeq.identity(h)
    total = tree_vertices(std)
    for sig in sched.layers:
        vkeys, _, _ = interpolation_cells(
            h, tau, sig, None if variant == "full" else std, variant, "balanced"
        )
        total += len(vkeys)
        std = frozenset(sig.apply_int(w) for w in std)
        tau = sig.as_permseq().compose(tau)
        total += tree_vertices(std)
    return total


def naive_cone(G: CellComplex) -> CellComplex:
    """Single-apex cone: one new vertex wired to everything, one face per
    edge.  Contractible but with apex degree |V| (the size baseline)."""
    verts, edges, endpoints, _ = _graph_data(G)
    apex = "apex"
    while apex in verts:
        apex += "+"
    labels0 = tuple(verts) + (apex,)
    spokes = tuple(f"spoke:{v}" for v in verts)
    labels1 = tuple(edges) + spokes
    vidx = {v: i for i, v in enumerate(labels0)}
    ents1 = []
    for j, e in enumerate(edges):
        a, b = endpoints[e]
        ents1.extend([(vidx[a], j), (vidx[b], j)])
    for j, v in enumerate(verts):
        ents1.extend([(vidx[v], len(edges) + j), (vidx[apex], len(edges) + j)])
    labels2 = tuple(f"face:{e}" for e in edges)
    eidx = {e: i for i, e in enumerate(labels1)}
    ents2 = []
    for j, e in enumerate(edges):
        a, b = endpoints[e]
        ents2.extend(
            [(eidx[e], j), (eidx[f"spoke:{a}"], j), (eidx[f"spoke:{b}"], j)]
        )
    return CellComplex(
        labels2,
        labels1,
        labels0,
        F2Matrix(len(labels1), len(labels2), ents2),
        F2Matrix(len(labels0), len(labels1), ents1),
    )
