"""Basis-labeled chain complexes over GF(2) and their mapping cones.

A :class:`CellComplex` is a length-<=3 complex C2 -> C1 -> C0 with labeled
cells.  Degrees that are unused simply carry empty label lists, so graphs
(1-complexes) and codes (2-term complexes) share the same container.

The cone convention follows the degree-lowering form: a :class:`ChainMap`
with ``shift == -1`` sends degree i of the source to degree i-1 of the
target, and :func:`mapping_cone` stacks source and target cells degree-wise
with the block boundary [[d_src, 0], [g, d_tgt]].  Degree-preserving maps
(``shift == 0``) can be converted with :func:`lift_map` when the source is a
1-complex.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Optional

from cone_surgeon.f2core import F2Matrix, rank


def _tuplize(obj: Any) -> Any:
    t = type(obj)
    if t is str or t is int:
        return obj
    if t is tuple:
        if len(obj) == 2:  # the common ("tag", label) shape, shared as-is
            a, b = obj
            if type(a) is str and type(b) is str:
                return obj
            na, nb = _tuplize(a), _tuplize(b)
            return obj if na is a and nb is b else (na, nb)
        return tuple(_tuplize(x) for x in obj)
    if isinstance(obj, (list, tuple)):
        return tuple(_tuplize(x) for x in obj)
    return obj


def _listify(obj: Any) -> Any:
    if isinstance(obj, tuple):
        return [_listify(x) for x in obj]
    return obj


@dataclass(frozen=True)
class CellComplex:
    """Cells and differentials of a based complex C2 -> C1 -> C0.

    d2 is (dim C1) x (dim C2) and d1 is (dim C0) x (dim C1); the square
    condition d1 @ d2 == 0 is *checked by* :func:`verify_complex`, not
    enforced at construction (negative tests build broken complexes on
    purpose).
    """

    labels2: tuple
    labels1: tuple
    labels0: tuple
    d2: F2Matrix
    d1: F2Matrix

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels2", _tuplize(tuple(self.labels2)))
        object.__setattr__(self, "labels1", _tuplize(tuple(self.labels1)))
        object.__setattr__(self, "labels0", _tuplize(tuple(self.labels0)))
        for name, labels in (("labels2", self.labels2), ("labels1", self.labels1), ("labels0", self.labels0)):
            if len(set(labels)) != len(labels):
                raise ValueError(f"duplicate cell labels in {name}")
        if self.d2.rows != len(self.labels1) or self.d2.cols != len(self.labels2):
            raise ValueError(
                f"d2 is {self.d2.rows}x{self.d2.cols}, expected "
                f"{len(self.labels1)}x{len(self.labels2)}"
            )
        if self.d1.rows != len(self.labels0) or self.d1.cols != len(self.labels1):
            raise ValueError(
                f"d1 is {self.d1.rows}x{self.d1.cols}, expected "
                f"{len(self.labels0)}x{len(self.labels1)}"
            )

    @property
    def dims(self) -> tuple[int, int, int]:
        return (len(self.labels2), len(self.labels1), len(self.labels0))

    @cached_property
    def index2(self) -> dict:
        return {lbl: i for i, lbl in enumerate(self.labels2)}

    @cached_property
    def index1(self) -> dict:
        return {lbl: i for i, lbl in enumerate(self.labels1)}

    @cached_property
    def index0(self) -> dict:
        return {lbl: i for i, lbl in enumerate(self.labels0)}

    def __repr__(self) -> str:
        n2, n1, n0 = self.dims
        return f"CellComplex(dims=({n2},{n1},{n0}))"


def graph_complex(vertices, edges, endpoints) -> CellComplex:
    """1-complex of a (multi)graph.

    ``endpoints[i]`` gives the two distinct vertex labels of edge
    ``edges[i]``.
    """
    vertices = tuple(vertices)
    edges = tuple(edges)
    vidx = {v: i for i, v in enumerate(vertices)}
    ents = []
    for j, (a, b) in enumerate(endpoints):
        if a == b:
            raise ValueError(f"self-loop on {a!r}")
        ents.append((vidx[a], j))
        ents.append((vidx[b], j))
    d1 = F2Matrix(len(vertices), len(edges), ents)
    return CellComplex((), edges, vertices, F2Matrix.zeros(len(edges), 0), d1)


@dataclass(frozen=True)
class ChainMap:
    """Per-degree GF(2) matrices between two complexes.

    shift == 0: g_i : source_i -> target_i for i = 2, 1, 0.
    shift == -1: g2 : source_2 -> target_1 and g1 : source_1 -> target_0
    (the degree-lowering form used for cones); g0 must be None.
    Absent matrices are treated as zero maps of the right shape.
    """

    source: CellComplex
    target: CellComplex
    g2: Optional[F2Matrix] = None
    g1: Optional[F2Matrix] = None
    g0: Optional[F2Matrix] = None
    shift: int = 0

    def __post_init__(self) -> None:
        if self.shift not in (0, -1):
            raise ValueError("shift must be 0 or -1")
        s2, s1, s0 = self.source.dims
        t2, t1, t0 = self.target.dims
        if self.shift == 0:
            shapes = {"g2": (t2, s2), "g1": (t1, s1), "g0": (t0, s0)}
        else:
            if self.g0 is not None:
                raise ValueError("shift=-1 map has no g0 (degree -1 target)")
            shapes = {"g2": (t1, s2), "g1": (t0, s1)}
        for name, (r, c) in shapes.items():
            m = getattr(self, name)
            if m is not None and (m.rows, m.cols) != (r, c):
                raise ValueError(f"{name} is {m.rows}x{m.cols}, expected {r}x{c}")

    def mat(self, name: str) -> F2Matrix:
        """Effective matrix for g2/g1/g0 with zeros filled in."""
        m = getattr(self, name)
        if m is not None:
            return m
        s2, s1, s0 = self.source.dims
        t2, t1, t0 = self.target.dims
        if self.shift == 0:
            shapes = {"g2": (t2, s2), "g1": (t1, s1), "g0": (t0, s0)}
        else:
            shapes = {"g2": (t1, s2), "g1": (t0, s1)}
        r, c = shapes[name]
        return F2Matrix.zeros(r, c)


@dataclass(frozen=True)
class WeightDiagram:
    """Max column weights of d2, d2^T, d1, d1^T (w21, q21, w10, q10)."""

    w21: int
    q21: int
    w10: int
    q10: int


def verify_complex(C: CellComplex) -> bool:
    """True iff d1 @ d2 == 0 (dimension mismatches raise at construction).

    Memoized per (immutable) complex, so callers can re-check freely.
    """
    cached = getattr(C, "_verified", None)
    if cached is None:
        cached = C.d1.mul(C.d2).is_zero()
        object.__setattr__(C, "_verified", cached)
    return cached


def homology_dims(C: CellComplex) -> tuple[int, int, int]:
    """(h2, h1, h0) with h_i = dim ker d_i - rank d_{i+1} and d3 = d0 = 0."""
    n2, n1, n0 = C.dims
    r2 = rank(C.d2)
    r1 = rank(C.d1)
    return (n2 - r2, (n1 - r1) - r2, n0 - r1)


def euler_characteristic(C: CellComplex) -> int:
    n2, n1, n0 = C.dims
    return n2 - n1 + n0


def verify_chain_map(g: ChainMap) -> bool:
    """Commutation of g with the differentials at every adjacent degree."""
    src, tgt = g.source, g.target
    if g.shift == 0:
        sq1 = tgt.d1.mul(g.mat("g1")) == g.mat("g0").mul(src.d1)
        sq2 = tgt.d2.mul(g.mat("g2")) == g.mat("g1").mul(src.d2)
        return sq1 and sq2
    # degree-lowering: the single interior square (degree 1 -> 0 commutes
    # trivially because the target has no degree -1).
    return tgt.d1.mul(g.mat("g2")) == g.mat("g1").mul(src.d2)


def shift_up(C: CellComplex) -> CellComplex:
    """Raise a 1-complex one degree: cells move from (1,0) to (2,1)."""
    if C.labels2:
        raise ValueError("shift_up needs an empty top degree")
    return CellComplex(
        C.labels1,
        C.labels0,
        (),
        C.d1,
        F2Matrix.zeros(0, len(C.labels0)),
    )


def lift_map(g: ChainMap) -> ChainMap:
    """Turn a degree-preserving map of 1-complexes into its shifted form.

    The source is shifted up so the same matrices become degree-lowering;
    this is the canonical preprocessing before :func:`mapping_cone`.
    """
    if g.shift != 0:
        raise ValueError("lift_map expects a shift=0 map")
    if g.source.labels2 or g.target.labels2:
        raise ValueError("lift_map expects 1-complexes")
    return ChainMap(
        source=shift_up(g.source),
        target=g.target,
        g2=g.g1,
        g1=g.g0,
        shift=-1,
    )


def mapping_cone(g: ChainMap) -> CellComplex:
    """Cone of a degree-lowering chain map.

    Degree i of the cone is source_i ⊔ target_i (source labels tagged "A",
    target labels tagged "D") with block boundary [[d_src, 0], [g, d_tgt]].
    """
    if g.shift != -1:
        raise ValueError("mapping_cone expects a shift=-1 map (see lift_map)")
    if not (verify_complex(g.source) and verify_complex(g.target)):
        raise ValueError("cone of a non-complex")
    if not verify_chain_map(g):
        raise ValueError("mapping_cone: g does not commute with boundaries")
    src, tgt = g.source, g.target

    def tag(side: str, labels: tuple) -> tuple:
        return tuple((side, lbl) for lbl in labels)

    labels2 = tag("A", src.labels2) + tag("D", tgt.labels2)
    labels1 = tag("A", src.labels1) + tag("D", tgt.labels1)
    labels0 = tag("A", src.labels0) + tag("D", tgt.labels0)
    s2, s1, s0 = src.dims
    t2, t1, t0 = tgt.dims
    d2 = F2Matrix.vstack(
        [
            F2Matrix.hstack([src.d2, F2Matrix.zeros(s1, t2)]),
            F2Matrix.hstack([g.mat("g2"), tgt.d2]),
        ]
    )
    d1 = F2Matrix.vstack(
        [
            F2Matrix.hstack([src.d1, F2Matrix.zeros(s0, t1)]),
            F2Matrix.hstack([g.mat("g1"), tgt.d1]),
        ]
    )
    cone = CellComplex(labels2, labels1, labels0, d2, d1)
    # the verified inputs force d1 @ d2 == 0 blockwise, so record it
    object.__setattr__(cone, "_verified", True)
    return cone


def transpose_complex(C: CellComplex) -> CellComplex:
    """Reverse degrees and transpose differentials (the cocomplex)."""
    return CellComplex(
        C.labels0,
        C.labels1,
        C.labels2,
        C.d1.transpose(),
        C.d2.transpose(),
    )


def weight_audit(C: CellComplex) -> WeightDiagram:
    """Exact max column weights of d2, d2^T, d1, d1^T."""
    return WeightDiagram(
        w21=C.d2.max_col_weight(),
        q21=C.d2.max_row_weight(),
        w10=C.d1.max_col_weight(),
        q10=C.d1.max_row_weight(),
    )


class SnakeNotApplicableError(ValueError):
    """Raised when the rank-nullity consequence does not apply."""


def snake_check(g: ChainMap, cone: CellComplex) -> bool:
    """Rank-nullity consequence of the long exact sequence of a cone.

    For a degree-lowering map whose source is a shifted 1-complex and whose
    target is a 1-complex, with H1 of both rows zero, the cone must satisfy
    dim H1(cone) = dim ker[g0] and dim H0(cone) = dim coker[g0] for the
    induced map [g0] on degree-0 homology of the rows.
    """
    if g.shift != -1:
        raise SnakeNotApplicableError("needs a shift=-1 map")
    src, tgt = g.source, g.target
    if src.labels0 or tgt.labels2:
        raise SnakeNotApplicableError("rows are not 1-complexes")
    # Row homology: the shifted source has H1(row) = h2(src), H0(row) = h1(src);
    # the unshifted target row lives at degrees (1, 0) so its boundary is d1.
    r_src = rank(src.d2)
    r_tgt = rank(tgt.d1)
    h1_src = src.dims[0] - r_src
    h0_src = src.dims[1] - r_src
    h1_tgt = tgt.dims[1] - r_tgt
    h0_tgt = tgt.dims[2] - r_tgt
    if h1_src or h1_tgt:
        raise SnakeNotApplicableError("rows have nonzero H1")
    # Induced map on H0: image dimension = rank([g1 | d_tgt]) - rank(d_tgt).
    stacked = F2Matrix.hstack([g.mat("g1"), tgt.d1])
    im_dim = rank(stacked) - r_tgt
    ker_dim = h0_src - im_dim
    coker_dim = h0_tgt - im_dim
    _, h1_cone, h0_cone = homology_dims(cone)
    return h1_cone == ker_dim and h0_cone == coker_dim


# -------------------------------------------------------------------- JSON


def _matrix_to_json(M: F2Matrix) -> dict:
    return {
        "rows": M.rows,
        "cols": M.cols,
        "entries": sorted([r, c] for r, c in M.entries),
    }


def _matrix_from_json(obj: dict) -> F2Matrix:
    return F2Matrix(obj["rows"], obj["cols"], [tuple(e) for e in obj["entries"]])


def complex_to_json(C: CellComplex) -> str:
    """Stable JSON form: label arrays plus sparse entry lists for d2/d1."""
    payload = {
        "labels2": [_listify(l) for l in C.labels2],
        "labels1": [_listify(l) for l in C.labels1],
        "labels0": [_listify(l) for l in C.labels0],
        "d2": _matrix_to_json(C.d2),
        "d1": _matrix_to_json(C.d1),
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def complex_from_json(text: str) -> CellComplex:
    obj = json.loads(text)
    return CellComplex(
        _tuplize(obj["labels2"]),
        _tuplize(obj["labels1"]),
        _tuplize(obj["labels0"]),
        _matrix_from_json(obj["d2"]),
        _matrix_from_json(obj["d1"]),
    )
