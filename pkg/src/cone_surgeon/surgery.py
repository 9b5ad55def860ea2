"""Grafting a cellulated cone onto a code to measure an X-type logical.

The measurement graph of the logical is deformed into a cone complex whose
0-cells become new X-checks, 1-cells new qubits, and 2-cells new Z-checks.
Attachment maps send graph vertices to their data qubits and check-derived
edges to their Z-checks; the resulting square commutes exactly because the
overlap pairs partition each check's even overlap.  The deformed code is
the transposed mapping cone of that attachment: it keeps all data qubits,
gains the ancilla, loses exactly one logical, and contains X(ell) in its
X-stabilizer row space.

Non-CSS codes and non-X logicals take the local-Clifford detour: rotate the
operator to X-type, run the same construction symplectically, then apply
the adjoint Cliffords so the data qubits come back in their original bases.

Every deformation carries an audit (JSON-ready dict) recording the logical
count drop, stabilizer membership of the measured operator, weight bounds,
homology, the expansion certificate, and distance checks where feasible.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Union

from cone_surgeon.chain import (
    CellComplex,
    ChainMap,
    homology_dims,
    mapping_cone,
    transpose_complex,
    verify_chain_map,
    verify_complex,
    weight_audit,
)
from cone_surgeon.codes import (
    CssCode,
    PauliOp,
    StabilizerCode,
    adjoint_cliffords,
    apply_cliffords,
    distance_bruteforce,
    pauli_to_xtype,
    refute_distance_below,
)
from cone_surgeon.cones import ConeResult, cellulated_cone
from cone_surgeon.f2core import F2Matrix, F2RowSpace, F2Vector, solve
from cone_surgeon.meshgraph import (
    MeasurementGraph,
    augment_expander,
    build_measurement_graph,
)

REFUTATION_WORK_LIMIT = 2_000_000


class SurgeryStageError(RuntimeError):
    """A pipeline failure tagged with the stage that produced it."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@contextmanager
def _stage(name: str) -> Iterator[None]:
    try:
        yield
    except SurgeryStageError:
        raise
    except Exception as exc:
        raise SurgeryStageError(name, str(exc)) from exc


# ---------------------------------------------------------------- attachment


@dataclass(frozen=True)
class AttachmentMaps:
    """The cocomplex maps wiring a cone to a CSS code.

    ``f0``/``f1`` send graph vertices to data qubits and check-derived edges
    to Z-checks (padding edges give zero columns); ``pi0``/``pi1`` project
    cone cells onto the graph cells they embed; ``g0``/``g1`` are the
    composites actually used by the mapping cone.
    """

    cone_complex: CellComplex
    data_complex: CellComplex
    f0: F2Matrix
    f1: F2Matrix
    pi0: F2Matrix
    pi1: F2Matrix
    g0: F2Matrix
    g1: F2Matrix

    @property
    def chain_map(self) -> ChainMap:
        """The degree-lowering map between the transposed complexes."""
        return ChainMap(
            source=transpose_complex(self.cone_complex),
            target=transpose_complex(self.data_complex),
            g2=self.g0,
            g1=self.g1,
            shift=-1,
        )


def build_attachment(
    cone: ConeResult, mg: MeasurementGraph, code: CssCode
) -> AttachmentMaps:
    """Assemble and verify the attachment of a cone to a CSS code.

    The cone must have been built on ``mg``'s graph (vertices are data
    qubits, edge labels index ``mg.f1``).
    """
    gcx = cone.graph
    if gcx.labels0 != tuple(mg.graph.vertices):
        raise ValueError("cone was not built on the measurement graph")
    if len(gcx.labels1) != len(mg.graph.edges):
        raise ValueError("cone graph edge count differs from the measurement graph")
    host = cone.complex
    n0, n1 = len(gcx.labels0), len(gcx.labels1)
    f0 = F2Matrix(
        code.n, n0, [(mg.f0[v], j) for j, v in enumerate(gcx.labels0)]
    )
    f1 = F2Matrix(
        code.hz.rows,
        n1,
        [
            (mg.f1[e], j)
            for j, e in enumerate(gcx.labels1)
            if mg.f1[e] is not None
        ],
    )
    pi0 = F2Matrix(
        n0,
        len(host.labels0),
        [
            (j, host.index0[cone.vertex_cells[v]])
            for j, v in enumerate(gcx.labels0)
        ],
    )
    pi1 = F2Matrix(
        n1,
        len(host.labels1),
        [(j, host.index1[cone.edge_cells[e]]) for j, e in enumerate(gcx.labels1)],
    )
    maps = AttachmentMaps(
        cone_complex=host,
        data_complex=code.to_complex(),
        f0=f0,
        f1=f1,
        pi0=pi0,
        pi1=pi1,
        g0=f0.mul(pi0),
        g1=f1.mul(pi1),
    )
    if not verify_chain_map(maps.chain_map):
        raise ValueError("attachment maps do not commute with the differentials")
    return maps


def deformed_complex(maps: AttachmentMaps) -> CellComplex:
    """The deformed code's complex: transposed mapping cone of the attachment.

    Degree 1 holds the qubits: ancilla (cone 1-cells, tagged "A") first,
    then the data qubits (tagged "D").
    """
    return transpose_complex(mapping_cone(maps.chain_map))


# ------------------------------------------------------------- deformed code


@dataclass(frozen=True)
class DeformedCode:
    """The output of :func:`deform` with its provenance and audit.

    ``data_offset`` is the number of ancilla qubits; data qubit ``q`` of the
    source code sits at index ``data_offset + q``.  CSS inputs populate
    ``complex``/``css``/``attachment``; general stabilizer inputs populate
    ``stabilizer`` (with the adjoint Cliffords already re-applied) and keep
    ``cliffords`` as the record of the X-type reduction.
    """

    source_code: Union[CssCode, StabilizerCode]
    ell: F2Vector
    ell_padded: F2Vector
    data_offset: int
    mg: MeasurementGraph
    cone: ConeResult
    audit: dict
    cliffords: dict
    complex: Optional[CellComplex] = None
    css: Optional[CssCode] = None
    attachment: Optional[AttachmentMaps] = None
    stabilizer: Optional[StabilizerCode] = None


def _point_cone(gcx: CellComplex) -> ConeResult:
    """The cone of a one-vertex graph: the vertex itself, nothing else."""
    (v,) = gcx.labels0
    cx = CellComplex((), (), ("r",), F2Matrix.zeros(0, 0), F2Matrix.zeros(1, 0))
    return ConeResult(cx, gcx, {v: "r"}, {}, {})


def _cone_for(mg: MeasurementGraph, variant: str) -> ConeResult:
    gcx = mg.graph.to_complex()
    if len(gcx.labels0) == 1:
        return _point_cone(gcx)
    return cellulated_cone(gcx, variant)


def _css_weight_bounds(code: CssCode) -> dict:
    """The deformed-code weight diagram bounds in terms of the input's.

    These assume one overlap pair per Z-check and the default degree cap
    (max degree of the augmented graph <= wz*qz); the audit compares the
    honest measured values against them either way.
    """
    wz, qz = code.hz.max_row_weight(), code.hz.max_col_weight()
    wx, qx = code.hx.max_row_weight(), code.hx.max_col_weight()
    return {
        "w21": max(wz + 1, 5),
        "q21": 5 + wz * qz,
        "w10": qx + 1,
        "q10": max(wx, 10 + wz * qz),
    }


def _cheeger_record(mg: MeasurementGraph) -> dict:
    method, value = mg.cheeger_certificate
    rec = {"method": method, "value": float(value)}
    if isinstance(value, Fraction):
        rec["exact"] = str(value)
    return rec


def _refutation_work(n: int, bound: int) -> int:
    return sum(math.comb(n, w) for w in range(1, bound))


def _distance_side(
    mcode: CssCode, side: str, bound: int, cap: Optional[int]
) -> dict:
    """Per-side distance record: exact when small, else a bounded refutation."""
    rec: dict = {"bound": bound, "cap": cap}
    if cap is not None and mcode.n <= cap:
        value = distance_bruteforce(mcode, side)
        rec["method"] = "exact"
        rec["value"] = value
        rec["ok"] = (not isinstance(value, int)) or value >= bound
    elif cap is not None and _refutation_work(mcode.n, bound) <= REFUTATION_WORK_LIMIT:
        proven = refute_distance_below(mcode, side, bound)
        rec["method"] = "refuted_below"
        rec["value"] = bound
        rec["ok"] = proven
    else:
        rec["method"] = "skipped"
        rec["value"] = None
        rec["ok"] = None
    return rec


def verify_deformed(m: DeformedCode, distance_cap: Optional[int] = 24) -> dict:
    """Re-derive the audit of a CSS deformation from its recorded parts.

    Distance inequalities are checked exactly when the deformed code fits
    under ``distance_cap``; otherwise each lower bound is refuted
    exhaustively below the bound when that search is small, and skipped
    only when it is not.
    """
    if m.complex is None or m.css is None or m.attachment is None:
        raise ValueError("verify_deformed needs a CSS deformation")
    code = m.source_code
    assert isinstance(code, CssCode)
    complex_ok = verify_complex(m.complex)
    chain_map_ok = verify_chain_map(m.attachment.chain_map)
    k_before, k_after = code.k, m.css.k
    witness = solve(m.complex.d1.transpose(), m.ell_padded)
    hm = homology_dims(m.complex)
    hmt = homology_dims(transpose_complex(m.complex))
    homology_ok = hm[1] == k_after and hmt[1] == k_after
    weights = weight_audit(m.complex)
    bounds = _css_weight_bounds(code)
    weights_ok = (
        weights.w21 <= bounds["w21"]
        and weights.q21 <= bounds["q21"]
        and weights.w10 <= bounds["w10"]
        and weights.q10 <= bounds["q10"]
    )
    audit: dict = {
        "schema": 1,
        "path": "css",
        "k_before": k_before,
        "k_after": k_after,
        "k_drop_ok": k_after == k_before - 1,
        "complex_ok": complex_ok,
        "chain_map_ok": chain_map_ok,
        "logical_in_stabilizers": witness is not None,
        "homology": {"m": list(hm), "m_transpose": list(hmt), "ok": homology_ok},
        "weights": {
            "w21": weights.w21,
            "q21": weights.q21,
            "w10": weights.w10,
            "q10": weights.q10,
            "bounds": bounds,
            "ok": weights_ok,
        },
        "cheeger": _cheeger_record(m.mg),
    }
    if distance_cap is None or code.n > 28:
        audit["distance"] = {
            "z": {"method": "skipped", "value": None, "cap": distance_cap, "ok": None},
            "x": {"method": "skipped", "value": None, "cap": distance_cap, "ok": None},
            "ok": None,
        }
    else:
        d_z = distance_bruteforce(code, "Z")
        d_x = distance_bruteforce(code, "X")
        hval = m.mg.cheeger_certificate[1]
        hmin = hval if hval < 1 else 1
        if isinstance(hmin, Fraction):
            x_bound = -((-hmin.numerator * d_x) // hmin.denominator)  # ceil
        else:
            x_bound = math.ceil(float(hmin) * d_x)
        z_rec = _distance_side(m.css, "Z", int(d_z), distance_cap)
        x_rec = _distance_side(m.css, "X", int(x_bound), distance_cap)
        oks = [r["ok"] for r in (z_rec, x_rec) if r["ok"] is not None]
        audit["distance"] = {
            "z": z_rec,
            "x": x_rec,
            "ok": all(oks) if oks else None,
        }
    checks = [
        audit["k_drop_ok"],
        audit["complex_ok"],
        audit["chain_map_ok"],
        audit["logical_in_stabilizers"],
        audit["homology"]["ok"],
        audit["weights"]["ok"],
    ]
    if audit["distance"]["ok"] is not None:
        checks.append(audit["distance"]["ok"])
    audit["ok"] = all(checks)
    return audit


# ------------------------------------------------------------------ pipeline


def _default_degree_cap_css(code: CssCode) -> int:
    return code.hz.max_row_weight() * code.hz.max_col_weight()


def _default_degree_cap_stab(code: StabilizerCode) -> int:
    wz = max((g.z_support.weight() for g in code.generators), default=0)
    qz = 0
    for q in range(code.n):
        qz = max(qz, sum(1 for g in code.generators if (g.z_support.mask >> q) & 1))
    return wz * qz


def _deform_css(
    code: CssCode,
    ell: F2Vector,
    variant: str,
    degree_cap: Optional[int],
    target_h,
    seed: int,
    distance_cap: Optional[int],
    strict: bool,
    augment: bool,
) -> DeformedCode:
    with _stage("logical"):
        if ell.len != code.n:
            raise ValueError("support length != qubit count")
        if ell.mask == 0:
            raise ValueError("empty support; nothing to measure")
        from cone_surgeon.f2core import row_space

        if row_space(code.hx).contains(ell.mask):
            raise ValueError("measuring a stabilizer element, not a logical")
        mg = build_measurement_graph(code, ell)
    if augment:
        with _stage("expansion"):
            cap = degree_cap if degree_cap is not None else _default_degree_cap_css(code)
            mg = augment_expander(mg, cap, target_h, seed)
    with _stage("cone"):
        cone = _cone_for(mg, variant)
    with _stage("attachment"):
        maps = build_attachment(cone, mg, code)
        M = deformed_complex(maps)
    offset = len(cone.complex.labels1)
    ell_padded = F2Vector.from_mask(len(M.labels1), ell.mask << offset)
    mcode = CssCode(len(M.labels1), M.d2.transpose(), M.d1)
    out = DeformedCode(
        source_code=code,
        ell=ell,
        ell_padded=ell_padded,
        data_offset=offset,
        mg=mg,
        cone=cone,
        audit={},
        cliffords={},
        complex=M,
        css=mcode,
        attachment=maps,
    )
    with _stage("audit"):
        audit = verify_deformed(out, distance_cap)
        object.__setattr__(out, "audit", audit)
        if strict and not audit["ok"]:
            failed = [k for k in ("k_drop_ok", "complex_ok", "chain_map_ok",
                                  "logical_in_stabilizers") if not audit[k]]
            if not audit["homology"]["ok"]:
                failed.append("homology")
            if not audit["weights"]["ok"]:
                failed.append("weights")
            if audit["distance"]["ok"] is False:
                failed.append("distance")
            raise SurgeryStageError("audit", f"strict mode: failed {failed}")
    return out


def _deform_stabilizer(
    code: StabilizerCode,
    op: PauliOp,
    variant: str,
    degree_cap: Optional[int],
    target_h,
    seed: int,
    strict: bool,
    augment: bool,
) -> DeformedCode:
    with _stage("logical"):
        if op.n != code.n:
            raise ValueError("operator qubit count mismatch")
        if op.x_support.mask == 0 and op.z_support.mask == 0:
            raise ValueError("empty support; nothing to measure")
        span = F2RowSpace(2 * code.n)
        for row in code.symplectic_matrix().row_masks():
            span.add(row)
        if span.contains(op.x_support.mask | (op.z_support.mask << code.n)):
            raise ValueError("measuring a stabilizer element, not a logical")
        xcode, ell, record = pauli_to_xtype(code, op)
        mg = build_measurement_graph(xcode, ell)
    if augment:
        with _stage("expansion"):
            cap = (
                degree_cap
                if degree_cap is not None
                else _default_degree_cap_stab(xcode)
            )
            mg = augment_expander(mg, cap, target_h, seed)
    with _stage("cone"):
        cone = _cone_for(mg, variant)
    with _stage("attachment"):
        host = cone.complex
        n_anc = len(host.labels1)
        n_total = n_anc + code.n
        # per-generator Z padding on the ancilla: the edge cells of its pairs
        gamma = [0] * len(xcode.generators)
        for j, e in enumerate(cone.graph.labels1):
            c = mg.f1[e]
            if c is not None:
                gamma[c] ^= 1 << host.index1[cone.edge_cells[e]]
        gens = [
            PauliOp(
                n_total,
                F2Vector.from_mask(n_total, g.x_support.mask << n_anc),
                F2Vector.from_mask(
                    n_total, (g.z_support.mask << n_anc) | gamma[i]
                ),
            )
            for i, g in enumerate(xcode.generators)
        ]
        zero = F2Vector(n_total)
        for col in host.d2.col_masks():
            gens.append(PauliOp(n_total, zero, F2Vector.from_mask(n_total, col)))
        qubit_of_cell = {
            host.index0[cell]: mg.f0[v] for v, cell in cone.vertex_cells.items()
        }
        for r, row in enumerate(host.d1.row_masks()):
            xmask = row
            if r in qubit_of_cell:
                xmask |= 1 << (n_anc + qubit_of_cell[r])
            gens.append(PauliOp(n_total, F2Vector.from_mask(n_total, xmask), zero))
        pre = StabilizerCode(n_total, tuple(gens))
    with _stage("audit"):
        ell_padded = F2Vector.from_mask(n_total, ell.mask << n_anc)
        span = F2RowSpace(2 * n_total)
        for row in pre.symplectic_matrix().row_masks():
            span.add(row)
        in_stabs = span.contains(ell_padded.mask)
        shifted = {n_anc + q: name for q, name in record.items()}
        final = apply_cliffords(pre, adjoint_cliffords(shifted))
        n_orig = len(code.generators)
        restores = all(
            final.generators[i].x_support.mask >> n_anc == g.x_support.mask
            and final.generators[i].z_support.mask >> n_anc == g.z_support.mask
            and final.generators[i].x_support.mask & ((1 << n_anc) - 1) == 0
            for i, g in enumerate(code.generators)
        )
        k_before, k_after = code.k, final.k
        audit = {
            "schema": 1,
            "path": "stabilizer",
            "k_before": k_before,
            "k_after": k_after,
            "k_drop_ok": k_after == k_before - 1,
            "generators_commute": True,  # enforced by the constructor above
            "logical_in_stabilizers": in_stabs,
            "restores_data_bases": restores,
            "cheeger": _cheeger_record(mg),
        }
        audit["ok"] = (
            audit["k_drop_ok"]
            and audit["logical_in_stabilizers"]
            and audit["restores_data_bases"]
        )
        if strict and not audit["ok"]:
            raise SurgeryStageError("audit", "strict mode: stabilizer audit failed")
    return DeformedCode(
        source_code=code,
        ell=ell,
        ell_padded=ell_padded,
        data_offset=n_anc,
        mg=mg,
        cone=cone,
        audit=audit,
        cliffords=record,
        stabilizer=final,
    )


def deform(
    code: Union[CssCode, StabilizerCode],
    target: Union[PauliOp, F2Vector],
    *,
    variant: str = "pruned_star",
    degree_cap: Optional[int] = None,
    target_h=1,
    seed: int = 0,
    distance_cap: Optional[int] = 24,
    strict: bool = False,
    augment: bool = True,
) -> DeformedCode:
    """Measure a logical by cone surgery and return the audited result.

    CSS codes with an X-type target run the chain-complex pipeline; any
    Pauli target with Y/Z content (or a general stabilizer code) routes
    through the local-Clifford reduction and back.  ``target`` may be the
    X support directly (F2Vector) or a Pauli operator.
    """
    if isinstance(code, CssCode):
        if isinstance(target, F2Vector):
            return _deform_css(
                code, target, variant, degree_cap, target_h, seed,
                distance_cap, strict, augment,
            )
        if isinstance(target, PauliOp):
            if target.z_support.mask == 0:
                return _deform_css(
                    code, target.x_support, variant, degree_cap, target_h,
                    seed, distance_cap, strict, augment,
                )
            return _deform_stabilizer(
                code.as_stabilizer(), target, variant, degree_cap, target_h,
                seed, strict, augment,
            )
        raise TypeError("target must be a PauliOp or an F2Vector")
    if isinstance(code, StabilizerCode):
        if isinstance(target, F2Vector):
            target = PauliOp(code.n, target, F2Vector(code.n))
        if not isinstance(target, PauliOp):
            raise TypeError("target must be a PauliOp or an F2Vector")
        return _deform_stabilizer(
            code, target, variant, degree_cap, target_h, seed, strict, augment
        )
    raise TypeError("code must be a CssCode or a StabilizerCode")
