"""Stabilizer codes over GF(2): CSS complexes, logicals, distance, Cliffords.

A CSS code is the three-term complex Z-checks -> qubits -> X-checks; its
homology representatives are the logical operators and the systolic distance
is the minimum weight over nontrivial classes.  General stabilizer codes are
kept in phaseless symplectic form; single-qubit Cliffords act as the six
invertible 2x2 matrices on the (x, z) bit pair, which is exactly enough to
rotate any Pauli logical into X-type and back.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Union

from cone_surgeon.chain import CellComplex
from cone_surgeon.f2core import (
    F2Matrix,
    F2Vector,
    kernel_basis,
    rank,
    row_space,
)

NO_LOGICALS = "no_logicals"
EXCEEDS_CAP = "exceeds_cap"

_BRUTE_FORCE_LIMIT = 28


# -------------------------------------------------------------------- codes


@dataclass(frozen=True)
class CssCode:
    """A CSS code given by its Z- and X-check matrices (checks x qubits)."""

    n: int
    hz: F2Matrix
    hx: F2Matrix

    def __post_init__(self) -> None:
        if self.hz.cols != self.n or self.hx.cols != self.n:
            raise ValueError("check matrices must have one column per qubit")
        if not self.hx.mul(self.hz.transpose()).is_zero():
            raise ValueError("X and Z checks do not commute")

    @property
    def k(self) -> int:
        return self.n - rank(self.hz) - rank(self.hx)

    def to_complex(self) -> CellComplex:
        """The code as a complex: Z-checks (2) -> qubits (1) -> X-checks (0)."""
        labels2 = tuple(f"z{i}" for i in range(self.hz.rows))
        labels1 = tuple(f"q{i}" for i in range(self.n))
        labels0 = tuple(f"x{i}" for i in range(self.hx.rows))
        return CellComplex(labels2, labels1, labels0, self.hz.transpose(), self.hx)

    def as_stabilizer(self) -> "StabilizerCode":
        zero = F2Vector(self.n)
        gens = [
            PauliOp(self.n, F2Vector.from_mask(self.n, m), zero)
            for m in self.hx.row_masks()
        ]
        gens += [
            PauliOp(self.n, zero, F2Vector.from_mask(self.n, m))
            for m in self.hz.row_masks()
        ]
        return StabilizerCode(self.n, tuple(gens))


@dataclass(frozen=True)
class PauliOp:
    """A phaseless Pauli operator in symplectic (x, z) support form."""

    n: int
    x_support: F2Vector
    z_support: F2Vector

    def __post_init__(self) -> None:
        if self.x_support.len != self.n or self.z_support.len != self.n:
            raise ValueError("support length != qubit count")

    def weight(self) -> int:
        return (self.x_support.mask | self.z_support.mask).bit_count()

    def commutes(self, other: "PauliOp") -> bool:
        return symplectic_product(self, other) == 0


def symplectic_product(a: PauliOp, b: PauliOp) -> int:
    if a.n != b.n:
        raise ValueError("qubit count mismatch")
    return (
        (a.x_support.mask & b.z_support.mask).bit_count()
        + (a.z_support.mask & b.x_support.mask).bit_count()
    ) % 2


@dataclass(frozen=True)
class StabilizerCode:
    """A stabilizer code as a tuple of pairwise-commuting generators."""

    n: int
    generators: tuple[PauliOp, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "generators", tuple(self.generators))
        for g in self.generators:
            if g.n != self.n:
                raise ValueError("generator qubit count mismatch")
        for i, a in enumerate(self.generators):
            for j in range(i + 1, len(self.generators)):
                if not a.commutes(self.generators[j]):
                    raise ValueError(f"generators {i} and {j} do not commute")

    @property
    def k(self) -> int:
        return self.n - rank(self.symplectic_matrix())

    def symplectic_matrix(self) -> F2Matrix:
        """Generators as rows of a (checks x 2n) matrix, x half then z half."""
        masks = [
            g.x_support.mask | (g.z_support.mask << self.n) for g in self.generators
        ]
        return F2Matrix.from_rowmasks(len(masks), 2 * self.n, masks)


# ----------------------------------------------------------------- fixtures


def four_two_two() -> CssCode:
    """The [[4,2,2]] code: one all-ones check of each type."""
    row = F2Matrix.from_dense([[1, 1, 1, 1]])
    return CssCode(4, row, row)


def steane() -> CssCode:
    """The Steane [[7,1,3]] code: Hamming(7,4) checks on both sides."""
    ham = F2Matrix.from_dense(
        [
            [0, 0, 0, 1, 1, 1, 1],
            [0, 1, 1, 0, 0, 1, 1],
            [1, 0, 1, 0, 1, 0, 1],
        ]
    )
    return CssCode(7, ham, ham)


# ----------------------------------------------------------------- logicals


def _side_matrices(code: CssCode, side: str) -> tuple[F2Matrix, F2Matrix]:
    """(commute-with, modulo) check matrices for one logical side."""
    if side.upper() == "Z":
        return code.hx, code.hz
    if side.upper() == "X":
        return code.hz, code.hx
    raise ValueError(f"side must be X or Z, not {side!r}")


def logical_reps(code: CssCode, side: str) -> list[F2Vector]:
    """Representatives of a homology basis: ker(other side) mod own stabilizers."""
    commute_with, modulo = _side_matrices(code, side)
    span = row_space(modulo)
    out = []
    for v in kernel_basis(commute_with):
        red = span.reduce(v.mask)
        if red and span.add(red):
            out.append(F2Vector.from_mask(code.n, red))
    return out


def _weight_ordered_logical(
    code: CssCode, side: str, max_weight: int
) -> Optional[int]:
    """Smallest weight of a logical rep with weight <= max_weight, else None."""
    commute_with, modulo = _side_matrices(code, side)
    checks = commute_with.row_masks()
    span = row_space(modulo)
    for w in range(1, max_weight + 1):
        for supp in combinations(range(code.n), w):
            mask = 0
            for i in supp:
                mask |= 1 << i
            if any((row & mask).bit_count() & 1 for row in checks):
                continue
            if span.contains(mask):
                continue
            return w
    return None


def distance_bruteforce(
    code: CssCode, side: str, cap: Optional[int] = None
) -> Union[int, str]:
    """Exact systolic distance by increasing-weight enumeration.

    Returns the minimum weight over nontrivial logical classes, the
    ``no_logicals`` sentinel when k = 0, or ``exceeds_cap`` when every
    weight up to ``cap`` is clean.  Without a cap the qubit count is
    limited to keep the enumeration feasible.
    """
    if cap is None:
        if code.n > _BRUTE_FORCE_LIMIT:
            raise ValueError(
                f"n = {code.n} too large for uncapped enumeration; pass a cap"
            )
        cap = code.n
    if code.k == 0:
        return NO_LOGICALS
    found = _weight_ordered_logical(code, side, cap)
    return EXCEEDS_CAP if found is None else found


def refute_distance_below(code: CssCode, side: str, bound: int) -> bool:
    """True when no logical of weight < ``bound`` exists (a proof d >= bound).

    Exhausts every support of weight 1..bound-1, so it stays cheap for the
    small bounds used to compare against a reference code's distance even
    when the full distance enumeration would be out of reach.
    """
    if bound <= 1:
        return True
    return _weight_ordered_logical(code, side, bound - 1) is None


# ------------------------------------------------------------ Pauli support


_BASIS_FROM_BITS = {(1, 0): "X", (1, 1): "Y", (0, 1): "Z"}


def pauli_weight_support(op: PauliOp) -> tuple[tuple[int, ...], dict]:
    """Support qubits and the per-qubit local basis of a Pauli operator."""
    basis = {}
    for q in range(op.n):
        bits = ((op.x_support.mask >> q) & 1, (op.z_support.mask >> q) & 1)
        if bits != (0, 0):
            basis[q] = _BASIS_FROM_BITS[bits]
    return tuple(sorted(basis)), basis


# --------------------------------------------------------- local Cliffords


# (x', z') = A @ (x, z) over GF(2); the six elements of GL(2, F2).
CLIFFORDS = {
    "id": ((1, 0), (0, 1)),
    "H": ((0, 1), (1, 0)),
    "S": ((1, 0), (1, 1)),
    "HS": ((1, 1), (1, 0)),
    "SH": ((0, 1), (1, 1)),
    "HSH": ((1, 1), (0, 1)),
}

# H and S are involutions over GF(2); the 3-cycles invert each other.
CLIFFORD_INVERSE = {
    "id": "id",
    "H": "H",
    "S": "S",
    "HS": "SH",
    "SH": "HS",
    "HSH": "HSH",
}

# the Clifford conjugation sending the local Pauli to X: H swaps X and Z,
# and SH (the 3-cycle X -> Z -> Y -> X) carries Y to X without a phase
_TO_X = {"X": "id", "Y": "SH", "Z": "H"}


def _conjugate_op(op: PauliOp, qubit: int, which: str) -> PauliOp:
    a = CLIFFORDS[which]
    x = (op.x_support.mask >> qubit) & 1
    z = (op.z_support.mask >> qubit) & 1
    nx = (a[0][0] * x) ^ (a[0][1] * z)
    nz = (a[1][0] * x) ^ (a[1][1] * z)
    xm = (op.x_support.mask & ~(1 << qubit)) | (nx << qubit)
    zm = (op.z_support.mask & ~(1 << qubit)) | (nz << qubit)
    return PauliOp(
        op.n, F2Vector.from_mask(op.n, xm), F2Vector.from_mask(op.n, zm)
    )


def local_clifford_conjugate(
    code: StabilizerCode, qubit: int, which: str
) -> StabilizerCode:
    """Conjugate every generator by a single-qubit Clifford."""
    if which not in CLIFFORDS:
        raise ValueError(f"unknown Clifford {which!r}")
    if not 0 <= qubit < code.n:
        raise ValueError(f"qubit {qubit} out of range")
    return StabilizerCode(
        code.n, tuple(_conjugate_op(g, qubit, which) for g in code.generators)
    )


def apply_cliffords(code: StabilizerCode, record: dict) -> StabilizerCode:
    """Apply a per-qubit Clifford record (as produced by pauli_to_xtype)."""
    out = code
    for qubit in sorted(record):
        out = local_clifford_conjugate(out, qubit, record[qubit])
    return out


def adjoint_cliffords(record: dict) -> dict:
    """The inverse record, for mapping back after surgery."""
    return {q: CLIFFORD_INVERSE[name] for q, name in record.items()}


def pauli_to_xtype(
    code: StabilizerCode, op: PauliOp
) -> tuple[StabilizerCode, F2Vector, dict]:
    """Rotate a Pauli logical to X-type by per-qubit Cliffords.

    Returns the conjugated code, the X support of the rotated operator, and
    the per-qubit record whose adjoint restores the original bases.
    """
    if op.n != code.n:
        raise ValueError("qubit count mismatch")
    for i, g in enumerate(code.generators):
        if not op.commutes(g):
            raise ValueError(f"operator anticommutes with generator {i}")
    _, basis = pauli_weight_support(op)
    record = {q: _TO_X[b] for q, b in basis.items() if b != "X"}
    ell = F2Vector.from_mask(code.n, op.x_support.mask | op.z_support.mask)
    return apply_cliffords(code, record), ell, record


def yz_overlap_pairs(code: StabilizerCode, ell: F2Vector) -> list:
    """Per-generator pairing of the Y/Z-acting overlap with a support.

    Each generator's Y/Z support must meet ``ell`` evenly (that is exactly
    X(ell) commuting with it); the intersection is paired off sorted and
    consecutive, one list of pairs per generator.
    """
    if ell.len != code.n:
        raise ValueError("support length != qubit count")
    out = []
    for i, g in enumerate(code.generators):
        overlap = F2Vector.from_mask(code.n, g.z_support.mask & ell.mask).support
        if len(overlap) % 2:
            raise ValueError(f"generator {i} meets the support oddly; not a logical")
        out.append([(overlap[j], overlap[j + 1]) for j in range(0, len(overlap), 2)])
    return out


# --------------------------------------------------------------------- I/O


def matrix_from_alist(text: str) -> F2Matrix:
    """Parse the MacKay alist format (first line: columns rows)."""
    tokens = [int(t) for t in text.split()]
    if len(tokens) < 4:
        raise ValueError("alist too short")
    n, m = tokens[0], tokens[1]
    if n <= 0 or m <= 0:
        raise ValueError("alist dimensions must be positive")
    pos = 2
    maxcol, maxrow = tokens[pos], tokens[pos + 1]
    pos += 2
    col_w = tokens[pos : pos + n]
    pos += n
    row_w = tokens[pos : pos + m]
    pos += m
    if len(col_w) != n or len(row_w) != m:
        raise ValueError("alist truncated in the weight lists")
    entries = []
    for c in range(n):
        block = tokens[pos : pos + maxcol]
        pos += maxcol
        live = [r for r in block if r != 0]
        if len(live) != col_w[c]:
            raise ValueError(f"column {c} weight mismatch")
        entries.extend((r - 1, c) for r in live)
    # the row blocks are redundant; validate them when present
    if pos + m * maxrow <= len(tokens):
        seen = {(r, c) for r, c in entries}
        for r in range(m):
            block = tokens[pos : pos + maxrow]
            pos += maxrow
            live = [c for c in block if c != 0]
            if len(live) != row_w[r]:
                raise ValueError(f"row {r} weight mismatch")
            for c in live:
                if (r, c - 1) not in seen:
                    raise ValueError("row list contradicts the column lists")
    return F2Matrix(m, n, entries)


def matrix_to_alist(mat: F2Matrix) -> str:
    """Render in MacKay alist format, rows padded with zeros."""
    cols = [mat.col_support(c) for c in range(mat.cols)]
    rows = [mat.row_support(r) for r in range(mat.rows)]
    maxcol = max((len(s) for s in cols), default=0)
    maxrow = max((len(s) for s in rows), default=0)
    lines = [
        f"{mat.cols} {mat.rows}",
        f"{maxcol} {maxrow}",
        " ".join(str(len(s)) for s in cols),
        " ".join(str(len(s)) for s in rows),
    ]
    for s in cols:
        lines.append(" ".join([str(r + 1) for r in s] + ["0"] * (maxcol - len(s))))
    for s in rows:
        lines.append(" ".join([str(c + 1) for c in s] + ["0"] * (maxrow - len(s))))
    return "\n".join(lines) + "\n"


def stabilizer_from_symplectic_text(text: str) -> StabilizerCode:
    """Read a stabilizer code from a 2n-column matrix (x half, z half)."""
    mat = F2Matrix.from_text(text)
    if mat.cols % 2:
        raise ValueError("symplectic matrix needs an even column count")
    n = mat.cols // 2
    low = (1 << n) - 1
    gens = tuple(
        PauliOp(n, F2Vector.from_mask(n, m & low), F2Vector.from_mask(n, m >> n))
        for m in mat.row_masks()
    )
    return StabilizerCode(n, gens)


def stabilizer_to_symplectic_text(code: StabilizerCode) -> str:
    return code.symplectic_matrix().to_text()


def css_from_alists(hz_text: str, hx_text: str) -> CssCode:
    hz = matrix_from_alist(hz_text)
    hx = matrix_from_alist(hx_text)
    if hz.cols != hx.cols:
        raise ValueError("check matrices disagree on the qubit count")
    return CssCode(hz.cols, hz, hx)
