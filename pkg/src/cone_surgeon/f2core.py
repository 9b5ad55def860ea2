"""Sparse linear algebra over GF(2).

Matrices are stored row-wise as Python ints used as bitmasks (bit ``c`` of
row ``r`` is the entry at ``(r, c)``).  Python ints are word-packed bignums,
so XOR-heavy elimination runs on machine words regardless of width; the
sparse ``entries`` view is recovered on demand.  All values are immutable
after construction, so they can be shared freely between threads.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Optional, Sequence


def _mask_bits(mask: int) -> Iterator[int]:
    """Yield set-bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class F2Matrix:
    """An immutable rows x cols matrix over GF(2).

    Parameters
    ----------
    rows, cols:
        Dimensions; either may be zero.
    entries:
        Iterable of (row, col) positions of the nonzero entries.  Positions
        must be in range and duplicate-free.
    """

    __slots__ = ("rows", "cols", "_rowmasks", "_colmasks", "_colsupp")

    def __init__(self, rows: int, cols: int, entries: Iterable[tuple[int, int]] = ()):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimensions")
        masks = [0] * rows
        for r, c in entries:
            if not (0 <= r < rows and 0 <= c < cols):
                raise ValueError(f"entry ({r},{c}) out of range for {rows}x{cols}")
            bit = 1 << c
            if masks[r] & bit:
                raise ValueError(f"duplicate entry ({r},{c})")
            masks[r] |= bit
        self.rows = rows
        self.cols = cols
        self._rowmasks = tuple(masks)
        self._colmasks = None
        self._colsupp = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_rowmasks(cls, rows: int, cols: int, masks: Sequence[int]) -> "F2Matrix":
        """Build directly from per-row bitmasks (fast path, validated)."""
        if len(masks) != rows:
            raise ValueError("mask count != rows")
        limit = 1 << cols
        for m in masks:
            if m < 0 or m >= limit:
                raise ValueError("row mask out of range")
        out = cls.__new__(cls)
        out.rows = rows
        out.cols = cols
        out._rowmasks = tuple(masks)
        out._colmasks = None
        out._colsupp = None
        return out

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[int]], cols: Optional[int] = None) -> "F2Matrix":
        """Build from a list of 0/1 rows."""
        rows = len(dense)
        if cols is None:
            cols = len(dense[0]) if rows else 0
        masks = []
        for row in dense:
            if len(row) != cols:
                raise ValueError("ragged dense input")
            m = 0
            for c, v in enumerate(row):
                if v & 1:
                    m |= 1 << c
            masks.append(m)
        return cls.from_rowmasks(rows, cols, masks)

    @classmethod
    def identity(cls, n: int) -> "F2Matrix":
        return cls.from_rowmasks(n, n, [1 << i for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "F2Matrix":
        return cls.from_rowmasks(rows, cols, [0] * rows)

    # -- views -------------------------------------------------------------

    @property
    def entries(self) -> frozenset[tuple[int, int]]:
        return frozenset(
            (r, c) for r, m in enumerate(self._rowmasks) for c in _mask_bits(m)
        )

    def row_mask(self, r: int) -> int:
        return self._rowmasks[r]

    def row_masks(self) -> tuple[int, ...]:
        return self._rowmasks

    def col_masks(self) -> list[int]:
        """Column bitmasks (bit r of column c is the entry at (r, c))."""
        if self._colmasks is None:
            cols = [0] * self.cols
            for r, m in enumerate(self._rowmasks):
                bit = 1 << r
                while m:
                    low = m & -m
                    cols[low.bit_length() - 1] |= bit
                    m ^= low
            self._colmasks = tuple(cols)
        return list(self._colmasks)

    def row_support(self, r: int) -> tuple[int, ...]:
        return tuple(_mask_bits(self._rowmasks[r]))

    def _col_supports(self) -> list[list[int]]:
        """Per-column row supports, built once and cached (do not mutate)."""
        if self._colsupp is None:
            supp: list[list[int]] = [[] for _ in range(self.cols)]
            for r, m in enumerate(self._rowmasks):
                while m:
                    low = m & -m
                    supp[low.bit_length() - 1].append(r)
                    m ^= low
            self._colsupp = supp
        return self._colsupp

    def col_support(self, c: int) -> tuple[int, ...]:
        return tuple(self._col_supports()[c])

    def row_weight(self, r: int) -> int:
        return self._rowmasks[r].bit_count()

    def col_weight(self, c: int) -> int:
        bit = 1 << c
        return sum(1 for m in self._rowmasks if m & bit)

    def max_row_weight(self) -> int:
        return max((m.bit_count() for m in self._rowmasks), default=0)

    def max_col_weight(self) -> int:
        return max((len(s) for s in self._col_supports()), default=0)

    def nnz(self) -> int:
        return sum(m.bit_count() for m in self._rowmasks)

    def is_zero(self) -> bool:
        return all(m == 0 for m in self._rowmasks)

    # -- algebra -----------------------------------------------------------

    def transpose(self) -> "F2Matrix":
        return F2Matrix.from_rowmasks(self.cols, self.rows, self.col_masks())

    def mul(self, other: "F2Matrix") -> "F2Matrix":
        """Matrix product over GF(2)."""
        if self.cols != other.rows:
            raise ValueError(
                f"dimension mismatch: {self.rows}x{self.cols} @ {other.rows}x{other.cols}"
            )
        orows = other._rowmasks
        out = []
        for m in self._rowmasks:
            acc = 0
            while m:
                low = m & -m
                acc ^= orows[low.bit_length() - 1]
                m ^= low
            out.append(acc)
        return F2Matrix.from_rowmasks(self.rows, other.cols, out)

    def __matmul__(self, other: "F2Matrix") -> "F2Matrix":
        return self.mul(other)

    def add(self, other: "F2Matrix") -> "F2Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("dimension mismatch in add")
        return F2Matrix.from_rowmasks(
            self.rows, self.cols, [a ^ b for a, b in zip(self._rowmasks, other._rowmasks)]
        )

    def __add__(self, other: "F2Matrix") -> "F2Matrix":
        return self.add(other)

    def mul_vec(self, v: "F2Vector") -> "F2Vector":
        if v.len != self.cols:
            raise ValueError("dimension mismatch in mul_vec")
        vm = v.mask
        out = 0
        for r, m in enumerate(self._rowmasks):
            if (m & vm).bit_count() & 1:
                out |= 1 << r
        return F2Vector.from_mask(self.rows, out)

    # -- block assembly ----------------------------------------------------

    @staticmethod
    def hstack(blocks: Sequence["F2Matrix"]) -> "F2Matrix":
        if not blocks:
            raise ValueError("hstack of nothing")
        rows = blocks[0].rows
        if any(b.rows != rows for b in blocks):
            raise ValueError("hstack row mismatch")
        masks = [0] * rows
        shift = 0
        for b in blocks:
            for r, m in enumerate(b._rowmasks):
                masks[r] |= m << shift
            shift += b.cols
        return F2Matrix.from_rowmasks(rows, shift, masks)

    @staticmethod
    def vstack(blocks: Sequence["F2Matrix"]) -> "F2Matrix":
        if not blocks:
            raise ValueError("vstack of nothing")
        cols = blocks[0].cols
        if any(b.cols != cols for b in blocks):
            raise ValueError("vstack col mismatch")
        masks: list[int] = []
        for b in blocks:
            masks.extend(b._rowmasks)
        return F2Matrix.from_rowmasks(len(masks), cols, masks)

    # -- dunder ------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, F2Matrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self._rowmasks == other._rowmasks
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._rowmasks))

    def __repr__(self) -> str:
        return f"F2Matrix({self.rows}x{self.cols}, nnz={self.nnz()})"

    # -- text format -------------------------------------------------------

    def to_text(self) -> str:
        """Serialize: first line "rows cols", then one "r c" line per entry."""
        lines = [f"{self.rows} {self.cols}"]
        for r, m in enumerate(self._rowmasks):
            for c in _mask_bits(m):
                lines.append(f"{r} {c}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "F2Matrix":
        tokens = text.split()
        if len(tokens) < 2 or len(tokens) % 2 != 0:
            raise ValueError("malformed matrix text")
        rows, cols = int(tokens[0]), int(tokens[1])
        pairs = [(int(tokens[i]), int(tokens[i + 1])) for i in range(2, len(tokens), 2)]
        return cls(rows, cols, pairs)


class F2Vector:
    """An immutable length-``len`` vector over GF(2) with sorted support."""

    __slots__ = ("len", "mask")

    def __init__(self, length: int, support: Iterable[int] = ()):
        if length < 0:
            raise ValueError("negative length")
        mask = 0
        for p in support:
            if not 0 <= p < length:
                raise ValueError(f"position {p} out of range for length {length}")
            bit = 1 << p
            if mask & bit:
                raise ValueError(f"duplicate position {p}")
            mask |= bit
        self.len = length
        self.mask = mask

    @classmethod
    def from_mask(cls, length: int, mask: int) -> "F2Vector":
        if mask < 0 or mask >> length:
            raise ValueError("mask out of range")
        out = cls.__new__(cls)
        out.len = length
        out.mask = mask
        return out

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(_mask_bits(self.mask))

    def weight(self) -> int:
        return self.mask.bit_count()

    def __add__(self, other: "F2Vector") -> "F2Vector":
        if self.len != other.len:
            raise ValueError("length mismatch")
        return F2Vector.from_mask(self.len, self.mask ^ other.mask)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, F2Vector) and self.len == other.len and self.mask == other.mask

    def __hash__(self) -> int:
        return hash((self.len, self.mask))

    def __repr__(self) -> str:
        return f"F2Vector(len={self.len}, support={list(self.support)})"


class F2RowSpace:
    """Incrementally maintained row space with lowest-column pivots.

    Used for independence tests and coset reduction.  Rows are kept pivot-
    reduced against each other, so ``reduce`` returns a canonical residue.
    """

    def __init__(self, cols: int):
        self.cols = cols
        self._pivot_rows: dict[int, int] = {}

    def reduce(self, mask: int) -> int:
        rows = self._pivot_rows
        while mask:
            p = (mask & -mask).bit_length() - 1
            row = rows.get(p)
            if row is None:
                return mask
            mask ^= row
        return 0

    def add(self, mask: int) -> bool:
        """Insert a row; returns True if it enlarged the space."""
        residue = self.reduce(mask)
        if residue == 0:
            return False
        p = (residue & -residue).bit_length() - 1
        for q, row in self._pivot_rows.items():
            if row & (1 << p):
                self._pivot_rows[q] = row ^ residue
        self._pivot_rows[p] = residue
        return True

    def contains(self, mask: int) -> bool:
        return self.reduce(mask) == 0

    @property
    def dim(self) -> int:
        return len(self._pivot_rows)


def _rref(masks: Sequence[int], cols: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form with deterministic pivoting.

    Pivots are chosen lowest-column-first, and within each column the lowest
    remaining row wins, so identical inputs always reduce identically.
    Returns (reduced row list, pivot column list).
    """
    rows = list(masks)
    pivots: list[int] = []
    r = 0
    n = len(rows)
    for c in range(cols):
        if r >= n:
            break
        bit = 1 << c
        p = -1
        for i in range(r, n):
            if rows[i] & bit:
                p = i
                break
        if p < 0:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r]
        for i in range(n):
            if i != r and rows[i] & bit:
                rows[i] ^= piv
        pivots.append(c)
        r += 1
    return rows, pivots


def _peel_rank(M: F2Matrix) -> int:
    """Rank by structural peeling plus dense elimination of the core.

    Repeatedly strips rows/columns with exactly one remaining nonzero — each
    strip pins one pivot and removes its row and column exactly, so the count
    is rank-exact — then eliminates whatever core survives.
    """
    row_supp: list[list[int]] = []
    for m in M.row_masks():
        s = []
        while m:
            low = m & -m
            s.append(low.bit_length() - 1)
            m ^= low
        row_supp.append(s)
    col_supp: list[list[int]] = [[] for _ in range(M.cols)]
    for r, supp in enumerate(row_supp):
        for c in supp:
            col_supp[c].append(r)
    row_cnt = [len(s) for s in row_supp]
    col_cnt = [len(s) for s in col_supp]

    alive_r = [True] * M.rows
    alive_c = [True] * M.cols
    stack = [("r", r) for r, n in enumerate(row_cnt) if n == 1]
    stack += [("c", c) for c, n in enumerate(col_cnt) if n == 1]
    pivots = 0

    def kill(r: int, c: int) -> None:
        nonlocal pivots
        pivots += 1
        alive_r[r] = False
        alive_c[c] = False
        for c2 in row_supp[r]:
            if c2 != c and alive_c[c2]:
                col_cnt[c2] -= 1
                if col_cnt[c2] == 1:
                    stack.append(("c", c2))
        for r2 in col_supp[c]:
            if r2 != r and alive_r[r2]:
                row_cnt[r2] -= 1
                if row_cnt[r2] == 1:
                    stack.append(("r", r2))

    while stack:
        kind, idx = stack.pop()
        if kind == "r":
            if not alive_r[idx] or row_cnt[idx] != 1:
                continue
            c = next(c for c in row_supp[idx] if alive_c[c])
            kill(idx, c)
        else:
            if not alive_c[idx] or col_cnt[idx] != 1:
                continue
            r = next(r for r in col_supp[idx] if alive_r[r])
            kill(r, idx)

    live_cols = [c for c in range(M.cols) if alive_c[c] and col_cnt[c]]
    if not live_cols:
        return pivots
    col_pos = {c: i for i, c in enumerate(live_cols)}
    core = []
    for r in range(M.rows):
        if alive_r[r] and row_cnt[r]:
            m = 0
            for c in row_supp[r]:
                if alive_c[c]:
                    m |= 1 << col_pos[c]
            core.append(m)
    _, core_pivots = _rref(core, len(live_cols))
    return pivots + len(core_pivots)


def rank(M: F2Matrix) -> int:
    """Rank of M over GF(2).

    Incidence-shaped matrices (every nonzero column of weight exactly 2) are
    ranked as graphs — rows minus connected components — in near-linear time;
    everything else goes through peeling + elimination.
    """
    supports = M._col_supports()
    if M.cols and all(len(s) in (0, 2) for s in supports):
        return _incidence_rank(M, supports)
    return _peel_rank(M)


def _incidence_rank(M: F2Matrix, supports) -> int:
    """Rank of a vertex-by-edge incidence matrix: rows − #components."""
    parent = list(range(M.rows))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    components = M.rows
    for s in supports:
        if not s:
            continue
        a, b = find(s[0]), find(s[1])
        if a != b:
            parent[a] = b
            components -= 1
    return M.rows - components


def kernel_basis(M: F2Matrix) -> list[F2Vector]:
    """Basis of the null space {v : M v = 0}, one vector per free column."""
    reduced, pivots = _rref(M.row_masks(), M.cols)
    pivot_set = set(pivots)
    pivot_row = {c: reduced[i] for i, c in enumerate(pivots)}
    basis = []
    for free in range(M.cols):
        if free in pivot_set:
            continue
        mask = 1 << free
        fbit = 1 << free
        for c in pivots:
            if pivot_row[c] & fbit:
                mask |= 1 << c
        basis.append(F2Vector.from_mask(M.cols, mask))
    return basis


def solve(M: F2Matrix, b: F2Vector) -> Optional[F2Vector]:
    """Any x with M x = b, or None when the system is inconsistent."""
    if b.len != M.rows:
        raise ValueError(f"rhs length {b.len} != rows {M.rows}")
    aug_bit = 1 << M.cols
    masks = [m | (aug_bit if (b.mask >> r) & 1 else 0) for r, m in enumerate(M.row_masks())]
    reduced, pivots = _rref(masks, M.cols)
    x = 0
    for i, c in enumerate(pivots):
        if reduced[i] & aug_bit:
            x |= 1 << c
    for i in range(len(pivots), len(reduced)):
        if reduced[i] & aug_bit:
            return None
    # rows beyond the pivot count that still carry the augmented bit were
    # caught above; remaining reduced rows are zero.
    return F2Vector.from_mask(M.cols, x)


def row_space(M: F2Matrix) -> F2RowSpace:
    """The row space of M as an incremental reducer."""
    space = F2RowSpace(M.cols)
    for m in M.row_masks():
        space.add(m)
    return space
