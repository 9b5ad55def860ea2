"""Labeled binary trees, SWAP machinery, and truncation operators.

Bit strings are packed into ints with a sentinel bit: the string s_1...s_l
is stored as (1 << l) | bits with s_l at the least significant position.
Dropping the last bit is a right shift, prefix tests are shifts, and the
empty string is the bare sentinel.  Interpolation cells that carry a star
("non-branching point") are keyed as (word-with-last-bit-cleared, True).

Public operations speak :class:`Word` (explicit symbols, star mask); the
int layer is exported for the cone builders.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Iterable, Optional

from cone_surgeon.chain import CellComplex
from cone_surgeon.f2core import F2Matrix

EMPTY_WORD = 1  # sentinel only: the empty string


# ----------------------------------------------------------- int word layer


def wlen(w: int) -> int:
    """Length of a packed word."""
    if w <= 0:
        raise ValueError("not a packed word")
    return w.bit_length() - 1


def omega_w(w: int) -> int:
    """Drop the last bit."""
    if w == EMPTY_WORD:
        raise ValueError("empty word has no truncation")
    return w >> 1


def append_w(w: int, bit: int) -> int:
    return (w << 1) | (bit & 1)


def prefix_w(u: int, w: int) -> bool:
    """True iff u is a (non-strict) prefix of w."""
    lu, lw = wlen(u), wlen(w)
    return lu <= lw and (w >> (lw - lu)) == u


def pack_bits(bits: int, length: int) -> int:
    if bits >> length:
        raise ValueError("bits exceed length")
    return (1 << length) | bits


def word_str(w: int) -> str:
    l = wlen(w)
    return format(w - (1 << l), f"0{l}b") if l else ""


def parse_word(text: str) -> int:
    w = EMPTY_WORD
    for ch in text:
        if ch not in "01":
            raise ValueError(f"bad symbol {ch!r}")
        w = append_w(w, int(ch))
    return w


# ------------------------------------------------------------------- Word


@dataclass(frozen=True)
class Word:
    """A string over {0, 1, star}.

    ``bits`` holds the 0/1 symbols (star positions are 0) and ``stars``
    marks the star positions; both use the packed-int geometry with the
    last symbol at bit 0, so truncation and prefix tests stay bit ops.
    """

    length: int
    bits: int = 0
    stars: int = 0

    def __post_init__(self) -> None:
        if self.length < 0:
            raise ValueError("negative length")
        if self.bits >> self.length or self.stars >> self.length:
            raise ValueError("symbols exceed length")
        if self.bits & self.stars:
            raise ValueError("star positions must carry bit 0")

    @classmethod
    def parse(cls, text: str) -> "Word":
        bits = stars = 0
        for ch in text:
            bits <<= 1
            stars <<= 1
            if ch == "1":
                bits |= 1
            elif ch == "*":
                stars |= 1
            elif ch != "0":
                raise ValueError(f"bad symbol {ch!r}")
        return cls(len(text), bits, stars)

    @classmethod
    def from_packed(cls, w: int) -> "Word":
        l = wlen(w)
        return cls(l, w - (1 << l), 0)

    def packed(self) -> int:
        if self.stars:
            raise ValueError("starred word has no plain packing")
        return (1 << self.length) | self.bits

    def __len__(self) -> int:
        return self.length

    def __str__(self) -> str:
        out = []
        for j in range(self.length - 1, -1, -1):
            if (self.stars >> j) & 1:
                out.append("*")
            else:
                out.append("1" if (self.bits >> j) & 1 else "0")
        return "".join(out)

    def omega(self) -> "Word":
        if self.length == 0:
            raise ValueError("empty word has no truncation")
        return Word(self.length - 1, self.bits >> 1, self.stars >> 1)


# ---------------------------------------------------------------- PermSeq


def _invert_perm(p: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(p)
    for j, v in enumerate(p):
        inv[v] = j
    return tuple(inv)


@dataclass(frozen=True)
class PermSeq:
    """One permutation per string length 1..h (0-indexed images)."""

    h: int
    perms: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.perms) != self.h:
            raise ValueError("need one permutation per length 1..h")
        for l, p in enumerate(self.perms, start=1):
            if len(p) != l or sorted(p) != list(range(l)):
                raise ValueError(f"perms[{l - 1}] is not a permutation of {l} items")

    @classmethod
    def identity(cls, h: int) -> "PermSeq":
        return cls(h, tuple(tuple(range(l)) for l in range(1, h + 1)))

    def perm(self, l: int) -> tuple[int, ...]:
        if not 0 <= l <= self.h:
            raise ValueError("length out of range")
        return self.perms[l - 1] if l else ()

    def inverse(self) -> "PermSeq":
        return PermSeq(self.h, tuple(_invert_perm(p) for p in self.perms))

    def compose(self, other: "PermSeq") -> "PermSeq":
        """Entry-wise self after other: (self*other)_l(j) = self_l(other_l(j))."""
        if self.h != other.h:
            raise ValueError("height mismatch")
        return PermSeq(
            self.h,
            tuple(
                tuple(p[q[j]] for j in range(len(p)))
                for p, q in zip(self.perms, other.perms)
            ),
        )

    def apply_int(self, w: int) -> int:
        """Left action on a packed word: (pi s)_j = s_{pi^-1(j)}."""
        l = wlen(w)
        if l > self.h:
            raise ValueError("word longer than height")
        if l == 0:
            return w
        try:
            inv = self._invs[l - 1]
        except AttributeError:
            invs = tuple(_invert_perm(p) for p in self.perms)
            object.__setattr__(self, "_invs", invs)
            inv = invs[l - 1]
        bits = w - (1 << l)
        out = 0
        for j in range(l):
            k = inv[j]
            if (bits >> (l - 1 - k)) & 1:
                out |= 1 << (l - 1 - j)
        return (1 << l) | out


# ------------------------------------------------------------------- Swap


@dataclass(frozen=True)
class Swap:
    """A non-interacting set of adjacent transpositions (i, i+1).

    ``indices`` holds the left positions i (1-indexed).  The induced layer
    permutation at length l applies every transposition that fits, i.e.
    i + 1 <= l; an index with i + 1 > h never transposes anything but still
    marks level i as a star (non-branching) level.
    """

    h: int
    indices: FrozenSet[int] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "indices", frozenset(self.indices))
        for i in self.indices:
            if not 1 <= i <= self.h:
                raise ValueError(f"index {i} outside 1..{self.h}")
            if i + 1 in self.indices:
                raise ValueError(f"interacting indices {i}, {i + 1}")
        object.__setattr__(self, "_idx", tuple(sorted(self.indices)))

    def layer_perm(self, l: int) -> tuple[int, ...]:
        p = list(range(l))
        for i in self.indices:
            if i + 1 <= l:
                p[i - 1], p[i] = p[i], p[i - 1]
        return tuple(p)

    def as_permseq(self) -> PermSeq:
        return PermSeq(self.h, tuple(self.layer_perm(l) for l in range(1, self.h + 1)))

    def apply_int(self, w: int) -> int:
        """Swap bits (i, i+1) for every index that fits inside the word."""
        l = wlen(w)
        for i in self._idx:
            if i + 1 > l:
                break  # indices are sorted; nothing further fits
            a, b = l - i, l - i - 1  # bit positions from the LSB
            x = ((w >> a) ^ (w >> b)) & 1
            w ^= (x << a) | (x << b)
        return w

    def star_key(self, w: int) -> tuple[int, bool]:
        """Cell key of sigma_star(w): last bit masked out on star levels."""
        if wlen(w) in self.indices:
            return (w & ~1, True)
        return (w, False)

    def is_trivial_at(self, l: int) -> bool:
        return all(i + 1 > l for i in self.indices)


# -------------------------------------------------------------- public ops


def apply_label(tau: PermSeq, s: Word) -> Word:
    """tau s = s_{tau^-1(1)} ... s_{tau^-1(l)}."""
    if s.stars:
        raise ValueError("apply_label takes star-free words")
    if len(s) > tau.h:
        raise ValueError("word longer than height")
    return Word.from_packed(tau.apply_int(s.packed()))


def sigma_star(sigma: Swap, s: Word) -> Word:
    """Replace the last symbol by a star when the length is a SWAP index."""
    if len(s) > sigma.h:
        raise ValueError("word longer than height")
    if len(s) in sigma.indices:
        return Word(s.length, s.bits & ~1, s.stars | 1)
    return s


def _std_leaves(leaves: Iterable[Word], tau: PermSeq) -> frozenset[int]:
    out = set()
    for leaf in leaves:
        if isinstance(leaf, Word):
            if len(leaf) != tau.h:
                raise ValueError("leaf length != height")
            out.add(tau.apply_int(leaf.packed()))
        else:
            raise TypeError("leaves must be Words")
    if not out:
        raise ValueError("empty leaf set")
    return frozenset(out)


def truncation_set(std_leaves: frozenset[int]) -> frozenset[int]:
    """All prefixes (including the empty word and the leaves themselves)."""
    out = set()
    for leaf in std_leaves:
        w = leaf
        while w not in out:
            out.add(w)
            if w == EMPTY_WORD:
                break
            w = omega_w(w)
    return frozenset(out)


def branching_set(std_leaves: frozenset[int]) -> frozenset[int]:
    """Strings with both extensions alive, plus the root and leaf conventions."""
    truncs = truncation_set(std_leaves)
    out = {EMPTY_WORD} | set(std_leaves)
    for w in truncs:
        if append_w(w, 0) in truncs and append_w(w, 1) in truncs:
            out.add(w)
    return frozenset(out)


def omega_branch(bset: frozenset[int], w: int) -> int:
    """Longest strictly shorter prefix of w inside bset (root terminates)."""
    t = omega_w(w)
    while t not in bset:
        t = omega_w(t)
    return t


def omega_tilde_key(
    sigma: Swap,
    b_tau: frozenset[int],
    b_sigtau: frozenset[int],
    s: int,
) -> int:
    """Interpolating truncation: longer of Omega(s) and sigma Omega'(sigma s).

    Ties resolve to the plain-side Omega(s); the two star images coincide in
    that case, so the choice cannot change the complex.
    """
    a = omega_branch(b_tau, s)
    b = sigma.apply_int(omega_branch(b_sigtau, sigma.apply_int(s)))
    return a if wlen(a) >= wlen(b) else b


def branching_truncation(leaves: Iterable[Word], tau: PermSeq, s: Word) -> Word:
    """Omega: longest strictly shorter branching prefix of a truncation."""
    std = _std_leaves(leaves, tau)
    truncs = truncation_set(std)
    w = s.packed()
    if w not in truncs:
        raise ValueError(f"{s} is not a truncation of the (labeled) leaf set")
    if w == EMPTY_WORD:
        raise ValueError("the root has no branching truncation")
    return Word.from_packed(omega_branch(branching_set(std), w))


def interpolating_truncation(
    leaves: Iterable[Word], tau: PermSeq, sigma: Swap, s: Word
) -> Word:
    """Omega-tilde of a qualifying string (branching on either side)."""
    if sigma.h != tau.h:
        raise ValueError("height mismatch")
    std = _std_leaves(leaves, tau)
    b_tau = branching_set(std)
    std_sig = frozenset(sigma.apply_int(w) for w in std)
    b_sigtau = branching_set(std_sig)
    w = s.packed()
    if w == EMPTY_WORD:
        raise ValueError("the root has no interpolating truncation")
    if w not in b_tau and sigma.apply_int(w) not in b_sigtau:
        raise ValueError(f"{s} does not qualify: branching on neither side")
    return Word.from_packed(omega_tilde_key(sigma, b_tau, b_sigtau, w))


# ------------------------------------------------------------------- trees


@dataclass(frozen=True)
class LabeledTree:
    """A tree variant realized as a 1-complex, with its word bookkeeping."""

    h: int
    labels: PermSeq
    leaves: Optional[frozenset]  # std-world packed leaf words (None for full)
    variant: str
    complex: CellComplex
    vertex_words: tuple[int, ...]  # std-world packed words, aligned to labels0
    edge_words: tuple[int, ...]  # std-world packed words, aligned to labels1

    @property
    def std_leaves(self) -> Optional[frozenset]:
        return self.leaves


VARIANTS = ("full", "pruned", "pruned_star")


def _tree_cells(h: int, std_leaves: Optional[frozenset], variant: str):
    """(sorted vertex words, parent map) in the standard world."""
    if variant == "full":
        vertices = [EMPTY_WORD]
        frontier = [EMPTY_WORD]
        for _ in range(h):
            frontier = [append_w(w, b) for w in frontier for b in (0, 1)]
            vertices.extend(frontier)
        parent = {w: omega_w(w) for w in vertices if w != EMPTY_WORD}
    elif variant == "pruned":
        vertices = sorted(truncation_set(std_leaves))
        parent = {w: omega_w(w) for w in vertices if w != EMPTY_WORD}
    elif variant == "pruned_star":
        bset = branching_set(std_leaves)
        vertices = sorted(bset)
        parent = {w: omega_branch(bset, w) for w in vertices if w != EMPTY_WORD}
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return sorted(vertices), parent


def build_tree(
    h: int,
    labels: Optional[PermSeq] = None,
    leaves: Optional[Iterable[Word]] = None,
    variant: str = "full",
) -> LabeledTree:
    """Construct a full / pruned / pruned_star tree as a graph complex.

    ``leaves`` are display-form words (the tree's own leaf names); the
    standard-world leaf set is their image under ``labels``.
    """
    if h < 1:
        raise ValueError("height must be >= 1")
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    labels = labels if labels is not None else PermSeq.identity(h)
    if labels.h != h:
        raise ValueError("label height mismatch")
    std: Optional[frozenset] = None
    if variant in ("pruned", "pruned_star"):
        if leaves is None:
            raise ValueError(f"{variant} variant requires leaves")
        std = _std_leaves(leaves, labels)

    vertices, parent = _tree_cells(h, std, variant)
    inv = labels.inverse()
    vlabels = tuple("v:" + word_str(inv.apply_int(w)) for w in vertices)
    vidx = {w: i for i, w in enumerate(vertices)}
    edges = [w for w in vertices if w != EMPTY_WORD]
    elabels = tuple("e:" + word_str(inv.apply_int(w)) for w in edges)
    ents = []
    for j, w in enumerate(edges):
        ents.append((vidx[w], j))
        ents.append((vidx[parent[w]], j))
    d1 = F2Matrix(len(vertices), len(edges), ents)
    cx = CellComplex((), elabels, vlabels, F2Matrix.zeros(len(edges), 0), d1)
    return LabeledTree(h, labels, std, variant, cx, tuple(vertices), tuple(edges))


# ---------------------------------------------------------- interpolations


def _render_starred(inv: PermSeq, key: tuple[int, bool]) -> str:
    """Display label of a (possibly starred) standard-world cell key."""
    w, star = key
    if not star:
        return word_str(inv.apply_int(w))
    l = wlen(w)
    bits = w - (1 << l)
    qinv = _invert_perm(inv.perm(l))
    out = []
    for j in range(l):
        k = qinv[j]  # std position index (0-based) shown at display slot j
        if k == l - 1:
            out.append("*")
        else:
            out.append("1" if (bits >> (l - 1 - k)) & 1 else "0")
    return "".join(out)


def interpolation_cells(
    h: int,
    tau: PermSeq,
    sigma: Swap,
    std_leaves: Optional[frozenset],
    variant: str,
    adjacency: str = "longest",
):
    """(vertex keys, edge keys, parent-key map) of the interpolation complex.

    Keys are (packed std word, star flag); the parameter world is the tau
    (unprimed) standard world.

    For the pruned_star variant the parent of a cell can be chosen between
    two candidates, the key of Omega(s) and the key of sigma Omega'(sigma s).
    ``adjacency="longest"`` always takes the deeper candidate;
    ``adjacency="balanced"`` takes the candidate from the opposite side of
    the one through which the cell qualifies (deeper when it qualifies via
    both), which keeps every tree-to-interpolation hop within two edges.
    """
    if adjacency not in ("longest", "balanced"):
        raise ValueError(f"unknown adjacency {adjacency!r}")
    if variant == "full":
        pool = [EMPTY_WORD]
        frontier = [EMPTY_WORD]
        for _ in range(h):
            frontier = [append_w(w, b) for w in frontier for b in (0, 1)]
            pool.extend(frontier)
        qualifies = set(pool)
    elif variant == "pruned":
        qualifies = set(truncation_set(std_leaves))
    elif variant == "pruned_star":
        b_tau = branching_set(std_leaves)
        std_sig = frozenset(sigma.apply_int(w) for w in std_leaves)
        b_sig = branching_set(std_sig)
        qualifies = set(b_tau) | {sigma.apply_int(w) for w in b_sig}
    else:
        raise ValueError(f"unknown variant {variant!r}")

    vkeys = sorted(
        {sigma.star_key(s) for s in qualifies},
        key=lambda k: (wlen(k[0]), k[0], k[1]),
    )
    ekeys = [k for k in vkeys if k[0] != EMPTY_WORD]
    parents: dict[tuple[int, bool], tuple[int, bool]] = {}
    if variant != "pruned_star":
        for s in qualifies:
            if s != EMPTY_WORD:
                parents[sigma.star_key(s)] = sigma.star_key(omega_w(s))
        return vkeys, ekeys, parents

    # Candidate pairs are intrinsic to the cell: every qualifying preimage
    # of a key yields the same (a, b) because the two candidates are keys of
    # prefixes shared by all preimages.
    cand: dict[tuple[int, bool], tuple[tuple[int, bool], tuple[int, bool]]] = {}
    tau_marked: set[tuple[int, bool]] = set()
    sig_marked: set[tuple[int, bool]] = set()
    for s in sorted(qualifies):
        if s == EMPTY_WORD:
            continue
        key = sigma.star_key(s)
        a = sigma.star_key(omega_branch(b_tau, s))
        b = sigma.star_key(sigma.apply_int(omega_branch(b_sig, sigma.apply_int(s))))
        prev = cand.get(key)
        if prev is None:
            cand[key] = (a, b)
        elif prev != (a, b):
            raise AssertionError(
                f"interpolation parent not well-defined at {key}: {prev} vs {(a, b)}"
            )
        if s in b_tau:
            tau_marked.add(key)
        if sigma.apply_int(s) in b_sig:
            sig_marked.add(key)
    for key, (a, b) in cand.items():
        if a == b:
            parents[key] = a
        elif adjacency == "longest" or (key in tau_marked and key in sig_marked):
            parents[key] = a if wlen(a[0]) >= wlen(b[0]) else b
        else:
            parents[key] = b if key in tau_marked else a
    return vkeys, ekeys, parents


def interpolation_data(
    leaves: Optional[Iterable[Word]],
    tau: PermSeq,
    sigma: Swap,
    variant: str = "full",
    adjacency: str = "longest",
    std_leaves: Optional[frozenset] = None,
) -> tuple[CellComplex, tuple, tuple, dict]:
    """Interpolation complex plus its (vkeys, ekeys, parents) bookkeeping.

    ``std_leaves`` (already tau-applied packed words) skips re-deriving the
    standard-world leaf set from display ``leaves``.
    """
    if tau.h != sigma.h:
        raise ValueError("height mismatch")
    h = tau.h
    if h < 1:
        raise ValueError("height must be >= 1")
    std = None
    if variant in ("pruned", "pruned_star"):
        if std_leaves is not None:
            std = std_leaves
        elif leaves is None:
            raise ValueError(f"{variant} variant requires leaves")
        else:
            std = _std_leaves(leaves, tau)
    vkeys, ekeys, parents = interpolation_cells(h, tau, sigma, std, variant, adjacency)
    inv = tau.inverse()
    vlabels = tuple("v:" + _render_starred(inv, k) for k in vkeys)
    elabels = tuple("e:" + _render_starred(inv, k) for k in ekeys)
    vidx = {k: i for i, k in enumerate(vkeys)}
    ents = []
    for j, k in enumerate(ekeys):
        ents.append((vidx[k], j))
        ents.append((vidx[parents[k]], j))
    d1 = F2Matrix(len(vkeys), len(ekeys), ents)
    cx = CellComplex((), elabels, vlabels, F2Matrix.zeros(len(ekeys), 0), d1)
    return cx, tuple(vkeys), tuple(ekeys), parents


def build_interpolation(
    leaves: Optional[Iterable[Word]],
    tau: PermSeq,
    sigma: Swap,
    variant: str = "full",
    adjacency: str = "longest",
) -> CellComplex:
    """Interpolation complex between trees labeled sigma*tau and tau.

    Vertices/edges are the star-collapsed words; adjacency truncates by
    omega (full, pruned) or by the interpolating truncation (pruned_star,
    where ``adjacency`` picks between the two candidate parents, see
    :func:`interpolation_cells`).
    """
    return interpolation_data(leaves, tau, sigma, variant, adjacency)[0]
