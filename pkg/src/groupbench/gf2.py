"""GF(2) linear algebra on int-bitmask rows, plus matrix-group closure.

Vectors are ints (bit i = coordinate i).  Matrices are tuples of row
bitmasks and act on ROW vectors: ``v -> v . M`` is the XOR of the rows of
M selected by the set bits of v.  With this convention ``(v . A) . B =
v . (A B)`` where ``A B = mat_mul(A, B)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np


class ClosureCapExceeded(RuntimeError):
    """Matrix-group closure grew past the configured cap."""

    def __init__(self, cap: int, partial_size: int):
        super().__init__(
            f"closure exceeded cap {cap}: at least {partial_size} elements"
        )
        self.cap = cap
        self.partial_size = partial_size


Matrix = tuple  # tuple[int, ...], one int bitmask per row


def vec_apply(rows: Sequence[int], v: int) -> int:
    """Apply a matrix to a row vector: XOR of rows at the set bits of v."""
    out = 0
    while v:
        low = v & -v
        out ^= rows[low.bit_length() - 1]
        v ^= low
    return out


def mat_identity(dim: int) -> Matrix:
    return tuple(1 << i for i in range(dim))


def mat_mul(a: Sequence[int], b: Sequence[int]) -> Matrix:
    """Matrix product: row i of a.b is (row i of a) . b."""
    return tuple(vec_apply(b, r) for r in a)


def mat_rank(rows: Iterable[int], dim: int) -> int:
    work = list(rows)
    rank = 0
    row_idx = 0
    for col in range(dim):
        pivot = None
        for r in range(row_idx, len(work)):
            if (work[r] >> col) & 1:
                pivot = r
                break
        if pivot is None:
            continue
        work[row_idx], work[pivot] = work[pivot], work[row_idx]
        for r in range(len(work)):
            if r != row_idx and ((work[r] >> col) & 1):
                work[r] ^= work[row_idx]
        rank += 1
        row_idx += 1
        if row_idx == len(work):
            break
    return rank


def mat_inverse(rows: Sequence[int], dim: int) -> Optional[Matrix]:
    """Inverse over GF(2) via augmented elimination, or None if singular."""
    work = list(rows)
    aug = [1 << i for i in range(dim)]
    row_idx = 0
    for col in range(dim):
        pivot = None
        for r in range(row_idx, dim):
            if (work[r] >> col) & 1:
                pivot = r
                break
        if pivot is None:
            return None
        work[row_idx], work[pivot] = work[pivot], work[row_idx]
        aug[row_idx], aug[pivot] = aug[pivot], aug[row_idx]
        for r in range(dim):
            if r != row_idx and ((work[r] >> col) & 1):
                work[r] ^= work[row_idx]
                aug[r] ^= aug[row_idx]
        row_idx += 1
    # work is now a column permutation of the identity; undo it
    inv = [0] * dim
    for r in range(dim):
        col = work[r].bit_length() - 1
        inv[col] = aug[r]
    return tuple(inv)


def is_invertible(rows: Sequence[int], dim: int) -> bool:
    return len(rows) == dim and mat_rank(rows, dim) == dim


def in_span(v: int, basis: Sequence[int]) -> bool:
    """Membership of v in the span of an arbitrary family of vectors."""
    echelon: list[int] = []
    for b in basis:
        cur = b
        for e in echelon:
            if cur and cur.bit_length() == e.bit_length():
                cur ^= e
        if cur:
            echelon.append(cur)
            echelon.sort(key=int.bit_length, reverse=True)
    residue = v
    for e in echelon:
        if residue and residue.bit_length() == e.bit_length():
            residue ^= e
    return residue == 0


def complete_to_basis(
    vectors: Sequence[int], dim: int, candidates: Optional[Iterable[int]] = None
) -> list[int]:
    """Greedily extend an independent family to a basis of GF(2)^dim.

    Candidates are tried in order (default: the standard basis e_0..e_{dim-1}).
    Raises ValueError if the input family is dependent or cannot be completed.
    """
    echelon: list[int] = []

    def reduce(v: int) -> int:
        cur = v
        for e in echelon:
            if cur and cur.bit_length() == e.bit_length():
                cur ^= e
        return cur

    def insert(v: int) -> None:
        cur = reduce(v)
        if cur == 0:
            raise ValueError("dependent vector in basis completion")
        echelon.append(cur)
        echelon.sort(key=int.bit_length, reverse=True)

    out = list(vectors)
    for v in vectors:
        insert(v)
    if candidates is None:
        candidates = (1 << i for i in range(dim))
    for c in candidates:
        if len(out) == dim:
            break
        if reduce(c) != 0:
            insert(c)
            out.append(c)
    if len(out) != dim:
        raise ValueError("could not complete to a basis")
    return out


@dataclass(frozen=True)
class Gf2Automorphism:
    """Invertible matrix over GF(2) acting on row vectors of length dim."""

    dim: int
    rows: Matrix

    def __post_init__(self):
        if len(self.rows) != self.dim:
            raise ValueError(f"expected {self.dim} rows, got {len(self.rows)}")
        if not is_invertible(self.rows, self.dim):
            raise ValueError("matrix is not invertible over GF(2)")

    def apply(self, v: int) -> int:
        return vec_apply(self.rows, v)

    def compose(self, other: "Gf2Automorphism") -> "Gf2Automorphism":
        """self then other (matrix product self.rows . other.rows)."""
        return Gf2Automorphism(self.dim, mat_mul(self.rows, other.rows))

    def inverse(self) -> "Gf2Automorphism":
        inv = mat_inverse(self.rows, self.dim)
        assert inv is not None
        return Gf2Automorphism(self.dim, inv)


# ---------------------------------------------------------------------------
# Closure of a set of matrices under composition (breadth-first, vectorized).
# ---------------------------------------------------------------------------


def _apply_tables(rows: Sequence[int], dim: int) -> np.ndarray:
    """Byte-indexed lookup tables for fast right-multiplication by one matrix."""
    nchunks = (dim + 7) // 8
    tabs = np.zeros((nchunks, 256), dtype=np.uint64)
    for c in range(nchunks):
        base = 8 * c
        for b in range(256):
            acc = 0
            bb = b
            while bb:
                low = bb & -bb
                i = base + low.bit_length() - 1
                if i < dim:
                    acc ^= rows[i]
                bb ^= low
            tabs[c, b] = acc
    return tabs


def _compose_batch(batch: np.ndarray, tabs: np.ndarray) -> np.ndarray:
    """Right-multiply every matrix in batch (shape (N, dim) of uint64 rows)."""
    out = np.zeros_like(batch)
    for c in range(tabs.shape[0]):
        idx = ((batch >> np.uint64(8 * c)) & np.uint64(0xFF)).astype(np.int64)
        out ^= tabs[c][idx]
    return out


def matrix_closure(
    generators: Sequence[Sequence[int]], dim: int, cap: int
) -> list[Matrix]:
    """All products of the generators, as a canonically sorted list.

    Breadth-first closure under right multiplication, starting from the
    identity.  Raises ClosureCapExceeded as soon as more than `cap` distinct
    elements have been seen (the exception carries the partial count).
    """
    if dim > 64:
        raise ValueError("matrix_closure supports dim <= 64")
    for g in generators:
        if not is_invertible(g, dim):
            raise ValueError("closure generators must be invertible")
    tabs = [_apply_tables(g, dim) for g in generators]
    ident = np.array([mat_identity(dim)], dtype=np.uint64)
    seen: set[bytes] = {ident.tobytes()}
    frontier = ident
    rowbytes = dim * 8
    while frontier.size and tabs:
        produced = [_compose_batch(frontier, t) for t in tabs]
        cand = np.unique(np.concatenate(produced), axis=0)
        fresh: list[np.ndarray] = []
        buf = cand.tobytes()
        for i in range(cand.shape[0]):
            key = buf[i * rowbytes : (i + 1) * rowbytes]
            if key not in seen:
                seen.add(key)
                fresh.append(cand[i])
                if len(seen) > cap:
                    raise ClosureCapExceeded(cap, len(seen))
        if fresh:
            frontier = np.array(fresh, dtype=np.uint64)
        else:
            frontier = np.empty((0, dim), dtype=np.uint64)
    mats = sorted(
        tuple(int(x) for x in np.frombuffer(key, dtype=np.uint64)) for key in seen
    )
    return mats
