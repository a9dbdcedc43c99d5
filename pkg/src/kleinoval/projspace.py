"""Projective spaces PG(n,q) over GF(2^h).

Points are tuples of ints with the first nonzero coordinate normalized
to 1.  The canonical enumeration of PG(n,q) lists points in lexicographic
order of their coordinate tuples (bit values compared left to right), and
a point's index always means its position in that enumeration.

Subspaces carry a canonical basis: the reduced row echelon form of any
spanning set, rows ordered by pivot column.  Two handy consequences are
used throughout: multiplying a normalized coefficient tuple onto an RREF
basis yields an already-normalized point, and equal subspaces compare
equal as tuples.  The empty subspace has projective dimension -1.

Bulk enumeration helpers return numpy uint8 arrays; the scalar API mirrors
them exactly so either can be cross-checked against the other.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .gf2h import GF

Point = Tuple[int, ...]


# -- point plumbing ------------------------------------------------------------


def normalize_point(field: GF, coords: Sequence[int]) -> Point:
    lead = next((c for c in coords if c), None)
    if lead is None:
        raise ValueError("zero vector does not define a projective point")
    if lead == 1:
        return tuple(int(c) for c in coords)
    s = field.inv(lead)
    return tuple(field.mul(s, int(c)) for c in coords)


def point_code(coords: Sequence[int], h: int) -> int:
    code = 0
    for c in coords:
        code = (code << h) | int(c)
    return code


def point_from_code(code: int, h: int, width: int) -> Point:
    mask = (1 << h) - 1
    return tuple((code >> (h * (width - 1 - k))) & mask for k in range(width))


def pg_num_points(n: int, q: int) -> int:
    return (q ** (n + 1) - 1) // (q - 1)


def normalized_tuples(q: int, r: int) -> Iterator[Point]:
    """All normalized r-tuples over GF(q) in lexicographic order."""
    for k in range(r - 1, -1, -1):
        tail = r - 1 - k
        for rest in itertools.product(range(q), repeat=tail):
            yield (0,) * k + (1,) + rest


def normalized_array(q: int, r: int) -> np.ndarray:
    """numpy twin of normalized_tuples: ((q^r-1)/(q-1), r) uint8, lex order."""
    blocks = []
    for k in range(r - 1, -1, -1):
        tail = r - 1 - k
        n = q**tail
        blk = np.zeros((n, r), dtype=np.uint8)
        blk[:, k] = 1
        idx = np.arange(n)
        for j in range(tail):
            blk[:, k + 1 + j] = (idx // q ** (tail - 1 - j)) % q
        blocks.append(blk)
    return np.concatenate(blocks, axis=0)


# -- row reduction over GF(q) ----------------------------------------------------


def rref(field: GF, rows: Iterable[Sequence[int]]) -> Tuple[Point, ...]:
    """Reduced row echelon form; returns the nonzero rows as tuples."""
    mat: List[List[int]] = [list(map(int, r)) for r in rows]
    if not mat:
        return ()
    ncols = len(mat[0])
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(mat)) if mat[r][col]), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        s = field.inv(mat[rank][col])
        if s != 1:
            mat[rank] = [field.mul(s, v) for v in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col]:
                f = mat[r][col]
                mat[r] = [v ^ field.mul(f, w) for v, w in zip(mat[r], mat[rank])]
        rank += 1
        if rank == len(mat):
            break
    return tuple(tuple(r) for r in mat[:rank] if any(r))


def kernel_basis(field: GF, rows: Sequence[Sequence[int]], ncols: int) -> Tuple[Point, ...]:
    """RREF basis of {v : rows . v = 0} w.r.t. the standard dot product."""
    red = rref(field, rows)
    pivots = [next(c for c in range(ncols) if row[c]) for row in red]
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for i, p in enumerate(pivots):
            v[p] = red[i][f]  # char 2: no sign fiddling
        basis.append(v)
    return rref(field, basis)


def dot(field: GF, u: Sequence[int], v: Sequence[int]) -> int:
    acc = 0
    for a, b in zip(u, v):
        acc ^= field.mul(int(a), int(b))
    return acc


# -- subspaces -------------------------------------------------------------------


class Subspace:
    """A projective subspace of PG(n,q), held as a canonical RREF basis."""

    __slots__ = ("field", "n", "basis")

    def __init__(self, field: GF, n: int, basis: Tuple[Point, ...]):
        self.field = field
        self.n = n
        self.basis = basis

    @classmethod
    def from_rows(cls, field: GF, n: int, rows: Iterable[Sequence[int]]) -> "Subspace":
        return cls(field, n, rref(field, rows))

    @classmethod
    def from_points(cls, field: GF, n: int, points: Iterable[Sequence[int]]) -> "Subspace":
        return cls.from_rows(field, n, points)

    @classmethod
    def empty(cls, field: GF, n: int) -> "Subspace":
        return cls(field, n, ())

    @property
    def projdim(self) -> int:
        return len(self.basis) - 1

    def pivots(self) -> Tuple[int, ...]:
        return tuple(next(c for c in range(self.n + 1) if row[c]) for row in self.basis)

    def contains_point(self, p: Sequence[int]) -> bool:
        v = list(map(int, p))
        for row in self.basis:
            piv = next(c for c in range(self.n + 1) if row[c])
            if v[piv]:
                f = v[piv]
                v = [a ^ self.field.mul(f, b) for a, b in zip(v, row)]
        return not any(v)

    def contains(self, other: "Subspace") -> bool:
        return all(self.contains_point(row) for row in other.basis)

    def span(self, *others: "Subspace") -> "Subspace":
        rows = list(self.basis)
        for o in others:
            rows.extend(o.basis)
        return Subspace.from_rows(self.field, self.n, rows)

    def span_point(self, p: Sequence[int]) -> "Subspace":
        return Subspace.from_rows(self.field, self.n, list(self.basis) + [tuple(p)])

    def dual_forms(self) -> Tuple[Point, ...]:
        """Linear forms cutting out this subspace (basis of the annihilator)."""
        return kernel_basis(self.field, self.basis, self.n + 1)

    def meet(self, other: "Subspace") -> "Subspace":
        forms = rref(self.field, list(self.dual_forms()) + list(other.dual_forms()))
        return Subspace(self.field, self.n, kernel_basis(self.field, forms, self.n + 1))

    def enumerate_points(self) -> List[Point]:
        """Points of the subspace, sorted lexicographically by coordinates."""
        q = self.field.q
        r = len(self.basis)
        pts = []
        for mu in normalized_tuples(q, r):
            v = [0] * (self.n + 1)
            for m, row in zip(mu, self.basis):
                if m:
                    for c in range(self.n + 1):
                        v[c] ^= self.field.mul(m, row[c])
            pts.append(tuple(v))
        pts.sort()
        return pts

    def points_array(self) -> np.ndarray:
        """Points in mu-lex order (not coordinate order), (N, n+1) uint8."""
        q = self.field.q
        r = len(self.basis)
        mus = normalized_array(q, r)
        basis = np.array(self.basis, dtype=np.uint8)
        mul = self.field.mul_table
        out = np.zeros((mus.shape[0], self.n + 1), dtype=np.uint8)
        for k in range(r):
            out ^= mul[mus[:, k, None], basis[k][None, :]]
        return out

    def as_array(self) -> np.ndarray:
        return np.array(self.basis, dtype=np.uint8)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and self.field == other.field
            and self.n == other.n
            and self.basis == other.basis
        )

    def __hash__(self) -> int:
        return hash((self.field, self.n, self.basis))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.projdim}, basis={self.basis})"


# -- constructions ----------------------------------------------------------------


def hyperplane_from_linear_form(field: GF, coeffs: Sequence[int]) -> Subspace:
    if not any(coeffs):
        raise ValueError("zero linear form does not define a hyperplane")
    n = len(coeffs) - 1
    return Subspace(field, n, kernel_basis(field, [coeffs], n + 1))


def project_from(field: GF, center: Subspace, p: Sequence[int], target: Subspace) -> Point:
    """Project point p from `center` onto `target`.

    Preconditions: p outside the center, center and target disjoint, and
    their span the whole space; then the image is a single point.
    """
    if center.contains_point(p):
        raise ValueError("projection center contains the point")
    if center.meet(target).projdim != -1:
        raise ValueError("projection center meets the target")
    if center.span(target).projdim != center.n:
        raise ValueError("center and target do not span the space")
    img = center.span_point(p).meet(target)
    if img.projdim != 0:
        raise ValueError("projection did not produce a point")
    return img.basis[0]


def enumerate_rref(field: GF, k: int, m: int) -> Iterator[Tuple[Point, ...]]:
    """All k x m RREF matrices of rank k over the field, deterministic order."""
    q = field.q
    if k == 0:
        yield ()
        return
    for pivots in itertools.combinations(range(m), k):
        free = [
            (i, c)
            for i in range(k)
            for c in range(m)
            if c > pivots[i] and c not in pivots
        ]
        for values in itertools.product(range(q), repeat=len(free)):
            rows = [[0] * m for _ in range(k)]
            for i in range(k):
                rows[i][pivots[i]] = 1
            for (i, c), v in zip(free, values):
                rows[i][c] = v
            yield tuple(tuple(r) for r in rows)


def rref_bases_bulk(field: GF, k: int, m: int) -> np.ndarray:
    """numpy twin of enumerate_rref: (count, k, m) uint8, same order."""
    q = field.q
    chunks = []
    for pivots in itertools.combinations(range(m), k):
        free = [
            (i, c)
            for i in range(k)
            for c in range(m)
            if c > pivots[i] and c not in pivots
        ]
        f = len(free)
        n = q**f
        blk = np.zeros((n, k, m), dtype=np.uint8)
        for i in range(k):
            blk[:, i, pivots[i]] = 1
        idx = np.arange(n)
        for j, (i, c) in enumerate(free):
            blk[:, i, c] = (idx // q ** (f - 1 - j)) % q
        chunks.append(blk)
    return np.concatenate(chunks, axis=0)


def num_subspaces(n: int, k: int, q: int) -> int:
    """Gaussian binomial [n choose k]_q (vector-space dimensions)."""
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (k - i) - 1
    return num // den


def subspaces_through(field: GF, base: Subspace, projdim: int) -> Iterator[Subspace]:
    """All subspaces of the given projective dimension containing `base`.

    Runs through the quotient modulo `base`: complement vectors are the
    standard basis vectors at non-pivot columns, so each quotient subspace
    lifts to exactly one subspace through the base.
    """
    n = base.n
    r = len(base.basis)
    k = projdim + 1 - r
    if k < 0:
        return
    if k == 0:
        yield base
        return
    pivots = set(base.pivots())
    comp = [c for c in range(n + 1) if c not in pivots]
    for rows in enumerate_rref(field, k, len(comp)):
        lifted = []
        for row in rows:
            v = [0] * (n + 1)
            for val, c in zip(row, comp):
                v[c] = val
            lifted.append(v)
        yield Subspace.from_rows(field, n, list(base.basis) + lifted)


def sample_plane_bases(field: GF, n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """`count` distinct uniformly random planes of PG(n,q) as RREF bases."""
    out = np.zeros((count, 3, n + 1), dtype=np.uint8)
    seen = set()
    got = 0
    while got < count:
        m = rng.integers(0, field.q, size=(3, n + 1))
        basis = rref(field, m.tolist())
        if len(basis) != 3:
            continue
        if basis in seen:
            continue
        seen.add(basis)
        out[got] = np.array(basis, dtype=np.uint8)
        got += 1
    return out
