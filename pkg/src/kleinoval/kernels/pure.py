"""numpy implementations of the scan kernels.

Fallback twin of the Cython module `_native`; both expose the same four
functions with identical semantics so either can serve the geometry code.
Arrays follow one convention throughout: point coordinates are uint8 with
one row per point, index rows are int32, and membership masks are uint8
indexed by packed point codes (h bits per coordinate, big-endian, so code
order equals lexicographic coordinate order).
"""

from __future__ import annotations

import numpy as np

_KLEIN_PAIRS = ((0, 1), (2, 3), (4, 5))


def linear_form_values(coords: np.ndarray, form: np.ndarray, mul: np.ndarray) -> np.ndarray:
    """XOR_k mul[form[k], coords[:, k]] for every row."""
    out = np.zeros(coords.shape[0], dtype=np.uint8)
    for k in range(coords.shape[1]):
        c = int(form[k])
        if c:
            out ^= mul[c, coords[:, k]]
    return out


def quadratic_form_values(coords: np.ndarray, terms: np.ndarray, mul: np.ndarray) -> np.ndarray:
    """Evaluate sum a_ij x_i x_j; terms is an int array of (i, j, a_ij) rows."""
    out = np.zeros(coords.shape[0], dtype=np.uint8)
    for i, j, a in terms:
        out ^= mul[mul[int(a), coords[:, int(i)]], coords[:, int(j)]]
    return out


def incidence_counts(rows: np.ndarray, member: np.ndarray) -> np.ndarray:
    """member is a 0/1 mask over point indices; counts members per row."""
    out = np.empty(rows.shape[0], dtype=np.int64)
    step = max(1, (1 << 22) // max(1, rows.shape[1]))
    for lo in range(0, rows.shape[0], step):
        chunk = rows[lo : lo + step]
        out[lo : lo + step] = member[chunk].sum(axis=1, dtype=np.int64)
    return out


def conic_plane_scan(
    bases: np.ndarray,
    mus: np.ndarray,
    mul: np.ndarray,
    inv: np.ndarray,
    hmask: np.ndarray,
    h: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Scan planes of PG(5,q) against the Klein form X1X2+X3X4+X5X6.

    bases: (P, 3, 6) uint8 row-reduced plane bases.  mus: all normalized
    3-tuples over the field in lexicographic order, (M, 3).  hmask: packed
    membership mask of the candidate hyperoval.  A plane passes when its
    quadric section is an irreducible conic all of whose points lie in
    hmask.  Returns (in_u uint8 (P,), nucleus uint8 (P, 6)); nucleus rows
    are normalized point coordinates, valid where in_u is set.
    """
    P = bases.shape[0]
    q = mul.shape[0]
    M = mus.shape[0]
    in_u = np.zeros(P, dtype=np.uint8)
    nuc = np.zeros((P, 6), dtype=np.uint8)
    if P == 0:
        return in_u, nuc

    m0, m1, m2 = mus[:, 0], mus[:, 1], mus[:, 2]
    sq0, sq1, sq2 = mul[m0, m0], mul[m1, m1], mul[m2, m2]
    cr01, cr02, cr12 = mul[m0, m1], mul[m0, m2], mul[m1, m2]

    step = max(1, (1 << 23) // max(1, M))
    for lo in range(0, P, step):
        B = bases[lo : lo + step]
        r0, r1, r2 = B[:, 0, :], B[:, 1, :], B[:, 2, :]
        A = _klein_eval(r0, mul)
        Bc = _klein_eval(r1, mul)
        C = _klein_eval(r2, mul)
        D = _klein_bilinear(r0, r1, mul)
        E = _klein_bilinear(r0, r2, mul)
        F = _klein_bilinear(r1, r2, mul)
        # Irreducible section iff the local nucleus (F, E, D) is nonzero
        # and off the conic (s evaluated there is nonzero).
        sn = mul[A, mul[F, F]] ^ mul[Bc, mul[E, E]] ^ mul[C, mul[D, D]] ^ mul[mul[D, E], F]
        ci = np.nonzero((sn != 0) & ((F != 0) | (E != 0) | (D != 0)))[0]
        if ci.size == 0:
            continue
        vals = (
            mul[A[ci, None], sq0[None, :]]
            ^ mul[Bc[ci, None], sq1[None, :]]
            ^ mul[C[ci, None], sq2[None, :]]
            ^ mul[D[ci, None], cr01[None, :]]
            ^ mul[E[ci, None], cr02[None, :]]
            ^ mul[F[ci, None], cr12[None, :]]
        )  # (nc, M)
        zero_mask = vals == 0
        good = zero_mask.sum(axis=1) == q + 1  # always true for irreducible conics
        rows_idx, mu_idx = np.nonzero(zero_mask & good[:, None])
        if rows_idx.size:
            basis_sel = B[ci[rows_idx]]  # (n, 3, 6)
            pts = np.zeros((rows_idx.size, 6), dtype=np.uint8)
            for k in range(3):
                pts ^= mul[mus[mu_idx, k, None], basis_sel[:, k, :]]
            # normalized mu on a row-reduced basis gives normalized points
            codes = _pack(pts, h)
            bad = hmask[codes] == 0
            good[np.unique(rows_idx[bad])] = False
        sel = ci[good]
        if sel.size:
            npts = np.zeros((sel.size, 6), dtype=np.uint8)
            loc = np.stack([F[sel], E[sel], D[sel]], axis=1)
            for k in range(3):
                npts ^= mul[loc[:, k, None], B[sel][:, k, :]]
            in_u[lo + sel] = 1
            nuc[lo + sel] = _normalize_rows(npts, mul, inv)
    return in_u, nuc


# -- helpers -------------------------------------------------------------------


def _klein_eval(rows: np.ndarray, mul: np.ndarray) -> np.ndarray:
    out = np.zeros(rows.shape[0], dtype=np.uint8)
    for i, j in _KLEIN_PAIRS:
        out ^= mul[rows[:, i], rows[:, j]]
    return out


def _klein_bilinear(u: np.ndarray, v: np.ndarray, mul: np.ndarray) -> np.ndarray:
    out = np.zeros(u.shape[0], dtype=np.uint8)
    for i, j in _KLEIN_PAIRS:
        out ^= mul[u[:, i], v[:, j]] ^ mul[u[:, j], v[:, i]]
    return out


def _normalize_rows(pts: np.ndarray, mul: np.ndarray, inv: np.ndarray) -> np.ndarray:
    lead = np.zeros(pts.shape[0], dtype=np.uint8)
    found = np.zeros(pts.shape[0], dtype=bool)
    for k in range(pts.shape[1]):
        sel = ~found & (pts[:, k] != 0)
        lead[sel] = pts[sel, k]
        found |= sel
    return mul[inv[lead][:, None], pts]


def _pack(pts: np.ndarray, h: int) -> np.ndarray:
    codes = np.zeros(pts.shape[0], dtype=np.int64)
    for k in range(pts.shape[1]):
        codes = (codes << h) | pts[:, k].astype(np.int64)
    return codes
