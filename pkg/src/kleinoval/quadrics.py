"""Quadrics in PG(5,q): the Klein quadric, its sections, and W(q).

The ambient form is fixed once and for all as X1X2 + X3X4 + X5X6 (index
pairs (0,1), (2,3), (4,5) internally).  Its polar form B(u,v) = Q(u+v) +
Q(u) + Q(v) is the symplectic bilinear form used everywhere; in
characteristic 2 the associated polarity is null, so a point always lies
in its own polar hyperplane.

A KleinModel holds the full incidence data of Q+(5,q): the singular
points in lexicographic order, every singular line, and every generator
plane.  Planes are found by greedy extension: point, then a singular
line through it, then the two generator planes through that line (the
perp of a singular line meets the quadric in exactly those two planes),
with canonical dedup; lines are then read off the planes, each exactly
twice, and deduplicated.  All closed-form counts are asserted.

The distinguished elliptic solid is alpha = {X5 = X6, X4 = X3 + w*X5}
with w the smallest nonzero element making X^2 + wX + 1 irreducible.
Its quadric section Q-(3,q), the polar line L* = alpha^perp (disjoint
from the quadric), and the symplectic quadrangle W(q) living on alpha
are packaged in a Setting, the shared context for the construction and
analysis modules.  Inside alpha everything runs in frame coordinates:
the 4 rows of alpha's echelon basis are the frame, and a point's frame
coordinates can be read off its pivot columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np

from . import ConsistencyError, kernels
from .gf2h import GF, field_for_h
from .projspace import (
    Point,
    Subspace,
    kernel_basis,
    normalize_point,
    normalized_array,
    normalized_tuples,
    pg_num_points,
    point_code,
    rref,
    rref_bases_bulk,
)

KLEIN_PAIRS = ((0, 1), (2, 3), (4, 5))


class QuadraticForm:
    """sum a_ij x_i x_j (i <= j) over GF(2^h), with its polar form."""

    def __init__(self, field: GF, n: int, coeffs: dict):
        self.field = field
        self.n = n
        self.coeffs = {(min(i, j), max(i, j)): a for (i, j), a in coeffs.items() if a}
        self.terms = np.array(
            [(i, j, a) for (i, j), a in sorted(self.coeffs.items())], dtype=np.int64
        ).reshape(-1, 3)
        gram = [[0] * (n + 1) for _ in range(n + 1)]
        for (i, j), a in self.coeffs.items():
            if i != j:  # diagonal terms polarize to zero in characteristic 2
                gram[i][j] ^= a
                gram[j][i] ^= a
        self.gram = tuple(tuple(r) for r in gram)
        self.gram_array = np.array(gram, dtype=np.uint8)

    def evaluate(self, v: Sequence[int]) -> int:
        f = self.field
        acc = 0
        for (i, j), a in self.coeffs.items():
            acc ^= f.mul(f.mul(a, int(v[i])), int(v[j]))
        return acc

    def bilinear(self, u: Sequence[int], v: Sequence[int]) -> int:
        f = self.field
        acc = 0
        for i in range(self.n + 1):
            row = self.gram[i]
            ui = int(u[i])
            if ui:
                for j in range(self.n + 1):
                    if row[j]:
                        acc ^= f.mul(f.mul(ui, row[j]), int(v[j]))
        return acc

    def values(self, coords: np.ndarray) -> np.ndarray:
        return kernels.quadratic_form_values(coords, self.terms, self.field.mul_table)

    def polar_form(self, p: Sequence[int]) -> Point:
        """Coefficient vector of B(p, .) as a linear form."""
        f = self.field
        out = []
        for j in range(self.n + 1):
            acc = 0
            for i in range(self.n + 1):
                if self.gram[i][j] and int(p[i]):
                    acc ^= f.mul(int(p[i]), self.gram[i][j])
            out.append(acc)
        return tuple(out)

    def polar_hyperplane(self, p: Sequence[int]) -> Subspace:
        c = self.polar_form(p)
        if not any(c):
            raise ValueError("point lies in the radical of the polar form")
        return Subspace(self.field, self.n, kernel_basis(self.field, [c], self.n + 1))

    def tangent_hyperplane(self, p: Sequence[int]) -> Subspace:
        if self.evaluate(p) != 0:
            raise ValueError("tangent hyperplane requested at a non-singular point")
        return self.polar_hyperplane(p)

    def restrict(self, basis: Sequence[Sequence[int]]) -> "QuadraticForm":
        """The form induced on the subspace spanned by `basis`, in its coordinates."""
        r = len(basis)
        coeffs = {}
        for i in range(r):
            coeffs[(i, i)] = self.evaluate(basis[i])
            for j in range(i + 1, r):
                coeffs[(i, j)] = self.bilinear(basis[i], basis[j])
        return QuadraticForm(self.field, r - 1, coeffs)


def klein_form(field: GF) -> QuadraticForm:
    return QuadraticForm(field, 5, {p: 1 for p in KLEIN_PAIRS})


# -- plane and solid sections ----------------------------------------------------


@dataclass
class Conic:
    """An irreducible conic section: its plane, points, and nucleus."""

    plane: Subspace
    points: Tuple[Point, ...]
    nucleus: Point


def conic_of_plane_section(form: QuadraticForm, plane: Subspace):
    """Classify plane ∩ {form = 0}.

    Returns ("conic", Conic) for an irreducible conic, otherwise one of
    ("singleton", pts), ("line-pair", pts), ("full-line", pts),
    ("plane-in-quadric", None).  The nucleus test, that the local point
    (f : e : d) is nonzero and off the section, is exact: a double line
    has f = e = d = 0 and a crossing line pair has its singular point at
    (f : e : d).
    """
    if plane.projdim != 2:
        raise ValueError("plane expected")
    field = form.field
    q = field.q
    sec = form.restrict(plane.basis)
    c = sec.coeffs
    if not c:
        return "plane-in-quadric", None
    a, b, cc = c.get((0, 0), 0), c.get((1, 1), 0), c.get((2, 2), 0)
    d, e, f = c.get((0, 1), 0), c.get((0, 2), 0), c.get((1, 2), 0)
    zeros = [mu for mu in normalized_tuples(q, 3) if sec.evaluate(mu) == 0]

    def out_points():
        pts = [normalize_point(field, _combine_rows(field, mu, plane.basis)) for mu in zeros]
        return tuple(sorted(pts))

    if len(zeros) == q + 1 and (d or e or f):
        sn = sec.evaluate((f, e, d))
        if sn != 0:
            nuc = normalize_point(field, _combine_rows(field, (f, e, d), plane.basis))
            return "conic", Conic(plane, out_points(), nuc)
    if len(zeros) == 1:
        return "singleton", out_points()
    if len(zeros) == q + 1:
        return "full-line", out_points()
    if len(zeros) == 2 * q + 1:
        return "line-pair", out_points()
    raise ConsistencyError(f"impossible plane section with {len(zeros)} points")


def classify_solid_section(form: QuadraticForm, solid: Subspace):
    """Tag solid ∩ {form = 0} by point count, with the count attached."""
    if solid.projdim != 3:
        raise ValueError("solid expected")
    q = form.field.q
    sec = form.restrict(solid.basis)
    n = sum(1 for mu in normalized_tuples(q, 4) if sec.evaluate(mu) == 0)
    if n == q * q + 1:
        return "elliptic", n
    if n == (q + 1) ** 2:
        return "hyperbolic", n
    return "degenerate", n


def _combine_rows(field: GF, mu: Sequence[int], basis: Sequence[Sequence[int]]) -> List[int]:
    v = [0] * len(basis[0])
    for m, row in zip(mu, basis):
        if m:
            for k in range(len(v)):
                v[k] ^= field.mul(int(m), int(row[k]))
    return v


# -- the Klein model ---------------------------------------------------------------


class KleinModel:
    """Full incidence data of Q+(5,q): points, lines, generator planes."""

    def __init__(self, field: GF):
        self.field = field
        self.form = klein_form(field)
        q, h = field.q, field.h
        self.q, self.h = q, h
        mul = field.mul_table

        pg = normalized_array(q, 6)
        if pg.shape[0] != pg_num_points(5, q):
            raise ConsistencyError("PG(5,q) enumeration size off")
        qv = kernels.quadratic_form_values(pg, self.form.terms, mul)
        self.points = np.ascontiguousarray(pg[qv == 0])
        self.n_points = self.points.shape[0]
        if self.n_points != (q * q + 1) * (q * q + q + 1):
            raise ConsistencyError(f"Klein quadric has {self.n_points} points")

        self.codes = _pack_codes(self.points, h)
        size = 1 << (6 * h)
        self.code_member = np.zeros(size, dtype=np.uint8)
        self.code_member[self.codes] = 1
        self.code_index = np.full(size, -1, dtype=np.int32)
        self.code_index[self.codes] = np.arange(self.n_points, dtype=np.int32)

        self._mus3 = normalized_array(q, 3)
        self._build_planes()
        self._build_lines()
        self._pt_plane_ids: np.ndarray | None = None
        self._pt_plane_indptr: np.ndarray | None = None

    # .. scalar helpers ..

    def index_of(self, coords: Sequence[int]) -> int:
        idx = int(self.code_index[point_code(normalize_point(self.field, coords), self.h)])
        if idx < 0:
            raise ValueError(f"{tuple(coords)} is not on the quadric")
        return idx

    def on_quadric(self, coords: Sequence[int]) -> bool:
        return self.form.evaluate(coords) == 0

    def point(self, idx: int) -> Point:
        return tuple(int(c) for c in self.points[idx])

    def polar_form_vector(self, p: Sequence[int]) -> Point:
        return self.form.polar_form(p)

    def tangent_hyperplane(self, p: Sequence[int]) -> Subspace:
        return self.form.tangent_hyperplane(p)

    def planes_through(self, point_index: int) -> np.ndarray:
        """Indices of the 2(q+1) generator planes containing the given point."""
        if self._pt_plane_ids is None:
            flat = self.planes_sorted.ravel()
            order = np.argsort(flat, kind="stable")
            self._pt_plane_ids = (order // self.planes_sorted.shape[1]).astype(np.int32)
            self._pt_plane_indptr = np.searchsorted(
                flat[order], np.arange(self.n_points + 1)
            )
        lo, hi = self._pt_plane_indptr[point_index], self._pt_plane_indptr[point_index + 1]
        return self._pt_plane_ids[lo:hi]

    # .. construction ..

    def _collinear_mask(self, c: Sequence[int]) -> np.ndarray:
        vals = kernels.linear_form_values(
            self.points, np.array(c, dtype=np.uint8), self.field.mul_table
        )
        return vals == 0

    def _line_indices(self, i: int, j: int) -> np.ndarray:
        """Indices of the q+1 points on the singular line through points i, j."""
        f = self.field
        pi, pj = self.points[i], self.points[j]
        out = [i, j]
        for t in range(1, f.q):
            v = [int(pi[k]) ^ f.mul(t, int(pj[k])) for k in range(6)]
            out.append(int(self.code_index[point_code(normalize_point(f, v), self.h)]))
        arr = np.array(sorted(out), dtype=np.int32)
        if arr[0] < 0:
            raise ConsistencyError("line through two singular points left the quadric")
        return arr

    def _build_planes(self) -> None:
        q, h, f = self.q, self.h, self.field
        n2 = q * q + q + 1
        per_point = 2 * (q + 1)
        found = set()
        rows: List[np.ndarray] = []
        planes_of: List[List[int]] = [[] for _ in range(self.n_points)]
        counter = np.zeros(self.n_points, dtype=np.int32)

        for i in range(self.n_points):
            if counter[i] >= per_point:
                continue
            ci = self.polar_form_vector(self.points[i])
            smask = self._collinear_mask(ci)
            smask[i] = False
            S = np.nonzero(smask)[0].astype(np.int32)
            spts = self.points[S]
            cov = np.zeros(S.size, dtype=np.int8)
            for pidx in planes_of[i]:
                pl = rows[pidx]
                cov[np.searchsorted(S, pl[pl != i])] += 1
            for pos in range(S.size):
                if cov[pos] >= 2:
                    continue
                y = int(S[pos])
                line = self._line_indices(i, y)
                cy = self.polar_form_vector(self.points[y])
                zmask = (
                    kernels.linear_form_values(spts, np.array(cy, dtype=np.uint8), f.mul_table)
                    == 0
                )
                Z = S[zmask]
                line_set = set(int(x) for x in line)
                z0 = -1
                for z in Z.tolist():
                    if z not in line_set:
                        z0 = z
                        break
                if z0 < 0:
                    raise ConsistencyError("tangent cone section collapsed to one line")
                cz = self.polar_form_vector(self.points[z0])
                zvals = kernels.linear_form_values(
                    self.points[Z], np.array(cz, dtype=np.uint8), f.mul_table
                )
                plane1 = np.unique(
                    np.concatenate([Z[zvals == 0], np.array([i], dtype=np.int32)])
                )
                plane2 = np.unique(np.concatenate([Z[zvals != 0], line]))
                for pl in (plane1, plane2):
                    if pl.size != n2:
                        raise ConsistencyError("generator plane with wrong point count")
                    key = pl.tobytes()
                    if key not in found:
                        found.add(key)
                        pidx = len(rows)
                        rows.append(pl)
                        counter[pl] += 1
                        for x in pl.tolist():
                            planes_of[x].append(pidx)
                        cov[np.searchsorted(S, pl[pl != i])] += 1

        n_planes = 2 * (q + 1) * (q * q + 1)
        if len(rows) != n_planes:
            raise ConsistencyError(f"found {len(rows)} generator planes, expected {n_planes}")
        if not (counter == per_point).all():
            raise ConsistencyError("some point is not on 2(q+1) generator planes")

        allrows = np.vstack(rows)
        order = np.lexsort(tuple(allrows[:, c] for c in reversed(range(n2))))
        allrows = allrows[order]

        # canonical bases and mu-ordered point rows
        mul = f.mul_table
        bases = np.zeros((n_planes, 3, 6), dtype=np.uint8)
        planes_mu = np.zeros((n_planes, n2), dtype=np.int32)
        for p in range(n_planes):
            idx = allrows[p]
            a, b = self.points[idx[0]], self.points[idx[1]]
            basis = None
            for k in range(2, idx.size):
                cand = rref(f, [a.tolist(), b.tolist(), self.points[idx[k]].tolist()])
                if len(cand) == 3:
                    basis = cand
                    break
            if basis is None:
                raise ConsistencyError("plane points were collinear")
            barr = np.array(basis, dtype=np.uint8)
            bases[p] = barr
            pts = np.zeros((n2, 6), dtype=np.uint8)
            for k in range(3):
                pts ^= mul[self._mus3[:, k, None], barr[k][None, :]]
            loc = self.code_index[_pack_codes(pts, h)]
            if (loc < 0).any():
                raise ConsistencyError("generator plane left the quadric")
            planes_mu[p] = loc
            if not np.array_equal(np.sort(loc), idx):
                raise ConsistencyError("plane basis does not reproduce its points")
        self.plane_bases = bases
        self.planes_mu = planes_mu
        self.planes_sorted = allrows
        self.n_planes = n_planes

    def _build_lines(self) -> None:
        q = self.q
        n2 = q * q + q + 1
        linemu = _pg2_lines_mu(self.field)  # (n2, q+1) mu-indices per line of PG(2,q)
        keys_parts = []
        rows_parts = []
        chunk = max(1, (1 << 22) // (n2 * (q + 1)))
        for lo in range(0, self.n_planes, chunk):
            sub = self.planes_mu[lo : lo + chunk]  # (c, n2)
            lines = sub[:, linemu]  # (c, n2, q+1)
            lines = np.sort(lines.reshape(-1, q + 1), axis=1)
            keys_parts.append(lines[:, 0].astype(np.int64) * self.n_points + lines[:, 1])
            rows_parts.append(lines)
        keys = np.concatenate(keys_parts)
        rows = np.vstack(rows_parts)
        uk, first = np.unique(keys, return_index=True)
        self.lines = np.ascontiguousarray(rows[first])
        n_lines = (q * q + 1) * (q * q + q + 1) * (q + 1)
        if self.lines.shape[0] != n_lines:
            raise ConsistencyError(f"{self.lines.shape[0]} singular lines, expected {n_lines}")
        if keys.size != 2 * n_lines:
            raise ConsistencyError("some singular line is not on exactly 2 planes")


@lru_cache(maxsize=None)
def _pg2_lines_mu_cached(h: int) -> np.ndarray:
    field = field_for_h(h)
    q = field.q
    mus = normalized_array(q, 3)
    mul = field.mul_table
    vals = np.zeros((mus.shape[0], mus.shape[0]), dtype=np.uint8)
    for k in range(3):
        vals ^= mul[mus[:, k][:, None], mus[:, k][None, :]]
    out = np.zeros((mus.shape[0], q + 1), dtype=np.int32)
    for j in range(mus.shape[0]):
        on = np.nonzero(vals[:, j] == 0)[0]
        if on.size != q + 1:
            raise ConsistencyError("PG(2,q) line with wrong point count")
        out[j] = on
    return out


def _pg2_lines_mu(field: GF) -> np.ndarray:
    return _pg2_lines_mu_cached(field.h)


@lru_cache(maxsize=None)
def _pg2_lines_through_cached(h: int) -> np.ndarray:
    """Inverse of the line table: the q+1 line indices through each PG(2,q) point."""
    linemu = _pg2_lines_mu_cached(h)
    n2 = linemu.shape[0]
    flat = linemu.ravel()
    order = np.argsort(flat, kind="stable")
    indptr = np.searchsorted(flat[order], np.arange(n2 + 1))
    if not (np.diff(indptr) == linemu.shape[1]).all():
        raise ConsistencyError("PG(2,q) point is not on q+1 lines")
    return (order // linemu.shape[1]).astype(np.int32).reshape(n2, linemu.shape[1])


def _pack_codes(pts: np.ndarray, h: int) -> np.ndarray:
    codes = np.zeros(pts.shape[0], dtype=np.int64)
    for k in range(pts.shape[1]):
        codes = (codes << h) | pts[:, k].astype(np.int64)
    return codes


# -- W(q) on the distinguished elliptic solid ---------------------------------------


class SymplecticQuadrangle:
    """W(q) on a solid: the totally isotropic lines of the induced polarity.

    Everything is in frame coordinates: normalized 4-tuples in lex order,
    indexed by position.  `lines` are the W(q) lines (the tangent lines of
    the elliptic section), `hyperbolic_lines` the rest.
    """

    def __init__(self, field: GF, gram4: np.ndarray):
        self.field = field
        self.gram4 = gram4
        q, h = field.q, field.h
        mul = field.mul_table

        self.points = normalized_array(q, 4)
        self.n_points = self.points.shape[0]
        codes = _pack_codes4(self.points, h)
        self.code_index = np.full(1 << (4 * h), -1, dtype=np.int32)
        self.code_index[codes] = np.arange(self.n_points, dtype=np.int32)

        bases = rref_bases_bulk(field, 2, 4)  # all lines of PG(3,q)
        r0, r1 = bases[:, 0, :], bases[:, 1, :]
        all_lines = np.zeros((bases.shape[0], q + 1), dtype=np.int32)
        for col, mu in enumerate(normalized_tuples(q, 2)):
            pts = mul[mu[0], r0] ^ mul[mu[1], r1]
            all_lines[:, col] = self.code_index[_pack_codes4(pts, h)]
        if (all_lines < 0).any():
            raise ConsistencyError("line point fell outside the enumeration")
        all_lines = np.sort(all_lines, axis=1)

        c = np.zeros((bases.shape[0], 4), dtype=np.uint8)
        for l in range(4):
            for k in range(4):
                g = int(gram4[k, l])
                if g:
                    c[:, l] ^= mul[g, r0[:, k]]
        bv = np.zeros(bases.shape[0], dtype=np.uint8)
        for k in range(4):
            bv ^= mul[c[:, k], r1[:, k]]
        iso = bv == 0
        self.lines = np.ascontiguousarray(all_lines[iso])
        self.hyperbolic_lines = np.ascontiguousarray(all_lines[~iso])
        if self.lines.shape[0] != (q + 1) * (q * q + 1):
            raise ConsistencyError("wrong W(q) line count")
        if self.hyperbolic_lines.shape[0] != q * q * (q * q + 1):
            raise ConsistencyError("wrong hyperbolic line count")

    def index_of(self, frame_pt: Sequence[int]) -> int:
        idx = int(self.code_index[point_code(frame_pt, self.field.h)])
        if idx < 0:
            raise ValueError("not a normalized frame point")
        return idx

    def polar_plane_form(self, frame_pt: Sequence[int]) -> Point:
        """Dual vector of the polar plane x^perp within the solid."""
        f = self.field
        out = []
        for l in range(4):
            acc = 0
            for k in range(4):
                g = int(self.gram4[k, l])
                if g and int(frame_pt[k]):
                    acc ^= f.mul(int(frame_pt[k]), g)
            out.append(acc)
        return tuple(out)


def wq_lines(field: GF, gram4: np.ndarray) -> np.ndarray:
    """The (q+1)(q^2+1) totally isotropic lines, as frame point-index rows."""
    return SymplecticQuadrangle(field, gram4).lines


def _pack_codes4(pts: np.ndarray, h: int) -> np.ndarray:
    codes = np.zeros(pts.shape[0], dtype=np.int64)
    for k in range(4):
        codes = (codes << h) | pts[:, k].astype(np.int64)
    return codes


# -- the shared setting --------------------------------------------------------------


class Setting:
    """The fixed scene: Q+(5,q), the elliptic solid, W(q), and L*.

    alpha is cut out by X5 = X6 and X4 = X3 + w*X5; its echelon basis
    rows are the frame.  p* = (1,0,0,0,0,0) is the distinguished point of
    the elliptic section and T_{p*} = {X2 = 0} its tangent hyperplane.
    """

    def __init__(self, field: GF):
        self.field = field
        q, h = field.q, field.h
        self.q, self.h = q, h
        self.omega = field.pick_omega_irreducible()
        self.delta = field.pick_delta_trace_one()
        self.model = KleinModel(field)

        w = self.omega
        self.pi = Subspace.from_rows(
            field,
            5,
            [
                (1, 0, 0, 0, 0, 0),
                (0, 1, 0, 0, 0, 0),
                (0, 0, 1, 1, 0, 0),
                (0, 0, 0, w, 1, 1),
            ],
        )
        if self.pi.pivots() != (0, 1, 2, 3):
            raise ConsistencyError("solid basis did not echelonize to pivots 0..3")
        self.pi_basis = self.pi.as_array()

        self.form4 = self.model.form.restrict(self.pi.basis)
        self.gram4 = self.form4.gram_array
        self.wq = SymplecticQuadrangle(field, self.gram4)

        mul = field.mul_table
        self.pi_points6 = np.zeros((self.wq.n_points, 6), dtype=np.uint8)
        for k in range(4):
            self.pi_points6 ^= mul[self.wq.points[:, k, None], self.pi_basis[k][None, :]]
        codes6 = _pack_codes(self.pi_points6, h)
        self.pi_global = self.model.code_index[codes6]  # -1 off the quadric

        qvals = self.form4.values(self.wq.points)
        self.base_local = np.nonzero(qvals == 0)[0].astype(np.int32)
        if self.base_local.size != q * q + 1:
            raise ConsistencyError("elliptic section size off")
        self.base_global = self.pi_global[self.base_local]
        if (self.base_global < 0).any():
            raise ConsistencyError("elliptic section point missing from the model")
        self.base_mask_local = np.zeros(self.wq.n_points, dtype=np.uint8)
        self.base_mask_local[self.base_local] = 1

        self.vstar6: Point = (1, 0, 0, 0, 0, 0)
        self.vstar_local = self.wq.index_of((1, 0, 0, 0))
        self.vstar_global = self.model.index_of(self.vstar6)

        lstar_rows = kernel_basis(
            field, [self.model.polar_form_vector(b) for b in self.pi.basis], 6
        )
        self.lstar = Subspace(field, 5, lstar_rows)
        if self.lstar.projdim != 1:
            raise ConsistencyError("alpha's polar is not a line")
        if self.pi.meet(self.lstar).projdim != -1:
            raise ConsistencyError("L* meets alpha")
        for p in self.lstar.enumerate_points():
            if self.model.on_quadric(p):
                raise ConsistencyError("L* meets the quadric")

    # .. frame coordinate helpers ..

    def to_frame(self, coords6: Sequence[int]) -> Point:
        """Frame coordinates of a point of alpha (read off the pivot columns)."""
        fr = tuple(int(coords6[c]) for c in (0, 1, 2, 3))
        back = _combine_rows(self.field, fr, self.pi.basis)
        if tuple(back) != tuple(int(c) for c in coords6):
            raise ValueError("point is not in alpha")
        return fr

    def from_frame(self, frame_pt: Sequence[int]) -> Point:
        return tuple(_combine_rows(self.field, frame_pt, self.pi.basis))

    def frame_local_index(self, frame_pt: Sequence[int]) -> int:
        return self.wq.index_of(normalize_point(self.field, frame_pt))


@lru_cache(maxsize=None)
def build_setting(h: int) -> Setting:
    """The cached Setting for GF(2^h) with the fixed modulus."""
    return Setting(field_for_h(h))
