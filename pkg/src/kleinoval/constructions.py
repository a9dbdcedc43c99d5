"""Hyperoval constructions on the Klein quadric.

Three pipelines, all producing point sets that meet every singular line
in 0 or 2 points:

* the singleton/oval engine: ``sc_decompose`` classifies each generator
  plane's section of a candidate set X as a single point or an oval and
  records the oval kernels; ``sc_hyperoval`` then swaps the singleton
  points out for the kernels.

* a closed-form family indexed by a nonzero field element: ``h_lambda``
  reads membership straight off the six coordinates of each quadric
  point, and ``eq1_point_set`` builds the matching engine input as the
  zero set of one explicit quadratic form.  Both need q >= 4; the q = 2
  analogue is ``h_q2_complement``.

* the ovoid pipeline: ``h_from_ovoid`` fans the off-base points of a
  W(q) ovoid out into conics through the exterior line L* and adds the
  part of the elliptic base the ovoid misses.

Results are ``PointSet`` values: sorted indices into the model's point
list plus a construction tag and parameters, serializable to JSON with
both indices and hex coordinates (the loader cross-checks the two).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Sequence, Tuple

import numpy as np

from . import ConsistencyError, GeometryError, NotSCError, kernels
from .gf2h import GF, elements_to_hex, hex_to_elements
from .ovoids import Ovoid
from .projspace import Point, Subspace, normalize_point
from .quadrics import (
    Conic,
    QuadraticForm,
    Setting,
    _pg2_lines_mu_cached,
    _pg2_lines_through_cached,
    conic_of_plane_section,
)


@dataclass(frozen=True)
class PointSet:
    """A set of quadric points: sorted model indices plus provenance."""

    field: GF
    tag: str
    params: Tuple[Tuple[str, str], ...]
    indices: Tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.indices)

    def param(self, key: str) -> str:
        for k, v in self.params:
            if k == key:
                return v
        raise KeyError(key)

    def mask(self, setting: Setting) -> np.ndarray:
        m = np.zeros(setting.model.n_points, dtype=bool)
        m[list(self.indices)] = True
        return m

    def points(self, setting: Setting) -> Tuple[Point, ...]:
        return tuple(setting.model.point(i) for i in self.indices)

    def to_json(self, setting: Setting) -> Dict:
        if self.field != setting.field:
            raise ValueError("point set field does not match the setting")
        coords = [
            ":".join(elements_to_hex(setting.model.points[i])) for i in self.indices
        ]
        return {
            "field": self.field.to_json(),
            "construction": self.tag,
            "params": {k: v for k, v in self.params},
            "size": self.size,
            "indices": list(self.indices),
            "points": coords,
        }

    @classmethod
    def from_json(cls, data: Dict, setting: Setting) -> "PointSet":
        field = GF.from_json(data["field"])
        if field != setting.field:
            raise ValueError("point set field does not match the setting")
        idx = [int(i) for i in data["indices"]]
        params = tuple((str(k), str(v)) for k, v in data["params"].items())
        ps = _pointset(setting, str(data["construction"]), params, idx)
        if len(ps.indices) != len(idx) or ps.size != int(data["size"]):
            raise ConsistencyError("stored index list has duplicates or a wrong size")
        for i, s in zip(ps.indices, _coords_in_index_order(data, idx)):
            if hex_to_elements(s.split(":")) != setting.model.point(i):
                raise ConsistencyError(
                    f"stored coordinates for index {i} disagree with the model"
                )
        return ps


def _coords_in_index_order(data: Dict, idx: Sequence[int]) -> Iterable[str]:
    order = sorted(range(len(idx)), key=lambda k: idx[k])
    return (data["points"][k] for k in order)


def _pointset(
    setting: Setting, tag: str, params: Sequence[Tuple[str, str]], idx: Iterable[int]
) -> PointSet:
    arr = np.unique(np.asarray(list(idx), dtype=np.int64))
    if arr.size == 0:
        raise ValueError("empty point set")
    if arr[0] < 0 or arr[-1] >= setting.model.n_points:
        raise ValueError("point index out of range for this model")
    return PointSet(
        field=setting.field,
        tag=tag,
        params=tuple(sorted(params)),
        indices=tuple(int(i) for i in arr),
    )


# -- the singleton/oval engine ---------------------------------------------------


@dataclass(frozen=True)
class SCDecomposition:
    """Per-plane classification of a candidate set X.

    ``planes_s`` lists the planes meeting X in one point (that point in
    ``singleton_of``, aligned) and ``planes_c`` those meeting it in an
    oval (kernel in ``nucleus_of``, aligned).  ``a1`` collects the
    singleton points, ``a2`` the kernels; the kernels of oval sections
    lie inside their generator plane, hence on the quadric, so both are
    plain model indices.
    """

    a1: Tuple[int, ...]
    a2: Tuple[int, ...]
    planes_s: Tuple[int, ...]
    planes_c: Tuple[int, ...]
    singleton_of: Tuple[int, ...]
    nucleus_of: Tuple[int, ...]


def sc_decompose(setting: Setting, pset: PointSet) -> SCDecomposition:
    """Classify every generator plane section of X as singleton or oval.

    Raises NotSCError naming the first offending plane when a section is
    neither (wrong size, or the right size with three collinear points).
    """
    model = setting.model
    q = setting.q
    member = pset.mask(setting)
    rows = model.planes_mu
    counts = kernels.incidence_counts(rows, member.view(np.uint8))
    s_ids = np.nonzero(counts == 1)[0]
    c_ids = np.nonzero(counts == q + 1)[0]
    if s_ids.size + c_ids.size != model.n_planes:
        bad = int(np.nonzero((counts != 1) & (counts != q + 1))[0][0])
        raise NotSCError(bad, int(counts[bad]))
    if not s_ids.size or not c_ids.size:
        raise GeometryError("a singleton/oval set must show both section types")

    srows = rows[s_ids]
    singleton = srows[member[srows]]  # one hit per row, row order

    linemu = _pg2_lines_mu_cached(setting.h)
    through = _pg2_lines_through_cached(setting.h)
    nucleus = np.empty(c_ids.size, dtype=np.int64)
    chunk = max(1, (1 << 21) // max(1, linemu.size))
    for lo in range(0, c_ids.size, chunk):
        ids = c_ids[lo : lo + chunk]
        mloc = member[rows[ids]]  # (c, n2) local membership
        hits = mloc[:, linemu].sum(axis=2, dtype=np.int16)  # (c, lines of PG(2,q))
        overfull = np.nonzero((hits > 2).any(axis=1))[0]
        if overfull.size:
            bad = int(ids[overfull[0]])
            raise NotSCError(bad, int(counts[bad]))
        # q+1 points, no 3 collinear: an oval; its tangents concur at the kernel
        tangent = hits == 1
        is_nuc = tangent[:, through].all(axis=2)  # (c, n2)
        if not (is_nuc.sum(axis=1) == 1).all():
            raise ConsistencyError("oval section without a unique kernel")
        nucleus[lo : lo + chunk] = rows[ids, np.argmax(is_nuc, axis=1)]

    a1 = np.unique(singleton)
    a2 = np.unique(nucleus)
    if member[a2].any():
        raise ConsistencyError("an oval kernel landed inside the input set")
    return SCDecomposition(
        a1=tuple(int(i) for i in a1),
        a2=tuple(int(i) for i in a2),
        planes_s=tuple(int(i) for i in s_ids),
        planes_c=tuple(int(i) for i in c_ids),
        singleton_of=tuple(int(i) for i in singleton),
        nucleus_of=tuple(int(i) for i in nucleus),
    )


def oval_in_plane(setting: Setting, pset: PointSet, plane_index: int) -> Tuple[int, ...]:
    """The X-points in one generator plane, as sorted model indices."""
    row = setting.model.planes_sorted[plane_index]
    member = pset.mask(setting)
    return tuple(int(i) for i in row[member[row]])


def sc_hyperoval(setting: Setting, dec: SCDecomposition, pset: PointSet) -> PointSet:
    """Swap singleton points for oval kernels: (X minus A1) union A2.

    Verifies, not assumes, the two exchange conditions: every plane
    through a singleton point has a singleton section, and every plane
    through a kernel point has that point as its section's kernel.
    """
    model = setting.model
    q = setting.q
    is_c = np.zeros(model.n_planes, dtype=bool)
    is_c[list(dec.planes_c)] = True
    nuc_of = np.full(model.n_planes, -1, dtype=np.int64)
    nuc_of[list(dec.planes_c)] = dec.nucleus_of
    for a in dec.a1:
        if is_c[model.planes_through(a)].any():
            raise GeometryError(f"point {a} to be removed lies in an oval-type plane")
    for x in dec.a2:
        if not (nuc_of[model.planes_through(x)] == x).all():
            raise GeometryError(f"point {x} is not the kernel of every plane through it")
    out = (set(pset.indices) - set(dec.a1)) | set(dec.a2)
    expect = (q * q + 1 - len(dec.a1)) * (q + 2)
    if len(out) != expect:
        raise ConsistencyError(f"swap produced {len(out)} points, expected {expect}")
    return _pointset(setting, "sc", (("source", pset.tag), *pset.params), out)


# -- the closed-form family --------------------------------------------------------


def _admissible_mask(setting: Setting) -> np.ndarray:
    """Quadric points off the elliptic base and off the tangent hyperplane of p*."""
    model = setting.model
    on_base = np.zeros(model.n_points, dtype=bool)
    on_base[setting.base_global] = True
    return (~on_base) & (model.points[:, 1] != 0)


def _b_values(setting: Setting) -> np.ndarray:
    """The selector value at every model point (junk 0 where X2 = 0).

    The value at p is (w*X2)^(q-3) * Q(p') with p' the closed-form kernel
    from k_p_direct; it is invariant under rescaling p because the two
    factors pick up q-3 and 2 powers of the scalar.
    """
    f = setting.field
    mul, inv, sq = f.mul_table, f.inv_table, f.sq_table
    pts = setting.model.points
    w = setting.omega
    s56 = pts[:, 4] ^ pts[:, 5]
    p1 = mul[w, pts[:, 0]]
    p2 = mul[w, pts[:, 1]]
    p3 = s56 ^ mul[w, pts[:, 2]]
    p4 = s56 ^ mul[w, pts[:, 3]]
    p5 = pts[:, 2] ^ pts[:, 3]
    qval = mul[p1, p2] ^ mul[p3, p4] ^ sq[p5]
    factor = sq[inv[mul[w, pts[:, 1]]]]
    return mul[factor, qval]


def h_lambda(setting: Setting, lam: int) -> PointSet:
    """The hyperoval selected by a nonzero field element, coordinatewise.

    Takes the base minus its distinguished point p*, plus every quadric
    point off the base and off T_{p*} whose selector value equals lam.
    """
    q = setting.q
    if q == 2:
        raise ValueError("no such family at q = 2; use h_q2_complement")
    if not 0 < lam < q:
        raise ValueError("lam must be a nonzero field element")
    g = _admissible_mask(setting) & (_b_values(setting) == lam)
    out = set(np.nonzero(g)[0].tolist())
    out.update(int(i) for i in setting.base_global)
    out.discard(setting.vstar_global)
    params = (("lambda", format(lam, "x")), ("omega", format(setting.omega, "x")))
    ps = _pointset(setting, "h-lambda", params, out)
    if ps.size != q * q * (q + 2):
        raise ConsistencyError(f"family member has {ps.size} points, not q^2(q+2)")
    return ps


def k_p_direct(setting: Setting, p: Sequence[int]) -> Point:
    """Closed-form kernel of the conic T_p meets the solid in, normalized.

    Defined for quadric points off the elliptic base and off T_{p*};
    must agree with the kernel the generic conic classifier finds.
    """
    f = setting.field
    pt = tuple(int(c) for c in p)
    if len(pt) != 6 or not any(pt):
        raise ValueError("expected a projective point of PG(5,q)")
    if setting.model.form.evaluate(pt) != 0:
        raise ValueError("point is not on the quadric")
    x1, x2, x3, x4, x5, x6 = pt
    if x2 == 0:
        raise ValueError("point lies in the tangent hyperplane of p*")
    w = setting.omega
    if x5 == x6 and x4 == x3 ^ f.mul(w, x5):
        raise ValueError("point lies on the elliptic base")
    s = x5 ^ x6
    pp = (
        f.mul(w, x1),
        f.mul(w, x2),
        s ^ f.mul(w, x3),
        s ^ f.mul(w, x4),
        x3 ^ x4,
        x3 ^ x4,
    )
    return normalize_point(f, pp)


def tangent_section_nucleus(setting: Setting, p: Sequence[int]) -> Point:
    """Kernel of the solid section of T_p, via the generic classifier."""
    plane = setting.model.tangent_hyperplane(p).meet(setting.pi)
    if plane.projdim != 2:
        raise GeometryError("tangent hyperplane does not cut the solid in a plane")
    kind, conic = conic_of_plane_section(setting.model.form, plane)
    if kind != "conic":
        raise GeometryError(f"tangent section is {kind}, not an irreducible conic")
    return conic.nucleus


def eq1_point_set(setting: Setting, lam: int) -> PointSet:
    """Engine input for the closed-form family: one quadratic form's zero set.

    The set cuts every generator plane in a singleton or an oval; its
    engine output must equal h_lambda(lam).
    """
    q = setting.q
    if q == 2:
        raise ValueError("no such family at q = 2; use h_q2_complement")
    if not 0 < lam < q:
        raise ValueError("lam must be a nonzero field element")
    f = setting.field
    w = setting.omega
    w2 = f.mul(w, w)
    form = QuadraticForm(
        f,
        5,
        {
            (1, 1): f.mul(lam, w2),
            (2, 2): 1,
            (3, 3): 1,
            (4, 4): 1,
            (5, 5): 1,
            (4, 5): w2,
            (2, 4): w,
            (2, 5): w,
            (3, 4): w,
            (3, 5): w,
        },
    )
    vals = form.values(setting.model.points)
    params = (("lambda", format(lam, "x")), ("omega", format(setting.omega, "x")))
    return _pointset(setting, "eq1", params, np.nonzero(vals == 0)[0])


# -- the ovoid pipeline -------------------------------------------------------------


def conic_through_exterior_line(setting: Setting, x_frame: Sequence[int]) -> Conic:
    """Quadric section of the plane spanned by L* and an off-base solid point.

    The section is an irreducible conic whose kernel is the spanning
    point itself; both facts are checked, not assumed.
    """
    x6 = setting.from_frame(x_frame)
    if setting.model.on_quadric(x6):
        raise ValueError("expected a solid point off the quadric")
    plane = Subspace.from_rows(setting.field, 5, list(setting.lstar.basis) + [x6])
    if plane.projdim != 2:
        raise ConsistencyError("exterior line and point did not span a plane")
    kind, conic = conic_of_plane_section(setting.model.form, plane)
    if kind != "conic":
        raise ConsistencyError(f"section through the exterior line is {kind}")
    if conic.nucleus != normalize_point(setting.field, x6):
        raise ConsistencyError("conic kernel is not the spanning point")
    return conic


def ovoid_sc_input(setting: Setting, ovoid: Ovoid) -> PointSet:
    """Engine input from an ovoid: its conic fan plus its base part.

    The fan's conics are pairwise disjoint and avoid the base; both are
    checked here so the engine sees a clean union.
    """
    off = ovoid.off_base(setting)
    if not off:
        raise ValueError("the base section itself fans out to nothing")
    model = setting.model
    fan: list[int] = []
    for xf in off:
        conic = conic_through_exterior_line(setting, xf)
        fan.extend(model.index_of(pt) for pt in conic.points)
    arr = np.asarray(fan, dtype=np.int64)
    if np.unique(arr).size != arr.size:
        raise ConsistencyError("conic fans overlap")
    on_base = np.zeros(model.n_points, dtype=bool)
    on_base[setting.base_global] = True
    if on_base[arr].any():
        raise ConsistencyError("a fan conic touches the elliptic base")
    idx = set(arr.tolist())
    idx.update(
        model.index_of(setting.from_frame(t)) for t in ovoid.base_intersection(setting)
    )
    return _pointset(setting, "ovoid-input", _ovoid_params(ovoid), idx)


def h_from_ovoid(setting: Setting, ovoid: Ovoid) -> PointSet:
    """Hyperoval from an ovoid: the conic fan plus the missed part of the base."""
    off = ovoid.off_base(setting)
    if not off:
        raise ValueError("the base section gives an empty fan; nothing to build")
    model = setting.model
    fan = ovoid_sc_input(setting, ovoid)
    hit = {
        model.index_of(setting.from_frame(t)) for t in ovoid.base_intersection(setting)
    }
    idx = set(fan.indices) - hit
    idx.update(int(i) for i in setting.base_global if int(i) not in hit)
    ps = _pointset(setting, "ovoid", _ovoid_params(ovoid), idx)
    q = setting.q
    expect = (q * q + 1 - len(hit)) * (q + 2)
    if ps.size != expect:
        raise ConsistencyError(f"fan union has {ps.size} points, expected {expect}")
    return ps


def _ovoid_params(ovoid: Ovoid) -> Tuple[Tuple[str, str], ...]:
    out = [("ovoid", ovoid.kind)]
    for k, v in ovoid.params:
        out.append((k, ":".join(elements_to_hex(v)) if isinstance(v, tuple) else str(v)))
    return tuple(out)


def h_q2_complement(setting: Setting) -> PointSet:
    """The q = 2 hyperoval: all quadric points off the tangent hyperplane of p*."""
    if setting.q != 2:
        raise ValueError("complement form exists only over the two-element field")
    out = np.nonzero(setting.model.points[:, 1] != 0)[0]
    ps = _pointset(setting, "q2-complement", (), out)
    if ps.size != 16:
        raise ConsistencyError(f"complement has {ps.size} points, expected 16")
    return ps
