import itertools
import random

import numpy as np
import pytest

from kleinoval.gf2h import field_for_q
from kleinoval.projspace import (
    Subspace,
    enumerate_rref,
    hyperplane_from_linear_form,
    kernel_basis,
    normalize_point,
    normalized_array,
    normalized_tuples,
    num_subspaces,
    pg_num_points,
    point_code,
    point_from_code,
    project_from,
    rref,
    rref_bases_bulk,
    sample_plane_bases,
    subspaces_through,
)


def test_normalize_point():
    f = field_for_q(4)
    assert normalize_point(f, (0, 2, 3)) == (0, 1, f.mul(f.inv(2), 3))
    assert normalize_point(f, (1, 2, 3)) == (1, 2, 3)
    with pytest.raises(ValueError):
        normalize_point(f, (0, 0, 0))


def test_point_code_roundtrip():
    for pt in [(1, 0, 3, 2), (0, 1, 15, 7)]:
        assert point_from_code(point_code(pt, 4), 4, 4) == pt


@pytest.mark.parametrize("q,r", [(2, 3), (4, 3), (4, 4), (8, 2)])
def test_normalized_enumeration(q, r):
    pts = list(normalized_tuples(q, r))
    assert len(pts) == pg_num_points(r - 1, q)
    assert pts == sorted(pts)  # lexicographic
    assert len(set(pts)) == len(pts)
    arr = normalized_array(q, r)
    assert [tuple(int(x) for x in row) for row in arr] == pts


def test_rref_canonical():
    f = field_for_q(4)
    rows = [(2, 3, 1, 0), (1, 0, 2, 2)]
    b1 = rref(f, rows)
    b2 = rref(f, [rows[1], rows[0]])
    b3 = rref(f, [rows[0], rows[1], tuple(a ^ b for a, b in zip(*rows))])
    assert b1 == b2 == b3
    assert all(row[next(c for c in range(4) if row[c])] == 1 for row in b1)


def test_kernel_basis_annihilates():
    f = field_for_q(8)
    rng = random.Random(1)
    for _ in range(50):
        rows = [[rng.randrange(8) for _ in range(6)] for _ in range(2)]
        ker = kernel_basis(f, rows, 6)
        red = rref(f, rows)
        assert len(ker) == 6 - len(red)
        for v in ker:
            for r in rows:
                assert not sum(f.mul(a, b) for a, b in zip(r, v)) % 1 and (
                    np.bitwise_xor.reduce([f.mul(a, b) for a, b in zip(r, v)]) == 0
                )


@pytest.mark.parametrize("q,n", [(2, 3), (4, 5)])
def test_enumerate_points_and_counts(q, n):
    f = field_for_q(q)
    full = Subspace.from_rows(f, n, np.eye(n + 1, dtype=int).tolist())
    pts = full.enumerate_points()
    assert len(pts) == pg_num_points(n, q)
    assert pts == sorted(pts)
    assert len(set(pts)) == len(pts)
    # PG(5,4) has 1365 points, PG(3,2) has 15
    assert len(pts) == {(2, 3): 15, (4, 5): 1365}[(q, n)]


def test_line_point_count():
    f = field_for_q(4)
    line = Subspace.from_rows(f, 5, [(1, 0, 0, 0, 0, 0), (0, 1, 0, 0, 0, 0)])
    assert len(line.enumerate_points()) == 5


def test_points_array_matches_mu_order():
    f = field_for_q(4)
    s = Subspace.from_rows(f, 3, [(1, 0, 2, 0), (0, 1, 1, 3)])
    arr = s.points_array()
    mus = list(normalized_tuples(4, 2))
    for mu, row in zip(mus, arr):
        v = [0, 0, 0, 0]
        for m, b in zip(mu, s.basis):
            for c in range(4):
                v[c] ^= f.mul(m, b[c])
        assert tuple(int(x) for x in row) == tuple(v)
        assert normalize_point(f, v) == tuple(v)  # RREF basis keeps mu-points normalized


@pytest.mark.parametrize("q,n", [(2, 3), (4, 3), (2, 5), (4, 5)])
def test_modular_law_randomized(q, n):
    # dim(U meet W) + dim(U span W) = dim U + dim W, vector-space dims
    f = field_for_q(q)
    rng = random.Random(7)
    for _ in range(200):
        ru = [[rng.randrange(q) for _ in range(n + 1)] for _ in range(rng.randrange(1, n + 1))]
        rw = [[rng.randrange(q) for _ in range(n + 1)] for _ in range(rng.randrange(1, n + 1))]
        U = Subspace.from_rows(f, n, ru)
        W = Subspace.from_rows(f, n, rw)
        lhs = (U.meet(W).projdim + 1) + (U.span(W).projdim + 1)
        assert lhs == (U.projdim + 1) + (W.projdim + 1)


def test_meet_and_contains():
    f = field_for_q(2)
    a = Subspace.from_rows(f, 3, [(1, 0, 0, 0), (0, 1, 0, 0)])
    b = Subspace.from_rows(f, 3, [(0, 1, 0, 0), (0, 0, 1, 0)])
    m = a.meet(b)
    assert m.projdim == 0 and m.basis == ((0, 1, 0, 0),)
    assert a.contains(m) and b.contains(m)
    assert a.contains_point((1, 1, 0, 0))
    assert not a.contains_point((0, 0, 1, 0))
    e = Subspace.empty(f, 3)
    assert e.projdim == -1
    assert a.meet(Subspace.from_rows(f, 3, [(0, 0, 1, 0), (0, 0, 0, 1)])).projdim == -1


def test_hyperplane_from_linear_form():
    f = field_for_q(4)
    hp = hyperplane_from_linear_form(f, (0, 1, 0, 0, 0, 0))
    assert hp.projdim == 4
    assert all(row[1] == 0 for row in hp.basis)
    assert len(hp.enumerate_points()) == pg_num_points(4, 4)
    with pytest.raises(ValueError):
        hyperplane_from_linear_form(f, (0,) * 6)


def test_project_from():
    f = field_for_q(4)
    # center = line (last two coords), target = plane (first three coords... n=5)
    center = Subspace.from_rows(f, 5, [(0, 0, 0, 0, 1, 0), (0, 0, 0, 0, 0, 1)])
    target = Subspace.from_rows(
        f, 5, [(1, 0, 0, 0, 0, 0), (0, 1, 0, 0, 0, 0), (0, 0, 1, 0, 0, 0), (0, 0, 0, 1, 0, 0)]
    )
    p = (1, 2, 3, 0, 1, 2)
    img = project_from(f, center, p, target)
    assert img == (1, 2, 3, 0, 0, 0)
    with pytest.raises(ValueError):
        project_from(f, center, (0, 0, 0, 0, 1, 0), target)


def test_subspaces_through_counts():
    f = field_for_q(2)
    # planes through a fixed line of PG(5,2): quotient PG(3,2) -> 15
    line = Subspace.from_rows(f, 5, [(1, 0, 0, 0, 0, 0), (0, 1, 0, 0, 0, 0)])
    planes = list(subspaces_through(f, line, 2))
    assert len(planes) == 15
    assert len(set(planes)) == 15
    assert all(pl.contains(line) and pl.projdim == 2 for pl in planes)
    # a plane through itself: just the plane
    pl = planes[0]
    assert list(subspaces_through(f, pl, 2)) == [pl]
    # points of PG(5,2) through the empty subspace
    empty = Subspace.empty(f, 5)
    pts = list(subspaces_through(f, empty, 0))
    assert len(pts) == 63


@pytest.mark.parametrize("q,k,m", [(2, 2, 4), (4, 2, 4), (2, 3, 6)])
def test_rref_enumeration(q, k, m):
    f = field_for_q(q)
    mats = list(enumerate_rref(f, k, m))
    assert len(mats) == num_subspaces(m, k, q)
    assert len(set(mats)) == len(mats)
    for rows in mats[:: max(1, len(mats) // 50)]:
        assert rref(f, rows) == rows  # already canonical
    bulk = rref_bases_bulk(f, k, m)
    assert bulk.shape[0] == len(mats)
    for i in range(0, len(mats), max(1, len(mats) // 50)):
        assert tuple(tuple(int(x) for x in row) for row in bulk[i]) == mats[i]


def test_num_subspaces_values():
    assert num_subspaces(6, 3, 4) == 376805  # planes of PG(5,4)
    assert num_subspaces(6, 3, 2) == 1395
    assert num_subspaces(4, 2, 16) == 70161  # lines of PG(3,16)


def test_sample_plane_bases_deterministic():
    f = field_for_q(8)
    a = sample_plane_bases(f, 5, 20, np.random.default_rng(3))
    b = sample_plane_bases(f, 5, 20, np.random.default_rng(3))
    assert np.array_equal(a, b)
    for basis in a:
        assert rref(f, basis.tolist()) == tuple(tuple(int(x) for x in r) for r in basis)
