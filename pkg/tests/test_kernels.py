import os
import subprocess
import sys

import numpy as np
import pytest

from kleinoval import kernels
from kleinoval.analysis import _packed_mask6
from kleinoval.constructions import h_from_ovoid, h_lambda, h_q2_complement
from kleinoval.kernels import pure
from kleinoval.ovoids import tits_ovoid
from kleinoval.projspace import normalized_array, rref_bases_bulk
from kleinoval.quadrics import build_setting

native = pytest.importorskip(
    "kleinoval.kernels._native", reason="compiled kernels not built"
)

IMPLS = [pure, native]


def rng():
    return np.random.default_rng(20260818)


def random_coords(field, n, width=6):
    return rng().integers(0, field.q, size=(n, width), dtype=np.uint8)


class TestLinearForm:
    @pytest.mark.parametrize("h", [1, 2, 3, 4])
    def test_twins_agree_on_random_input(self, h):
        field = build_setting(h).field
        coords = random_coords(field, 4097)
        form = rng().integers(0, field.q, size=6, dtype=np.uint8)
        got = [impl.linear_form_values(coords, form, field.mul_table) for impl in IMPLS]
        assert np.array_equal(got[0], got[1])

    def test_matches_a_scalar_reference(self):
        field = build_setting(2).field
        coords = random_coords(field, 64)
        form = np.array([1, 0, 3, 2, 0, 1], dtype=np.uint8)
        want = [
            int(np.bitwise_xor.reduce(
                [field.mul(int(form[k]), int(row[k])) for k in range(6)]
            ))
            for row in coords
        ]
        for impl in IMPLS:
            got = impl.linear_form_values(coords, form, field.mul_table)
            assert got.tolist() == want


class TestQuadraticForm:
    @pytest.mark.parametrize("h", [1, 2, 3, 4])
    def test_twins_agree_on_random_terms(self, h):
        field = build_setting(h).field
        coords = random_coords(field, 2049)
        g = rng()
        terms = np.stack(
            [
                g.integers(0, 6, size=12),
                g.integers(0, 6, size=12),
                g.integers(1, field.q, size=12),
            ],
            axis=1,
        ).astype(np.int64)
        got = [
            impl.quadratic_form_values(coords, terms, field.mul_table)
            for impl in IMPLS
        ]
        assert np.array_equal(got[0], got[1])

    def test_klein_form_vanishes_exactly_on_the_quadric(self):
        setting = build_setting(3)
        terms = np.array([[0, 1, 1], [2, 3, 1], [4, 5, 1]], dtype=np.int64)
        for impl in IMPLS:
            vals = impl.quadratic_form_values(
                setting.model.points, terms, setting.field.mul_table
            )
            assert not vals.any()


class TestIncidenceCounts:
    def test_twins_agree_on_the_line_table(self):
        setting = build_setting(3)
        member = (rng().random(setting.model.n_points) < 0.3).astype(np.uint8)
        got = [impl.incidence_counts(setting.model.lines, member) for impl in IMPLS]
        assert np.array_equal(got[0], got[1])

    def test_matches_fancy_indexing(self):
        setting = build_setting(2)
        member = (rng().random(setting.model.n_points) < 0.5).astype(np.uint8)
        want = member[setting.model.lines].sum(axis=1)
        for impl in IMPLS:
            got = impl.incidence_counts(setting.model.lines, member)
            assert np.array_equal(got, want)

    def test_empty_mask_counts_zero(self):
        setting = build_setting(1)
        member = np.zeros(setting.model.n_points, dtype=np.uint8)
        for impl in IMPLS:
            assert not impl.incidence_counts(setting.model.lines, member).any()


class TestConicPlaneScan:
    def scan_inputs(self, setting, pset):
        field = setting.field
        mus = normalized_array(setting.q, 3)
        hmask = _packed_mask6(setting, pset)
        return mus, field.mul_table, field.inv_table, hmask

    @pytest.mark.parametrize("h", [1, 2])
    def test_twins_agree_on_every_plane(self, h):
        setting = build_setting(h)
        if setting.q == 2:
            pset = h_q2_complement(setting)
        else:
            pset = h_lambda(setting, setting.q - 1)
        bases = rref_bases_bulk(setting.field, 3, 6)
        args = self.scan_inputs(setting, pset)
        got = [
            impl.conic_plane_scan(np.ascontiguousarray(bases), *args, setting.h)
            for impl in IMPLS
        ]
        assert np.array_equal(got[0][0], got[1][0])
        assert np.array_equal(got[0][1], got[1][1])
        assert int(got[0][0].sum()) > 0

    def test_twins_agree_on_a_tits_slice(self):
        setting = build_setting(3)
        pset = h_from_ovoid(setting, tits_ovoid(setting))
        bases = rref_bases_bulk(setting.field, 3, 4)
        lift = np.zeros((bases.shape[0], 3, 6), dtype=np.uint8)
        mul = setting.field.mul_table
        for k in range(4):
            lift ^= mul[bases[:, :, k, None], setting.pi_basis[k][None, None, :]]
        args = self.scan_inputs(setting, pset)
        got = [
            impl.conic_plane_scan(np.ascontiguousarray(lift), *args, setting.h)
            for impl in IMPLS
        ]
        assert np.array_equal(got[0][0], got[1][0])
        assert np.array_equal(got[0][1], got[1][1])

    def test_empty_input(self):
        setting = build_setting(2)
        pset = h_lambda(setting, 1)
        args = self.scan_inputs(setting, pset)
        empty = np.zeros((0, 3, 6), dtype=np.uint8)
        for impl in IMPLS:
            in_u, nuc = impl.conic_plane_scan(empty, *args, setting.h)
            assert in_u.shape == (0,)
            assert nuc.shape == (0, 6)


class TestBackendSelection:
    def test_env_override_forces_pure(self):
        code = (
            "from kleinoval import kernels; "
            "print(kernels.backend_name(), kernels.HAVE_NATIVE)"
        )
        env = dict(os.environ, KLEINOVAL_PURE="1")
        out = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True
        )
        assert out.returncode == 0
        assert out.stdout.split() == ["pure", "False"]

    @pytest.mark.skipif(
        bool(os.environ.get("KLEINOVAL_PURE")), reason="fallback forced by env"
    )
    def test_default_prefers_native_when_built(self):
        assert kernels.backend_name() == "native"
        assert kernels.conic_plane_scan is native.conic_plane_scan
