import json

import pytest

from kleinoval import cli
from kleinoval.constructions import PointSet, h_lambda
from kleinoval.quadrics import build_setting


def run_cli(capsys, *args):
    """Invoke main() in-process; normalize argparse's SystemExit to a code."""
    try:
        code = cli.main(list(args))
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


class TestConstruct:
    def test_q2_defaults_to_the_complement(self, capsys):
        code, out, err = run_cli(capsys, "construct", "--q", "2")
        assert code == 0
        data = json.loads(out)
        assert data["construction"] == "q2-complement"
        assert data["size"] == 16
        assert "16 points" in err

    def test_lambda_family_writes_a_loadable_file(self, capsys, tmp_path):
        path = tmp_path / "h.json"
        code, out, _ = run_cli(
            capsys, "construct", "--q", "4", "--family", "lambda",
            "--lambda", "3", "--out", str(path),
        )
        assert code == 0
        assert out == ""
        s = build_setting(2)
        ps = PointSet.from_json(json.loads(path.read_text()), s)
        assert ps.indices == h_lambda(s, 3).indices

    def test_ovoid_family_sizes_track_the_contact_type(self, capsys):
        code, out, _ = run_cli(
            capsys, "construct", "--q", "4", "--family", "ovoid", "--b", "0,1,0,0"
        )
        assert code == 0
        assert json.loads(out)["size"] == 96
        code, out, _ = run_cli(
            capsys, "construct", "--q", "4", "--family", "ovoid", "--b", "0,0,0,2"
        )
        assert code == 0
        assert json.loads(out)["size"] == 72

    def test_eq1_family_matches_the_direct_route(self, capsys):
        code, direct, _ = run_cli(
            capsys, "construct", "--q", "4", "--family", "lambda", "--lambda", "2"
        )
        assert code == 0
        code, engine, _ = run_cli(
            capsys, "construct", "--q", "4", "--family", "eq1", "--lambda", "2"
        )
        assert code == 0
        assert json.loads(direct)["indices"] == json.loads(engine)["indices"]

    def test_inadmissible_b_is_a_construction_failure(self, capsys):
        code, out, err = run_cli(
            capsys, "construct", "--q", "4", "--family", "ovoid", "--b", "0,0,0,1"
        )
        assert code == 1
        assert out == ""
        assert "not elliptic" in err


class TestUsageErrors:
    @pytest.mark.parametrize(
        "argv",
        [
            ("construct", "--q", "5"),
            ("construct", "--q", "4"),
            ("construct", "--q", "4", "--family", "lambda"),
            ("construct", "--q", "4", "--family", "lambda", "--lambda", "0"),
            ("construct", "--q", "4", "--family", "lambda", "--lambda", "all"),
            ("construct", "--q", "2", "--family", "lambda", "--lambda", "1"),
            ("construct", "--q", "4", "--family", "q2"),
            ("construct", "--q", "4", "--family", "ovoid"),
            ("construct", "--q", "4", "--family", "ovoid", "--ovoid", "tits"),
            ("construct", "--q", "4", "--family", "lambda", "--lambda", "2",
             "--b", "0,1,0,0"),
            ("construct", "--q", "4", "--family", "ovoid", "--b", "0,1,0"),
            ("construct", "--q", "4", "--family", "ovoid", "--b", "0,1,0,g"),
            ("construct", "--q", "8", "--family", "ovoid", "--ovoid", "tits",
             "--b", "1,0,0,0"),
            ("construct", "--q", "32"),
            ("verify", "--q", "8", "--family", "ovoid", "--ovoid", "tits",
             "--scan", "exhaustive"),
            ("crosscheck", "--q", "2"),
            ("classify", "--q", "4", "--jobs", "0"),
        ],
    )
    def test_bad_flags_exit_2(self, capsys, argv):
        code, _, err = run_cli(capsys, *argv)
        assert code == 2
        assert err

    def test_in_file_excludes_build_flags(self, capsys, tmp_path):
        path = tmp_path / "h.json"
        run_cli(capsys, "construct", "--q", "4", "--family", "lambda",
                "--lambda", "1", "--out", str(path))
        code, _, err = run_cli(
            capsys, "verify", "--q", "4", "--in", str(path),
            "--family", "lambda", "--lambda", "1",
        )
        assert code == 2
        assert "drop them" in err


class TestVerify:
    def test_roundtrip_passes(self, capsys, tmp_path):
        path = tmp_path / "h.json"
        run_cli(capsys, "construct", "--q", "4", "--family", "lambda",
                "--lambda", "1", "--out", str(path))
        code, out, err = run_cli(capsys, "verify", "--q", "4", "--in", str(path))
        assert code == 0
        report = json.loads(out)
        assert report["passed"] is True
        names = [c["name"] for c in report["checks"]]
        assert names == [
            "lines-carry-zero-or-two",
            "planes-carry-zero-or-all",
            "size-at-least-half-cover",
            "ovoid-recovery-round-trip",
            "disjoint-planes-are-those-through-contact-points",
        ]
        assert "PASS" in err

    def test_mutilated_file_fails_with_witness(self, capsys, tmp_path):
        good = tmp_path / "good.json"
        run_cli(capsys, "construct", "--q", "4", "--family", "lambda",
                "--lambda", "1", "--out", str(good))
        data = json.loads(good.read_text())
        data["indices"] = data["indices"][1:]
        data["points"] = data["points"][1:]
        data["size"] -= 1
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(data))

        code, out, err = run_cli(capsys, "verify", "--q", "4", "--in", str(bad))
        assert code == 1
        report = json.loads(out)
        assert report["passed"] is False
        lines = next(c for c in report["checks"] if c["name"].startswith("lines"))
        assert lines["passed"] is False
        assert lines["witness"] is not None
        assert "FAIL" in err

    def test_wrong_field_for_the_file_is_a_usage_error(self, capsys, tmp_path):
        path = tmp_path / "h.json"
        run_cli(capsys, "construct", "--q", "4", "--family", "lambda",
                "--lambda", "1", "--out", str(path))
        code, _, err = run_cli(capsys, "verify", "--q", "8", "--in", str(path))
        assert code == 2
        assert "error reading" in err

    def test_missing_file_is_a_usage_error(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, "verify", "--q", "4", "--in", str(tmp_path / "nope.json")
        )
        assert code == 2

    def test_tits_subject_gets_the_span_stage(self, capsys):
        code, out, _ = run_cli(
            capsys, "verify", "--q", "8", "--family", "ovoid", "--ovoid", "tits",
            "--scan", "classes",
        )
        assert code == 0
        report = json.loads(out)
        span = next(
            c for c in report["checks"]
            if c["name"] == "conic-nuclei-span-the-base-solid"
        )
        assert span["passed"] is True
        assert span["counts"]["span_projdim"] == 3

    def test_classical_subject_skips_the_span_stage(self, capsys):
        code, out, _ = run_cli(
            capsys, "verify", "--q", "4", "--family", "ovoid", "--b", "0,1,0,0"
        )
        assert code == 0
        names = {c["name"] for c in json.loads(out)["checks"]}
        assert "conic-nuclei-span-the-base-solid" not in names

    def test_identical_invocations_are_byte_identical(self, capsys):
        argv = ("verify", "--q", "8", "--family", "ovoid", "--ovoid", "tits",
                "--scan", "sample", "--seed", "7")
        code1, out1, _ = run_cli(capsys, *argv)
        code2, out2, _ = run_cli(capsys, *argv)
        assert code1 == code2 == 0
        assert out1 == out2


class TestClassify:
    def test_q2_has_one_class(self, capsys):
        code, out, _ = run_cli(capsys, "classify", "--q", "2")
        assert code == 0
        data = json.loads(out)
        assert data["class_count"] == 1
        assert data["trace_zero_orbit_count"] == 0
        assert data["classes"][0]["tag"] == "tangent"
        assert data["passed"] is True

    def test_q4_census_and_jobs_determinism(self, capsys):
        code, out1, err = run_cli(capsys, "classify", "--q", "4", "--jobs", "1")
        assert code == 0
        data = json.loads(out1)
        assert data["class_count"] == 2
        assert data["orbit_reps"] == ["1"]
        counts = {row["tag"]: row["count"] for row in data["classes"]}
        assert counts == {"tangent": 51, "1": 68}
        assert "2 classes (expected 2)" in err

        code, out3, _ = run_cli(capsys, "classify", "--q", "4", "--jobs", "3")
        assert code == 0
        assert out3 == out1


class TestCrosscheck:
    def test_q4_all_lambdas_agree(self, capsys):
        code, out, err = run_cli(capsys, "crosscheck", "--q", "4")
        assert code == 0
        data = json.loads(out)
        assert data["passed"] is True
        assert [e["lambda"] for e in data["entries"]] == ["1", "2", "3"]
        assert all(e["size"] == 96 for e in data["entries"])
        assert err.count("three routes agree") == 3

    def test_single_lambda(self, capsys):
        code, out, _ = run_cli(capsys, "crosscheck", "--q", "4", "--lambda", "2")
        assert code == 0
        data = json.loads(out)
        assert len(data["entries"]) == 1
        assert data["entries"][0]["lambda"] == "2"
