import io
import json

import pytest

from reliefgen.cli import main
from reliefgen.cloud import load_mesh


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestGen:
    def test_basic(self, hemi_ply, tmp_path, capsys):
        out = tmp_path / "out.ply"
        code, stdout, _ = run(capsys, "gen", "-i", str(hemi_ply),
                              "-o", str(out), "--controls", "1000")
        assert code == 0
        v, t, n = load_mesh(io.BytesIO(out.read_bytes()), "ply")
        assert len(t) > 0
        assert json.loads(stdout)["span"] > 0

    def test_deterministic_output(self, hemi_ply, tmp_path, capsys):
        blobs = []
        for name in ("a.ply", "b.ply"):
            out = tmp_path / name
            code, _, _ = run(capsys, "gen", "-i", str(hemi_ply),
                             "-o", str(out), "--controls", "1000")
            assert code == 0
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1]

    def test_obj_output(self, hemi_ply, tmp_path, capsys):
        out = tmp_path / "out.obj"
        code, _, _ = run(capsys, "gen", "-i", str(hemi_ply), "-o", str(out),
                         "--controls", "1000")
        assert code == 0
        assert out.read_text().startswith("v ")

    def test_base_flag(self, hemi_ply, tmp_path, capsys):
        out = tmp_path / "out.ply"
        code, _, _ = run(capsys, "gen", "-i", str(hemi_ply), "-o", str(out),
                         "--controls", "1000", "--base", "wave:0.1,2.0,x")
        assert code == 0

    def test_timings_flag(self, hemi_ply, tmp_path, capsys):
        code, stdout, _ = run(capsys, "gen", "-i", str(hemi_ply),
                              "-o", str(tmp_path / "o.ply"),
                              "--controls", "1000", "--timings",
                              "--reference-mode")
        assert code == 0
        assert "curvature_ms" in stdout


class TestTarget:
    def test_height_frac(self, hemi_ply, tmp_path, capsys):
        out = tmp_path / "out.ply"
        code, stdout, _ = run(capsys, "target", "-i", str(hemi_ply),
                              "-o", str(out), "--controls", "1500",
                              "--height-frac", "0.05", "--gamma", "0")
        assert code == 0
        rep = json.loads(stdout)
        # reported span within 1% of 0.05 * L_d (diagonal = 3 for the dome)
        assert abs(rep["span"] - 0.05 * 3.0) / (0.05 * 3.0) <= 0.011
        assert out.exists()


class TestErrors:
    def test_missing_normals_exit_3(self, tmp_path, capsys):
        bad = tmp_path / "bad.ply"
        bad.write_bytes(b"ply\nformat ascii 1.0\nelement vertex 4\n"
                        b"property float x\nproperty float y\n"
                        b"property float z\nend_header\n"
                        b"0 0 0\n1 0 0\n0 1 0\n1 1 0\n")
        code, _, err = run(capsys, "gen", "-i", str(bad),
                           "-o", str(tmp_path / "o.ply"))
        assert code == 3
        assert "MissingNormals" in err

    def test_missing_file_exit_2(self, tmp_path, capsys):
        code, _, err = run(capsys, "gen", "-i", str(tmp_path / "nope.ply"),
                           "-o", str(tmp_path / "o.ply"))
        assert code == 2

    def test_usage_exit_1(self, capsys):
        assert main(["gen"]) == 1          # missing required flags
        assert main(["frobnicate"]) == 1   # unknown subcommand
        capsys.readouterr()

    def test_bad_base_exit_1(self, hemi_ply, tmp_path, capsys):
        code, _, _ = run(capsys, "gen", "-i", str(hemi_ply),
                         "-o", str(tmp_path / "o.ply"),
                         "--base", "noidea:1")
        assert code == 1


class TestInfo:
    def test_info_json(self, hemi_ply, capsys):
        code, stdout, _ = run(capsys, "info", "-i", str(hemi_ply),
                              "--controls", "1000")
        assert code == 0
        out = json.loads(stdout)
        assert out["points"] == 8000
        assert 0 < out["visible"] <= 8000
        assert out["diagonal"] == pytest.approx(3.0, rel=0.01)
