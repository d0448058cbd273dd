import numpy as np
import pytest

from reliefgen import (ReliefParams, SessionConfig, prepare_session)
from reliefgen.errors import NoFrameYet, TargetExceedsInput

from conftest import fibonacci_hemisphere, flat_grid


def params_sequence():
    return [ReliefParams(alpha=a, beta=b, gamma=g)
            for a, b, g in [(2.0, 0.01, 0.0), (4.0, 0.5, 0.02),
                            (8.0, 1.0, 0.05), (1.0, 0.1, 0.0)]]


class TestPrepare:
    def test_flat_grid_session(self):
        cloud = flat_grid(10, 10)
        ses = prepare_session(cloud, config=SessionConfig(target_controls=100))
        assert ses.point_count == 100
        frame = ses.latest_frame()
        assert frame.seq == 1
        assert frame.span == pytest.approx(0.0, abs=1e-9)
        assert set(ses.prepare_timings) >= {
            "visible_ms", "curvature_ms", "sampling_ms", "factorize_ms",
            "reference_ms", "triangulate_ms"}

    def test_too_many_controls_requested_is_capped(self):
        cloud = flat_grid(10, 10)
        # prepare caps the request at the visible count instead of failing
        ses = prepare_session(cloud,
                              config=SessionConfig(target_controls=5000))
        assert len(ses.controls) <= 100


class TestAdjust:
    def test_seq_increases(self):
        ses = prepare_session(fibonacci_hemisphere(3000),
                              config=SessionConfig(target_controls=800))
        seqs = [ses.adjust(p).seq for p in params_sequence()]
        assert seqs == sorted(seqs)
        assert len(set(seqs)) == len(seqs)

    def test_pipelined_lags_one_step(self):
        ses = prepare_session(fibonacci_hemisphere(3000),
                              config=SessionConfig(target_controls=800))
        seq = params_sequence()
        frames = [ses.adjust(p) for p in seq]
        # frame i reports span for params i but geometry for params i-1
        expect_geom = [ses.config.initial_params] + seq[:-1]
        for f, p, gp in zip(frames, seq, expect_geom):
            assert f.params == p
            assert f.geom_params == gp

    def test_pipeline_matches_reference_mode(self):
        cloud = fibonacci_hemisphere(3000)
        pip = prepare_session(cloud, config=SessionConfig(target_controls=800))
        ref = prepare_session(cloud, config=SessionConfig(target_controls=800,
                                                          reference_mode=True))
        seq = params_sequence()
        ref_frames = {}
        ref_frames[pip.config.initial_params] = ref.latest_frame()
        for p in seq:
            ref_frames[p] = ref.adjust(p)
        for f in [pip.adjust(p) for p in seq]:
            expect = ref_frames[f.geom_params]
            assert np.array_equal(f.z, expect.z)  # bit-exact
            assert np.array_equal(f.normals, expect.normals)

    def test_error_returns_last_good_frame(self):
        ses = prepare_session(fibonacci_hemisphere(3000),
                              config=SessionConfig(target_controls=800))
        good = ses.adjust(ReliefParams())
        bad_base = _ExplodingBase()
        frame = ses.adjust(ReliefParams(base=bad_base))
        assert frame.error is not None
        assert np.array_equal(frame.z, good.z)


class _ExplodingBase:
    def eval_xy(self, xy):
        raise TargetExceedsInput("boom")

    def eval(self, x, y):
        raise TargetExceedsInput("boom")


class TestExport:
    def test_export_drains_pipeline(self):
        ses = prepare_session(fibonacci_hemisphere(3000),
                              config=SessionConfig(target_controls=800))
        p = ReliefParams(alpha=9.0, beta=1.0, gamma=0.0)
        frame = ses.adjust(p)
        assert frame.geom_params != p    # geometry still lags
        mesh = ses.export_mesh()         # drain: mesh reflects p
        ref = prepare_session(ses.cloud, config=SessionConfig(
            target_controls=800, reference_mode=True))
        expect = ref.adjust(p)
        assert np.allclose(mesh.vertices[:, 2], expect.z)

    def test_mesh_shape(self):
        ses = prepare_session(fibonacci_hemisphere(2000),
                              config=SessionConfig(target_controls=600))
        mesh = ses.export_mesh()
        assert mesh.vertices.shape[0] == ses.point_count
        assert mesh.triangles.max() < ses.point_count

    def test_timings_recorded(self):
        ses = prepare_session(fibonacci_hemisphere(2000),
                              config=SessionConfig(target_controls=600))
        f = ses.adjust(ReliefParams(alpha=3.0))
        assert set(f.timings) == {"solve_ms", "map_ms", "normal_ms"}
        assert all(v >= 0.0 for v in f.timings.values())
