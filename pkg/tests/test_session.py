import json

import numpy as np
import pytest

from radialcut.errors import GeometryError, InterpolationError, StateError
from radialcut.geometry import SeedPoint, Template, polygon_centroid
from radialcut.graph import GraphParams
from radialcut.metrics import volume_stats
from radialcut.phantom import PhantomSpec, generate
from radialcut.session import (
    Session,
    accept_and_advance,
    export_session,
    finalize,
    interpolate_missing,
    rasterize_polygon,
    redraw,
    replay,
    start_session,
    voxelize,
    voxelize_contours,
)
from radialcut.volume import (
    ContourSet,
    MaskVolume,
    SliceContour,
    Volume3D,
    extract_slice,
    read_contour_set,
    read_nrrd,
    sample_grey,
)

from .oracles import point_in_polygon_yray


def circle(cx, cy, r, m=24):
    ang = 2 * np.pi * np.arange(m) / m
    return np.stack([cx + r * np.cos(ang), cy + r * np.sin(ang)], axis=1)


def tube_session(spec=None, params=None, z0=0):
    spec = spec or PhantomSpec()
    vol, truth = generate(spec)
    cx, cy = spec.centerline_at(z0)
    template = Template(markers=circle(cx, cy, 2.0 * spec.radius_at(z0)), z_index=z0)
    seed = SeedPoint(position=np.array([cx, cy]), z_index=z0)
    sess = start_session(vol, z0, template, seed, params or GraphParams())
    return sess, vol, truth, spec


def slice_dice(contour, truth_slice):
    got = rasterize_polygon(contour, truth_slice.shape[1], truth_slice.shape[0]).astype(bool)
    want = truth_slice.astype(bool)
    denom = got.sum() + want.sum()
    return 2.0 * np.sum(got & want) / denom if denom else 1.0


class TestStartSession:
    def test_phantom_start_holds_first_cut(self):
        sess, _, truth, _ = tube_session()
        assert sess.status == "reviewing"
        assert sess.current_cut is not None
        assert slice_dice(sess.current_cut.contour, truth.values[0]) >= 0.9
        assert sess.contours == {}  # stored only on accept

    def test_seed_outside_template(self):
        spec = PhantomSpec()
        vol, _ = generate(spec)
        template = Template(markers=circle(64, 64, 20), z_index=0)
        seed = SeedPoint(position=np.array([5.0, 5.0]), z_index=0)
        with pytest.raises(GeometryError):
            start_session(vol, 0, template, seed, GraphParams())

    def test_z0_out_of_range(self):
        spec = PhantomSpec()
        vol, _ = generate(spec)
        template = Template(markers=circle(64, 64, 20), z_index=99)
        seed = SeedPoint(position=np.array([64.0, 64.0]), z_index=99)
        with pytest.raises(IndexError):
            start_session(vol, 99, template, seed, GraphParams())


class TestAcceptAndAdvance:
    def test_next_template_is_scaled_cut(self):
        sess, _, _, _ = tube_session()
        cut = sess.current_cut
        center = polygon_centroid(cut.contour)
        accept_and_advance(sess, +1, 1)
        d_cut = np.linalg.norm(cut.contour - center, axis=1)
        d_tpl = np.linalg.norm(sess.current_template.markers - center, axis=1)
        assert np.allclose(d_tpl, 1.6 * d_cut, atol=1e-9)
        assert np.allclose(sess.current_seed.position, center, atol=1e-12)
        assert sess.current_z == 1
        assert sess.contours[0].provenance == "user-drawn"
        assert sess.current_basis == "computed"

    def test_direction_and_skip_validation(self):
        sess, _, _, _ = tube_session(z0=5)
        with pytest.raises(ValueError):
            accept_and_advance(sess, 0, 1)
        with pytest.raises(ValueError):
            accept_and_advance(sess, +1, 0)
        with pytest.raises(IndexError):
            accept_and_advance(sess, -1, 6)

    def test_bidirectional_no_duplicate_contours(self):
        sess, _, _, _ = tube_session(z0=5)
        accept_and_advance(sess, +1, 1)  # 6
        accept_and_advance(sess, +1, 1)  # 7
        accept_and_advance(sess, -1, 3)  # back to 4
        accept_and_advance(sess, -1, 1)  # 3
        finalize(sess)
        assert sorted(sess.contours) == list(range(3, 8))

    def test_tube_traversal_per_slice_dice(self):
        spec = PhantomSpec(sizes=(96, 96, 20), center=(48.0, 48.0),
                           drift_amplitude=5.0, radius_profile="constant",
                           radius_start=12.0, radius_end=12.0)
        sess, vol, truth, _ = tube_session(spec)
        for _ in range(19):
            accept_and_advance(sess, +1, 1)
        finalize(sess)
        assert len(sess.contours) == 20
        for z, contour in sess.contours.items():
            assert contour.provenance in ("user-drawn", "computed")
            assert slice_dice(contour.vertices, truth.values[z]) >= 0.9

    def test_degenerate_cut_blocks_advance(self):
        # featureless slice: constant costs collapse the cut onto the
        # innermost nodes, below the minimum area
        vol = Volume3D(values=np.full((4, 32, 32), 80, np.float32))
        template = Template(markers=circle(16, 16, 6.0, m=12), z_index=0)
        seed = SeedPoint(position=np.array([16.0, 16.0]), z_index=0)
        sess = start_session(vol, 0, template, seed, GraphParams(k=12, n=30))
        with pytest.raises(GeometryError, match="redraw"):
            accept_and_advance(sess, +1, 1)
        # session unchanged and still usable
        assert sess.current_z == 0
        assert sess.status == "reviewing"

    def test_requires_reviewing(self):
        sess, _, _, _ = tube_session()
        finalize(sess)
        with pytest.raises(StateError):
            accept_and_advance(sess, +1, 1)


class TestRedraw:
    def test_identical_template_identical_cut(self):
        sess, _, _, _ = tube_session()
        before = sess.current_cut
        redraw(sess, sess.current_template, sess.current_seed)
        after = sess.current_cut
        assert np.array_equal(before.boundary, after.boundary)
        assert np.array_equal(before.contour, after.contour)
        assert before.cut_cost == after.cut_cost

    def test_larger_template_still_locks_disk_edge(self):
        sess, vol, truth, spec = tube_session()
        cx, cy = spec.centerline_at(0)
        bigger = Template(markers=circle(cx, cy, 3.0 * spec.radius_at(0)), z_index=0)
        redraw(sess, bigger, sess.current_seed)
        assert slice_dice(sess.current_cut.contour, truth.values[0]) >= 0.9
        assert sess.current_basis == "user-drawn"

    def test_redraw_after_finalize_rejected(self):
        sess, _, _, _ = tube_session()
        finalize(sess)
        with pytest.raises(StateError):
            redraw(sess, sess.current_template, sess.current_seed)

    def test_redraw_off_slice_rejected(self):
        sess, _, _, _ = tube_session()
        t = Template(markers=circle(64, 64, 20), z_index=3)
        with pytest.raises(GeometryError):
            redraw(sess, t, sess.current_seed)


def manual_session(contours, gaps, k=24, nz=8):
    """Session carrier for interpolation unit tests (no segmentation run)."""
    vol = Volume3D(values=np.zeros((nz, 64, 64), np.float32))
    return Session(
        volume=vol,
        params=GraphParams(k=k, n=10),
        contours={c.z: c for c in contours},
        gaps=set(gaps),
    )


class TestInterpolateMissing:
    def test_identical_brackets_identical_fill(self):
        tri = circle(30, 30, 10, m=24)
        sess = manual_session(
            [SliceContour(z=0, vertices=tri, provenance="computed"),
             SliceContour(z=2, vertices=tri, provenance="computed")],
            gaps=[1],
        )
        interpolate_missing(sess)
        filled = sess.contours[1]
        assert filled.provenance == "interpolated"
        d = np.linalg.norm(filled.vertices - np.array([30.0, 30.0]), axis=1)
        assert np.allclose(d, 10.0, atol=1e-9)

    def test_radius_blend(self):
        # radius 10 at z=0, 20 at z=2: the z=1 fill has radius 15 per angle
        sess = manual_session(
            [SliceContour(z=0, vertices=circle(32, 32, 10, m=24), provenance="computed"),
             SliceContour(z=2, vertices=circle(32, 32, 20, m=24), provenance="computed")],
            gaps=[1],
        )
        interpolate_missing(sess)
        d = np.linalg.norm(sess.contours[1].vertices - np.array([32.0, 32.0]), axis=1)
        assert np.allclose(d, 15.0, atol=1e-6)

    def test_centroid_blend(self):
        sess = manual_session(
            [SliceContour(z=0, vertices=circle(20, 30, 8, m=24), provenance="computed"),
             SliceContour(z=4, vertices=circle(28, 30, 8, m=24), provenance="computed")],
            gaps=[1, 2, 3],
        )
        interpolate_missing(sess)
        c2 = polygon_centroid(sess.contours[2].vertices)
        assert np.allclose(c2, [24.0, 30.0], atol=1e-6)

    def test_orphan_gap_reported(self):
        sess = manual_session(
            [SliceContour(z=0, vertices=circle(32, 32, 10), provenance="computed")],
            gaps=[1],
        )
        with pytest.raises(InterpolationError, match=r"\[1\]"):
            interpolate_missing(sess)

    def test_cone_phantom_interpolated_slices(self):
        spec = PhantomSpec()
        sess, vol, truth, _ = tube_session(spec)
        for _ in range(11):
            accept_and_advance(sess, +1, 2)  # visit 0, 2, ..., 22
        finalize(sess)
        assert sorted(sess.contours) == list(range(23))
        for z in range(1, 22, 2):
            assert sess.contours[z].provenance == "interpolated"
            assert slice_dice(sess.contours[z].vertices, truth.values[z]) >= 0.9


class TestVoxelize:
    def test_nine_voxel_square(self):
        square = np.array([[0.5, 0.5], [3.5, 0.5], [3.5, 3.5], [0.5, 3.5]])
        cs = ContourSet(contours=(SliceContour(z=0, vertices=square),))
        mask = voxelize_contours(cs, (5, 5, 1), (1, 1, 1))
        assert int(mask.values.sum()) == 9
        assert np.array_equal(np.argwhere(mask.values[0]) % 5 >= 1,
                              np.ones((9, 2), dtype=bool))

    def test_triangle_matches_per_pixel_oracle(self, rng):
        for _ in range(20):
            tri = rng.uniform(1, 19, size=(3, 2))
            u, v = tri[1] - tri[0], tri[2] - tri[0]
            if abs(u[0] * v[1] - u[1] * v[0]) < 1.0:
                continue
            raster = rasterize_polygon(tri, 20, 20)
            for y in range(20):
                for x in range(20):
                    assert bool(raster[y, x]) == point_in_polygon_yray((x, y), tri)

    def test_self_intersecting_filled_even_odd(self):
        # vertices chosen so no pixel center lies exactly on an edge
        bowtie = np.array([[0.21, 0.34], [10.23, 10.41], [10.19, 0.27], [0.33, 10.37]])
        raster = rasterize_polygon(bowtie, 12, 12)
        for y in range(12):
            for x in range(12):
                assert bool(raster[y, x]) == point_in_polygon_yray((x, y), bowtie)

    def test_volume_chain(self):
        sess, vol, _, _ = tube_session()
        for _ in range(5):
            accept_and_advance(sess, +1, 1)
        finalize(sess)
        mask = voxelize(sess)
        count, cm3 = volume_stats(mask)
        sx, sy, sz = vol.spacing
        assert cm3 == pytest.approx(count * sx * sy * sz / 1000.0)
        assert mask.sizes == vol.sizes
        assert mask.spacing == vol.spacing

    def test_requires_finalized(self):
        sess, _, _, _ = tube_session()
        with pytest.raises(StateError):
            voxelize(sess)


class TestExport:
    def test_round_trip(self):
        sess, vol, _, _ = tube_session()
        for _ in range(3):
            accept_and_advance(sess, +1, 2)
        finalize(sess)
        contours_bytes, mask_bytes = export_session(sess)
        cs = read_contour_set(contours_bytes)
        assert len(cs.contours) == len(sess.contours)
        mask = read_nrrd(mask_bytes)
        assert mask.sizes == vol.sizes
        assert mask.spacing == vol.spacing
        again = voxelize(sess)
        assert np.array_equal(MaskVolume.from_volume(mask).values, again.values)

    def test_not_finalized_rejected(self):
        sess, _, _, _ = tube_session()
        with pytest.raises(StateError):
            export_session(sess)


class TestReplay:
    def scripted(self):
        sess, vol, truth, _ = tube_session()
        accept_and_advance(sess, +1, 2)
        redraw(sess, sess.current_template, sess.current_seed)
        accept_and_advance(sess, +1, 1)
        accept_and_advance(sess, +1, 2)
        finalize(sess)
        return sess, vol, truth

    def test_replay_reproduces_export_bit_for_bit(self):
        sess, vol, _ = self.scripted()
        doc = sess.to_replay_json()
        exports = [export_session(replay(vol, doc)) for _ in range(3)]
        original = export_session(sess)
        for contours_bytes, mask_bytes in exports:
            assert contours_bytes == original[0]
            assert mask_bytes == original[1]

    def test_replay_event_validation(self):
        sess, vol, _ = self.scripted()
        with pytest.raises(Exception, match="start"):
            replay(vol, json.dumps({"events": [{"op": "finalize"}]}))
        doc = json.loads(sess.to_replay_json())
        doc["events"].insert(1, {"op": "undo"})
        with pytest.raises(Exception, match="unknown op"):
            replay(vol, json.dumps(doc))
        with pytest.raises(Exception, match="missing field"):
            replay(vol, json.dumps({"events": [{"op": "start"}]}))
        with pytest.raises(Exception):
            replay(vol, b"{not json")

    def test_event_log_contents(self):
        sess, _, _ = self.scripted()
        ops = [e["op"] for e in sess.events]
        assert ops == ["start", "accept_and_advance", "redraw",
                       "accept_and_advance", "accept_and_advance", "finalize"]
        assert all("time" in e for e in sess.events)
        assert sess.elapsed_seconds() >= 0.0


class TestScaleInvariance:
    def test_boundary_indices_survive_coordinate_doubling(self, rng):
        # doubling all coordinates against a 2x bilinear upsample of the image
        # (and halving the spacing) leaves every boundary index unchanged
        base = rng.integers(0, 200, size=(3, 40, 40)).astype(np.float32)
        nz, ny, nx = base.shape
        vol1 = Volume3D(values=base, spacing=(1.0, 1.0, 1.0))

        ys = np.arange(2 * ny - 1) / 2.0
        xs = np.arange(2 * nx - 1) / 2.0
        up = np.empty((nz, 2 * ny - 1, 2 * nx - 1), dtype=np.float32)
        for z in range(nz):
            slc = extract_slice(vol1, z)
            pts = np.stack(np.meshgrid(xs, ys, indexing="xy"), axis=-1).reshape(-1, 2)
            from radialcut.volume import sample_grey_many

            up[z] = sample_grey_many(slc, pts).reshape(2 * ny - 1, 2 * nx - 1)
        vol2 = Volume3D(values=up, spacing=(0.5, 0.5, 0.5))

        markers = circle(20.0, 20.0, 12.0, m=16)
        params = GraphParams(k=16, n=12, delta=2)
        from radialcut.graph import segment_one_slice
        from radialcut.geometry import scale_template

        t1 = Template(markers=markers, z_index=0)
        s1 = SeedPoint(position=np.array([20.0, 20.0]), z_index=0)
        t2 = Template(markers=2.0 * markers, z_index=0)
        s2 = SeedPoint(position=np.array([40.0, 40.0]), z_index=0)
        for z in range(3):
            cut1 = segment_one_slice(extract_slice(vol1, z), t1, s1, params)
            cut2 = segment_one_slice(extract_slice(vol2, z), t2, s2, params)
            assert np.array_equal(cut1.boundary, cut2.boundary)
            if z == 2:
                break
            c1 = polygon_centroid(cut1.contour)
            c2 = polygon_centroid(cut2.contour)
            t1 = scale_template(Template(markers=cut1.contour, z_index=z + 1),
                                params.sf, c1)
            t2 = scale_template(Template(markers=cut2.contour, z_index=z + 1),
                                params.sf, c2)
            s1 = SeedPoint(position=c1, z_index=z + 1)
            s2 = SeedPoint(position=c2, z_index=z + 1)
