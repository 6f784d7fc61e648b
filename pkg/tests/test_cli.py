import json

import numpy as np
import pytest

from radialcut.cli import main
from radialcut.geometry import SeedPoint, Template
from radialcut.graph import GraphParams
from radialcut.metrics import dsc
from radialcut.phantom import PhantomSpec, generate
from radialcut.session import accept_and_advance, finalize, start_session
from radialcut.volume import MaskVolume, read_nrrd, write_nrrd


def circle(cx, cy, r, m=24):
    ang = 2 * np.pi * np.arange(m) / m
    return np.stack([cx + r * np.cos(ang), cy + r * np.sin(ang)], axis=1)


@pytest.fixture
def phantom_files(tmp_path):
    spec = PhantomSpec()
    vol, truth = generate(spec)
    vol_path = tmp_path / "vol.nrrd"
    truth_path = tmp_path / "truth.nrrd"
    vol_path.write_bytes(write_nrrd(vol))
    truth_path.write_bytes(write_nrrd(truth))
    return spec, vol, truth, vol_path, truth_path


@pytest.fixture
def replay_file(phantom_files, tmp_path):
    spec, vol, _, vol_path, truth_path = phantom_files
    cx, cy = spec.centerline_at(0)
    sess = start_session(
        vol,
        0,
        Template(markers=circle(cx, cy, 2 * spec.radius_at(0)), z_index=0),
        SeedPoint(position=np.array([cx, cy]), z_index=0),
        GraphParams(),
    )
    for _ in range(11):
        accept_and_advance(sess, +1, 2)
    finalize(sess)
    path = tmp_path / "replay.json"
    path.write_bytes(sess.to_replay_json())
    return path


class TestEvaluate:
    def test_identical_masks(self, phantom_files, tmp_path, capsys):
        *_, truth_path = phantom_files
        report = tmp_path / "report.json"
        code = main(["evaluate", "--a", str(truth_path), "--b", str(truth_path),
                     "--report", str(report)])
        assert code == 0
        doc = json.loads(report.read_text())
        assert doc["datasets"][0]["dsc_percent"] == 100.0
        assert doc["datasets"][0]["hausdorff_voxel"] == 0.0
        out = capsys.readouterr().out
        assert "100.00" in out

    def test_geometry_mismatch_is_data_error(self, phantom_files, tmp_path, capsys):
        *_, truth_path = phantom_files
        other = MaskVolume(values=np.ones((2, 2, 2), np.uint8))
        other_path = tmp_path / "other.nrrd"
        other_path.write_bytes(write_nrrd(other))
        code = main(["evaluate", "--a", str(truth_path), "--b", str(other_path)])
        assert code == 2
        assert "differ" in capsys.readouterr().err

    def test_non_mask_input_is_data_error(self, phantom_files, capsys):
        _, _, _, vol_path, truth_path = phantom_files
        code = main(["evaluate", "--a", str(vol_path), "--b", str(truth_path)])
        assert code == 2

    def test_missing_file_is_data_error(self, tmp_path):
        code = main(["evaluate", "--a", str(tmp_path / "no.nrrd"),
                     "--b", str(tmp_path / "no.nrrd")])
        assert code == 2


class TestSegment:
    def test_replay_on_phantom(self, phantom_files, replay_file, tmp_path):
        _, _, truth, vol_path, _ = phantom_files
        out_mask = tmp_path / "mask.nrrd"
        out_contours = tmp_path / "contours.json"
        code = main(["segment", "--volume", str(vol_path), "--replay", str(replay_file),
                     "--out-mask", str(out_mask), "--out-contours", str(out_contours)])
        assert code == 0
        mask = MaskVolume.from_volume(read_nrrd(out_mask.read_bytes()))
        assert dsc(mask, truth) >= 90.0
        doc = json.loads(out_contours.read_text())
        assert len(doc["slices"]) == 23

    def test_replay_determinism_bit_identical(self, phantom_files, replay_file, tmp_path):
        *_, vol_path, _ = phantom_files
        outputs = []
        for i in range(3):
            out_mask = tmp_path / f"mask{i}.nrrd"
            out_contours = tmp_path / f"contours{i}.json"
            assert main(["segment", "--volume", str(vol_path),
                         "--replay", str(replay_file),
                         "--out-mask", str(out_mask),
                         "--out-contours", str(out_contours)]) == 0
            outputs.append((out_mask.read_bytes(), out_contours.read_bytes()))
        assert outputs[0] == outputs[1] == outputs[2]

    def test_parameter_override_changes_result(self, phantom_files, replay_file, tmp_path):
        *_, vol_path, _ = phantom_files
        a = tmp_path / "a.nrrd"
        b = tmp_path / "b.nrrd"
        assert main(["segment", "--volume", str(vol_path), "--replay",
                     str(replay_file), "--out-mask", str(a)]) == 0
        assert main(["segment", "--volume", str(vol_path), "--replay",
                     str(replay_file), "--out-mask", str(b), "--nodes", "20"]) == 0
        assert a.read_bytes() != b.read_bytes()

    def test_invalid_delta_rejected(self, phantom_files, replay_file, tmp_path):
        *_, vol_path, _ = phantom_files
        code = main(["segment", "--volume", str(vol_path), "--replay",
                     str(replay_file), "--delta", "3",
                     "--out-mask", str(tmp_path / "m.nrrd")])
        assert code == 2

    def test_corrupt_replay_is_data_error(self, phantom_files, tmp_path):
        *_, vol_path, _ = phantom_files
        bad = tmp_path / "bad.json"
        bad.write_text("{]")
        assert main(["segment", "--volume", str(vol_path), "--replay", str(bad)]) == 2


class TestPhantomCommand:
    def test_default_spec(self, tmp_path):
        out_v = tmp_path / "v.nrrd"
        out_t = tmp_path / "t.nrrd"
        assert main(["phantom", "--out-volume", str(out_v), "--out-truth", str(out_t)]) == 0
        vol = read_nrrd(out_v.read_bytes())
        truth = read_nrrd(out_t.read_bytes())
        assert vol.sizes == (128, 128, 24)
        assert truth.sizes == vol.sizes

    def test_custom_spec(self, tmp_path):
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(PhantomSpec(sizes=(32, 32, 4), center=(16, 16),
                                         drift_amplitude=1.0, radius_start=5.0,
                                         radius_end=6.0).to_json())
        out_v = tmp_path / "v.nrrd"
        out_t = tmp_path / "t.nrrd"
        assert main(["phantom", "--spec", str(spec_path),
                     "--out-volume", str(out_v), "--out-truth", str(out_t)]) == 0
        assert read_nrrd(out_v.read_bytes()).sizes == (32, 32, 4)

    def test_bad_spec(self, tmp_path):
        spec_path = tmp_path / "spec.json"
        spec_path.write_text('{"sizes": "huge"}')
        assert main(["phantom", "--spec", str(spec_path),
                     "--out-volume", str(tmp_path / "v.nrrd"),
                     "--out-truth", str(tmp_path / "t.nrrd")]) == 2


class TestConvert:
    def test_contours_to_mask(self, phantom_files, replay_file, tmp_path):
        *_, vol_path, _ = phantom_files
        contours = tmp_path / "c.json"
        mask_a = tmp_path / "a.nrrd"
        assert main(["segment", "--volume", str(vol_path), "--replay",
                     str(replay_file), "--out-mask", str(mask_a),
                     "--out-contours", str(contours)]) == 0
        mask_b = tmp_path / "b.nrrd"
        assert main(["convert", "--contours", str(contours), "--like", str(vol_path),
                     "--out-mask", str(mask_b)]) == 0
        assert mask_a.read_bytes() == mask_b.read_bytes()


class TestUsage:
    def test_no_command(self):
        assert main([]) == 1

    def test_unknown_command(self):
        assert main(["frobnicate"]) == 1

    def test_missing_required_flag(self):
        assert main(["segment", "--volume", "x.nrrd"]) == 1
