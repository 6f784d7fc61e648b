"""Headless command line: replay sessions, evaluate masks, generate phantoms.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import metrics, phantom, session as session_mod
from .errors import DataError, InternalError
from .graph import GraphParams
from .volume import MaskVolume, read_contour_set, read_nrrd, write_nrrd

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3

_DEFAULTS = GraphParams()


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="radialcut",
        description="Template-seeded radial graph-cut segmentation of 3D volumes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    seg = sub.add_parser("segment", help="replay a recorded session on a volume")
    seg.add_argument("--volume", required=True, help="input NRRD volume")
    seg.add_argument("--replay", required=True, help="session replay JSON")
    seg.add_argument("--out-mask", help="write the voxelized mask NRRD here")
    seg.add_argument("--out-contours", help="write the contour-set JSON here")
    seg.add_argument("--rays", type=int, help=f"override ray count k (default {_DEFAULTS.k})")
    seg.add_argument("--nodes", type=int, help=f"override nodes per ray n (default {_DEFAULTS.n})")
    seg.add_argument("--delta", type=int, help=f"override smoothness bound (default {_DEFAULTS.delta})")
    seg.add_argument("--t-weight", type=float, help=f"override contrast sensitivity (default {_DEFAULTS.t_weight})")
    seg.add_argument("--scale", type=float, help=f"override template scale factor sf (default {_DEFAULTS.sf})")

    ev = sub.add_parser("evaluate", help="compare two mask volumes")
    ev.add_argument("--a", required=True, help="first mask NRRD")
    ev.add_argument("--b", required=True, help="second mask NRRD")
    ev.add_argument("--report", help="write the JSON report here")
    ev.add_argument("--label", default="", help="dataset label for the report row")

    ph = sub.add_parser("phantom", help="generate a synthetic tube phantom")
    ph.add_argument("--spec", help="phantom spec JSON (defaults when omitted)")
    ph.add_argument("--out-volume", required=True, help="write the grey volume here")
    ph.add_argument("--out-truth", required=True, help="write the truth mask here")

    sv = sub.add_parser("serve", help="run the HTTP session service")
    sv.add_argument("--port", type=int, default=8000)
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--data-dir", required=True, help="directory of NRRD volumes")

    cv = sub.add_parser("convert", help="voxelize a contour set into a mask NRRD")
    cv.add_argument("--contours", required=True, help="contour-set JSON")
    cv.add_argument("--like", required=True, help="volume NRRD providing the geometry")
    cv.add_argument("--out-mask", required=True, help="write the mask NRRD here")

    return parser


def _override_params(args, recorded: dict) -> GraphParams:
    merged = dict(recorded)
    for field, attr in (
        ("k", "rays"),
        ("n", "nodes"),
        ("delta", "delta"),
        ("t_weight", "t_weight"),
        ("sf", "scale"),
    ):
        value = getattr(args, attr, None)
        if value is not None:
            merged[field] = value
    return GraphParams.from_dict(merged)


def _cmd_segment(args) -> int:
    volume = read_nrrd(Path(args.volume).read_bytes())
    doc = json.loads(Path(args.replay).read_text())
    if not isinstance(doc, dict) or not isinstance(doc.get("events"), list):
        raise DataError("replay document must be {object?, events: [...]}")
    recorded = {}
    for event in doc["events"]:
        if isinstance(event, dict) and event.get("op") == "start":
            recorded = event.get("params", {})
            break
    params = _override_params(args, recorded)
    sess = session_mod.replay(volume, doc, params_override=params)
    if sess.status != session_mod.FINALIZED:
        session_mod.finalize(sess)
    contours_bytes, mask_bytes = session_mod.export_session(sess)
    if args.out_mask:
        Path(args.out_mask).write_bytes(mask_bytes)
    if args.out_contours:
        Path(args.out_contours).write_bytes(contours_bytes)
    n_slices = len(sess.contours)
    print(f"segmented {n_slices} slice(s) in {sess.elapsed_seconds():.2f} s of session time")
    return EXIT_OK


def _read_mask(path: str) -> MaskVolume:
    vol = read_nrrd(Path(path).read_bytes())
    try:
        return MaskVolume.from_volume(vol)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None


def _cmd_evaluate(args) -> int:
    a = _read_mask(args.a)
    b = _read_mask(args.b)
    try:
        report = metrics.compare_masks(a, b, label=args.label)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    if args.report:
        Path(args.report).write_text(metrics.reports_to_json([report]))
    print(metrics.format_report_table([report]))
    return EXIT_OK


def _cmd_phantom(args) -> int:
    if args.spec:
        spec = phantom.PhantomSpec.from_json(Path(args.spec).read_text())
    else:
        spec = phantom.PhantomSpec()
    vol, truth = phantom.generate(spec)
    Path(args.out_volume).write_bytes(write_nrrd(vol))
    Path(args.out_truth).write_bytes(write_nrrd(truth))
    nx, ny, nz = vol.sizes
    print(f"phantom {nx}x{ny}x{nz} written; truth voxels: {int(truth.values.sum())}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.data_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def _cmd_convert(args) -> int:
    cs = read_contour_set(Path(args.contours).read_bytes())
    like = read_nrrd(Path(args.like).read_bytes())
    mask = session_mod.voxelize_contours(cs, like.sizes, like.spacing)
    Path(args.out_mask).write_bytes(write_nrrd(mask))
    print(f"mask written with {int(mask.values.sum())} set voxel(s)")
    return EXIT_OK


_COMMANDS = {
    "segment": _cmd_segment,
    "evaluate": _cmd_evaluate,
    "phantom": _cmd_phantom,
    "serve": _cmd_serve,
    "convert": _cmd_convert,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except (DataError, ValueError, IndexError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
