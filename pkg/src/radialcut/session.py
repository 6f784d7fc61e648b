"""Interactive propagation sessions: accept, advance, interpolate, voxelize.

A session walks a volume slice by slice from one user-drawn template. On
every accepted slice the cut polygon, scaled by sf about its centroid,
becomes the template for the next slice and the centroid becomes the next
seed; user-drawn templates are used exactly as drawn. Skipped slices are
recorded as gaps and filled by radial interpolation between the nearest
accepted contours.

Sessions are single-writer: callers must serialize mutating operations per
session (the HTTP service enforces this with a per-session lock). Every
operation appends to an event log from which the whole session can be
replayed deterministically; event timestamps double as the segmentation-time
record.

The ``drawing`` phase of the workflow lives client-side (sketching the
template before submission); a Session object materializes in ``reviewing``
state with the first cut already computed and ends up ``finalized``.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DataError,
    GeometryError,
    InternalError,
    InterpolationError,
    StateError,
)
from .geometry import (
    SeedPoint,
    Template,
    intersect_ray_polygon,
    polygon_area,
    polygon_centroid,
    ray_angles,
    scale_template,
)
from .graph import CutResult, GraphParams, segment_one_slice
from .volume import (
    ContourSet,
    MaskVolume,
    SliceContour,
    Volume3D,
    extract_slice,
    write_contour_set,
    write_nrrd,
)

REVIEWING = "reviewing"
FINALIZED = "finalized"

# a cut enclosing less area than this (pixel units) cannot seed a next slice
MIN_CUT_AREA = 2.0


@dataclass
class Session:
    volume: Volume3D
    params: GraphParams
    object_name: str = "structure"
    status: str = REVIEWING
    current_z: int = 0
    current_template: Template | None = None
    current_seed: SeedPoint | None = None
    current_cut: CutResult | None = None
    current_basis: str = "user-drawn"
    contours: dict[int, SliceContour] = field(default_factory=dict)
    gaps: set[int] = field(default_factory=set)
    events: list[dict] = field(default_factory=list)

    def record(self, op: str, **payload):
        self.events.append({"op": op, "time": time.time(), **payload})

    def elapsed_seconds(self) -> float:
        if len(self.events) < 2:
            return 0.0
        return self.events[-1]["time"] - self.events[0]["time"]

    def contour_set(self) -> ContourSet:
        ordered = tuple(self.contours[z] for z in sorted(self.contours))
        return ContourSet(object_name=self.object_name, contours=ordered)

    def to_replay_json(self) -> bytes:
        return json.dumps({"object": self.object_name, "events": self.events},
                          indent=1).encode("utf-8")


def _require(session: Session, status: str, op: str):
    if session.status != status:
        raise StateError(
            f"{op} requires a {status} session, but it is {session.status}",
            reason="not-" + status if status == FINALIZED else "illegal-state",
        )


def start_session(
    volume: Volume3D,
    z0: int,
    template: Template,
    seed: SeedPoint,
    params: GraphParams,
    object_name: str = "structure",
) -> Session:
    """Open a session and compute the first cut on slice z0."""
    z0 = int(z0)
    if not 0 <= z0 < volume.nz:
        raise IndexError(f"slice index {z0} out of range [0, {volume.nz})")
    cut = segment_one_slice(extract_slice(volume, z0), template, seed, params)
    session = Session(
        volume=volume,
        params=params,
        object_name=object_name,
        current_z=z0,
        current_template=template,
        current_seed=seed,
        current_cut=cut,
        current_basis="user-drawn",
    )
    session.record(
        "start",
        z=z0,
        template=template.markers.tolist(),
        seed=seed.position.tolist(),
        params=params.to_dict(),
    )
    return session


def _store_current(session: Session):
    cut = session.current_cut
    session.contours[session.current_z] = SliceContour(
        z=session.current_z,
        vertices=cut.contour,
        provenance=session.current_basis,
    )
    session.gaps.discard(session.current_z)


def accept_and_advance(session: Session, direction: int, skip: int = 1) -> Session:
    """Accept the current cut and segment the slice skip steps away.

    The accepted cut, scaled by sf about its centroid, seeds the next slice.
    On failure (degenerate cut, geometry error on the target) the session is
    left unchanged so the user can redraw.
    """
    _require(session, REVIEWING, "accept_and_advance")
    if direction not in (1, -1):
        raise ValueError(f"direction must be +1 or -1, got {direction}")
    skip = int(skip)
    if skip < 1:
        raise ValueError(f"skip must be >= 1, got {skip}")
    target = session.current_z + direction * skip
    if not 0 <= target < session.volume.nz:
        raise IndexError(
            f"target slice {target} out of range [0, {session.volume.nz})"
        )
    cut = session.current_cut
    area = abs(polygon_area(cut.contour))
    if area < MIN_CUT_AREA:
        raise GeometryError(
            f"cut encloses only {area:.3f} px^2 (< {MIN_CUT_AREA}); redraw the slice",
            reason="degenerate-cut",
        )

    center = polygon_centroid(cut.contour)
    next_template = scale_template(
        Template(markers=cut.contour, z_index=target),
        session.params.sf,
        center,
    )
    next_seed = SeedPoint(position=center, z_index=target)
    next_cut = segment_one_slice(
        extract_slice(session.volume, target), next_template, next_seed, session.params
    )

    # all fallible work done; commit
    _store_current(session)
    for z in range(min(session.current_z, target) + 1, max(session.current_z, target)):
        if z not in session.contours:
            session.gaps.add(z)
    session.current_z = target
    session.current_template = next_template
    session.current_seed = next_seed
    session.current_cut = next_cut
    session.current_basis = "computed"
    session.record("accept_and_advance", direction=direction, skip=skip)
    return session


def redraw(session: Session, template: Template, seed: SeedPoint) -> Session:
    """Replace the current slice's template and seed and recompute its cut."""
    _require(session, REVIEWING, "redraw")
    if template.z_index != session.current_z or seed.z_index != session.current_z:
        raise GeometryError(
            f"redraw template/seed must be on the current slice {session.current_z}",
            reason="slice-mismatch",
        )
    cut = segment_one_slice(
        extract_slice(session.volume, session.current_z), template, seed, session.params
    )
    session.current_template = template
    session.current_seed = seed
    session.current_cut = cut
    session.current_basis = "user-drawn"
    session.record(
        "redraw", template=template.markers.tolist(), seed=seed.position.tolist()
    )
    return session


def _radial_resample(vertices: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Resample a closed polygon to k radii about its own centroid."""
    center = polygon_centroid(vertices)
    t = Template(markers=vertices, z_index=0)
    radii = np.empty(k)
    for i, angle in enumerate(ray_angles(k)):
        ip = intersect_ray_polygon(center, angle, t)
        radii[i] = float(np.hypot(*(ip - center)))
    return center, radii


def interpolate_missing(session: Session) -> Session:
    """Fill every recorded gap by per-angle radial blending of its brackets."""
    if session.gaps:
        accepted = sorted(session.contours)
        orphans = sorted(
            z
            for z in session.gaps
            if not (any(a < z for a in accepted) and any(a > z for a in accepted))
        )
        if orphans:
            raise InterpolationError(
                f"no bracketing contours for skipped slice(s) {orphans}"
            )
        k = session.params.k
        angles = ray_angles(k)
        units = np.stack([np.cos(angles), np.sin(angles)], axis=1)
        resampled: dict[int, tuple[np.ndarray, np.ndarray]] = {}

        def brackets(z):
            za = max(a for a in accepted if a < z)
            zb = min(a for a in accepted if a > z)
            return za, zb

        for z in sorted(session.gaps):
            za, zb = brackets(z)
            for zc in (za, zb):
                if zc not in resampled:
                    resampled[zc] = _radial_resample(session.contours[zc].vertices, k)
            ca, ra = resampled[za]
            cb, rb = resampled[zb]
            f = (z - za) / (zb - za)
            center = (1.0 - f) * ca + f * cb
            radii = (1.0 - f) * ra + f * rb
            vertices = center[None, :] + radii[:, None] * units
            session.contours[z] = SliceContour(
                z=z, vertices=vertices, provenance="interpolated"
            )
        session.gaps.clear()
    session.record("interpolate")
    return session


def finalize(session: Session) -> Session:
    """Store the current cut, interpolate remaining gaps, freeze the session."""
    _require(session, REVIEWING, "finalize")
    _store_current(session)
    if session.gaps:
        interpolate_missing(session)
        session.events.pop()  # implicit interpolation, not a replayed event
    zs = sorted(session.contours)
    for z in range(zs[0], zs[-1] + 1):
        if z not in session.contours:
            raise InternalError(f"slice {z} has no contour after finalize")
    session.status = FINALIZED
    session.record("finalize")
    return session


def rasterize_polygon(vertices: np.ndarray, nx: int, ny: int) -> np.ndarray:
    """Even-odd scanline fill: pixel (x, y) is set iff its center is inside."""
    v = np.asarray(vertices, dtype=np.float64)
    x0, y0 = v[:, 0], v[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    mask = np.zeros((ny, nx), dtype=np.uint8)
    for y in range(ny):
        crossing = (y0 > y) != (y1 > y)
        if not crossing.any():
            continue
        xc = x0[crossing] + (y - y0[crossing]) * (x1[crossing] - x0[crossing]) / (
            y1[crossing] - y0[crossing]
        )
        xc.sort()
        for a, b in zip(xc[0::2], xc[1::2]):
            lo = max(int(math.ceil(a)), 0)
            hi = min(int(math.ceil(b)), nx)
            if hi > lo:
                mask[y, lo:hi] = 1
    return mask


def voxelize_contours(cs: ContourSet, sizes, spacing) -> MaskVolume:
    """Rasterize a contour set into a mask with the given volume geometry."""
    nx, ny, nz = sizes
    values = np.zeros((nz, ny, nx), dtype=np.uint8)
    for contour in cs.contours:
        if not 0 <= contour.z < nz:
            raise DataError(f"contour slice {contour.z} outside volume of {nz} slices")
        values[contour.z] = rasterize_polygon(contour.vertices, nx, ny)
    return MaskVolume(values=values, spacing=tuple(spacing))


def voxelize(session: Session) -> MaskVolume:
    """Rasterize the finalized contours into a mask on the source geometry."""
    _require(session, FINALIZED, "voxelize")
    return voxelize_contours(
        session.contour_set(), session.volume.sizes, session.volume.spacing
    )


def export_session(session: Session) -> tuple[bytes, bytes]:
    """(contour-set JSON bytes, voxelized mask NRRD bytes); finalized only."""
    _require(session, FINALIZED, "export")
    contours = write_contour_set(session.contour_set())
    mask = write_nrrd(voxelize(session))
    return contours, mask


# ---------------------------------------------------------------------------
# Replay
# ---------------------------------------------------------------------------

_REPLAY_OPS = ("start", "accept_and_advance", "redraw", "interpolate", "finalize")


def replay(volume: Volume3D, doc, params_override: GraphParams | None = None) -> Session:
    """Re-run a recorded session headlessly; timestamps are ignored.

    ``doc`` is a parsed replay document or its JSON bytes. An optional
    parameter override replaces the recorded operating point wholesale.
    """
    if isinstance(doc, (bytes, str)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise DataError(f"replay file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("events"), list):
        raise DataError("replay document must be {object?, events: [...]}")
    events = doc["events"]
    if not events or events[0].get("op") != "start":
        raise DataError("replay must begin with a start event")

    session: Session | None = None
    for i, event in enumerate(events):
        op = event.get("op")
        if op not in _REPLAY_OPS:
            raise DataError(f"events[{i}]: unknown op {op!r}")
        try:
            if op == "start":
                if session is not None:
                    raise DataError(f"events[{i}]: duplicate start event")
                params = (
                    params_override
                    if params_override is not None
                    else GraphParams.from_dict(event.get("params", {}))
                )
                z0 = int(event["z"])
                session = start_session(
                    volume,
                    z0,
                    Template(markers=np.asarray(event["template"]), z_index=z0),
                    SeedPoint(position=np.asarray(event["seed"]), z_index=z0),
                    params,
                    object_name=doc.get("object", "structure"),
                )
                continue
            if session is None:
                raise DataError(f"events[{i}]: {op} before start")
            if op == "accept_and_advance":
                accept_and_advance(
                    session, int(event["direction"]), int(event.get("skip", 1))
                )
            elif op == "redraw":
                z = session.current_z
                redraw(
                    session,
                    Template(markers=np.asarray(event["template"]), z_index=z),
                    SeedPoint(position=np.asarray(event["seed"]), z_index=z),
                )
            elif op == "interpolate":
                interpolate_missing(session)
            elif op == "finalize":
                finalize(session)
        except KeyError as exc:
            raise DataError(f"events[{i}]: missing field {exc}") from None
    return session
