"""HTTP/JSON facade over sessions for the browser client and scripted tests.

The service adds no numerics: contour vertices in responses are the
in-process cut values serialized with shortest-roundtrip floats. Slice
rasters are windowed to 8 bits for display only; segmentation always samples
the original values server-side.

Error bodies are {code, reason, detail}: 404 unknown id, 409 illegal state
or concurrent mutation, 422 validation/geometry, 500 internal invariant
violation.
"""

from __future__ import annotations

import base64
import itertools
import threading
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel

from . import session as session_mod
from .errors import DataError, InternalError, StateError
from .geometry import SeedPoint, Template
from .graph import GraphParams
from .metrics import compare_masks
from .session import Session
from .volume import MaskVolume, Volume3D, read_nrrd


class SessionCreate(BaseModel):
    volume: str
    z0: int
    template: list[list[float]]
    seed: list[float]
    params: dict = {}
    object: str = "structure"


class AdvanceBody(BaseModel):
    direction: int
    skip: int = 1


class RedrawBody(BaseModel):
    template: list[list[float]]
    seed: list[float]


class FinalizeBody(BaseModel):
    reference: str | None = None


class _NotFound(Exception):
    def __init__(self, reason, detail):
        self.reason = reason
        self.detail = detail


class _Busy(Exception):
    pass


def _error(status: int, reason: str, detail: str) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": status, "reason": reason, "detail": detail},
    )


def _cut_payload(cut) -> dict:
    return {
        "boundary": [int(b) for b in cut.boundary],
        "contour": [[float(x), float(y)] for x, y in cut.contour],
        "cut_cost": cut.cut_cost,
        "flow_value": cut.flow_value,
    }


def _handle_payload(sid: str, sess: Session) -> dict:
    return {
        "session_id": sid,
        "volume": getattr(sess, "volume_id", ""),
        "status": sess.status,
        "z": sess.current_z,
        "params": sess.params.to_dict(),
        "cut": _cut_payload(sess.current_cut),
    }


class VolumeStore:
    """Lazily loaded NRRD volumes from the data directory."""

    def __init__(self, data_dir: Path):
        self.data_dir = Path(data_dir)
        self._cache: dict[str, Volume3D] = {}
        self._lock = threading.Lock()

    def ids(self) -> list[str]:
        return sorted(p.stem for p in self.data_dir.glob("*.nrrd"))

    def get(self, vid: str) -> Volume3D:
        with self._lock:
            if vid not in self._cache:
                path = self.data_dir / f"{vid}.nrrd"
                if "/" in vid or not path.is_file():
                    raise _NotFound("unknown-volume", f"no volume named {vid!r}")
                self._cache[vid] = read_nrrd(path.read_bytes())
            return self._cache[vid]


class SessionStore:
    def __init__(self):
        self._counter = itertools.count(1)
        self._lock = threading.Lock()
        self.records: dict[str, tuple[Session, threading.Lock]] = {}

    def add(self, sess: Session) -> str:
        with self._lock:
            sid = f"s-{next(self._counter):04d}"
            self.records[sid] = (sess, threading.Lock())
            return sid

    def get(self, sid: str) -> tuple[Session, threading.Lock]:
        try:
            return self.records[sid]
        except KeyError:
            raise _NotFound("unknown-session", f"no session named {sid!r}") from None


def create_app(data_dir) -> FastAPI:
    app = FastAPI(title="radialcut session service")
    volumes = VolumeStore(Path(data_dir))
    sessions = SessionStore()
    app.state.volumes = volumes
    app.state.sessions = sessions

    @app.exception_handler(_NotFound)
    async def _nf(request: Request, exc: _NotFound):
        return _error(404, exc.reason, exc.detail)

    @app.exception_handler(_Busy)
    async def _busy(request: Request, exc: _Busy):
        return _error(409, "session-busy", "another mutation is in progress")

    @app.exception_handler(StateError)
    async def _state(request: Request, exc: StateError):
        return _error(409, exc.reason, str(exc))

    @app.exception_handler(DataError)
    async def _data(request: Request, exc: DataError):
        return _error(422, exc.reason, str(exc))

    @app.exception_handler(ValueError)
    async def _value(request: Request, exc: ValueError):
        return _error(422, "invalid-parameter", str(exc))

    @app.exception_handler(IndexError)
    async def _index(request: Request, exc: IndexError):
        return _error(422, "out-of-range", str(exc))

    @app.exception_handler(RequestValidationError)
    async def _validation(request: Request, exc: RequestValidationError):
        return _error(422, "validation-error", str(exc.errors()))

    @app.exception_handler(InternalError)
    async def _internal(request: Request, exc: InternalError):
        return _error(500, exc.reason, str(exc))

    def _mutate(sid: str):
        sess, lock = sessions.get(sid)
        if not lock.acquire(blocking=False):
            raise _Busy()
        return sess, lock

    @app.get("/volumes")
    def list_volumes():
        out = []
        for vid in volumes.ids():
            vol = volumes.get(vid)
            out.append({"id": vid, "sizes": list(vol.sizes), "spacing": list(vol.spacing)})
        return {"volumes": out}

    @app.get("/volumes/{vid}/slices/{z}")
    def get_slice(vid: str, z: int, window: str | None = None):
        vol = volumes.get(vid)
        if not 0 <= z < vol.nz:
            raise IndexError(f"slice index {z} out of range [0, {vol.nz})")
        plane = vol.values[z].astype(np.float64)
        if window is None:
            lo = float(vol.values.min())
            hi = float(vol.values.max())
            if hi <= lo:
                hi = lo + 1.0
        else:
            try:
                lo_s, hi_s = window.split(",")
                lo, hi = float(lo_s), float(hi_s)
            except ValueError:
                raise ValueError(f"window must be 'lo,hi', got {window!r}") from None
            if not hi > lo:
                raise ValueError("window width must be > 0")
        scaled = np.clip((plane - lo) / (hi - lo) * 255.0, 0.0, 255.0)
        pixels = scaled.astype(np.uint8).tobytes()
        return {
            "z": z,
            "width": vol.nx,
            "height": vol.ny,
            "spacing": [vol.spacing[0], vol.spacing[1]],
            "window": [lo, hi],
            "pixels": base64.b64encode(pixels).decode("ascii"),
        }

    @app.post("/sessions")
    def create_session(body: SessionCreate):
        vol = volumes.get(body.volume)
        params = GraphParams.from_dict(body.params)
        template = Template(markers=np.asarray(body.template), z_index=body.z0)
        seed = SeedPoint(position=np.asarray(body.seed), z_index=body.z0)
        sess = session_mod.start_session(
            vol, body.z0, template, seed, params, object_name=body.object
        )
        sess.volume_id = body.volume
        sid = sessions.add(sess)
        return _handle_payload(sid, sess)

    @app.post("/sessions/{sid}/advance")
    def advance(sid: str, body: AdvanceBody):
        sess, lock = _mutate(sid)
        try:
            session_mod.accept_and_advance(sess, body.direction, body.skip)
        finally:
            lock.release()
        return _handle_payload(sid, sess)

    @app.post("/sessions/{sid}/redraw")
    def redraw_route(sid: str, body: RedrawBody):
        sess, lock = _mutate(sid)
        try:
            z = sess.current_z
            session_mod.redraw(
                sess,
                Template(markers=np.asarray(body.template), z_index=z),
                SeedPoint(position=np.asarray(body.seed), z_index=z),
            )
        finally:
            lock.release()
        return _handle_payload(sid, sess)

    @app.post("/sessions/{sid}/finalize")
    def finalize_route(sid: str, body: FinalizeBody | None = None):
        sess, lock = _mutate(sid)
        try:
            session_mod.finalize(sess)
            interpolated = sorted(
                z for z, c in sess.contours.items() if c.provenance == "interpolated"
            )
            payload = {
                "session_id": sid,
                "status": sess.status,
                "slices": len(sess.contours),
                "interpolated": interpolated,
                "elapsed_seconds": sess.elapsed_seconds(),
                "metrics": None,
            }
            if body is not None and body.reference:
                reference = MaskVolume.from_volume(volumes.get(body.reference))
                mask = session_mod.voxelize(sess)
                payload["metrics"] = compare_masks(mask, reference, label=sid).to_dict()
            return payload
        finally:
            lock.release()

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        sess, _ = sessions.get(sid)
        payload = _handle_payload(sid, sess)
        payload["slices"] = [
            {
                "z": c.z,
                "provenance": c.provenance,
                "vertices": [[float(x), float(y)] for x, y in c.vertices],
            }
            for z, c in sorted(sess.contours.items())
        ]
        payload["gaps"] = sorted(sess.gaps)
        payload["events"] = sess.events
        payload["elapsed_seconds"] = sess.elapsed_seconds()
        payload["object"] = sess.object_name
        return payload

    @app.get("/sessions/{sid}/export/mask")
    def export_mask(sid: str):
        sess, _ = sessions.get(sid)
        _, mask_bytes = session_mod.export_session(sess)
        return Response(content=mask_bytes, media_type="application/octet-stream")

    @app.get("/sessions/{sid}/export/contours")
    def export_contours(sid: str):
        sess, _ = sessions.get(sid)
        contours_bytes, _ = session_mod.export_session(sess)
        return Response(content=contours_bytes, media_type="application/json")

    return app
