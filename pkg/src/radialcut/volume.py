"""Grey-value volumes, binary masks and contour sets, plus their file formats.

Volumes are persisted as a documented NRRD subset:

    NRRD0004
    dimension: 3
    type: uint8 | int16 | float
    sizes: nx ny nz
    spacings: sx sy sz
    endian: little
    encoding: raw | ascii
    <blank line>
    <payload, x fastest-varying, then y, then z>

Contour sets are persisted as JSON::

    {"object": str,
     "slices": [{"z": int,
                 "provenance": "user-drawn" | "computed" | "interpolated",
                 "vertices": [[x, y], ...]}]}

Vertex coordinates are continuous pixel coordinates with the pixel center at
integer positions; serialization uses Python's shortest-roundtrip floats, so
both formats round-trip losslessly.

All types are immutable after construction (backing arrays are marked
read-only) and safe to share across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ContourJsonError,
    NrrdParseError,
    TruncatedPayloadError,
    UnsupportedFormatError,
)

NRRD_MAGIC = b"NRRD"
WRITE_MAGIC = "NRRD0004"

# canonical token -> numpy dtype (little-endian on disk)
_CANONICAL_TYPES = {
    "uint8": np.dtype("u1"),
    "int16": np.dtype("<i2"),
    "float": np.dtype("<f4"),
}

# accepted header synonyms -> canonical token
_TYPE_SYNONYMS = {
    "uint8": "uint8",
    "uint8_t": "uint8",
    "uchar": "uint8",
    "unsigned char": "uint8",
    "int16": "int16",
    "int16_t": "int16",
    "short": "int16",
    "short int": "int16",
    "signed short": "int16",
    "signed short int": "int16",
    "float": "float",
    "float32": "float",
}

PROVENANCES = ("user-drawn", "computed", "interpolated")


def _freeze(arr: np.ndarray) -> np.ndarray:
    """Return a read-only array, copying rather than touching caller-owned
    writeable arrays."""
    if arr.flags.writeable:
        arr = arr.copy()
        arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Volume3D:
    """3D scalar grey-value grid with physical spacing.

    ``values`` has shape (nz, ny, nx) so that ``values.ravel()`` is ordered
    x fastest, matching the on-disk payload. ``spacing`` is (sx, sy, sz) in
    mm per voxel.
    """

    values: np.ndarray
    spacing: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.dtype == np.float64:
            vals = vals.astype(np.float32)
        if vals.dtype not in (np.uint8, np.int16, np.float32):
            raise ValueError(f"unsupported value dtype {vals.dtype}")
        if vals.ndim != 3 or min(vals.shape) < 1:
            raise ValueError(f"values must be 3D with all sizes >= 1, got shape {vals.shape}")
        spacing = tuple(float(s) for s in self.spacing)
        if len(spacing) != 3 or any(not math.isfinite(s) or s <= 0 for s in spacing):
            raise ValueError(f"spacing components must be finite and > 0, got {spacing}")
        object.__setattr__(self, "values", _freeze(vals))
        object.__setattr__(self, "spacing", spacing)

    @property
    def sizes(self) -> tuple[int, int, int]:
        """(nx, ny, nz) voxel counts."""
        nz, ny, nx = self.values.shape
        return nx, ny, nz

    @property
    def nx(self) -> int:
        return self.values.shape[2]

    @property
    def ny(self) -> int:
        return self.values.shape[1]

    @property
    def nz(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class Slice2D:
    """One axial plane of a volume; values share the source ordering."""

    z_index: int
    values: np.ndarray
    spacing: tuple[float, float] = (1.0, 1.0)

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.ndim != 2:
            raise ValueError("slice values must be 2D")
        object.__setattr__(self, "values", _freeze(vals))
        object.__setattr__(self, "spacing", tuple(float(s) for s in self.spacing))

    @property
    def nx(self) -> int:
        return self.values.shape[1]

    @property
    def ny(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class MaskVolume:
    """Binary volume sharing a source volume's geometry; values in {0, 1}."""

    values: np.ndarray
    spacing: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.ndim != 3:
            raise ValueError("mask values must be 3D")
        if vals.dtype != np.uint8:
            as_u8 = vals.astype(np.uint8)
            if not np.array_equal(as_u8, vals):
                raise ValueError("mask values must be exactly 0 or 1")
            vals = as_u8
        if vals.size and int(vals.max(initial=0)) > 1:
            raise ValueError("mask values must be exactly 0 or 1")
        spacing = tuple(float(s) for s in self.spacing)
        if any(s <= 0 for s in spacing):
            raise ValueError("spacing components must be > 0")
        object.__setattr__(self, "values", _freeze(vals))
        object.__setattr__(self, "spacing", spacing)

    @property
    def sizes(self) -> tuple[int, int, int]:
        nz, ny, nx = self.values.shape
        return nx, ny, nz

    @classmethod
    def from_volume(cls, vol: Volume3D) -> "MaskVolume":
        """Reinterpret a loaded volume as a mask; rejects non-binary values."""
        vals = vol.values
        binary = (vals == 0) | (vals == 1)
        if not bool(binary.all()):
            raise ValueError("volume contains values other than 0/1, not a mask")
        return cls(values=vals.astype(np.uint8), spacing=vol.spacing)


@dataclass(frozen=True)
class SliceContour:
    """Closed polygon on one slice, vertices in continuous pixel coords."""

    z: int
    vertices: np.ndarray
    provenance: str = "user-drawn"

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=np.float64)
        if verts.ndim != 2 or verts.shape[1] != 2 or verts.shape[0] < 3:
            raise ValueError("contour needs at least 3 [x, y] vertices")
        if not np.isfinite(verts).all():
            raise ValueError("contour vertices must be finite")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"provenance must be one of {PROVENANCES}")
        object.__setattr__(self, "z", int(self.z))
        object.__setattr__(self, "vertices", _freeze(verts))


@dataclass(frozen=True)
class ContourSet:
    """Per-slice closed polygons for one object; at most one contour per slice."""

    object_name: str = "structure"
    contours: tuple[SliceContour, ...] = field(default_factory=tuple)

    def __post_init__(self):
        contours = tuple(self.contours)
        zs = [c.z for c in contours]
        if len(set(zs)) != len(zs):
            raise ValueError("at most one contour per slice")
        object.__setattr__(self, "contours", contours)

    def slice_map(self) -> dict[int, SliceContour]:
        return {c.z: c for c in self.contours}


# ---------------------------------------------------------------------------
# NRRD subset
# ---------------------------------------------------------------------------


def _parse_header(data: bytes):
    """Split header fields from the payload; returns (fields, payload)."""
    if not data.startswith(NRRD_MAGIC):
        raise NrrdParseError("stream does not begin with NRRD magic")
    # header is ASCII lines up to the first blank line; tolerate CRLF files
    end = data.find(b"\n\n")
    end_crlf = data.find(b"\r\n\r\n")
    if end_crlf >= 0 and (end < 0 or end_crlf < end):
        header_bytes = data[:end_crlf]
        payload = data[end_crlf + 4 :]
    elif end >= 0:
        header_bytes = data[:end]
        payload = data[end + 2 :]
    else:
        raise NrrdParseError("missing blank line terminating the header")
    try:
        header = header_bytes.decode("ascii").replace("\r", "")
    except UnicodeDecodeError as exc:
        raise NrrdParseError(f"header is not ASCII: {exc}") from None

    lines = header.splitlines()
    magic = lines[0].strip()
    if not (magic.startswith("NRRD000") and len(magic) == 8):
        raise NrrdParseError(f"unrecognized magic line: {magic!r}")
    fields: dict[str, str] = {}
    for line in lines[1:]:
        if not line.strip() or line.startswith("#"):
            continue
        if ":=" in line:  # key-value metadata, ignored
            continue
        if ":" not in line:
            raise NrrdParseError(f"malformed header line: {line!r}")
        key, _, value = line.partition(":")
        fields[key.strip().lower()] = value.strip()
    return fields, payload


def _spacings_from_fields(fields: dict[str, str]) -> tuple[float, float, float]:
    if "spacings" in fields:
        parts = fields["spacings"].split()
        if len(parts) != 3:
            raise NrrdParseError(f"malformed header line: 'spacings: {fields['spacings']}'")
        try:
            spacing = tuple(float(p) for p in parts)
        except ValueError:
            raise NrrdParseError(
                f"malformed header line: 'spacings: {fields['spacings']}'"
            ) from None
    elif "space directions" in fields:
        text = fields["space directions"]
        vecs = []
        for token in text.replace("(", " ( ").replace(")", " ) ").split("("):
            token = token.split(")")[0].strip()
            if not token:
                continue
            try:
                vecs.append([float(c) for c in token.replace(",", " ").split()])
            except ValueError:
                raise NrrdParseError(
                    f"malformed header line: 'space directions: {text}'"
                ) from None
        if len(vecs) != 3 or any(len(v) != 3 for v in vecs):
            raise NrrdParseError(f"malformed header line: 'space directions: {text}'")
        spacing = tuple(float(np.linalg.norm(v)) for v in vecs)
    else:
        raise NrrdParseError("header declares neither 'spacings' nor 'space directions'")
    if any(not math.isfinite(s) or s <= 0 for s in spacing):
        raise NrrdParseError(f"spacings must be finite and > 0, got {spacing}")
    return spacing


def read_nrrd(data: bytes) -> Volume3D:
    """Parse an NRRD byte stream into a Volume3D.

    Supports the subset documented in the module docstring: dimension 3,
    types uint8/int16/float32, encodings raw (little-endian) and ascii.
    """
    fields, payload = _parse_header(data)

    for required in ("dimension", "type", "sizes", "encoding"):
        if required not in fields:
            raise NrrdParseError(f"missing required header field '{required}'")

    if fields["dimension"] != "3":
        raise UnsupportedFormatError(
            f"only dimension 3 is supported, got {fields['dimension']!r}"
        )

    type_token = fields["type"].lower()
    if type_token not in _TYPE_SYNONYMS:
        raise UnsupportedFormatError(f"unsupported type {fields['type']!r}")
    dtype = _CANONICAL_TYPES[_TYPE_SYNONYMS[type_token]]

    try:
        sizes = [int(s) for s in fields["sizes"].split()]
    except ValueError:
        raise NrrdParseError(f"malformed header line: 'sizes: {fields['sizes']}'") from None
    if len(sizes) != 3 or any(s < 1 for s in sizes):
        raise NrrdParseError(f"sizes must be three counts >= 1, got {fields['sizes']!r}")
    nx, ny, nz = sizes
    count = nx * ny * nz

    spacing = _spacings_from_fields(fields)

    encoding = fields["encoding"].lower()
    if encoding not in ("raw", "ascii", "txt", "text"):
        raise UnsupportedFormatError(f"unsupported encoding {fields['encoding']!r}")

    endian = fields.get("endian", "little").lower()
    if encoding == "raw" and dtype.itemsize > 1 and endian != "little":
        raise UnsupportedFormatError(f"unsupported endian {fields.get('endian')!r}")

    if encoding == "raw":
        expected = count * dtype.itemsize
        if len(payload) != expected:
            raise TruncatedPayloadError(
                f"payload holds {len(payload)} bytes but sizes {nx} {ny} {nz} "
                f"of type {_TYPE_SYNONYMS[type_token]} require {expected}"
            )
        flat = np.frombuffer(payload, dtype=dtype)
    else:
        tokens = payload.split()
        if len(tokens) != count:
            raise TruncatedPayloadError(
                f"ascii payload holds {len(tokens)} values but sizes require {count}"
            )
        try:
            if dtype.kind == "f":
                flat = np.array([float(t) for t in tokens], dtype=dtype)
            else:
                flat = np.array([int(t) for t in tokens], dtype=dtype)
        except (ValueError, OverflowError) as exc:
            raise NrrdParseError(f"ascii payload value error: {exc}") from None

    values = flat.reshape(nz, ny, nx)
    return Volume3D(values=values, spacing=spacing)


def write_nrrd(vol: Volume3D | MaskVolume) -> bytes:
    """Serialize a volume or mask to NRRD bytes (raw little-endian payload)."""
    values = vol.values
    token = {np.uint8: "uint8", np.int16: "int16", np.float32: "float"}[values.dtype.type]
    nx, ny, nz = vol.sizes
    sx, sy, sz = vol.spacing
    header = "\n".join(
        [
            WRITE_MAGIC,
            "dimension: 3",
            f"type: {token}",
            f"sizes: {nx} {ny} {nz}",
            f"spacings: {sx} {sy} {sz}",
            "endian: little",
            "encoding: raw",
        ]
    )
    payload = np.ascontiguousarray(values, dtype=values.dtype.newbyteorder("<")).tobytes()
    return header.encode("ascii") + b"\n\n" + payload


# ---------------------------------------------------------------------------
# Slice access and grey-value sampling
# ---------------------------------------------------------------------------


def extract_slice(vol: Volume3D, z: int) -> Slice2D:
    """Return the axial plane at slice index z."""
    z = int(z)
    if not 0 <= z < vol.nz:
        raise IndexError(f"slice index {z} out of range [0, {vol.nz})")
    return Slice2D(z_index=z, values=vol.values[z], spacing=vol.spacing[:2])


def sample_grey(slc: Slice2D, p, method: str = "bilinear") -> float:
    """Sample the slice at continuous pixel coordinates p = (x, y).

    Pixel centers sit at integer coordinates. Out-of-range points clamp to
    the border pixel so costs stay defined when rays leave the image.
    """
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"sample point must be finite, got {p!r}")
    vals = slc.values
    ny, nx = vals.shape
    if method == "nearest":
        xi = min(max(int(round(x)), 0), nx - 1)
        yi = min(max(int(round(y)), 0), ny - 1)
        return float(vals[yi, xi])
    if method != "bilinear":
        raise ValueError(f"unknown sampling method {method!r}")
    xq = min(max(x, 0.0), float(nx - 1))
    yq = min(max(y, 0.0), float(ny - 1))
    x0 = int(xq)
    y0 = int(yq)
    x1 = min(x0 + 1, nx - 1)
    y1 = min(y0 + 1, ny - 1)
    fx = xq - x0
    fy = yq - y0
    top = (1.0 - fx) * float(vals[y0, x0]) + fx * float(vals[y0, x1])
    bot = (1.0 - fx) * float(vals[y1, x0]) + fx * float(vals[y1, x1])
    return (1.0 - fy) * top + fy * bot


def sample_grey_many(slc: Slice2D, pts: np.ndarray) -> np.ndarray:
    """Vectorized bilinear sampling of an (m, 2) array of [x, y] points."""
    pts = np.asarray(pts, dtype=np.float64)
    if not np.isfinite(pts).all():
        raise ValueError("sample points must be finite")
    vals = slc.values
    ny, nx = vals.shape
    xq = np.clip(pts[..., 0], 0.0, nx - 1.0)
    yq = np.clip(pts[..., 1], 0.0, ny - 1.0)
    x0 = xq.astype(np.int64)
    y0 = yq.astype(np.int64)
    x1 = np.minimum(x0 + 1, nx - 1)
    y1 = np.minimum(y0 + 1, ny - 1)
    fx = xq - x0
    fy = yq - y0
    v = vals.astype(np.float64, copy=False)
    top = (1.0 - fx) * v[y0, x0] + fx * v[y0, x1]
    bot = (1.0 - fx) * v[y1, x0] + fx * v[y1, x1]
    return (1.0 - fy) * top + fy * bot


# ---------------------------------------------------------------------------
# Contour-set JSON
# ---------------------------------------------------------------------------


def write_contour_set(cs: ContourSet) -> bytes:
    doc = {
        "object": cs.object_name,
        "slices": [
            {
                "z": c.z,
                "provenance": c.provenance,
                "vertices": [[float(x), float(y)] for x, y in c.vertices],
            }
            for c in cs.contours
        ],
    }
    return json.dumps(doc, indent=1).encode("utf-8")


def _schema_error(path: str, message: str):
    raise ContourJsonError(f"{path}: {message}")


def read_contour_set(data: bytes) -> ContourSet:
    """Parse and validate a contour-set JSON document."""
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ContourJsonError(f"$: not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        _schema_error("$", "document must be an object")
    name = doc.get("object", "structure")
    if not isinstance(name, str):
        _schema_error("$.object", "must be a string")
    slices = doc.get("slices")
    if not isinstance(slices, list):
        _schema_error("$.slices", "must be an array")
    contours = []
    for i, entry in enumerate(slices):
        path = f"$.slices[{i}]"
        if not isinstance(entry, dict):
            _schema_error(path, "must be an object")
        z = entry.get("z")
        if not isinstance(z, int) or isinstance(z, bool):
            _schema_error(f"{path}.z", "must be an integer")
        provenance = entry.get("provenance")
        if provenance not in PROVENANCES:
            _schema_error(f"{path}.provenance", f"must be one of {list(PROVENANCES)}")
        vertices = entry.get("vertices")
        if not isinstance(vertices, list) or len(vertices) < 3:
            _schema_error(f"{path}.vertices", "must be an array of at least 3 vertices")
        for j, v in enumerate(vertices):
            if (
                not isinstance(v, list)
                or len(v) != 2
                or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in v)
                or not all(math.isfinite(float(c)) for c in v)
            ):
                _schema_error(f"{path}.vertices[{j}]", "must be a finite [x, y] pair")
        try:
            contours.append(SliceContour(z=z, vertices=np.array(vertices, dtype=np.float64),
                                         provenance=provenance))
        except ValueError as exc:
            _schema_error(path, str(exc))
    try:
        return ContourSet(object_name=name, contours=tuple(contours))
    except ValueError as exc:
        raise ContourJsonError(f"$.slices: {exc}") from None
