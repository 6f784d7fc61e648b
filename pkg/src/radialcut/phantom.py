"""Synthetic tube phantoms with exact ground-truth masks.

A phantom is a bright tube on a dark background: per slice, a disk of
radius(z) around a drifting centerline(z). A voxel belongs to the truth mask
iff its center lies within the disk (center-inclusion rule, shared with the
contour voxelizer). Optional Gaussian noise is drawn from a seeded generator
so outputs are bit-reproducible.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .volume import MaskVolume, Volume3D

RADIUS_PROFILES = ("constant", "cone", "sinusoidal")


@dataclass(frozen=True)
class PhantomSpec:
    sizes: tuple[int, int, int] = (128, 128, 24)  # nx, ny, nz
    spacing: tuple[float, float, float] = (1.0, 1.0, 3.0)
    center: tuple[float, float] = (64.0, 64.0)
    drift_amplitude: float = 8.0
    radius_profile: str = "cone"
    radius_start: float = 10.0
    radius_end: float = 16.0
    foreground: float = 200.0
    background: float = 50.0
    noise_sigma: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.radius_profile not in RADIUS_PROFILES:
            raise DataError(f"radius_profile must be one of {RADIUS_PROFILES}")
        if self.noise_sigma < 0:
            raise DataError("noise_sigma must be >= 0")
        if min(self.radius_start, self.radius_end) < 3.0:
            raise DataError("radius must be >= 3 voxels everywhere")
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        object.__setattr__(self, "spacing", tuple(float(s) for s in self.spacing))
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    def radius_at(self, z: int) -> float:
        nz = self.sizes[2]
        f = z / (nz - 1) if nz > 1 else 0.0
        if self.radius_profile == "constant":
            return self.radius_start
        if self.radius_profile == "cone":
            return self.radius_start + f * (self.radius_end - self.radius_start)
        mid = 0.5 * (self.radius_start + self.radius_end)
        half = 0.5 * (self.radius_end - self.radius_start)
        return mid + half * math.sin(2.0 * math.pi * f)

    def centerline_at(self, z: int) -> tuple[float, float]:
        nz = self.sizes[2]
        f = z / nz
        cx = self.center[0] + self.drift_amplitude * math.sin(2.0 * math.pi * f)
        return cx, self.center[1]

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=1)

    @classmethod
    def from_json(cls, data: str | bytes) -> "PhantomSpec":
        try:
            doc = json.loads(data)
        except json.JSONDecodeError as exc:
            raise DataError(f"phantom spec is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise DataError("phantom spec must be a JSON object")
        known = {f.name for f in cls.__dataclass_fields__.values()}
        unknown = set(doc) - known
        if unknown:
            raise DataError(f"unknown phantom spec field(s): {sorted(unknown)}")
        for key in ("sizes", "spacing", "center"):
            if key in doc:
                doc[key] = tuple(doc[key])
        return cls(**doc)


def generate(spec: PhantomSpec) -> tuple[Volume3D, MaskVolume]:
    """Render the phantom volume and its exact ground-truth mask."""
    nx, ny, nz = spec.sizes
    xs = np.arange(nx, dtype=np.float64)
    ys = np.arange(ny, dtype=np.float64)
    mask = np.zeros((nz, ny, nx), dtype=np.uint8)
    for z in range(nz):
        r = spec.radius_at(z)
        cx, cy = spec.centerline_at(z)
        if not (r <= cx <= nx - 1 - r and r <= cy <= ny - 1 - r):
            raise DataError(
                f"tube exits the volume at slice {z}: center ({cx:.1f}, {cy:.1f}), radius {r:.1f}"
            )
        dist2 = (xs[None, :] - cx) ** 2 + (ys[:, None] - cy) ** 2
        mask[z] = dist2 <= r * r
    grey = np.where(mask, spec.foreground, spec.background).astype(np.float32)
    if spec.noise_sigma > 0:
        rng = np.random.default_rng(spec.rng_seed)
        grey = grey + rng.normal(0.0, spec.noise_sigma, grey.shape).astype(np.float32)
    return (
        Volume3D(values=grey.astype(np.float32), spacing=spec.spacing),
        MaskVolume(values=mask, spacing=spec.spacing),
    )
