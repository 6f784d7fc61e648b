"""Template polygons, seed points, radial ray fans and node grids.

Angles are counter-clockwise from +x in pixel space; a ray fan of k rays uses
the uniform angles 2*pi*i/k. Node j on ray i sits at fraction (j+1)/n of the
way from the seed to the ray's template intersection, so the outermost node
lies exactly on the template boundary and the seed itself is not a grid node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError
from .volume import Slice2D, _freeze, sample_grey, sample_grey_many

# rays shorter than this (pixel units) make a meaningless collapsed column
MIN_RAY_LENGTH = 2.0

# below this enclosed area the shoelace centroid is numerically unreliable
_DEGENERATE_AREA = 1e-12


@dataclass(frozen=True)
class Template:
    """Closed marker polygon on one slice (last vertex connects to first)."""

    markers: np.ndarray
    z_index: int = 0

    def __post_init__(self):
        markers = np.asarray(self.markers, dtype=np.float64)
        if markers.ndim != 2 or markers.shape[1] != 2 or markers.shape[0] < 3:
            raise ValueError("template needs at least 3 [x, y] markers")
        if not np.isfinite(markers).all():
            raise ValueError("template markers must be finite")
        if polygon_area(markers) == 0.0:
            raise ValueError("template polygon encloses no area")
        object.__setattr__(self, "markers", _freeze(markers))
        object.__setattr__(self, "z_index", int(self.z_index))


@dataclass(frozen=True)
class SeedPoint:
    position: np.ndarray
    z_index: int = 0

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=np.float64).reshape(2)
        if not np.isfinite(pos).all():
            raise ValueError("seed position must be finite")
        object.__setattr__(self, "position", _freeze(pos))
        object.__setattr__(self, "z_index", int(self.z_index))


@dataclass(frozen=True)
class RayFan:
    """k rays from the seed with their template intersections and lengths."""

    seed: SeedPoint
    angles: np.ndarray
    intersections: np.ndarray
    lengths: np.ndarray

    @property
    def k(self) -> int:
        return len(self.angles)


@dataclass(frozen=True)
class NodeGrid:
    """k x n node positions and their sampled grey values."""

    positions: np.ndarray  # (k, n, 2)
    grey: np.ndarray  # (k, n)
    seed_grey: float
    seed_position: np.ndarray  # (2,)

    @property
    def k(self) -> int:
        return self.positions.shape[0]

    @property
    def n(self) -> int:
        return self.positions.shape[1]


def polygon_area(vertices: np.ndarray) -> float:
    """Signed shoelace area (positive for counter-clockwise order)."""
    v = np.asarray(vertices, dtype=np.float64)
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    return 0.5 * float(np.sum(x * yn - xn * y))


def polygon_centroid(vertices: np.ndarray) -> np.ndarray:
    """Area-weighted centroid; falls back to the vertex mean when degenerate."""
    v = np.asarray(vertices, dtype=np.float64)
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = 0.5 * float(np.sum(cross))
    if abs(area) < _DEGENERATE_AREA:
        return v.mean(axis=0)
    cx = float(np.sum((x + xn) * cross)) / (6.0 * area)
    cy = float(np.sum((y + yn) * cross)) / (6.0 * area)
    return np.array([cx, cy])


def centroid(t: Template) -> np.ndarray:
    return polygon_centroid(t.markers)


def point_in_polygon(p, vertices: np.ndarray) -> bool:
    """Even-odd rule: count boundary crossings of the ray from p along +x."""
    px, py = float(p[0]), float(p[1])
    v = np.asarray(vertices, dtype=np.float64)
    inside = False
    x0, y0 = v[-1]
    for x1, y1 in v:
        if (y1 > py) != (y0 > py):
            x_cross = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
            if px < x_cross:
                inside = not inside
        x0, y0 = x1, y1
    return inside


def scale_template(t: Template, sf: float, center) -> Template:
    """Scale each marker about center by factor sf; z is preserved."""
    if not (sf > 0):
        raise ValueError(f"scale factor must be > 0, got {sf}")
    c = np.asarray(center, dtype=np.float64).reshape(2)
    markers = c + sf * (t.markers - c)
    return Template(markers=markers, z_index=t.z_index)


def ray_angles(k: int) -> np.ndarray:
    """k uniform angles 2*pi*i/k measured counter-clockwise from +x."""
    if k < 3:
        raise ValueError(f"need at least 3 rays, got {k}")
    return 2.0 * np.pi * np.arange(k) / k


def intersect_ray_polygon(seed, angle: float, t: Template) -> np.ndarray:
    """Farthest intersection of the half-line from seed at angle with T.

    Taking the farthest crossing makes the node grid span the full template
    extent when a concave boundary crosses the ray more than once.
    """
    p = np.asarray(seed, dtype=np.float64).reshape(2)
    d = np.array([math.cos(angle), math.sin(angle)])
    a = t.markers
    b = np.roll(a, -1, axis=0)
    e = b - a
    denom = d[0] * e[:, 1] - d[1] * e[:, 0]
    ap = a - p
    with np.errstate(divide="ignore", invalid="ignore"):
        tt = (ap[:, 0] * e[:, 1] - ap[:, 1] * e[:, 0]) / denom
        uu = (ap[:, 0] * d[1] - ap[:, 1] * d[0]) / denom
    hit = (np.abs(denom) > 1e-15) & (tt > 1e-12) & (uu >= -1e-12) & (uu <= 1.0 + 1e-12)
    if not hit.any():
        raise GeometryError(
            "ray does not intersect the template boundary (seed outside polygon?)",
            reason="seed-outside-template",
        )
    t_far = float(tt[hit].max())
    return p + t_far * d


def cast_rays(seed: SeedPoint, k: int, t: Template) -> RayFan:
    """Spread k uniform-angle rays from the seed and intersect each with T."""
    if t.z_index != seed.z_index:
        raise GeometryError(
            f"seed slice {seed.z_index} does not match template slice {t.z_index}",
            reason="slice-mismatch",
        )
    if not point_in_polygon(seed.position, t.markers):
        raise GeometryError(
            "seed point lies outside the template polygon",
            reason="seed-outside-template",
        )
    angles = ray_angles(k)
    intersections = np.empty((k, 2))
    for i, ang in enumerate(angles):
        intersections[i] = intersect_ray_polygon(seed.position, ang, t)
    lengths = np.linalg.norm(intersections - seed.position, axis=1)
    if bool((lengths < MIN_RAY_LENGTH).any()):
        short = int(np.argmin(lengths))
        raise GeometryError(
            f"ray {short} is only {lengths[short]:.3f} px long "
            f"(< {MIN_RAY_LENGTH}); move the seed or redraw the template",
            reason="degenerate-ray",
        )
    angles.setflags(write=False)
    intersections.setflags(write=False)
    lengths.setflags(write=False)
    return RayFan(seed=seed, angles=angles, intersections=intersections, lengths=lengths)


def sample_node_grid(fan: RayFan, n: int, slc: Slice2D) -> NodeGrid:
    """Place n equally spaced nodes per ray and sample their grey values."""
    if n < 2:
        raise ValueError(f"need at least 2 nodes per ray, got {n}")
    sp = fan.seed.position
    fractions = (np.arange(n) + 1.0) / n  # outermost node on the template
    offsets = fan.intersections - sp  # (k, 2)
    positions = sp[None, None, :] + fractions[None, :, None] * offsets[:, None, :]
    grey = sample_grey_many(slc, positions.reshape(-1, 2)).reshape(fan.k, n)
    seed_grey = sample_grey(slc, sp, method="bilinear")
    positions.setflags(write=False)
    grey.setflags(write=False)
    return NodeGrid(positions=positions, grey=grey, seed_grey=seed_grey,
                    seed_position=sp)
