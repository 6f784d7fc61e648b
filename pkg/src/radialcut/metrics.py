"""Overlap and distance metrics for mask volumes, with tabular summaries."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    std: float
    min: float
    max: float


@dataclass(frozen=True)
class OverlapReport:
    label: str
    dsc: float  # percent
    hausdorff: float  # voxel units
    volume_a_cm3: float
    volume_b_cm3: float
    voxels_a: int
    voxels_b: int

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "dsc_percent": self.dsc,
            "hausdorff_voxel": self.hausdorff,
            "volume_a_cm3": self.volume_a_cm3,
            "volume_b_cm3": self.volume_b_cm3,
            "voxels_a": self.voxels_a,
            "voxels_b": self.voxels_b,
        }


def _check_geometry(a, b):
    if a.values.shape != b.values.shape or a.spacing != b.spacing:
        raise ValueError(
            f"mask geometries differ: {a.values.shape}/{a.spacing} "
            f"vs {b.values.shape}/{b.spacing}"
        )


def dsc(a, b) -> float:
    """Dice similarity coefficient in percent; two empty masks agree fully."""
    _check_geometry(a, b)
    av = a.values.astype(bool)
    bv = b.values.astype(bool)
    na = int(av.sum())
    nb = int(bv.sum())
    if na + nb == 0:
        return 100.0
    inter = int((av & bv).sum())
    return 100.0 * 2.0 * inter / (na + nb)


def hausdorff(a, b) -> float:
    """Exact symmetric Hausdorff distance between set-voxel centers.

    Measured in voxel index units (anisotropic spacing deliberately ignored).
    """
    _check_geometry(a, b)
    av = a.values.astype(bool)
    bv = b.values.astype(bool)
    if not av.any() or not bv.any():
        raise ValueError("hausdorff requires two non-empty masks")
    # crop to the union bounding box; nearest set voxels stay inside it
    union = av | bv
    zs, ys, xs = np.nonzero(union)
    lo = (zs.min(), ys.min(), xs.min())
    hi = (zs.max() + 1, ys.max() + 1, xs.max() + 1)
    box = tuple(slice(l, h) for l, h in zip(lo, hi))
    av = av[box]
    bv = bv[box]
    d_to_b = ndimage.distance_transform_edt(~bv)
    d_to_a = ndimage.distance_transform_edt(~av)
    return float(max(d_to_b[av].max(), d_to_a[bv].max()))


def volume_stats(m) -> tuple[int, float]:
    """(set-voxel count, object volume in cm^3) for a mask."""
    count = int(m.values.astype(bool).sum())
    sx, sy, sz = m.spacing
    return count, count * sx * sy * sz / 1000.0


def summarize(values) -> SummaryStats:
    """Mean, sample standard deviation (n-1), min and max."""
    vals = [float(v) for v in values]
    if len(vals) < 2:
        raise ValueError("summarize needs at least 2 values for the sample std")
    if any(not math.isfinite(v) for v in vals):
        raise ValueError("summarize requires finite values")
    arr = np.asarray(vals)
    return SummaryStats(
        mean=float(arr.mean()),
        std=float(arr.std(ddof=1)),
        min=float(arr.min()),
        max=float(arr.max()),
    )


def compare_masks(a, b, label: str = "") -> OverlapReport:
    """Full overlap report between two masks of identical geometry."""
    voxels_a, cm3_a = volume_stats(a)
    voxels_b, cm3_b = volume_stats(b)
    return OverlapReport(
        label=label,
        dsc=dsc(a, b),
        hausdorff=hausdorff(a, b),
        volume_a_cm3=cm3_a,
        volume_b_cm3=cm3_b,
        voxels_a=voxels_a,
        voxels_b=voxels_b,
    )


def reports_to_json(reports: list[OverlapReport]) -> str:
    doc = {"datasets": [r.to_dict() for r in reports]}
    if len(reports) >= 2:
        doc["aggregate"] = {
            "dsc_percent": summarize([r.dsc for r in reports]).__dict__,
            "hausdorff_voxel": summarize([r.hausdorff for r in reports]).__dict__,
        }
    return json.dumps(doc, indent=1)


def format_report_table(reports: list[OverlapReport]) -> str:
    """Aligned text table: one row per dataset plus mean/std, min, max rows."""
    header = f"{'Data set':<12}{'DSC (%)':>10}{'Hausdorff (voxel)':>20}{'Vol A (cm3)':>14}{'Vol B (cm3)':>14}"
    lines = [header, "-" * len(header)]
    for r in reports:
        label = r.label or "-"
        lines.append(
            f"{label:<12}{r.dsc:>10.2f}{r.hausdorff:>20.2f}"
            f"{r.volume_a_cm3:>14.2f}{r.volume_b_cm3:>14.2f}"
        )
    if len(reports) >= 2:
        s_dsc = summarize([r.dsc for r in reports])
        s_hd = summarize([r.hausdorff for r in reports])
        lines.append("-" * len(header))
        lines.append(
            f"{'mean +- std':<12}"
            f"{f'{s_dsc.mean:.2f} +- {s_dsc.std:.2f}':>10}"
            f"{f'{s_hd.mean:.2f} +- {s_hd.std:.2f}':>20}"
        )
        lines.append(f"{'min':<12}{s_dsc.min:>10.2f}{s_hd.min:>20.2f}")
        lines.append(f"{'max':<12}{s_dsc.max:>10.2f}{s_hd.max:>20.2f}")
    return "\n".join(lines)
