"""Interactive, scale-invariant segmentation of tubular structures.

A user-drawn contour on one slice seeds a radial graph whose exact min-cut
outlines the structure; the outline, rescaled, carries the template to the
next slice. Includes phantoms, evaluation metrics, persistence, a batch CLI
and an HTTP session service.
"""

from ._core import IMPLEMENTATION
from .errors import (
    ContourJsonError,
    DataError,
    GeometryError,
    InternalError,
    InterpolationError,
    NrrdParseError,
    StateError,
    TruncatedPayloadError,
    UnsupportedFormatError,
)
from .geometry import (
    NodeGrid,
    RayFan,
    SeedPoint,
    Template,
    cast_rays,
    centroid,
    intersect_ray_polygon,
    point_in_polygon,
    polygon_area,
    polygon_centroid,
    ray_angles,
    sample_node_grid,
    scale_template,
)
from .graph import (
    CutResult,
    FlowGraph,
    GraphParams,
    boundary_objective,
    build_graph,
    extract_cut,
    max_flow,
    node_costs,
    segment_one_slice,
)
from .metrics import (
    OverlapReport,
    SummaryStats,
    compare_masks,
    dsc,
    format_report_table,
    hausdorff,
    summarize,
    volume_stats,
)
from .phantom import PhantomSpec, generate as generate_phantom
from .session import (
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
from .volume import (
    ContourSet,
    MaskVolume,
    Slice2D,
    SliceContour,
    Volume3D,
    extract_slice,
    read_contour_set,
    read_nrrd,
    sample_grey,
    write_contour_set,
    write_nrrd,
)

__version__ = "0.1.0"
