"""Geometric quantities of ropelength-filtered polygonal knot spaces.

Core objects: polygonal knots with static functionals (length, turning,
areas, sizes), polygonal thickness and ropelength, keyframe isotopies
with exact swept-area evaluation, calibration lower bounds, numerical
upper bounds on the swept-area cost, and swept-area weighted diagram
transition graphs.
"""

from .calibration import (
    Bound,
    BoundKind,
    circle_distance_oracle,
    ellipse_distance_oracle,
    ellipse_thickness_oracle,
    projected_area_bound,
    sup_plane_bound,
)
from .corpus import CorpusFamily, CorpusSpec, generate
from .errors import (
    InfeasibleError,
    InvalidKnotError,
    InvalidPathError,
    NonGenericProjectionError,
    NumericError,
    RopesweepError,
    ValidationError,
)
from .geometry import (
    OrientedPlane,
    PolygonalKnot,
    SizeFunctionalKind,
    compression_radius,
    density,
    exterior_angles,
    length,
    min_enclosing_ball,
    projected_signed_area,
    size,
    total_curvature,
    vector_area,
)
from .isotopy import (
    IsotopyPath,
    SweptAreaResult,
    concatenate,
    constant_path,
    infinitesimal_seminorm,
    linear_path,
    refine,
    reverse,
    segment_area_integral,
    swept_area,
)
from .optimizer import (
    OptimizeConfig,
    OptimizeResult,
    lambda_sweep,
    loop_cost,
    merge_cost,
    merge_scale_upper,
    minimize_sweep,
)
from .reidemeister import (
    Diagram,
    DiagramGraph,
    ReidemeisterEvent,
    build_graph,
    detect_events,
    diagram_distance,
    project,
)
# the thickness() function stays on its submodule: re-exporting it here
# would shadow the ropesweep.thickness module attribute
from .thickness import (
    AdmissibilityReport,
    ThicknessBreakdown,
    check_admissible,
    dcsd,
    ropelength,
    vertex_radius,
)

__version__ = "0.1.0"
