"""Bas-relief generation from point clouds with real-time adjustment."""

from .basesurface import BaseSurface, FoldedPlane, Heightfield, Plane, Wave, \
    parse_base
from .cloud import PointCloud, estimate_density, load_cloud, load_cloud_path, \
    load_mesh, save_mesh
from .compression import ReliefParams, boundary_weight, compress_normals, \
    curvature_weight, expected_normals
from .curvature import CurvatureField, MLSConfig, mean_curvature_field, \
    normalize_curvature
from .detail import enhance_details
from .mapping import RatioField, ReferenceRelief, build_reference, \
    fit_ratio_field, map_heights
from .mbspline import MultilevelBSpline, fit_mbspline
from .meshing import ReliefMesh, make_mesh, triangulate_xy, update_normals
from .sampling import ControlSet, sample_controls
from .session import FrameResult, Session, SessionConfig, prepare_session
from .solver import HeightSolution, LinearSystem, assemble_system, \
    height_span, solve_heights
from .target import TargetRequest, TargetResult, solve_for_height
from .viewprep import BoundaryInfo, ViewFrame, VisibleSet, align_view, \
    detect_boundary, detect_visible
from .wire import FrameMessage, decode_frame, encode_frame

__version__ = "0.1.0"
