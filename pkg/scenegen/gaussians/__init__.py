from .primitives import (
    Camera,
    FrameGaussians,
    Gaussian3D,
    RenderOutput,
    matrix_to_quaternion,
    quaternion_multiply,
    quaternion_to_matrix,
)
from .projection import CUTOFF_SQ, DILATION, ProjectedSet, Projection, project_frame, project_gaussian
from .rasterizer import MIN_TRANSMITTANCE, TILE_SIZE, footprint, rasterize, rasterize_reference
from .serialization import deserialize_frame, load_frame, save_frame, scene_path, serialize_frame

__all__ = [
    "CUTOFF_SQ",
    "Camera",
    "DILATION",
    "FrameGaussians",
    "Gaussian3D",
    "MIN_TRANSMITTANCE",
    "ProjectedSet",
    "Projection",
    "RenderOutput",
    "TILE_SIZE",
    "deserialize_frame",
    "footprint",
    "load_frame",
    "matrix_to_quaternion",
    "project_frame",
    "project_gaussian",
    "quaternion_multiply",
    "quaternion_to_matrix",
    "rasterize",
    "rasterize_reference",
    "save_frame",
    "scene_path",
    "serialize_frame",
]
