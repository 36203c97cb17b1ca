"""Persistent homology of large Euclidean point clouds via flood filtrations.

The pipeline: pick a small landmark set (farthest point sampling), build its
Delaunay triangulation, assign every simplex the radius at which its convex
hull is covered by balls around the full cloud, then reduce the resulting
filtered complex to persistence diagrams.
"""

from .geometry import (
    PointCloud,
    EnclosingBall,
    BarycentricGridTemplate,
    barycentric_grid,
    barycentric_grid_template,
    directed_hausdorff,
    farthest_point_sampling,
    grid_covering_bound,
    random_covering_count,
    ritter_enclosing_ball,
    sample_simplex_uniform,
)

__all__ = [
    "PointCloud",
    "EnclosingBall",
    "BarycentricGridTemplate",
    "barycentric_grid",
    "barycentric_grid_template",
    "directed_hausdorff",
    "farthest_point_sampling",
    "grid_covering_bound",
    "random_covering_count",
    "ritter_enclosing_ball",
    "sample_simplex_uniform",
    "flood_diagram",
]


def flood_diagram(X, landmarks, config=None, include_zero=False):
    """Convenience wrapper: flood filtration plus reduction in one call.

    Returns (PersistenceDiagram, FilteredComplex).
    """
    from .filtration import build_flood_filtration
    from .persistence import boundary_matrix, reduce_and_extract

    fc = build_flood_filtration(X, landmarks, config)
    dgm = reduce_and_extract(boundary_matrix(fc), fc, include_zero=include_zero)
    return dgm, fc
