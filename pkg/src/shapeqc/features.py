"""Fixed 14-feature geometric summary of a point cloud.

The feature set is the axis-aligned bounding box (per-axis min and max),
per-axis mean and population standard deviation, and the mean and population
standard deviation of the point radius r = sqrt(x^2 + y^2 + z^2) measured
from the native origin. No normalization is applied; scale and placement
carry signal for quality assessment.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyCloudError
from .mesh_io import PointCloud
from .numeric import sorted_sum

FEATURE_NAMES: tuple[str, ...] = (
    "min_x",
    "min_y",
    "min_z",
    "max_x",
    "max_y",
    "max_z",
    "mean_x",
    "mean_y",
    "mean_z",
    "std_x",
    "std_y",
    "std_z",
    "mean_radius",
    "std_radius",
)

N_FEATURES = len(FEATURE_NAMES)


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    names: tuple[str, ...] = field(default=FEATURE_NAMES)

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if v.shape != (len(self.names),):
            raise ValueError(f"expected {len(self.names)} values, got shape {v.shape}")
        object.__setattr__(self, "values", v)

    def as_dict(self) -> dict[str, float]:
        return {n: float(v) for n, v in zip(self.names, self.values)}

    def __getitem__(self, name: str) -> float:
        return float(self.values[self.names.index(name)])


def _mean_std(x: np.ndarray) -> tuple[float, float]:
    # summation over ascending-sorted values keeps reductions independent of
    # input point order, bit for bit
    n = x.shape[0]
    mean = sorted_sum(x) / n
    var = sorted_sum((x - mean) ** 2) / n
    return mean, float(np.sqrt(var))


def extract_features(cloud: PointCloud) -> FeatureVector:
    """Compute the 14 summary features in canonical order.

    Invariant under any permutation of the input points (exactly, not just to
    rounding), and covariant with translation in the min/max/mean entries.
    Raises EmptyCloudError for clouds with no points.
    """
    p = cloud.points
    if p.shape[0] == 0:
        raise EmptyCloudError("cannot extract features from an empty point cloud")
    mins = p.min(axis=0)
    maxs = p.max(axis=0)
    mean_x, std_x = _mean_std(p[:, 0])
    mean_y, std_y = _mean_std(p[:, 1])
    mean_z, std_z = _mean_std(p[:, 2])
    radius = np.sqrt(p[:, 0] ** 2 + p[:, 1] ** 2 + p[:, 2] ** 2)
    mean_r, std_r = _mean_std(radius)
    vals = np.array(
        [
            mins[0],
            mins[1],
            mins[2],
            maxs[0],
            maxs[1],
            maxs[2],
            mean_x,
            mean_y,
            mean_z,
            std_x,
            std_y,
            std_z,
            mean_r,
            std_r,
        ],
        dtype=np.float64,
    )
    return FeatureVector(vals)


def feature_matrix(clouds) -> np.ndarray:
    """Stack extract_features over an iterable of clouds into (N, 14)."""
    return np.asarray([extract_features(c).values for c in clouds], dtype=np.float64)
