"""Constant-curvature model spaces, product signatures, and discretizations
of their unit balls.

Charts in use: planar polar samples for the flat disk, extrinsic 3-D
coordinates for the spherical cap, and horocyclic coordinates for the
hyperbolic disk.  Horocyclic coordinates (x, y) carry the metric
dx^2 + e^{2x} dy^2 and are reached from the Poincare disk through the
upper half-plane via the Cayley map sending the disk origin to i; the
half-plane point of (x, y) is (u, v) = (y, e^{-x}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ChartError, ParameterError

CHART_POLAR = "polar-Euclidean"
CHART_SPHERE = "extrinsic-sphere"
CHART_HOROCYCLIC = "horocyclic-H2"
CHART_AMBIENT6 = "ambient-E6"

_CHART_DIMS = {
    CHART_POLAR: 2,
    CHART_SPHERE: 3,
    CHART_HOROCYCLIC: 2,
    CHART_AMBIENT6: 6,
}

_KINDS = ("E", "S", "H")
_CURVATURE = {"E": 0, "S": 1, "H": -1}
_RANK = {"E": 0, "S": 1, "H": 2}

# numerically safe radial range for hyperbolic sampling
H2_R_MIN = 1e-8
H2_R_MAX = 0.97


@dataclass(frozen=True)
class ModelSpace:
    """A constant-curvature model space: flat (E), spherical (S), or
    hyperbolic (H).  Everything in this package is two-dimensional."""

    kind: str
    dimension: int = 2

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ParameterError(f"unknown model-space kind {self.kind!r}")
        if self.dimension < 1:
            raise ParameterError("dimension must be positive")

    @property
    def curvature_sign(self) -> int:
        return _CURVATURE[self.kind]

    @property
    def rank(self) -> int:
        """Canonical ordering rank: E < S < H."""
        return _RANK[self.kind]

    @property
    def label(self) -> str:
        return f"{self.kind}{self.dimension}"

    @classmethod
    def from_label(cls, label: str) -> "ModelSpace":
        label = label.strip()
        if len(label) < 2 or label[0] not in _KINDS or not label[1:].isdigit():
            raise ParameterError(f"cannot parse model-space label {label!r}")
        return cls(label[0], int(label[1:]))


E2 = ModelSpace("E")
S2 = ModelSpace("S")
H2 = ModelSpace("H")


@dataclass(frozen=True)
class ProductSignature:
    """An unordered product of model spaces, stored in canonical order."""

    factors: tuple[ModelSpace, ...]

    def __init__(self, factors):
        factors = tuple(sorted(factors, key=lambda m: m.rank))
        if not factors:
            raise ParameterError("a product signature needs at least one factor")
        object.__setattr__(self, "factors", factors)

    @property
    def canonical_key(self) -> str:
        return "x".join(m.label for m in self.factors)

    @property
    def n_factors(self) -> int:
        return len(self.factors)

    @property
    def sort_key(self) -> tuple:
        """Deterministic total order: factor count first, then factor ranks."""
        return (len(self.factors), tuple(m.rank for m in self.factors))

    @classmethod
    def from_key(cls, key: str) -> "ProductSignature":
        return cls(ModelSpace.from_label(tok) for tok in key.split("x"))

    def __str__(self) -> str:
        return self.canonical_key


@dataclass(frozen=True)
class SamplingSpec:
    """Tensor-grid resolution and radial range for a ball discretization."""

    n_radial: int
    n_angular: int
    r_min: float = 0.0
    r_max: float = 1.0

    def __post_init__(self):
        if self.n_radial < 2 or self.n_angular < 2:
            raise ParameterError("n_radial and n_angular must both be >= 2")
        if not (0.0 <= self.r_min < self.r_max <= 1.0):
            raise ParameterError("need 0 <= r_min < r_max <= 1")

    @property
    def n_points(self) -> int:
        return self.n_radial * self.n_angular


class PointCloud:
    """An immutable finite set of points in a shared ambient space.

    ``chart`` records which parameterization produced the coordinates; the
    four standard labels pin the ambient dimension, any other label is
    accepted for raw Euclidean data.
    """

    __slots__ = ("points", "chart", "source_space")

    def __init__(self, points, chart: str, source_space=None):
        pts = np.ascontiguousarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(1, -1)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ParameterError("points must form a nonempty N x d array")
        if not np.all(np.isfinite(pts)):
            raise ParameterError("point cloud contains non-finite coordinates")
        expected = _CHART_DIMS.get(chart)
        if expected is not None and pts.shape[1] != expected:
            raise ChartError(
                f"chart {chart!r} requires dimension {expected}, got {pts.shape[1]}"
            )
        pts.setflags(write=False)
        self.points = pts
        self.chart = chart
        if source_space is None:
            source_space = _DEFAULT_SOURCE.get(chart)
        self.source_space = source_space

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"PointCloud(n={self.n}, dim={self.ambient_dim}, chart={self.chart!r})"


_DEFAULT_SOURCE = {
    CHART_POLAR: E2,
    CHART_SPHERE: S2,
    CHART_HOROCYCLIC: H2,
    CHART_AMBIENT6: "embedded-E6",
}


def dedupe(cloud: PointCloud) -> PointCloud:
    """Drop exactly repeated rows (first occurrence kept)."""
    _, idx = np.unique(cloud.points, axis=0, return_index=True)
    keep = np.sort(idx)
    return PointCloud(cloud.points[keep], cloud.chart, cloud.source_space)


# ---------------------------------------------------------------------------
# samplers


def _polar_grid(spec: SamplingSpec):
    r = np.linspace(spec.r_min, spec.r_max, spec.n_radial)
    t = np.linspace(0.0, 2.0 * np.pi, spec.n_angular, endpoint=False)
    rr, tt = np.meshgrid(r, t, indexing="ij")
    return rr.ravel(), tt.ravel()


def sample_euclidean_ball(spec: SamplingSpec) -> PointCloud:
    """Tensor grid (r cos t, r sin t) over the flat disk of radius r_max."""
    rr, tt = _polar_grid(spec)
    pts = np.column_stack([rr * np.cos(tt), rr * np.sin(tt)])
    return PointCloud(pts, CHART_POLAR)

def sample_sphere_cap(spec: SamplingSpec) -> PointCloud:
    """Cap of geodesic radius r_max around the pole (0, 0, 1) of the unit
    sphere, parameterized by polar angle beta and azimuth alpha."""
    bb, aa = _polar_grid(spec)
    sb = np.sin(bb)
    pts = np.column_stack([sb * np.cos(aa), sb * np.sin(aa), np.cos(bb)])
    return PointCloud(pts, CHART_SPHERE)


def exp_map_h2(r: float, theta: float) -> np.ndarray:
    """Exponential map at the origin of the Poincare disk.

    Sends a tangent vector of length ``r`` in direction ``theta`` to the
    disk point tanh(r/2) (cos theta, sin theta), which lies at hyperbolic
    distance exactly ``r`` from the origin.
    """
    if r < 0:
        raise ParameterError("geodesic radius must be >= 0")
    rho = math.tanh(0.5 * r)
    return np.array([rho * math.cos(theta), rho * math.sin(theta)])


def _disk_to_halfplane(w: np.ndarray) -> np.ndarray:
    """Cayley map z = i (1 + w) / (1 - w); the origin goes to i."""
    wc = w[..., 0] + 1j * w[..., 1]
    z = 1j * (1.0 + wc) / (1.0 - wc)
    return np.stack([z.real, z.imag], axis=-1)


def disk_to_horocyclic(w) -> np.ndarray:
    """Horocyclic coordinates (x, y) = (-log Im z, Re z) of a disk point.

    The disk origin maps to (0, 0).  Requires |w| < 1.
    """
    w = np.asarray(w, dtype=float)
    if w.shape != (2,):
        raise ParameterError("expected a single 2-D disk point")
    if float(np.hypot(w[0], w[1])) >= 1.0:
        raise ParameterError("disk point must satisfy |w| < 1")
    uv = _disk_to_halfplane(w)
    return np.array([-math.log(uv[1]), uv[0]])


def sample_hyperbolic_ball(spec: SamplingSpec | None = None) -> PointCloud:
    """Hyperbolic disk of radius r_max in horocyclic coordinates.

    Composes the planar polar grid with the exponential map and the
    disk-to-horocyclic transform.  The radial range must stay inside
    [1e-8, 0.97]; values outside it are numerically unsafe.
    """
    if spec is None:
        spec = SamplingSpec(100, 100, H2_R_MIN, H2_R_MAX)
    if spec.r_min < H2_R_MIN:
        raise ParameterError(f"hyperbolic sampling needs r_min >= {H2_R_MIN:g}")
    if spec.r_max > H2_R_MAX:
        raise ParameterError(f"hyperbolic sampling needs r_max <= {H2_R_MAX}")
    rr, tt = _polar_grid(spec)
    rho = np.tanh(0.5 * rr)
    disk = np.column_stack([rho * np.cos(tt), rho * np.sin(tt)])
    uv = _disk_to_halfplane(disk)
    pts = np.column_stack([-np.log(uv[:, 1]), uv[:, 0]])
    return PointCloud(pts, CHART_HOROCYCLIC)


# ---------------------------------------------------------------------------
# geodesic distances


def disk_distance(u, v) -> float:
    """Hyperbolic distance between two Poincare-disk points."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    d2 = float(np.sum((u - v) ** 2))
    den = (1.0 - float(np.sum(u * u))) * (1.0 - float(np.sum(v * v)))
    return math.acosh(1.0 + 2.0 * d2 / den)


def halfplane_distance(p, q) -> float:
    """Hyperbolic distance between two upper-half-plane points (u, v), v > 0."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    d2 = float((p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2)
    return math.acosh(1.0 + d2 / (2.0 * p[1] * q[1]))


def horocyclic_to_halfplane(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return np.array([p[..., 1], np.exp(-p[..., 0])]).T if p.ndim > 1 else np.array(
        [p[1], math.exp(-p[0])]
    )


def horocyclic_distance(p, q) -> float:
    """Hyperbolic distance between two horocyclic-coordinate points."""
    return halfplane_distance(horocyclic_to_halfplane(p), horocyclic_to_halfplane(q))


def sphere_distance(p, q) -> float:
    """Great-circle distance between two unit vectors."""
    c = float(np.clip(np.dot(p, q), -1.0, 1.0))
    return math.acos(c)


_BLOCK = 512


def geodesic_diameter(cloud: PointCloud) -> float:
    """Largest pairwise geodesic distance in the cloud's intrinsic chart.

    Defined as the full O(N^2) scan; evaluated in blocks so 10^4-point
    clouds stay within memory.
    """
    pts = cloud.points
    n = pts.shape[0]
    if n == 1:
        return 0.0
    if cloud.chart == CHART_POLAR:
        best = 0.0
        for s in range(0, n, _BLOCK):
            blk = pts[s : s + _BLOCK]
            d2 = (
                np.sum(blk * blk, axis=1)[:, None]
                + np.sum(pts * pts, axis=1)[None, :]
                - 2.0 * (blk @ pts.T)
            )
            best = max(best, float(d2.max()))
        return math.sqrt(max(best, 0.0))
    if cloud.chart == CHART_SPHERE:
        lo = 1.0
        for s in range(0, n, _BLOCK):
            lo = min(lo, float((pts[s : s + _BLOCK] @ pts.T).min()))
        return math.acos(max(-1.0, min(1.0, lo)))
    if cloud.chart == CHART_HOROCYCLIC:
        u = pts[:, 1]
        v = np.exp(-pts[:, 0])
        uv = np.column_stack([u, v])
        sq = np.sum(uv * uv, axis=1)
        best = 0.0
        for s in range(0, n, _BLOCK):
            blk = slice(s, min(s + _BLOCK, n))
            num = sq[blk][:, None] + sq[None, :] - 2.0 * (uv[blk] @ uv.T)
            ratio = np.maximum(num, 0.0) / (2.0 * np.outer(v[blk], v))
            best = max(best, float(ratio.max()))
        return math.acosh(1.0 + best)
    raise ChartError(f"no intrinsic distance for chart {cloud.chart!r}")
