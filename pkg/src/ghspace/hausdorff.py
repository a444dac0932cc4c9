"""Exact Hausdorff distances between finite point sets in a common
Euclidean space: a brute-force oracle, an early-break scan, and a
k-d-tree-accelerated path.  All three agree to machine precision; only
scan effort differs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import ParameterError
from .geometry import PointCloud

_CHUNK = 512


@dataclass(frozen=True)
class HausdorffResult:
    """Symmetric distance with the two directed components and the row
    indices achieving each directed supremum (lowest index on ties)."""

    distance: float
    witness_a: int
    witness_b: int
    direction_ab: float
    direction_ba: float


def _as_points(obj) -> np.ndarray:
    pts = obj.points if isinstance(obj, PointCloud) else np.asarray(obj, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ParameterError("point set must be a nonempty N x d array")
    return pts


def _paired(a, b):
    pa, pb = _as_points(a), _as_points(b)
    if pa.shape[1] != pb.shape[1]:
        raise ParameterError(
            f"ambient dimensions differ: {pa.shape[1]} vs {pb.shape[1]}"
        )
    return pa, pb


def directed_hausdorff_naive(a, b) -> tuple[float, int]:
    """max over a in A of min over b in B, by full brute-force scan.

    O(|A| * |B|); this is the oracle the other implementations are
    checked against.  Returns (distance, maximizing index in A).
    """
    pa, pb = _paired(a, b)
    best = -1.0
    best_idx = 0
    for s in range(0, pa.shape[0], _CHUNK):
        blk = pa[s : s + _CHUNK]
        diff = blk[:, None, :] - pb[None, :, :]
        mins = np.einsum("ijk,ijk->ij", diff, diff).min(axis=1)
        i = int(np.argmax(mins))
        if mins[i] > best:
            best = float(mins[i])
            best_idx = s + i
    return math.sqrt(max(best, 0.0)), best_idx


def hausdorff_naive(a, b) -> HausdorffResult:
    """Symmetric brute-force Hausdorff distance."""
    d_ab, wa = directed_hausdorff_naive(a, b)
    d_ba, wb = directed_hausdorff_naive(b, a)
    return HausdorffResult(max(d_ab, d_ba), wa, wb, d_ab, d_ba)


def directed_hausdorff_earlybreak(a, b, shuffle_seed: int = 0) -> tuple[float, int]:
    """Directed distance with the classic early-break inner scan.

    For each point of A the scan over B stops as soon as any distance
    drops below the running maximum, since that point can no longer raise
    it.  B is scanned in a seed-shuffled order; the result is exact and
    seed-independent.
    """
    pa, pb = _paired(a, b)
    order = np.random.default_rng(shuffle_seed).permutation(pb.shape[0])
    shuffled = pb[order]
    cmax = 0.0
    witness = 0
    for i in range(pa.shape[0]):
        p = pa[i]
        dmin = math.inf
        for s in range(0, shuffled.shape[0], _CHUNK):
            diff = shuffled[s : s + _CHUNK] - p
            m = float(np.einsum("ij,ij->i", diff, diff).min())
            if m < dmin:
                dmin = m
            if dmin < cmax:
                break
        if dmin > cmax:
            cmax = dmin
            witness = i
    return math.sqrt(cmax), witness


def hausdorff_earlybreak(a, b, shuffle_seed: int = 0) -> HausdorffResult:
    d_ab, wa = directed_hausdorff_earlybreak(a, b, shuffle_seed)
    d_ba, wb = directed_hausdorff_earlybreak(b, a, shuffle_seed)
    return HausdorffResult(max(d_ab, d_ba), wa, wb, d_ab, d_ba)


class NearestNeighborIndex:
    """Exact nearest-neighbor queries over a fixed point set (k-d tree)."""

    def __init__(self, points):
        pts = _as_points(points)
        self._tree = cKDTree(pts)
        self.ambient_dim = pts.shape[1]
        self.size = pts.shape[0]

    def query(self, q, workers: int = 1):
        """Distances and indices of the nearest indexed point for each query row."""
        arr = np.asarray(q, dtype=float)
        single = arr.ndim == 1
        if single:
            arr = arr.reshape(1, -1)
        if arr.shape[1] != self.ambient_dim:
            raise ParameterError(
                f"query dimension {arr.shape[1]} != index dimension {self.ambient_dim}"
            )
        d, i = self._tree.query(arr, workers=workers)
        if single:
            return float(d[0]), int(i[0])
        return d, i


def build_nn_index(b) -> NearestNeighborIndex:
    return NearestNeighborIndex(b)


def nn_distance(index: NearestNeighborIndex, point) -> float:
    d, _ = index.query(point)
    return d


def hausdorff_accelerated(a, b, workers: int = 1) -> HausdorffResult:
    """Symmetric Hausdorff distance through two k-d trees.

    Indexes B for the A-to-B direction and A for the B-to-A direction;
    matches the brute-force result to machine precision.
    """
    pa, pb = _paired(a, b)
    d_a = cKDTree(pb).query(pa, workers=workers)[0]
    wa = int(np.argmax(d_a))
    d_b = cKDTree(pa).query(pb, workers=workers)[0]
    wb = int(np.argmax(d_b))
    d_ab = float(d_a[wa])
    d_ba = float(d_b[wb])
    return HausdorffResult(max(d_ab, d_ba), wa, wb, d_ab, d_ba)
