"""Upper-bound estimation of Gromov-Hausdorff distances between unit balls
of the plane, the sphere, and the hyperbolic plane.

The hyperbolic ball is carried into R^6 once by the corrugated embedding;
the flat disk and the spherical cap are placed into R^6 by a finite family
of rigid candidates (axis selection, optional negation, one-axis offset).
Each candidate is scored by the exact symmetric Hausdorff distance to the
embedded hyperbolic ball, and the minimum over the family is the estimate.
A coarse-resolution pass prunes the family before the survivors are
re-scored at full resolution.

Also holds the pairwise distance table between model spaces and the
composition rule for product signatures: equal signatures are at distance
zero, same-size signatures differing in one factor inherit the factor
distance, and one-factor extensions are at distance one.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .embedding import EmbeddingConstants, cached_constants, embed_cloud
from .errors import NumericalError, ParameterError
from .geometry import (
    CHART_AMBIENT6,
    E2,
    H2,
    H2_R_MAX,
    H2_R_MIN,
    ModelSpace,
    PointCloud,
    ProductSignature,
    S2,
    SamplingSpec,
    geodesic_diameter,
    sample_euclidean_ball,
    sample_hyperbolic_ball,
    sample_sphere_cap,
)

FAMILY_PLANE = "euclidean-plane"
FAMILY_SPHERE = "sphere-triple"

_AXES = (1, 2, 3, 4, 5, 6)

GH_E2_S2 = 0.23
GH_E2_H2 = 0.77
GH_S2_H2 = 0.84

PROVENANCE_ANALYTIC = "analytic-constant"
PROVENANCE_COMPUTED = "computed"
PROVENANCE_USER = "user-supplied"


def analytic_gh_e2_s2() -> float:
    """Distance between the flat and spherical unit balls; a fixed constant
    here, not recomputed."""
    return GH_E2_S2


@dataclass(frozen=True)
class EmbeddingCandidate:
    """One rigid placement of a source ball into R^6.

    ``axes`` are 1-based basis indices receiving the source coordinates
    (two for the plane family, three for the sphere family); ``negate``
    mirrors the source first (sphere family only); the offset translates
    along a single basis axis.
    """

    family: str
    axes: tuple[int, ...]
    negate: bool = False
    offset_axis: int = 1
    offset_value: float = 0.0

    def __post_init__(self):
        if self.family not in (FAMILY_PLANE, FAMILY_SPHERE):
            raise ParameterError(f"unknown candidate family {self.family!r}")
        want = 2 if self.family == FAMILY_PLANE else 3
        axes = tuple(int(a) for a in self.axes)
        object.__setattr__(self, "axes", axes)
        if len(axes) != want or len(set(axes)) != want:
            raise ParameterError(f"{self.family} needs {want} distinct axes")
        if any(a not in _AXES for a in axes):
            raise ParameterError("axes must lie in 1..6")
        if self.family == FAMILY_PLANE and self.negate:
            raise ParameterError("the plane family has no negated variant")
        if self.offset_axis not in _AXES:
            raise ParameterError("offset_axis must lie in 1..6")

    @property
    def source_dim(self) -> int:
        return 2 if self.family == FAMILY_PLANE else 3


@dataclass(frozen=True)
class CandidateGridSpec:
    """Enumeration settings for the candidate family and the two cloud
    resolutions of the coarse-to-fine pipeline."""

    offset_steps: int = 100
    offset_range: tuple[float, float] = (-0.5, 0.5)
    offset_axes: tuple[int, ...] = _AXES
    coarse_cloud_spec: SamplingSpec = SamplingSpec(30, 30)
    fine_cloud_spec: SamplingSpec = SamplingSpec(100, 100)
    refine_top_k: int = 50

    def __post_init__(self):
        if self.offset_steps < 1:
            raise ParameterError("offset_steps must be >= 1")
        lo, hi = self.offset_range
        if lo > hi:
            raise ParameterError("offset_range must satisfy lo <= hi")
        axes = tuple(int(a) for a in self.offset_axes)
        object.__setattr__(self, "offset_axes", axes)
        if not axes or len(set(axes)) != len(axes) or any(a not in _AXES for a in axes):
            raise ParameterError("offset_axes must be distinct values in 1..6")
        if self.refine_top_k < 1:
            raise ParameterError("refine_top_k must be >= 1")


def _offset_choices(grid: CandidateGridSpec) -> list[tuple[int, float]]:
    # the zero offset appears exactly once, canonicalized to axis 1
    lo, hi = grid.offset_range
    values = np.linspace(lo, hi, grid.offset_steps)
    choices = [(1, 0.0)]
    choices.extend(
        (axis, float(v)) for axis in grid.offset_axes for v in values if v != 0.0
    )
    return choices


def enumerate_euclidean_candidates(grid: CandidateGridSpec) -> list[EmbeddingCandidate]:
    """All ordered axis pairs crossed with the offset grid (30 pairs)."""
    offsets = _offset_choices(grid)
    return [
        EmbeddingCandidate(FAMILY_PLANE, pair, False, axis, value)
        for pair in itertools.permutations(_AXES, 2)
        for axis, value in offsets
    ]


def enumerate_sphere_candidates(grid: CandidateGridSpec) -> list[EmbeddingCandidate]:
    """All ordered axis triples, both signs, crossed with the offset grid
    (120 triples x 2)."""
    offsets = _offset_choices(grid)
    return [
        EmbeddingCandidate(FAMILY_SPHERE, triple, negate, axis, value)
        for triple in itertools.permutations(_AXES, 3)
        for negate in (False, True)
        for axis, value in offsets
    ]


def apply_candidate(cand: EmbeddingCandidate, cloud: PointCloud) -> PointCloud:
    """Place a source cloud into R^6 by the candidate's rigid motion."""
    pts = cloud.points
    if pts.shape[1] != cand.source_dim:
        raise ParameterError(
            f"candidate expects dimension {cand.source_dim}, cloud has {pts.shape[1]}"
        )
    out = np.zeros((pts.shape[0], 6))
    cols = np.array(cand.axes) - 1
    out[:, cols] = -pts if cand.negate else pts
    out[:, cand.offset_axis - 1] += cand.offset_value
    return PointCloud(out, CHART_AMBIENT6)


class CandidateScorer:
    """Scores candidates by exact symmetric Hausdorff distance against a
    fixed embedded target.

    One k-d tree over the target and one over the source coordinates are
    shared across every candidate: a placement only permutes axes, flips
    sign, and translates, so target-to-placement distances split into an
    in-plane nearest-neighbor term and a constant out-of-plane term.
    """

    def __init__(self, source: PointCloud, target: PointCloud, workers: int = 1):
        if target.ambient_dim != 6:
            raise ParameterError("target cloud must live in R^6")
        if source.ambient_dim not in (2, 3):
            raise ParameterError("source cloud must be 2-D or 3-D")
        self._src = source.points
        self._tgt = target.points
        self._src_tree = cKDTree(self._src)
        self._tgt_tree = cKDTree(self._tgt)
        self._workers = workers

    def score(self, cand: EmbeddingCandidate) -> float:
        if cand.source_dim != self._src.shape[1]:
            raise ParameterError("candidate family does not match the source cloud")
        cols = np.array(cand.axes) - 1
        off = cand.offset_axis - 1

        placed = np.zeros((self._src.shape[0], 6))
        placed[:, cols] = -self._src if cand.negate else self._src
        placed[:, off] += cand.offset_value
        d_ab = float(self._tgt_tree.query(placed, workers=self._workers)[0].max())

        shift = np.zeros(6)
        shift[off] = cand.offset_value
        inplane = self._tgt[:, cols] - shift[cols]
        if cand.negate:
            inplane = -inplane
        d_in = self._src_tree.query(inplane, workers=self._workers)[0]
        mask = np.ones(6, dtype=bool)
        mask[cols] = False
        perp = self._tgt[:, mask] - shift[mask]
        d_ba = math.sqrt(float((d_in * d_in + np.einsum("ij,ij->i", perp, perp)).max()))
        return max(d_ab, d_ba)

    def scores(self, candidates) -> np.ndarray:
        return np.array([self.score(c) for c in candidates])


@dataclass(frozen=True)
class GHEstimate:
    """Result of one pipeline run: the upper-bound estimate, the candidate
    achieving it, and the coarse-phase minimum for reference."""

    pair: tuple[ModelSpace, ModelSpace]
    value: float
    best_candidate: EmbeddingCandidate
    coarse_value: float
    cloud_specs_used: tuple[SamplingSpec, SamplingSpec]
    candidates_evaluated: int

    @property
    def pair_key(self) -> str:
        return f"{self.pair[0].label}-{self.pair[1].label}"


_PAIR_ALIASES = {
    "e2h2": (E2, H2),
    "s2h2": (S2, H2),
    "e2-h2": (E2, H2),
    "s2-h2": (S2, H2),
}


def _normalize_pair(pair) -> tuple[ModelSpace, ModelSpace]:
    if isinstance(pair, str):
        try:
            return _PAIR_ALIASES[pair.lower()]
        except KeyError:
            raise ParameterError(f"unknown pair {pair!r}; use e2h2 or s2h2") from None
    source, target = pair
    if target != H2 or source not in (E2, S2):
        raise ParameterError("supported pairs: (E2, H2) and (S2, H2)")
    return source, target


def _hyperbolic_spec(spec: SamplingSpec) -> SamplingSpec:
    return SamplingSpec(
        spec.n_radial,
        spec.n_angular,
        max(spec.r_min, H2_R_MIN),
        min(spec.r_max, H2_R_MAX),
    )


def _clouds_at(source: ModelSpace, spec: SamplingSpec, consts: EmbeddingConstants):
    src = sample_euclidean_ball(spec) if source == E2 else sample_sphere_cap(spec)
    hyp = sample_hyperbolic_ball(_hyperbolic_spec(spec))
    return src, hyp, embed_cloud(hyp, consts)


def _lexmin(values: np.ndarray, indices) -> tuple[float, int]:
    pos = int(np.argmin(values))  # first occurrence wins ties
    return float(values[pos]), indices[pos]


def estimate_gh(
    pair,
    grid: CandidateGridSpec | None = None,
    consts: EmbeddingConstants | None = None,
    workers: int = 1,
    exhaustive: bool = False,
    check_bounds: bool = True,
) -> GHEstimate:
    """Run the coarse-to-fine candidate pipeline for one pair.

    Phase one scores every candidate at the coarse cloud resolution and
    keeps the ``refine_top_k`` best; phase two re-scores the survivors at
    the fine resolution and returns their minimum.  ``exhaustive`` skips
    pruning and scores the whole family at fine resolution.  Ties always
    resolve to the lowest enumeration index, so results do not depend on
    ``workers``.
    """
    source, target = _normalize_pair(pair)
    if grid is None:
        grid = CandidateGridSpec()
    if consts is None:
        consts = cached_constants()

    if source == E2:
        candidates = enumerate_euclidean_candidates(grid)
    else:
        candidates = enumerate_sphere_candidates(grid)
    if not candidates:
        raise ParameterError("empty candidate family")

    if exhaustive:
        src_f, hyp_f, emb_f = _clouds_at(source, grid.fine_cloud_spec, consts)
        scorer = CandidateScorer(src_f, emb_f, workers)
        values = scorer.scores(candidates)
        value, best_idx = _lexmin(values, range(len(candidates)))
        coarse_value = value
        evaluated = len(candidates)
        specs = (grid.fine_cloud_spec, grid.fine_cloud_spec)
    else:
        src_c, _, emb_c = _clouds_at(source, grid.coarse_cloud_spec, consts)
        coarse = CandidateScorer(src_c, emb_c, workers).scores(candidates)
        coarse_value = float(coarse.min())
        keep = np.argsort(coarse, kind="stable")[: grid.refine_top_k]
        keep = np.sort(keep)  # enumeration order for deterministic tie-breaks
        src_f, hyp_f, emb_f = _clouds_at(source, grid.fine_cloud_spec, consts)
        fine_scorer = CandidateScorer(src_f, emb_f, workers)
        fine = np.array([fine_scorer.score(candidates[i]) for i in keep])
        value, best_idx = _lexmin(fine, [int(i) for i in keep])
        evaluated = len(candidates) + len(keep)
        specs = (grid.coarse_cloud_spec, grid.fine_cloud_spec)

    if not (0.0 <= value <= 1.0 + 1e-9):
        raise NumericalError(f"estimate {value!r} escapes the unit-ball bound [0, 1]")
    if check_bounds:
        ceiling = diameter_bound(src_f, hyp_f)
        if value > ceiling + 1e-9:
            raise NumericalError(
                f"estimate {value!r} exceeds the diameter bound {ceiling!r}"
            )

    return GHEstimate(
        pair=(source, target),
        value=value,
        best_candidate=candidates[best_idx],
        coarse_value=coarse_value,
        cloud_specs_used=specs,
        candidates_evaluated=evaluated,
    )


def diameter_bound(a: PointCloud, b: PointCloud) -> float:
    """max(diam A, diam B): a ceiling on any distance estimate for the pair."""
    return max(geodesic_diameter(a), geodesic_diameter(b))


# -- distance table and signature composition -----------------------------------


@dataclass(frozen=True)
class TableEntry:
    value: float
    provenance: str

    def __post_init__(self):
        if not (0.0 <= self.value <= 1.0):
            raise ParameterError(f"table value {self.value!r} outside [0, 1]")
        if self.provenance not in (
            PROVENANCE_ANALYTIC,
            PROVENANCE_COMPUTED,
            PROVENANCE_USER,
        ):
            raise ParameterError(f"unknown provenance {self.provenance!r}")


def _pair_key(m1: ModelSpace, m2: ModelSpace) -> tuple[ModelSpace, ModelSpace]:
    return (m1, m2) if m1.rank <= m2.rank else (m2, m1)


class DistanceTable:
    """Symmetric pairwise distances between model spaces; the diagonal is
    implicitly zero."""

    def __init__(self, entries: dict[tuple[ModelSpace, ModelSpace], TableEntry]):
        normalized = {}
        for (m1, m2), entry in entries.items():
            if m1 == m2:
                raise ParameterError("self-distances are fixed at 0; do not set them")
            normalized[_pair_key(m1, m2)] = entry
        self._entries = normalized

    def distance(self, m1: ModelSpace, m2: ModelSpace) -> float:
        if m1 == m2:
            return 0.0
        try:
            return self._entries[_pair_key(m1, m2)].value
        except KeyError:
            raise ParameterError(f"no table entry for ({m1.label}, {m2.label})") from None

    def entry(self, m1: ModelSpace, m2: ModelSpace) -> TableEntry:
        return self._entries[_pair_key(m1, m2)]

    def items(self):
        return sorted(
            self._entries.items(), key=lambda kv: (kv[0][0].rank, kv[0][1].rank)
        )

    def __eq__(self, other):
        return isinstance(other, DistanceTable) and self._entries == other._entries

    def __hash__(self):
        return hash(tuple(self.items()))


def default_distance_table() -> DistanceTable:
    """Built-in reference distances {0.23, 0.77, 0.84}."""
    return DistanceTable(
        {
            (E2, S2): TableEntry(GH_E2_S2, PROVENANCE_ANALYTIC),
            (E2, H2): TableEntry(GH_E2_H2, PROVENANCE_ANALYTIC),
            (S2, H2): TableEntry(GH_S2_H2, PROVENANCE_ANALYTIC),
        }
    )


def build_distance_table(estimates=(), user_values=None) -> DistanceTable:
    """Default table, optionally overridden by pipeline estimates and then
    by explicit user values (each a mapping pair -> value in [0, 1])."""
    entries = {key: entry for key, entry in default_distance_table().items()}
    for est in estimates:
        entries[_pair_key(*est.pair)] = TableEntry(est.value, PROVENANCE_COMPUTED)
    for pair, value in (user_values or {}).items():
        entries[_pair_key(*pair)] = TableEntry(float(value), PROVENANCE_USER)
    return DistanceTable(entries)


def signature_distance(
    a: ProductSignature, b: ProductSignature, table: DistanceTable
) -> float | None:
    """Composed distance between two product signatures, or None when the
    pair has no defined adjacency.

    Equal multisets are at distance 0; equal-size multisets differing in
    exactly one factor inherit that factor pair's table distance; adding
    one factor to a signature costs exactly 1.  Everything else is None.
    """
    ca = _factor_counts(a)
    cb = _factor_counts(b)
    if ca == cb:
        return 0.0
    only_a = _multiset_minus(ca, cb)
    only_b = _multiset_minus(cb, ca)
    na, nb = a.n_factors, b.n_factors
    if na == nb:
        if sum(only_a.values()) == 1 and sum(only_b.values()) == 1:
            (m1,) = only_a
            (m2,) = only_b
            return table.distance(m1, m2)
        return None
    if abs(na - nb) == 1:
        smaller_extra = only_a if na < nb else only_b
        if not smaller_extra:  # smaller multiset contained in the larger
            return 1.0
        return None
    return None


def table_to_dict(table: DistanceTable) -> dict:
    return {
        f"{m1.label}-{m2.label}": {"value": e.value, "provenance": e.provenance}
        for (m1, m2), e in table.items()
    }


def table_from_dict(payload: dict) -> DistanceTable:
    entries = {}
    for key, item in payload.items():
        l1, l2 = key.split("-")
        pair = (ModelSpace.from_label(l1), ModelSpace.from_label(l2))
        entries[pair] = TableEntry(float(item["value"]), str(item["provenance"]))
    return DistanceTable(entries)


def _factor_counts(sig: ProductSignature) -> dict[ModelSpace, int]:
    counts: dict[ModelSpace, int] = {}
    for m in sig.factors:
        counts[m] = counts.get(m, 0) + 1
    return counts


def _multiset_minus(ca: dict, cb: dict) -> dict:
    out = {}
    for m, k in ca.items():
        d = k - cb.get(m, 0)
        if d > 0:
            out[m] = d
    return out
