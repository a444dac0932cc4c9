"""JSON cache holding embedding constants, distance estimates, and the
distance table.

Every cached item carries a digest of the settings that produced it;
entries whose digest no longer matches the requested settings are ignored
rather than reused.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .embedding import EmbeddingConstants
from .gh import (
    CandidateGridSpec,
    DistanceTable,
    EmbeddingCandidate,
    GHEstimate,
    table_from_dict,
    table_to_dict,
)
from .geometry import ModelSpace, SamplingSpec
from .quadrature import QuadratureSpec


def settings_digest(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def quad_to_dict(q: QuadratureSpec) -> dict:
    return {
        "method": q.method,
        "abs_tol": q.abs_tol,
        "max_subdivisions": q.max_subdivisions,
    }


def quad_from_dict(d: dict) -> QuadratureSpec:
    return QuadratureSpec(d["method"], d["abs_tol"], d["max_subdivisions"])


def spec_to_dict(s: SamplingSpec) -> dict:
    return {
        "n_radial": s.n_radial,
        "n_angular": s.n_angular,
        "r_min": s.r_min,
        "r_max": s.r_max,
    }


def spec_from_dict(d: dict) -> SamplingSpec:
    return SamplingSpec(d["n_radial"], d["n_angular"], d["r_min"], d["r_max"])


def candidate_to_dict(c: EmbeddingCandidate) -> dict:
    return {
        "family": c.family,
        "axes": list(c.axes),
        "negate": c.negate,
        "offset_axis": c.offset_axis,
        "offset_value": c.offset_value,
    }


def candidate_from_dict(d: dict) -> EmbeddingCandidate:
    return EmbeddingCandidate(
        d["family"], tuple(d["axes"]), d["negate"], d["offset_axis"], d["offset_value"]
    )


def constants_to_dict(c: EmbeddingConstants) -> dict:
    return {
        "A": c.A,
        "G1": c.G1,
        "G2": c.G2,
        "c": c.c,
        "epsilon": c.epsilon,
        "quadrature": quad_to_dict(c.quadrature),
        "sup_grid_points": c.sup_grid_points,
    }


def constants_from_dict(d: dict) -> EmbeddingConstants:
    return EmbeddingConstants(
        d["A"],
        d["G1"],
        d["G2"],
        d["c"],
        d["epsilon"],
        quad_from_dict(d["quadrature"]),
        d["sup_grid_points"],
    )


def estimate_to_dict(e: GHEstimate) -> dict:
    return {
        "pair": e.pair_key,
        "value": e.value,
        "best_candidate": candidate_to_dict(e.best_candidate),
        "coarse_value": e.coarse_value,
        "cloud_specs_used": [spec_to_dict(s) for s in e.cloud_specs_used],
        "candidates_evaluated": e.candidates_evaluated,
    }


def estimate_from_dict(d: dict) -> GHEstimate:
    l1, l2 = d["pair"].split("-")
    return GHEstimate(
        pair=(ModelSpace.from_label(l1), ModelSpace.from_label(l2)),
        value=d["value"],
        best_candidate=candidate_from_dict(d["best_candidate"]),
        coarse_value=d["coarse_value"],
        cloud_specs_used=tuple(spec_from_dict(s) for s in d["cloud_specs_used"]),
        candidates_evaluated=d["candidates_evaluated"],
    )


def estimate_digest(
    pair_key: str,
    grid: CandidateGridSpec,
    quad: QuadratureSpec,
    sup_grid_points: int,
    exhaustive: bool,
) -> str:
    return settings_digest(
        {
            "pair": pair_key,
            "offset_steps": grid.offset_steps,
            "offset_range": list(grid.offset_range),
            "offset_axes": list(grid.offset_axes),
            "coarse": spec_to_dict(grid.coarse_cloud_spec),
            "fine": spec_to_dict(grid.fine_cloud_spec),
            "refine_top_k": grid.refine_top_k,
            "quadrature": quad_to_dict(quad),
            "sup_grid_points": sup_grid_points,
            "exhaustive": exhaustive,
        }
    )


class DistanceCache:
    """One JSON file with three sections: constants, estimates, table."""

    def __init__(self, path):
        self.path = Path(path)
        self._data = {"constants": None, "estimates": [], "table": None}
        if self.path.exists():
            try:
                loaded = json.loads(self.path.read_text(encoding="utf-8"))
                if isinstance(loaded, dict):
                    self._data.update(loaded)
            except (json.JSONDecodeError, OSError):
                pass  # unreadable caches are rebuilt, never trusted

    def save(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text(json.dumps(self._data, indent=2), encoding="utf-8")

    # constants -------------------------------------------------------------

    def constants_for(
        self, quad: QuadratureSpec, sup_grid_points: int
    ) -> EmbeddingConstants | None:
        entry = self._data.get("constants")
        if not entry:
            return None
        if (
            entry.get("quadrature") != quad_to_dict(quad)
            or entry.get("sup_grid_points") != sup_grid_points
        ):
            return None
        try:
            return constants_from_dict(entry)
        except (KeyError, TypeError):
            return None

    def store_constants(self, consts: EmbeddingConstants) -> None:
        self._data["constants"] = constants_to_dict(consts)

    # estimates --------------------------------------------------------------

    def estimate_for(self, digest: str) -> GHEstimate | None:
        for entry in self._data.get("estimates", []):
            if entry.get("digest") == digest:
                try:
                    return estimate_from_dict(entry)
                except (KeyError, TypeError):
                    return None
        return None

    def store_estimate(self, digest: str, estimate: GHEstimate) -> None:
        entries = [
            e for e in self._data.get("estimates", []) if e.get("digest") != digest
        ]
        payload = estimate_to_dict(estimate)
        payload["digest"] = digest
        entries.append(payload)
        self._data["estimates"] = entries

    def estimates(self) -> list[GHEstimate]:
        out = []
        for entry in self._data.get("estimates", []):
            try:
                out.append(estimate_from_dict(entry))
            except (KeyError, TypeError):
                continue
        return out

    # table -------------------------------------------------------------------

    def table(self) -> DistanceTable | None:
        entry = self._data.get("table")
        if not entry:
            return None
        try:
            return table_from_dict(entry)
        except (KeyError, TypeError, ValueError):
            return None

    def store_table(self, table: DistanceTable) -> None:
        self._data["table"] = table_to_dict(table)
