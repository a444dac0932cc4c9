"""Run configuration: JSON file defaults with flag overrides on top."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParameterError
from .gh import CandidateGridSpec
from .geometry import SamplingSpec
from .quadrature import QuadratureSpec

DEFAULT_CACHE_PATH = "ghspace_cache.json"


@dataclass(frozen=True)
class RunConfig:
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    sup_grid_points: int = 100_000
    grid: CandidateGridSpec = field(default_factory=CandidateGridSpec)
    cache_path: str | None = DEFAULT_CACHE_PATH
    output_format: str = "json"
    threads: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.output_format not in ("json", "csv"):
            raise ParameterError("output_format must be json or csv")
        if self.threads < 1:
            raise ParameterError("threads must be >= 1")


def _spec_from(d: dict, fallback: SamplingSpec) -> SamplingSpec:
    return SamplingSpec(
        d.get("n_radial", fallback.n_radial),
        d.get("n_angular", fallback.n_angular),
        d.get("r_min", fallback.r_min),
        d.get("r_max", fallback.r_max),
    )


def load_config(path=None) -> RunConfig:
    """Build a RunConfig from a JSON file; missing keys keep defaults."""
    if path is None:
        return RunConfig()
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParameterError(f"{path}: invalid config JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ParameterError(f"{path}: config must be a JSON object")

    base = RunConfig()
    q = raw.get("quadrature", {})
    quadrature = QuadratureSpec(
        q.get("method", base.quadrature.method),
        q.get("abs_tol", base.quadrature.abs_tol),
        q.get("max_subdivisions", base.quadrature.max_subdivisions),
    )
    g = raw.get("grid", {})
    grid = CandidateGridSpec(
        offset_steps=g.get("offset_steps", base.grid.offset_steps),
        offset_range=tuple(g.get("offset_range", base.grid.offset_range)),
        offset_axes=tuple(g.get("offset_axes", base.grid.offset_axes)),
        coarse_cloud_spec=_spec_from(g.get("coarse", {}), base.grid.coarse_cloud_spec),
        fine_cloud_spec=_spec_from(g.get("fine", {}), base.grid.fine_cloud_spec),
        refine_top_k=g.get("refine_top_k", base.grid.refine_top_k),
    )
    return RunConfig(
        quadrature=quadrature,
        sup_grid_points=raw.get("sup_grid_points", base.sup_grid_points),
        grid=grid,
        cache_path=raw.get("cache_path", base.cache_path),
        output_format=raw.get("output_format", base.output_format),
        threads=raw.get("threads", base.threads),
        seed=raw.get("seed", base.seed),
    )
