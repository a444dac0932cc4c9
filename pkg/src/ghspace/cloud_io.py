"""Point-cloud serialization: CSV with a chart header, and JSON."""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .geometry import PointCloud

_HEADER_RE = re.compile(r"#\s*chart=(\S+)\s+dim=(\d+)\s*$")


def save_csv(cloud: PointCloud, path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(f"# chart={cloud.chart} dim={cloud.ambient_dim}\n")
        for row in cloud.points:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")


def load_csv(path) -> PointCloud:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline()
        m = _HEADER_RE.match(header.strip())
        if not m:
            raise ParameterError(f"{path}: missing '# chart=<label> dim=<d>' header")
        chart, dim = m.group(1), int(m.group(2))
        pts = np.loadtxt(fh, delimiter=",", ndmin=2)
    if pts.shape[1] != dim:
        raise ParameterError(f"{path}: header says dim={dim}, rows have {pts.shape[1]}")
    return PointCloud(pts, chart)


def save_json(cloud: PointCloud, path) -> None:
    payload = {
        "metadata": {
            "chart": cloud.chart,
            "dim": cloud.ambient_dim,
            "count": cloud.n,
        },
        "points": cloud.points.tolist(),
    }
    Path(path).write_text(json.dumps(payload), encoding="utf-8")


def load_json(path) -> PointCloud:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        meta = payload["metadata"]
        pts = np.asarray(payload["points"], dtype=float)
        chart = meta["chart"]
        dim = int(meta["dim"])
    except (KeyError, TypeError) as exc:
        raise ParameterError(f"{path}: malformed cloud JSON ({exc})") from exc
    if pts.ndim != 2 or pts.shape[1] != dim:
        raise ParameterError(f"{path}: points do not match metadata dim={dim}")
    return PointCloud(pts, chart)


def load_cloud(path) -> PointCloud:
    """Load a cloud by extension: .json uses the JSON layout, anything else CSV."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        return load_json(path)
    return load_csv(path)
