"""Weighted graph over product-manifold signatures and argmin searches.

Nodes are all signatures with up to ``max_factors`` factors.  Two nodes
share an edge exactly when their composed distance is defined and lies in
(0, 1]; the edge weight is the inverse distance, so one-factor swaps get
the inverted table value and one-factor extensions get weight 1.  Node
values come from a pluggable evaluator.
"""

from __future__ import annotations

import heapq
import itertools
import json
import math
import shlex
import subprocess
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .errors import EvaluationError, ParameterError
from .geometry import E2, H2, ProductSignature, S2
from .gh import (
    DistanceTable,
    default_distance_table,
    signature_distance,
    table_from_dict,
    table_to_dict,
)


class SearchGraph:
    """Signature nodes in canonical order plus undirected weighted edges."""

    def __init__(self, nodes, edges, max_factors: int, table: DistanceTable):
        self.nodes = list(nodes)
        self.edges = [(int(i), int(j), float(w)) for i, j, w in edges]
        self.max_factors = int(max_factors)
        self.table = table
        self._index = {sig: k for k, sig in enumerate(self.nodes)}
        adj: list[list[tuple[int, float]]] = [[] for _ in self.nodes]
        for i, j, w in self.edges:
            adj[i].append((j, w))
            adj[j].append((i, w))
        self._adj = [sorted(nbrs) for nbrs in adj]

    def node_index(self, sig: ProductSignature) -> int:
        try:
            return self._index[sig]
        except KeyError:
            raise ParameterError(f"node {sig.canonical_key!r} not in graph") from None

    def neighbors(self, i: int) -> list[tuple[int, float]]:
        return self._adj[i]

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def __eq__(self, other):
        return (
            isinstance(other, SearchGraph)
            and self.nodes == other.nodes
            and self.edges == other.edges
            and self.max_factors == other.max_factors
            and self.table == other.table
        )


def build_graph(max_factors: int, table: DistanceTable | None = None) -> SearchGraph:
    """All signatures with 1..max_factors factors, wired by the composition
    rule.  With the default table exactly four distinct weights occur."""
    if max_factors < 1:
        raise ParameterError("max_factors must be >= 1")
    if table is None:
        table = default_distance_table()
    nodes = [
        ProductSignature(combo)
        for k in range(1, max_factors + 1)
        for combo in itertools.combinations_with_replacement((E2, S2, H2), k)
    ]
    edges = []
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            d = signature_distance(nodes[i], nodes[j], table)
            if d is not None and 0.0 < d <= 1.0:
                edges.append((i, j, 1.0 / d))
    return SearchGraph(nodes, edges, max_factors, table)


# -- serialization -----------------------------------------------------------


def export_graph(graph: SearchGraph, fmt: str) -> str:
    """Render the graph as DOT (one line per node and per edge, weights to
    4 significant figures) or as round-trippable JSON."""
    if fmt == "dot":
        lines = ["graph signatures {"]
        for sig in graph.nodes:
            lines.append(f'  "{sig.canonical_key}";')
        for i, j, w in graph.edges:
            a = graph.nodes[i].canonical_key
            b = graph.nodes[j].canonical_key
            lines.append(f'  "{a}" -- "{b}" [label="{w:.4g}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"
    if fmt == "json":
        payload = {
            "max_factors": graph.max_factors,
            "nodes": [sig.canonical_key for sig in graph.nodes],
            "edges": [[i, j, w] for i, j, w in graph.edges],
            "table": table_to_dict(graph.table),
        }
        return json.dumps(payload, indent=2) + "\n"
    raise ParameterError(f"unknown export format {fmt!r}")


def graph_from_json(text: str) -> SearchGraph:
    payload = json.loads(text)
    try:
        nodes = [ProductSignature.from_key(k) for k in payload["nodes"]]
        edges = [(int(i), int(j), float(w)) for i, j, w in payload["edges"]]
        table = table_from_dict(payload["table"])
        max_factors = int(payload["max_factors"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParameterError(f"malformed graph JSON: {exc}") from exc
    return SearchGraph(nodes, edges, max_factors, table)


def load_graph(path) -> SearchGraph:
    return graph_from_json(Path(path).read_text(encoding="utf-8"))


# -- evaluators ---------------------------------------------------------------


class Evaluator:
    """Assigns a finite real value to every signature it is asked about."""

    kind = "abstract"
    source = ""
    parallel_safe = False

    def value(self, sig: ProductSignature) -> float:
        raise NotImplementedError


class TableFileEvaluator(Evaluator):
    """CSV of ``canonical_key,value`` rows; unknown nodes are an error."""

    kind = "table-file"
    parallel_safe = True

    def __init__(self, path):
        self.source = str(path)
        self._values: dict[str, float] = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, raw = line.partition(",")
            try:
                self._values[key.strip()] = float(raw)
            except ValueError as exc:
                raise ParameterError(f"{path}: bad value row {line!r}") from exc

    def value(self, sig: ProductSignature) -> float:
        try:
            return self._values[sig.canonical_key]
        except KeyError:
            raise EvaluationError(
                f"no value for node {sig.canonical_key!r} in {self.source}"
            ) from None


class MappingEvaluator(Evaluator):
    """In-memory mapping from canonical key to value."""

    kind = "table-file"
    parallel_safe = True

    def __init__(self, values: dict[str, float]):
        self.source = "<mapping>"
        self._values = dict(values)

    def value(self, sig: ProductSignature) -> float:
        try:
            return self._values[sig.canonical_key]
        except KeyError:
            raise EvaluationError(f"no value for node {sig.canonical_key!r}") from None


class CommandEvaluator(Evaluator):
    """Spawns a command with the canonical key as the sole added argument
    and parses one real from its stdout."""

    kind = "external-command"

    def __init__(self, command: str, parallel_safe: bool = False):
        self.source = command
        self.parallel_safe = parallel_safe
        self._argv = shlex.split(command)
        if not self._argv:
            raise ParameterError("empty evaluator command")

    def value(self, sig: ProductSignature) -> float:
        key = sig.canonical_key
        try:
            proc = subprocess.run(
                self._argv + [key], capture_output=True, text=True, check=True
            )
        except (OSError, subprocess.CalledProcessError) as exc:
            raise EvaluationError(f"evaluator command failed on node {key!r}: {exc}")
        try:
            return float(proc.stdout.strip())
        except ValueError:
            raise EvaluationError(
                f"evaluator printed no parseable value for node {key!r}: "
                f"{proc.stdout!r}"
            ) from None


_SYNTHETIC = {
    "factor-count": lambda sig: float(sig.n_factors),
    "constant": lambda sig: 0.0,
}


class SyntheticEvaluator(Evaluator):
    kind = "synthetic"
    parallel_safe = True

    def __init__(self, name: str):
        if name not in _SYNTHETIC:
            raise ParameterError(
                f"unknown synthetic evaluator {name!r}; have {sorted(_SYNTHETIC)}"
            )
        self.source = name
        self._fn = _SYNTHETIC[name]

    def value(self, sig: ProductSignature) -> float:
        return self._fn(sig)


def make_evaluator(spec: str) -> Evaluator:
    """Parse ``table:PATH``, ``cmd:COMMAND``, or ``synthetic:NAME``."""
    kind, _, rest = spec.partition(":")
    if kind == "table" and rest:
        return TableFileEvaluator(rest)
    if kind == "cmd" and rest:
        return CommandEvaluator(rest)
    if kind == "synthetic" and rest:
        return SyntheticEvaluator(rest)
    raise ParameterError(f"cannot parse evaluator spec {spec!r}")


class _Memo:
    """Per-search memoization; records first evaluations in call order."""

    def __init__(self, evaluator: Evaluator):
        self._evaluator = evaluator
        self._cache: dict[ProductSignature, float] = {}
        self._lock = threading.Lock()
        self.events: list[tuple[ProductSignature, float]] = []

    def value(self, sig: ProductSignature) -> float:
        with self._lock:
            if sig in self._cache:
                return self._cache[sig]
        val = self._evaluator.value(sig)
        if not math.isfinite(val):
            raise EvaluationError(
                f"evaluator returned non-finite value for {sig.canonical_key!r}"
            )
        with self._lock:
            if sig not in self._cache:
                self._cache[sig] = val
                self.events.append((sig, val))
            return self._cache[sig]

    @property
    def count(self) -> int:
        return len(self.events)


@dataclass(frozen=True)
class SearchResult:
    """Best node found, with the full evaluation log."""

    best_node: ProductSignature
    best_value: float
    trajectory: tuple[tuple[ProductSignature, float], ...]
    evaluations: int


def _result_from(memo: _Memo) -> SearchResult:
    trajectory = tuple(memo.events)
    best_node, best_value = min(trajectory, key=lambda nv: (nv[1], nv[0].sort_key))
    return SearchResult(best_node, best_value, trajectory, len(trajectory))


def search_exhaustive(
    graph: SearchGraph, evaluator: Evaluator, workers: int = 1
) -> SearchResult:
    """Evaluate every node; the global argmin (canonical order on ties)."""
    memo = _Memo(evaluator)
    if workers > 1 and evaluator.parallel_safe:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(memo.value, graph.nodes))
        # re-log in canonical order so the trajectory is scheduling-independent
        memo.events = [(sig, memo.value(sig)) for sig in graph.nodes]
    else:
        for sig in graph.nodes:
            memo.value(sig)
    return _result_from(memo)


def search_greedy(
    graph: SearchGraph, evaluator: Evaluator, start: ProductSignature
) -> SearchResult:
    """Descend to the best-valued neighbor until no neighbor improves.

    Value ties among neighbors prefer the heavier edge, then canonical
    order.  The stopping node is a local minimum and, by construction,
    the minimum over everything evaluated.
    """
    memo = _Memo(evaluator)
    cur = graph.node_index(start)
    cur_val = memo.value(graph.nodes[cur])
    while True:
        nbrs = graph.neighbors(cur)
        if not nbrs:
            break
        scored = [
            (memo.value(graph.nodes[j]), -w, j) for j, w in nbrs
        ]
        best_val, _, best_j = min(scored)
        if best_val < cur_val:
            cur, cur_val = best_j, best_val
        else:
            break
    return _result_from(memo)


def search_best_first(
    graph: SearchGraph, evaluator: Evaluator, start: ProductSignature, budget: int
) -> SearchResult:
    """Expand nodes in order of evaluated value until the budget is spent
    or the frontier empties.  With budget >= |V| this finds the minimum of
    the start's connected component."""
    if budget < 1:
        raise ParameterError("budget must be >= 1")
    memo = _Memo(evaluator)
    si = graph.node_index(start)
    heap: list[tuple[float, int]] = []
    heapq.heappush(heap, (memo.value(graph.nodes[si]), si))
    seen = {si}
    stop = False
    while heap and not stop:
        _, i = heapq.heappop(heap)
        for j, _w in graph.neighbors(i):
            if j in seen:
                continue
            if memo.count >= budget:
                stop = True
                break
            heapq.heappush(heap, (memo.value(graph.nodes[j]), j))
            seen.add(j)
    return _result_from(memo)
