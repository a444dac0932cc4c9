"""Corrugated isometric embedding of the hyperbolic plane into R^6.

The map is driven by the anti-periodic bump chi(t) = sin(pi t) *
exp(-1/sin^2(pi t)) (zero at integers) and two complementary amplitude
profiles built from its running integral.  Amplitudes modulate a pair of
circular corrugations packed into four coordinates; the remaining two
coordinates carry a stretched shear frame of the horocyclic chart.  The
derivative bound of sinh(x) * amp_i(x) over [-2, 2] fixes the corrugation
frequency ``c`` and the stretch factor ``epsilon``.

``pullback_metric`` reports how close the map comes to preserving the
horocyclic metric dx^2 + e^{2x} dy^2; the deviation is diagnostic output,
not an assertion.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ChartError, ConvergenceWarning, NumericalError, ParameterError
from .geometry import CHART_AMBIENT6, CHART_HOROCYCLIC, PointCloud
from .quadrature import QuadratureSpec, adaptive_simpson

_INTEGER_TOL = 1e-12
_RADICAND_FLOOR = -1e-12
_E_INV = math.exp(-1.0)


def _bump_scalar(t: float) -> float:
    d = t - round(t)
    if abs(d) <= _INTEGER_TOL:
        return 0.0
    s = math.sin(math.pi * t)
    ss = s * s
    if ss == 0.0:
        return 0.0
    return s * math.exp(-1.0 / ss)


def bump(t):
    """The anti-periodic bump; accepts scalars or arrays.

    Satisfies bump(t + 1) = -bump(t), bump(-t) = -bump(t), |bump| <= 1/e,
    and vanishes with all derivatives at the integers.
    """
    arr = np.asarray(t, dtype=float)
    if arr.ndim == 0:
        return _bump_scalar(float(arr))
    s = np.sin(np.pi * arr)
    ss = s * s
    flat = (np.abs(arr - np.rint(arr)) <= _INTEGER_TOL) | (ss == 0.0)
    ss = np.where(flat, 1.0, ss)
    return np.where(flat, 0.0, s * np.exp(-1.0 / ss))


def bump_integral(a: float, b: float, spec: QuadratureSpec | None = None) -> float:
    """Adaptive-Simpson integral of the bump over [a, b] (sign flips on swap)."""
    return adaptive_simpson(_bump_scalar, a, b, spec)


# -- vectorized prefix integrals --------------------------------------------
#
# Anti-periodicity reduces every integral from 0 to any real endpoint to the
# unit interval: with m = floor(x), r = x - m and J(s) = integral over [0, s],
#   integral(0, x) = J(1) * (m mod 2) + (-1)^(m mod 2) * J(r).
# A shared set of sub-unit panels then serves arbitrarily many endpoints at
# once, which keeps the derivative-bound scan and whole-cloud embeddings fast.

_COEFFS: dict[int, np.ndarray] = {}


def _simpson_coeffs(k: int) -> np.ndarray:
    c = _COEFFS.get(k)
    if c is None:
        c = np.ones(k + 1)
        c[1:-1:2] = 4.0
        c[2:-1:2] = 2.0
        _COEFFS[k] = c
    return c


def _panel_simpson(lo: np.ndarray, hi: np.ndarray, k: int) -> np.ndarray:
    frac = np.linspace(0.0, 1.0, k + 1)
    nodes = lo[:, None] + (hi - lo)[:, None] * frac[None, :]
    return (hi - lo) / (3.0 * k) * (bump(nodes) @ _simpson_coeffs(k))


def _panel_integrals(lo: np.ndarray, hi: np.ndarray, tol: float) -> np.ndarray:
    """Per-panel integrals of the bump, each within ``tol`` absolute error."""
    out = np.zeros(lo.size)
    prev = _panel_simpson(lo, hi, 2)
    todo = np.arange(lo.size)
    k = 2
    while todo.size:
        k *= 2
        if k > 1 << 14:
            raise NumericalError("bump panel quadrature failed to converge")
        cur = _panel_simpson(lo[todo], hi[todo], k)
        err = np.abs(cur - prev[todo]) / 15.0
        done = err <= tol
        refined = cur + (cur - prev[todo]) / 15.0
        out[todo[done]] = refined[done]
        prev[todo] = cur
        todo = todo[~done]
    return out


def bump_prefix(x, abs_tol: float = 1e-10) -> np.ndarray:
    """Integral of the bump from 0 to each entry of ``x`` (vectorized)."""
    arr = np.asarray(x, dtype=float)
    if arr.size == 0:
        return np.zeros(arr.shape)
    flat = arr.ravel()
    if not np.all(np.isfinite(flat)):
        raise ParameterError("bump_prefix needs finite endpoints")
    m = np.floor(flat)
    r = flat - m
    parity = m.astype(np.int64) & 1
    targets = np.union1d(r, [1.0])
    edges = np.concatenate(([0.0], targets))
    tol = abs_tol / max(edges.size, 2)
    panels = _panel_integrals(edges[:-1], edges[1:], tol)
    prefix = np.cumsum(panels)
    jr = prefix[np.searchsorted(targets, r)]
    unit = prefix[-1]
    vals = unit * parity + np.where(parity == 1, -jr, jr)
    return vals.reshape(arr.shape)


# -- constants ----------------------------------------------------------------


@dataclass(frozen=True)
class EmbeddingConstants:
    """Scalars underlying the embedding, fixed by the quadrature settings.

    A is the bump's integral over one arch; G1/G2 bound the derivative of
    sinh(x) * amp_i(x) on [-2, 2]; c = 2 max(G1, G2) exactly; and
    epsilon = (G1^2 + G2^2) / c^2, which always lands in (1/4, 1/2].
    """

    A: float
    G1: float
    G2: float
    c: float
    epsilon: float
    quadrature: QuadratureSpec
    sup_grid_points: int

    def __post_init__(self):
        if not (0.0 < self.A < _E_INV):
            raise NumericalError(f"A={self.A!r} outside (0, 1/e)")
        if not (self.G1 > 0.0 and self.G2 > 0.0):
            raise NumericalError("derivative bounds must be positive")
        if self.c != 2.0 * max(self.G1, self.G2):
            raise NumericalError("c must equal 2 * max(G1, G2) exactly")
        if not (0.25 < self.epsilon <= 0.5):
            raise NumericalError(f"epsilon={self.epsilon!r} outside (1/4, 1/2]")


def _radicands_to_amps(rad: np.ndarray) -> np.ndarray:
    if float(rad.min(initial=0.0)) < _RADICAND_FLOOR:
        raise NumericalError(
            "amplitude radicand below -1e-12; quadrature tolerance too loose"
        )
    return np.sqrt(np.maximum(rad, 0.0))


def _amp_many(xs: np.ndarray, A: float, abs_tol: float):
    """Amplitude profiles amp1, amp2 at every entry of ``xs``."""
    i_shift = bump_prefix(xs + 1.0, abs_tol)
    i_plain = bump_prefix(xs, abs_tol)
    return _radicands_to_amps(i_shift / A), _radicands_to_amps(i_plain / A)


def amp1(x: float, consts: EmbeddingConstants) -> float:
    """First amplitude profile sqrt(integral(0, 1+x) / A); in [0, 1]."""
    a1, _ = _amp_many(np.array([float(x)]), consts.A, consts.quadrature.abs_tol)
    return float(a1[0])


def amp2(x: float, consts: EmbeddingConstants) -> float:
    """Second amplitude profile sqrt(integral(0, x) / A); in [0, 1]."""
    _, a2 = _amp_many(np.array([float(x)]), consts.A, consts.quadrature.abs_tol)
    return float(a2[0])


def compute_constants(
    quadrature: QuadratureSpec | None = None, sup_grid_points: int = 100_000
) -> EmbeddingConstants:
    """Compute the embedding constants.

    The derivative bounds G1, G2 come from a dense central-difference scan
    of sinh(x) * amp_i(x) over [-2, 2]; the scan runs at the grid step and
    at half the step and warns if the two disagree beyond 1e-4 relative.
    """
    quad = quadrature if quadrature is not None else QuadratureSpec()
    if sup_grid_points < 10_000:
        raise ParameterError("sup_grid_points must be >= 10000")

    A = bump_integral(0.0, 1.0, quad)

    n = sup_grid_points
    h = 4.0 / (n - 1)
    half = 0.5 * h
    xs = -2.0 - h + half * np.arange(2 * n + 3)
    a1, a2 = _amp_many(xs, A, quad.abs_tol)
    sh = np.sinh(xs)
    gs = []
    for prod in (sh * a1, sh * a2):
        if not np.all(np.isfinite(prod)):
            raise NumericalError("non-finite values in derivative scan")
        d_half = (prod[3:] - prod[1:-2]) / h  # step h/2 central difference
        d_full = (prod[4:] - prod[:-4]) / (2.0 * h)
        g_half = float(np.max(np.abs(d_half[: 2 * n - 1])))
        g_full = float(np.max(np.abs(d_full[: 2 * n - 1])))
        if abs(g_half - g_full) > 1e-4 * g_half:
            warnings.warn(
                f"derivative bound unstable under step halving "
                f"({g_full:.6g} vs {g_half:.6g})",
                ConvergenceWarning,
                stacklevel=2,
            )
        gs.append(g_half)

    g1, g2 = gs
    c = 2.0 * max(g1, g2)
    eps = (g1 * g1 + g2 * g2) / (c * c)
    return EmbeddingConstants(A, g1, g2, c, eps, quad, sup_grid_points)


_CONSTANTS_MEMO: dict[tuple, EmbeddingConstants] = {}


def cached_constants(
    quadrature: QuadratureSpec | None = None, sup_grid_points: int = 100_000
) -> EmbeddingConstants:
    """Process-level memo over :func:`compute_constants`."""
    quad = quadrature if quadrature is not None else QuadratureSpec()
    key = (quad.abs_tol, quad.max_subdivisions, sup_grid_points)
    consts = _CONSTANTS_MEMO.get(key)
    if consts is None:
        consts = compute_constants(quad, sup_grid_points)
        _CONSTANTS_MEMO[key] = consts
    return consts


# -- the map -------------------------------------------------------------------


def spiral_frame(x: float, y: float) -> np.ndarray:
    """Shear frame (asinh(y e^x), log sqrt(e^{-2x} + y^2)) feeding the spirals."""
    x = float(x)
    y = float(y)
    return np.array(
        [math.asinh(y * math.exp(x)), 0.5 * math.log(math.exp(-2.0 * x) + y * y)]
    )


def _spiral_many(xs, ys, consts: EmbeddingConstants):
    a1, a2 = _amp_many(np.asarray(xs, dtype=float), consts.A, consts.quadrature.abs_tol)
    scale = np.sinh(xs) / consts.c
    cy = consts.c * np.asarray(ys, dtype=float)
    cos, sin = np.cos(cy), np.sin(cy)
    return np.stack(
        [scale * a1 * cos, scale * a1 * sin, scale * a2 * cos, scale * a2 * sin],
        axis=-1,
    )


def spiral_pair(x: float, y: float, consts: EmbeddingConstants) -> np.ndarray:
    """Two amplitude-modulated circles packed into four coordinates.

    Its Euclidean norm is |sinh(x)| * sqrt(amp1^2 + amp2^2) / c, which the
    amplitude identity reduces to |sinh(x)| / c.
    """
    return _spiral_many(np.array([float(x)]), np.array([float(y)]), consts)[0]


def _embed_many(xy: np.ndarray, consts: EmbeddingConstants) -> np.ndarray:
    pts = np.asarray(xy, dtype=float)
    x = pts[:, 0]
    y = pts[:, 1]
    u = np.arcsinh(y * np.exp(x))
    v = 0.5 * np.log(np.exp(-2.0 * x) + y * y)
    coil = _spiral_many(u, v, consts)
    stretch = math.sqrt(1.0 - consts.epsilon**2)
    out = np.column_stack([stretch * u, v, coil])
    if not np.all(np.isfinite(out)):
        raise NumericalError("embedding produced non-finite coordinates")
    return out


def embed_h2(x: float, y: float, consts: EmbeddingConstants) -> np.ndarray:
    """The hyperbolic-plane-to-R^6 map at one horocyclic point.

    Coordinate 1 stretches the sheared abscissa by sqrt(1 - epsilon^2),
    coordinate 2 is the sheared ordinate, and coordinates 3-6 are the
    spiral pair evaluated on the shear frame.  The basepoint maps to 0.
    """
    return _embed_many(np.array([[float(x), float(y)]]), consts)[0]


def embed_hn(x: float, ys, consts: EmbeddingConstants) -> np.ndarray:
    """Product extension of the map for the n-dimensional hyperbolic space.

    ``ys`` holds the n-1 remaining coordinates; the result concatenates
    n-1 copies of the planar map at (x, sqrt(n-1) * y_j), scaled by
    1/sqrt(n-1).  At n = 2 this is bit-identical to :func:`embed_h2`.
    """
    ys = np.asarray(ys, dtype=float).ravel()
    n = ys.size + 1
    if n < 2:
        raise ParameterError("need at least one transverse coordinate (n >= 2)")
    kappa = 1.0 / math.sqrt(n - 1.0)
    rows = np.column_stack([np.full(ys.size, float(x)), math.sqrt(n - 1.0) * ys])
    return (kappa * _embed_many(rows, consts)).ravel()


def embed_cloud(cloud: PointCloud, consts: EmbeddingConstants) -> PointCloud:
    """Apply the map row-wise to a horocyclic cloud; output lives in R^6."""
    if cloud.chart != CHART_HOROCYCLIC:
        raise ChartError(
            f"embedding needs chart {CHART_HOROCYCLIC!r}, got {cloud.chart!r}"
        )
    return PointCloud(_embed_many(cloud.points, consts), CHART_AMBIENT6)


def pullback_metric(
    x: float, y: float, step: float, consts: EmbeddingConstants
) -> tuple[np.ndarray, float]:
    """Finite-difference pullback J^T J at (x, y) and its deviation from
    the horocyclic metric diag(1, e^{2x}) in Frobenius norm.

    Reported as a diagnostic only; the stretch constant makes the map
    only approximately metric-preserving.
    """
    if step <= 0:
        raise ParameterError("step must be positive")
    probes = np.array(
        [[x + step, y], [x - step, y], [x, y + step], [x, y - step]], dtype=float
    )
    e = _embed_many(probes, consts)
    jac = np.column_stack([(e[0] - e[1]) / (2 * step), (e[2] - e[3]) / (2 * step)])
    g = jac.T @ jac
    if not np.all(np.isfinite(g)):
        raise NumericalError("non-finite pullback entries")
    dev = float(np.linalg.norm(g - np.diag([1.0, math.exp(2.0 * x)])))
    return g, dev


# -- diagnostics ----------------------------------------------------------------


def diagnostics_report(consts: EmbeddingConstants, seed: int = 0) -> dict:
    """Invariant checks and pullback deviations, as a JSON-friendly dict.

    ``hard_pass`` reflects the amplitude identity, the spiral-norm identity,
    and the basepoint image; the pullback deviations are informational.
    """
    abs_tol = consts.quadrature.abs_tol

    xs = np.linspace(-2.0, 2.0, 401)
    a1, a2 = _amp_many(xs, consts.A, abs_tol)
    psi_err = float(np.max(np.abs(a1 * a1 + a2 * a2 - 1.0)))

    gx = np.linspace(-2.0, 2.0, 20)
    gy = np.linspace(-2.0, 2.0, 20)
    xx, yy = np.meshgrid(gx, gy, indexing="ij")
    coil = _spiral_many(xx.ravel(), yy.ravel(), consts)
    norms = np.linalg.norm(coil, axis=1) * consts.c
    target = np.abs(np.sinh(xx.ravel()))
    denom = np.where(target > 0, target, 1.0)
    coil_err = float(np.max(np.abs(norms - target) / denom))

    origin = embed_h2(0.0, 0.0, consts)
    origin_err = float(np.max(np.abs(origin)))

    rng = np.random.default_rng(seed)
    t = rng.uniform(-3.0, 3.0, 1000)
    anti = float(np.max(np.abs(bump(t + 1.0) + bump(t))))
    odd = float(np.max(np.abs(bump(-t) + bump(t))))

    deviations = []
    for px in np.linspace(-0.5, 0.5, 5):
        for py in np.linspace(-0.5, 0.5, 5):
            _, dev = pullback_metric(float(px), float(py), 1e-5, consts)
            deviations.append({"x": float(px), "y": float(py), "deviation": dev})

    hard_pass = psi_err <= 1e-8 and coil_err <= 1e-9 and origin_err <= 1e-10
    return {
        "A": consts.A,
        "G1": consts.G1,
        "G2": consts.G2,
        "c": consts.c,
        "epsilon": consts.epsilon,
        "psi_identity_max_error": psi_err,
        "spiral_norm_max_rel_error": coil_err,
        "origin_image_max_abs": origin_err,
        "bump_antiperiodicity_max_error": max(anti, odd),
        "pullback_deviations": deviations,
        "hard_pass": hard_pass,
    }
