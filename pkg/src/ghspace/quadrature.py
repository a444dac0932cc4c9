"""Adaptive Simpson quadrature with an absolute error budget."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConvergenceError, ParameterError


@dataclass(frozen=True)
class QuadratureSpec:
    """Settings for adaptive Simpson integration."""

    method: str = "adaptive-simpson"
    abs_tol: float = 1e-10
    max_subdivisions: int = 50

    def __post_init__(self):
        if self.method != "adaptive-simpson":
            raise ParameterError(f"unknown quadrature method {self.method!r}")
        if not self.abs_tol > 0.0:
            raise ParameterError("quadrature abs_tol must be > 0")
        if self.max_subdivisions < 20:
            raise ParameterError("max_subdivisions must be >= 20")


def adaptive_simpson(f, a: float, b: float, spec: QuadratureSpec | None = None) -> float:
    """Integrate ``f`` over ``[a, b]`` to within ``spec.abs_tol``.

    Swapped bounds flip the sign of the result.  If any interval still
    fails its local error criterion at the maximum subdivision depth,
    raises :class:`ConvergenceError` carrying the best estimate.
    """
    if spec is None:
        spec = QuadratureSpec()
    a = float(a)
    b = float(b)
    if a == b:
        return 0.0
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0

    fa = f(a)
    fb = f(b)
    mid = 0.5 * (a + b)
    fm = f(mid)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    total = 0.0
    exhausted = False
    stack = [(a, b, fa, fm, fb, whole, spec.abs_tol, 0)]
    while stack:
        a0, b0, fa0, fm0, fb0, s0, tol, depth = stack.pop()
        m0 = 0.5 * (a0 + b0)
        lm = 0.5 * (a0 + m0)
        rm = 0.5 * (m0 + b0)
        flm = f(lm)
        frm = f(rm)
        h12 = (b0 - a0) / 12.0
        s_left = h12 * (fa0 + 4.0 * flm + fm0)
        s_right = h12 * (fm0 + 4.0 * frm + fb0)
        delta = s_left + s_right - s0
        if abs(delta) <= 15.0 * tol or depth >= spec.max_subdivisions:
            if abs(delta) > 15.0 * tol:
                exhausted = True
            # Richardson correction: one extrapolation order for free
            total += s_left + s_right + delta / 15.0
        else:
            half = 0.5 * tol
            stack.append((a0, m0, fa0, flm, fm0, s_left, half, depth + 1))
            stack.append((m0, b0, fm0, frm, fb0, s_right, half, depth + 1))

    if exhausted:
        raise ConvergenceError(
            f"adaptive Simpson did not reach abs_tol={spec.abs_tol:g} within "
            f"{spec.max_subdivisions} subdivisions",
            best_estimate=sign * total,
        )
    return sign * total
