"""Rational block products, their square-root branches, and continuation.

The stage-n product multiplies (z - left)/(z - right) over the n+1 closed
blocks; its square root takes the principal branch factor by factor, which
is holomorphic off the blocks and tends to 1 at infinity.  Tail
differences between stages are computed through the factored identity
g_N - g_n = g_n * (prod(1 - d_k/(z - a_k)) - 1), which stays accurate long
after direct subtraction drowns in cancellation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    BranchCutError,
    ContourContainmentError,
    OnSetError,
    InvalidWindowError,
    PathCollisionError,
    PoleProximityError,
    StepBudgetError,
)
from .intervals import CantorState, Interval, blocks

__all__ = [
    "BranchedEvaluation",
    "TailBound",
    "eval_g",
    "eval_f",
    "eval_g_limit",
    "window_factor",
    "residue_at_infinity",
    "continue_along_path",
    "track_square_root",
    "tail_deviation",
    "block_distance",
    "branch_points",
]

PROXIMITY_TOL = 1e-14


@dataclass(frozen=True)
class BranchedEvaluation:
    """A square-root value together with its sheet parity.

    parity +1 means the value agrees with the product of principal
    branches at that point, -1 means it is the other sheet.
    """

    value: complex
    sheet_parity: int

    def __post_init__(self):
        if self.sheet_parity not in (-1, 1):
            raise ValueError("sheet_parity must be +1 or -1")


@dataclass(frozen=True)
class TailBound:
    """Certified bound on |g_limit - g_n| on a set at distance delta."""

    n: int
    delta: float
    bound: float


def _block_pairs(state: CantorState, n: int) -> list[tuple[float, float]]:
    return [(b.left, b.right) for b in blocks(state, n)]


def block_distance(state: CantorState, n: int, z: complex | np.ndarray):
    """Distance from z to the union of stage-n blocks (real segments)."""
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    best = np.full(z.shape, np.inf)
    for left, right in _block_pairs(state, n):
        dx = np.maximum(np.maximum(left - x, x - right), 0.0)
        best = np.minimum(best, np.sqrt(dx * dx + y * y))
    return best if best.shape else float(best)


def branch_points(state: CantorState, n: int) -> list[float]:
    """All block endpoints at stage n (zeros and poles of the product)."""
    out = []
    for left, right in _block_pairs(state, n):
        out.extend((left, right))
    return out


def eval_g(state: CantorState, n: int, z):
    """Stage-n product over blocks of (z - left)/(z - right).

    Tends to 1 as |z| grows; raises near the poles (block right ends).
    """
    zz = np.asarray(z, dtype=complex)
    out = np.ones_like(zz)
    for left, right in _block_pairs(state, n):
        den = zz - right
        if np.any(np.abs(den) < PROXIMITY_TOL):
            raise PoleProximityError(f"evaluation within {PROXIMITY_TOL} of pole {right}")
        out = out * (zz - left) / den
    return out if out.shape else complex(out)


def eval_f(state: CantorState, n: int, z) -> BranchedEvaluation:
    """Principal square-root branch of the stage-n product.

    Each factor takes the principal root of its own block ratio; the block
    ratio maps the complement of the block off the negative real axis, so
    the product is holomorphic off the blocks and equals 1 at infinity.
    """
    zz = np.asarray(z, dtype=complex)
    dist = block_distance(state, n, zz)
    if np.any(np.asarray(dist) < PROXIMITY_TOL):
        raise BranchCutError("evaluation point on a branch cut (block)")
    out = np.ones_like(zz)
    for left, right in _block_pairs(state, n):
        out = out * np.sqrt((zz - left) / (zz - right))
    if out.shape:
        return BranchedEvaluation(out, 1)  # type: ignore[arg-type]
    return BranchedEvaluation(complex(out), 1)


def tail_deviation(state: CantorState, n: int, N: int, z):
    """prod_{k=n+1..N} (z - b_k)/(z - a_k) - 1, accumulated stably.

    This is (g_N - g_n)/g_n; each factor is 1 - d_k/(z - a_k) with the
    deleted length d_k carried exactly, so the result is meaningful even
    when it sits far below machine epsilon relative to g.
    """
    if not (0 <= n <= N <= state.depth):
        raise ValueError(f"need 0 <= n <= N <= depth, got n={n}, N={N}")
    zz = np.asarray(z, dtype=complex)
    t = np.zeros_like(zz)
    for k in range(n + 1, N + 1):
        iv = state.deleted[k - 1]
        u = -iv.length / (zz - iv.left)
        t = t + u + t * u
    return t if t.shape else complex(t)


def eval_g_limit(state: CantorState, z: complex, tol: float = 1e-12):
    """Deepest-stage value of the product with a certified tail bound.

    Walks stages upward until the bound sup|g_n| * (exp(sum d_k/delta) - 1)
    over the remaining deleted lengths drops below tol (or depth runs out;
    then the residual bound is attached).
    """
    z = complex(z)
    delta = block_distance(state, state.depth, z)
    if delta <= 0.0:
        raise OnSetError("point has zero distance to the interval system")
    lengths = [iv.length for iv in state.deleted]
    for n in range(state.depth + 1):
        tail = sum(lengths[n:])
        value = eval_g(state, n, z)
        bound = abs(value) * math.expm1(tail / delta)
        if bound <= tol or n == state.depth:
            return value, TailBound(n, float(delta), float(bound))
    raise AssertionError("unreachable")


def window_factor(state: CantorState, n: int, window: Interval, z):
    """Split the stage-n product as (outside-window part, inside part).

    Window endpoints must fall in deleted intervals or outside the outer
    interval, so no block straddles the boundary.
    """
    inside, outside = [], []
    for left, right in _block_pairs(state, n):
        if window.left <= left and right <= window.right:
            inside.append((left, right))
        elif right < window.left or left > window.right:
            outside.append((left, right))
        else:
            raise InvalidWindowError(
                f"window boundary falls inside block [{left}, {right}]"
            )
    zz = np.asarray(z, dtype=complex)

    def _prod(pairs):
        out = np.ones_like(zz)
        for left, right in pairs:
            den = zz - right
            if np.any(np.abs(den) < PROXIMITY_TOL):
                raise PoleProximityError(f"evaluation within {PROXIMITY_TOL} of pole {right}")
            out = out * (zz - left) / den
        return out

    g1, g2 = _prod(outside), _prod(inside)
    if zz.shape:
        return g1, g2
    return complex(g1), complex(g2)


def residue_at_infinity(
    state: CantorState,
    n: int,
    window: Interval,
    radius: float = 10.0,
    samples: int = 256,
) -> float:
    """1/z-coefficient of the window factor via a trapezoid contour integral.

    Equals the total length of the window blocks.  The uniform trapezoid
    rule on a circle is spectrally accurate for this analytic integrand.
    """
    if samples < 64:
        raise ValueError("samples must be >= 64")
    inside = [
        (left, right)
        for left, right in _block_pairs(state, n)
        if window.left <= left and right <= window.right
    ]
    top = max((max(abs(left), abs(right)) for left, right in inside), default=0.0)
    if radius < top + 1.0:
        raise ContourContainmentError(
            f"radius {radius} must exceed the largest window endpoint by >= 1"
        )
    theta = 2.0 * np.pi * np.arange(samples) / samples
    zs = radius * np.exp(1j * theta)
    _, g2 = window_factor(state, n, window, zs)
    # (1/2 pi i) closed integral of (g2 - 1) dz  ==  mean of (g2 - 1) * z
    coef = np.mean((g2 - 1.0) * zs)
    if abs(coef.imag) > 1e-10 * max(1.0, abs(coef.real)):
        raise AssertionError(f"residue has unexpected imaginary part: {coef}")
    return float(coef.real)


# ----------------------------------------------------------------------
# analytic continuation of square roots


def track_square_root(
    gfun: Callable[[complex], complex],
    path: Sequence[complex],
    w0: complex,
    shrink_threshold: float = 0.5,
    max_evals: int = 200_000,
) -> complex:
    """Continue w with w**2 = gfun(z) along a polyline by nearest-root steps.

    Segments are bisected until consecutive root choices move by less than
    shrink_threshold * |w|, the standard homotopy-tracking criterion.
    """
    if len(path) < 2:
        raise ValueError("path needs at least two vertices")
    w = complex(w0)
    g0 = complex(gfun(complex(path[0])))
    if abs(w * w - g0) > 1e-6 * max(1.0, abs(g0)):
        raise ValueError("start value is not a square root of g at the path start")
    evals = 0
    for za, zb in zip(path, path[1:]):
        stack = [(complex(za), complex(zb))]
        while stack:
            a, b = stack.pop()
            if evals >= max_evals:
                raise StepBudgetError(f"adaptive refinement exceeded {max_evals} evaluations")
            r = cmath.sqrt(complex(gfun(b)))
            evals += 1
            cand = r if abs(r - w) <= abs(-r - w) else -r
            if abs(cand - w) < shrink_threshold * max(abs(w), 1e-300):
                w = cand
            else:
                mid = 0.5 * (a + b)
                if mid == a or mid == b:
                    raise PathCollisionError(
                        "cannot refine further; path passes too close to a branch point"
                    )
                stack.append((mid, b))
                stack.append((a, mid))
    return w


def continue_along_path(
    state: CantorState,
    n: int,
    path: Sequence[complex],
    start: BranchedEvaluation,
    margin: float = 1e-9,
    max_evals: int = 200_000,
) -> BranchedEvaluation:
    """Propagate a square-root branch of the stage-n product along a path.

    The path must keep clear of the branch points (block endpoints, where
    the two roots collide) and poles; crossing a block interior is fine,
    that is just a sheet change.  Parity of the result compares the final
    value with the principal determination at the endpoint.
    """
    bp = np.array(branch_points(state, n))
    pts = [complex(p) for p in path]
    # vertex and quarter-point screening; the tracker re-checks every
    # refined evaluation point against the same margin
    for za, zb in zip(pts, pts[1:]):
        for t in (0.0, 0.25, 0.5, 0.75, 1.0):
            q = za + t * (zb - za)
            if np.min(np.abs(q - bp)) < margin:
                raise PathCollisionError(
                    f"path point {q} within {margin} of a branch point or pole"
                )

    def gfun(z: complex) -> complex:
        if np.min(np.abs(z - bp)) < margin:
            raise PathCollisionError(
                f"refined path point {z} within {margin} of a branch point or pole"
            )
        out = 1.0 + 0.0j
        for left, right in _block_pairs(state, n):
            out = out * (z - left) / (z - right)
        return out

    w = track_square_root(gfun, pts, start.value, max_evals=max_evals)
    principal = eval_f(state, n, pts[-1]).value
    parity = 1 if abs(w - principal) <= abs(w + principal) else -1
    return BranchedEvaluation(w, parity)
