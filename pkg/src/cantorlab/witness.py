"""Plurisubharmonic witness functions separating a graph from its complement.

Stage products are recast as normalized polynomial pairs (p, q); the
building blocks u_n(z, w) = (1/m) log|q(z) w - p(z)| vanish to -infinity
exactly on the graph w = p/q.  The witness sums weighted copies of u_n
floored at recorded depths; on the graph every term sits at its floor, off
the graph the sum stays finite, and pulling back through w -> w**2 puts
the same floor on both square-root sheets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PlacementError
from .intervals import CantorState, blocks
from .products import eval_g, tail_deviation

__all__ = [
    "ReferenceDisc",
    "RationalApproximant",
    "WitnessFunction",
    "build_approximants",
    "eval_u",
    "compute_depths",
    "eval_witness",
    "pullback_square",
    "make_witness",
    "growth_constant",
]

NEG_INFINITY = float("-inf")
DEPTH_CAP = 700.0

DEFAULT_DISC_CENTER = 2.0 + 0.0j
DEFAULT_DISC_RADIUS = 0.5


@dataclass(frozen=True)
class ReferenceDisc:
    """Closed disc in the complement of the interval system."""

    center: complex = DEFAULT_DISC_CENTER
    radius: float = DEFAULT_DISC_RADIUS

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    def boundary(self, samples: int) -> np.ndarray:
        theta = 2.0 * np.pi * np.arange(samples) / samples
        return self.center + self.radius * np.exp(1j * theta)


@dataclass(frozen=True)
class RationalApproximant:
    """Polynomial pair (p, q) with sup|q| = 1 on the reference disc.

    Coefficients ascending; degree m is the true common degree n+1 of the
    stage-n product.  sup_q_on_B records the pre-normalization sup;
    sup_p_on_B and sup_error feed the growth and depth estimates.
    """

    p: tuple[float, ...]
    q: tuple[float, ...]
    degree: int
    sup_q_on_B: float
    sup_p_on_B: float
    sup_error: float

    def p_at(self, z):
        return np.polynomial.polynomial.polyval(z, np.asarray(self.p))

    def q_at(self, z):
        return np.polynomial.polynomial.polyval(z, np.asarray(self.q))

    def ratio_at(self, z):
        return self.p_at(z) / self.q_at(z)


def _check_disc(state: CantorState, B: ReferenceDisc) -> None:
    lo, hi = state.outer.left, state.outer.right
    x, y = B.center.real, B.center.imag
    dx = max(lo - x, x - hi, 0.0)
    if math.hypot(dx, y) <= B.radius:
        raise PlacementError(f"reference disc {B} intersects the interval system")


def build_approximants(
    state: CantorState,
    B: ReferenceDisc | None = None,
    N: int | None = None,
    boundary_samples: int = 4096,
) -> list[RationalApproximant]:
    """Stage products g_0..g_N as normalized polynomial pairs.

    q is scaled to sup-norm 1 on B (dense boundary sampling); p is scaled
    by the same factor so the ratio is unchanged.  sup_error records the
    sup over B of |g_deepest - g_n|, measured through the factored tail
    identity rather than by subtraction, which would bottom out at machine
    epsilon around stage 4 of the default schedule.
    """
    if B is None:
        B = ReferenceDisc()
    if N is None:
        N = state.depth
    if N > state.depth:
        raise ValueError(f"N={N} exceeds state depth {state.depth}")
    _check_disc(state, B)
    ring = B.boundary(boundary_samples)
    out = []
    poly = np.polynomial.polynomial
    for n in range(N + 1):
        blks = blocks(state, n)
        p = poly.polyfromroots([b.left for b in blks]).real
        q = poly.polyfromroots([b.right for b in blks]).real
        sup_q = float(np.max(np.abs(poly.polyval(ring, q))))
        sup_p = float(np.max(np.abs(poly.polyval(ring, p))))
        gn = eval_g(state, n, ring)
        err = float(np.max(np.abs(gn * tail_deviation(state, n, state.depth, ring))))
        out.append(
            RationalApproximant(
                p=tuple(p / sup_q),
                q=tuple(q / sup_q),
                degree=n + 1,
                sup_q_on_B=sup_q,
                sup_p_on_B=sup_p / sup_q,
                sup_error=err,
            )
        )
    return out


def eval_u(approximant: RationalApproximant, z, w):
    """(1/m) log|q(z) w - p(z)|; exact zeros return -infinity."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    mag = np.abs(approximant.q_at(z) * w - approximant.p_at(z))
    with np.errstate(divide="ignore"):
        val = np.log(mag) / approximant.degree
    if val.shape:
        return val
    return float(val)


def growth_constant(approximants: list[RationalApproximant], B: ReferenceDisc) -> float:
    """Constant C1 with u_n <= 2 log|z| + log|w| + C1 for |z| >= 1, |w| >= 1.

    From |q(z)| <= sup_B|q| (|z - c|/r)^m outside B and the same for p:
    the growth bound holds with C1 = log(2(1 + |c|) / r) + max over n of
    (1/m) log(sup|q| + sup|p|).
    """
    geom = math.log(2.0 * (1.0 + abs(B.center)) / B.radius)
    bulk = max(
        math.log(1.0 + a.sup_p_on_B) / a.degree for a in approximants
    )
    return geom + bulk


def compute_depths(
    approximants: list[RationalApproximant],
    state: CantorState,
    B: ReferenceDisc | None = None,
    samples: int = 512,
    stable: bool = False,
) -> list[float]:
    """Depths delta_n = -(max over sampled z in B of u_n(z, g(z))).

    g is the deepest available product.  The max over the boundary ring
    controls the closed disc (log-modulus of a holomorphic function).
    Clamped to [0, 700].

    With stable=True the residual |q g - p| is evaluated through the
    factored identity |q| |g - p/q|; this tracks the true approximation
    error below the double-precision cancellation floor and is the right
    notion for rate measurements, but direct evaluation of u_n cannot
    attain those depths, so witness floors use the default.
    """
    if samples < 512:
        raise ValueError("samples must be >= 512")
    if B is None:
        B = ReferenceDisc()
    _check_disc(state, B)
    ring = B.boundary(samples)
    g = eval_g(state, state.depth, ring)
    out = []
    for n, r in enumerate(approximants):
        if stable:
            err = np.abs(eval_g(state, n, ring) * tail_deviation(state, n, state.depth, ring))
            with np.errstate(divide="ignore"):
                u = (np.log(np.abs(r.q_at(ring))) + np.log(err)) / r.degree
        else:
            u = eval_u(r, ring, g)
        top = float(np.max(u))
        out.append(min(max(-top, 0.0), DEPTH_CAP))
    return out


@dataclass(frozen=True)
class WitnessFunction:
    """Truncated weighted sum of floored graph potentials.

    approximants holds r_1..r_N (index 0 of the build is not used, matching
    the weight sequence); weights sum to at most 1.
    """

    approximants: tuple[RationalApproximant, ...]
    depths: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if not (len(self.approximants) == len(self.depths) == len(self.weights)):
            raise ValueError("approximants, depths and weights must align")
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be positive")
        if sum(self.weights) > 1.0 + 1e-12:
            raise ValueError("weights must sum to at most 1")

    @property
    def truncation(self) -> int:
        return len(self.approximants)

    def floor_value(self) -> float:
        """The on-graph value -sum(weights * depths)."""
        return -sum(w * d for w, d in zip(self.weights, self.depths))

    def to_json_dict(self) -> dict:
        return {
            "weights": list(self.weights),
            "depths": list(self.depths),
            "approximants": [
                {"p": list(a.p), "q": list(a.q), "degree": a.degree,
                 "sup_q_on_B": a.sup_q_on_B, "sup_p_on_B": a.sup_p_on_B,
                 "sup_error": a.sup_error}
                for a in self.approximants
            ],
        }


def default_weights(N: int) -> tuple[float, ...]:
    """(6/pi^2)/n^2 for n = 1..N; sums below 1, decays slowly enough that
    weighted depths can diverge as the truncation grows."""
    c = 6.0 / math.pi**2
    return tuple(c / (n * n) for n in range(1, N + 1))


def make_witness(
    approximants: list[RationalApproximant],
    depths: list[float],
    N: int | None = None,
) -> WitnessFunction:
    """Assemble the truncated witness from build_approximants output
    (which is 0-indexed by stage; the witness uses stages 1..N)."""
    if N is None:
        N = len(approximants) - 1
    if N < 1:
        raise ValueError("witness needs at least stage 1")
    return WitnessFunction(
        approximants=tuple(approximants[1 : N + 1]),
        depths=tuple(depths[1 : N + 1]),
        weights=default_weights(N),
    )


def eval_witness(wf: WitnessFunction, z, w):
    """sum_n weights[n] * max(u_n(z, w), -depths[n]).

    The floor is at minus the depth: on the graph each u_n dives to
    -infinity and every term sits exactly at its floor.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    acc = np.zeros(np.broadcast(z, w).shape)
    for sigma, delta, r in zip(wf.weights, wf.depths, wf.approximants):
        acc = acc + sigma * np.maximum(eval_u(r, z, w), -delta)
    if acc.shape:
        return acc
    return float(acc)


def pullback_square(wf: WitnessFunction, z, w):
    """eval_witness at (z, w**2): even in w, so both square-root sheets
    of the graph receive identical values."""
    w = np.asarray(w, dtype=complex)
    return eval_witness(wf, z, w * w)


def offgraph_floor(wf: WitnessFunction, z, w):
    """Computable lower bound sum_n sigma_n h_n(z) + (sigma_n/m_n) log|w - r_n(z)|,
    with h_n = (1/m_n) log|q_n|; eval_witness dominates it term by term."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    acc = np.zeros(np.broadcast(z, w).shape)
    with np.errstate(divide="ignore"):
        for sigma, r in zip(wf.weights, wf.approximants):
            h = np.log(np.abs(r.q_at(z))) / r.degree
            acc = acc + sigma * (h + np.log(np.abs(w - r.ratio_at(z))) / r.degree)
    if acc.shape:
        return acc
    return float(acc)
