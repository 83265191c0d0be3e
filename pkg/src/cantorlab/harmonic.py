"""Harmonic measure on the unit disk minus closed discs.

Two estimators are provided: a walk-on-spheres Monte-Carlo with
counter-split per-walk seeds (deterministic under any scheduling), and
a five-point finite-difference Dirichlet solver used as an independent
oracle.  ``certify`` is the acceptance test used by the construction
loop: every probe-lattice sample must clear the threshold by three
standard errors.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import backend
from ._rng import derive_seed, mix64
from .errors import PointPlacementError

log = logging.getLogger(__name__)

__all__ = [
    "SlitDiskDomain",
    "MeasureEstimate",
    "GridField",
    "CertificateEvidence",
    "wos_estimate",
    "grid_solve",
    "field_at",
    "certify",
    "default_c0",
    "probe_lattice",
    "default_eps",
    "make_certifier",
]

DEFAULT_TARGET = (-0.75j, 0.125)
DEFAULT_PROBE = (0.75j, 0.125)

# Discs thinner than this are invisible to the walk geometry: their effect
# on the estimate is at or below the statistical resolution of the desk-scale
# walk counts, but their tiny radii would force eps (and step counts) down.
DROP_RADIUS = 1e-9

MAX_WALK_STEPS = 100_000


def _as_pair(disc) -> tuple[complex, float]:
    c, r = disc
    return complex(c), float(r)


@dataclass(frozen=True)
class SlitDiskDomain:
    """Unit disk minus closed discs, with a target disc S and probe disc X.

    S is the absorbing component that scores 1; X is where certification
    samples the measure.  X is not removed from the domain.
    """

    deleted_discs: tuple[tuple[complex, float], ...] = ()
    target: tuple[complex, float] = DEFAULT_TARGET
    probe: tuple[complex, float] = DEFAULT_PROBE

    def __post_init__(self):
        object.__setattr__(
            self, "deleted_discs", tuple(_as_pair(d) for d in self.deleted_discs)
        )
        object.__setattr__(self, "target", _as_pair(self.target))
        object.__setattr__(self, "probe", _as_pair(self.probe))
        for c, r in (self.target, self.probe, *self.deleted_discs):
            if r <= 0.0:
                raise ValueError(f"disc radius must be positive: {(c, r)}")
            if abs(c) + r >= 1.0:
                raise ValueError(f"disc {(c, r)} not strictly inside the unit disk")
        ts, rs = self.target
        px, pr = self.probe
        if abs(ts - px) <= rs + pr:
            raise ValueError("target and probe discs intersect")
        # deleted discs may overlap one another; they must avoid S and X
        for c, r in self.deleted_discs:
            for oc, orr in (self.target, self.probe):
                if abs(c - oc) <= r + orr:
                    raise ValueError(f"deleted disc {(c, r)} hits target/probe")

    @classmethod
    def from_discs(cls, discs: Sequence[tuple[float, float]]) -> "SlitDiskDomain":
        """Build from real-centered (center, radius) pairs of the construction."""
        return cls(tuple((complex(c), r) for c, r in discs))

    def kept_discs(self) -> tuple[tuple[complex, float], ...]:
        kept = tuple(d for d in self.deleted_discs if d[1] >= DROP_RADIUS)
        n_drop = len(self.deleted_discs) - len(kept)
        if n_drop:
            log.warning(
                "dropping %d deleted disc(s) with radius < %g from walk geometry",
                n_drop,
                DROP_RADIUS,
            )
        return kept

    def contains(self, z: complex) -> bool:
        """Is z interior to the walk domain (outside target and kept discs)?"""
        if abs(z) >= 1.0:
            return False
        c, r = self.target
        if abs(z - c) <= r:
            return False
        return all(abs(z - c) > r for c, r in self.kept_discs())


@dataclass(frozen=True)
class MeasureEstimate:
    value: float
    std_error: float
    walks: int
    eps: float
    stalled: int = 0


def default_eps(domain: SlitDiskDomain) -> float:
    """Stopping tolerance: min(1e-6, half the smallest kept radius)."""
    radii = [r for _, r in domain.kept_discs()]
    radii.append(domain.target[1])
    return min(1e-6, min(radii) / 2.0)


def _components(domain: SlitDiskDomain):
    """Component arrays: target first (score 1), then kept deleted discs."""
    discs = [(domain.target, 1.0)] + [(d, 0.0) for d in domain.kept_discs()]
    cx = np.array([c.real for (c, _), _ in discs], dtype=np.float64)
    cy = np.array([c.imag for (c, _), _ in discs], dtype=np.float64)
    cr = np.array([r for (_, r), _ in discs], dtype=np.float64)
    score = np.array([s for _, s in discs], dtype=np.float64)
    return cx, cy, cr, score


def _kernels():
    if backend.use_numba():
        from . import _kernels_nb as k
    else:
        from . import _kernels_np as k
    return k


def wos_estimate(
    domain: SlitDiskDomain,
    z: complex,
    walks: int = 100_000,
    eps: Optional[float] = None,
    seed: int = 0,
) -> MeasureEstimate:
    """Walk-on-spheres estimate of the harmonic measure of S at z.

    Each trajectory jumps uniformly on the largest inscribed circle until
    within eps of a boundary component; the nearest component decides the
    score.  Deterministic for a fixed seed and walk count.
    """
    z = complex(z)
    if walks < 1:
        raise ValueError("walks must be >= 1")
    if not domain.contains(z):
        raise PointPlacementError(f"point {z} is not inside the domain")
    if eps is None:
        eps = default_eps(domain)
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    cx, cy, cr, score = _components(domain)
    hits, stalled = _kernels().wos_batch_entry(
        cx, cy, cr, score, z.real, z.imag, int(walks), float(eps), int(seed), MAX_WALK_STEPS
    )
    if stalled:
        log.warning("%d walk(s) hit the %d-step kill switch", stalled, MAX_WALK_STEPS)
    value = hits / walks
    std_error = math.sqrt(value * (1.0 - value) / walks)
    return MeasureEstimate(value, std_error, int(walks), float(eps), int(stalled))


# ----------------------------------------------------------------------
# finite-difference oracle


@dataclass(frozen=True)
class GridField:
    """Solution of the Dirichlet problem on a uniform grid over [-1,1]^2."""

    values: np.ndarray  # (n+2, n+2) with one padding ring
    interior: np.ndarray  # bool mask of relaxed cells
    resolution: int
    sweeps: int
    residual: float
    warnings: tuple[str, ...] = field(default=())

    @property
    def h(self) -> float:
        return 2.0 / self.resolution

    def cell_center(self, i: int, j: int) -> complex:
        # i, j include the padding offset of 1
        h = self.h
        return complex(-1.0 + (j - 0.5) * h, -1.0 + (i - 0.5) * h)


def grid_solve(
    domain: SlitDiskDomain,
    resolution: int = 512,
    omega: float = 1.9,
    tol: float = 1e-8,
    max_sweeps: int = 200_000,
) -> GridField:
    """Five-point SOR solve: u = 1 on/inside S, u = 0 on the unit circle
    and deleted discs, relaxed until the max update falls below tol.

    Discs below the walk drop threshold are skipped (matching the walk
    geometry); kept discs smaller than a cell absorb at their nearest cell
    and attach a resolution warning.
    """
    if resolution < 128:
        raise ValueError("resolution must be >= 128")
    n = int(resolution)
    h = 2.0 / n
    # cell centers with a one-cell padding ring (padding is fixed at 0)
    coords = -1.0 + (np.arange(n + 2) - 0.5) * h
    X, Y = np.meshgrid(coords, coords)
    u = np.zeros((n + 2, n + 2))
    fixed = np.zeros((n + 2, n + 2), dtype=bool)
    fixed[0, :] = fixed[-1, :] = fixed[:, 0] = fixed[:, -1] = True

    outside = X * X + Y * Y >= 1.0
    fixed |= outside

    warns = []
    tc, tr = domain.target
    in_target = (X - tc.real) ** 2 + (Y - tc.imag) ** 2 <= tr * tr
    if not in_target.any():
        warns.append("target disc smaller than one grid cell; absorbing at nearest cell")
        k = np.argmin((X - tc.real) ** 2 + (Y - tc.imag) ** 2)
        in_target = np.zeros_like(in_target)
        in_target.flat[k] = True
    fixed |= in_target
    u[in_target] = 1.0

    for c, r in domain.kept_discs():
        in_disc = (X - c.real) ** 2 + (Y - c.imag) ** 2 <= r * r
        if not in_disc.any():
            warns.append(
                f"deleted disc at {c:.6g} (radius {r:.3g}) smaller than one grid cell; "
                "absorbing at nearest cell"
            )
            k = np.argmin((X - c.real) ** 2 + (Y - c.imag) ** 2)
            in_disc = np.zeros_like(in_disc)
            in_disc.flat[k] = True
        fixed |= in_disc
        u[in_disc] = 0.0

    sweeps, residual = _kernels().sor_sweeps(u, fixed, float(omega), float(tol), int(max_sweeps))
    if residual > tol:
        warns.append(f"relaxation stopped at {sweeps} sweeps with residual {residual:.3g}")
    interior = ~fixed
    return GridField(u, interior, n, int(sweeps), float(residual), tuple(warns))


def field_at(fieldobj: GridField, z: complex) -> float:
    """Bilinear interpolation of the grid field at a point."""
    z = complex(z)
    h = fieldobj.h
    # fractional index into the padded array (cell centers at -1 + (k-0.5) h)
    fx = (z.real + 1.0) / h + 0.5
    fy = (z.imag + 1.0) / h + 0.5
    j0 = int(math.floor(fx))
    i0 = int(math.floor(fy))
    tx = fx - j0
    ty = fy - i0
    u = fieldobj.values
    n1 = u.shape[0] - 1
    i0 = min(max(i0, 0), n1 - 1)
    j0 = min(max(j0, 0), n1 - 1)
    return float(
        (1 - ty) * ((1 - tx) * u[i0, j0] + tx * u[i0, j0 + 1])
        + ty * ((1 - tx) * u[i0 + 1, j0] + tx * u[i0 + 1, j0 + 1])
    )


# ----------------------------------------------------------------------
# certification


def probe_lattice(domain: SlitDiskDomain, points: int = 37) -> list[complex]:
    """Sample lattice of the probe disc: center plus concentric rings of 12,
    the outermost on the boundary circle.  37 points = center + 3 rings."""
    c, r = domain.probe
    rings = max(1, round((points - 1) / 12))
    out = [c]
    for q in range(1, rings + 1):
        rho = r * q / rings
        for k in range(12):
            theta = 2.0 * math.pi * k / 12.0
            out.append(c + rho * complex(math.cos(theta), math.sin(theta)))
    return out


@dataclass(frozen=True)
class CertificateEvidence:
    min_lower_bound: float
    worst_point: complex
    walks: int
    eps: float
    accepted: bool

    def to_json(self) -> str:
        return json.dumps(
            {
                "min_lower_bound": self.min_lower_bound,
                "worst_point": [self.worst_point.real, self.worst_point.imag],
                "walks": self.walks,
                "eps": self.eps,
                "accepted": self.accepted,
            }
        )


def certify(
    domain: SlitDiskDomain,
    c0: float,
    walks: int = 200_000,
    probe_samples: int = 37,
    seed: int = 0,
    early_abort: bool = True,
    margin_sigmas: float = 0.0,
) -> tuple[bool, CertificateEvidence]:
    """Accept iff every probe sample satisfies value - 3*std_error > c0.

    Samples far from the target are evaluated first so a failing domain
    aborts after its worst point; per-point seeds are split from the root
    seed by original lattice index, so estimates do not depend on order.

    margin_sigmas > 0 widens the statistical penalty to (3 + margin)
    standard errors.  The construction loop certifies with a margin so
    that accepted geometries survive an independent plain-3-sigma
    re-certification instead of having been accepted on a lucky draw.
    """
    if walks < 10_000:
        raise ValueError("certification needs walks >= 10**4")
    pts = probe_lattice(domain, probe_samples)
    eps = default_eps(domain)
    order = sorted(range(len(pts)), key=lambda i: -abs(pts[i] - domain.target[0]))
    best = math.inf
    worst = pts[order[0]]
    accepted = True
    penalty = 3.0 + margin_sigmas
    for i in order:
        est = wos_estimate(domain, pts[i], walks=walks, eps=eps, seed=derive_seed(seed, i))
        lower = est.value - penalty * est.std_error
        if lower < best:
            best = lower
            worst = pts[i]
        if lower <= c0:
            accepted = False
            if early_abort:
                break
    return accepted, CertificateEvidence(best, worst, int(walks), float(eps), accepted)


def default_c0(walks: int = 100_000, resolution: int = 512) -> float:
    """Shipped certification threshold: 0.9 x the probe-lattice minimum of
    the grid solution for the unslit disk, cross-checked against one walk
    estimate at the worst lattice point."""
    domain = SlitDiskDomain()
    fieldobj = grid_solve(domain, resolution)
    pts = probe_lattice(domain)
    vals = [field_at(fieldobj, z) for z in pts]
    kmin = int(np.argmin(vals))
    vmin = vals[kmin]
    if walks:
        est = wos_estimate(domain, pts[kmin], walks=walks, seed=mix64(2025))
        if abs(est.value - vmin) > max(0.01, 3.0 * est.std_error):
            log.warning(
                "grid/walk disagreement at the worst probe point: %g vs %g",
                vmin,
                est.value,
            )
    return 0.9 * vmin


def make_certifier(
    c0: float,
    walks: int = 700_000,
    probe_samples: int = 37,
    seed: int = 0,
    margin_sigmas: float = 5.0,
):
    """Certifier callback for the construction loop.

    Takes the raw construction disc list, builds the walk domain, and
    returns the certified lower bound (early-aborted on failure).  The
    per-call seed folds in the exact disc geometry, so repeated attempts
    with shrunk radii re-roll instead of replaying frozen noise.

    The default 5-sigma safety margin on top of the 3-sigma rule means an
    accepted geometry clears the threshold by ~6 standard errors in truth,
    so an independent plain-3-sigma re-certification at the same walk
    count passes with overwhelming probability; without the margin,
    halving sequences pass through noise-marginal radii and eventually get
    accepted on a lucky draw (observed empirically), leaving a domain that
    fails fresh-seed re-certification about half the time.
    """

    def _geometry_key(discs) -> int:
        h = 0
        for c, r in discs:
            h = mix64(h ^ np.float64(c).view(np.uint64).item())
            h = mix64(h ^ np.float64(r).view(np.uint64).item())
        return h

    def certifier(discs: Sequence[tuple[float, float]]) -> float:
        domain = SlitDiskDomain.from_discs(discs)
        call_seed = derive_seed(seed, _geometry_key(discs))
        _, evidence = certify(
            domain,
            c0,
            walks=walks,
            probe_samples=probe_samples,
            seed=call_seed,
            margin_sigmas=margin_sigmas,
        )
        return evidence.min_lower_bound

    return certifier
