"""numba-compiled hot kernels: walk-on-spheres batches and SOR sweeps.

Mirrors `_kernels_np` operation for operation; any change here must be
replayed there to keep the two backends walk-for-walk identical.
"""

import numpy as np
from numba import njit

from ._rng import GAMMA_DRAW, GAMMA_STREAM, MASK64, _MULT_A, _MULT_B, mix64

_U_GAMMA_STREAM = np.uint64(GAMMA_STREAM)
_U_GAMMA_DRAW = np.uint64(GAMMA_DRAW)
_U_MULT_A = np.uint64(_MULT_A)
_U_MULT_B = np.uint64(_MULT_B)
_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)
_INV53 = 2.0**-53


@njit(cache=True, inline="always")
def _mix(x):
    x = (x ^ (x >> _U30)) * _U_MULT_A
    x = (x ^ (x >> _U27)) * _U_MULT_B
    return x ^ (x >> _U31)


@njit(cache=True)
def wos_batch(cx, cy, cr, score, x0, y0, walks, eps, seed_mixed, max_steps):
    """Run `walks` independent trajectories from (x0, y0).

    Boundary components: unit circle (index -1, score 0) and the discs
    (cx, cy, cr) with per-disc `score` (1.0 for the target).  A walk stops
    within `eps` of the nearest component and scores that component; a walk
    that exceeds `max_steps` scores 0 and is counted as stalled.

    Returns (hits, stalled).
    """
    ncomp = cr.shape[0]
    hits = 0
    stalled = 0
    for i in range(walks):
        s = _mix(np.uint64(seed_mixed) + (np.uint64(i) + np.uint64(1)) * _U_GAMMA_STREAM)
        x = x0
        y = y0
        done = False
        for _ in range(max_steps):
            best = 1.0 - np.sqrt(x * x + y * y)
            besti = -1
            for k in range(ncomp):
                dx = x - cx[k]
                dy = y - cy[k]
                dk = np.sqrt(dx * dx + dy * dy) - cr[k]
                if dk < best:
                    best = dk
                    besti = k
            if best <= eps:
                if besti >= 0 and score[besti] > 0.5:
                    hits += 1
                done = True
                break
            # direction uniform on the circle, by rejection from the square
            while True:
                s = s + _U_GAMMA_DRAW
                u1 = np.float64(_mix(s) >> _U11) * _INV53
                s = s + _U_GAMMA_DRAW
                u2 = np.float64(_mix(s) >> _U11) * _INV53
                px = 2.0 * u1 - 1.0
                py = 2.0 * u2 - 1.0
                q = px * px + py * py
                if q > 0.0 and q <= 1.0:
                    break
            r = np.sqrt(q)
            ux = px / r
            uy = py / r
            x = x + best * ux
            y = y + best * uy
        if not done:
            stalled += 1
    return hits, stalled


@njit(cache=True)
def sor_sweeps(u, fixed, omega, tol, max_sweeps):
    """Red-black SOR on the five-point Laplacian until max update < tol.

    `u` is updated in place; `fixed` marks Dirichlet cells (including the
    padding ring).  Returns (sweeps, last max update).
    """
    n0, n1 = u.shape
    sweeps = 0
    maxdiff = np.inf
    while sweeps < max_sweeps and maxdiff > tol:
        maxdiff = 0.0
        for parity in range(2):
            for i in range(1, n0 - 1):
                j0 = 1 if ((i + 1) & 1) == parity else 2
                for j in range(j0, n1 - 1, 2):
                    if fixed[i, j]:
                        continue
                    s = (u[i - 1, j] + u[i + 1, j]) + (u[i, j - 1] + u[i, j + 1])
                    new = (1.0 - omega) * u[i, j] + 0.25 * omega * s
                    diff = abs(new - u[i, j])
                    if diff > maxdiff:
                        maxdiff = diff
                    u[i, j] = new
        sweeps += 1
    return sweeps, maxdiff


def wos_batch_entry(cx, cy, cr, score, x0, y0, walks, eps, seed, max_steps):
    """Python-side wrapper: pre-mixes the seed exactly like the numpy path."""
    return wos_batch(
        cx, cy, cr, score, x0, y0, walks, eps, np.uint64(mix64(seed)), max_steps
    )
