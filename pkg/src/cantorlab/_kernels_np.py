"""Pure-numpy fallback kernels, vectorised over walks / grid cells.

Operation-for-operation mirror of `_kernels_nb`: per-walk random streams,
float expressions and comparison order are identical, so both backends
produce the same trajectories.
"""

import numpy as np

from ._rng import GAMMA_DRAW, GAMMA_STREAM, _MULT_A, _MULT_B, mix64

_U_GAMMA_STREAM = np.uint64(GAMMA_STREAM)
_U_GAMMA_DRAW = np.uint64(GAMMA_DRAW)
_U_MULT_A = np.uint64(_MULT_A)
_U_MULT_B = np.uint64(_MULT_B)
_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)
_U1 = np.uint64(1)
_INV53 = 2.0**-53


def _mix_vec(x):
    x = (x ^ (x >> _U30)) * _U_MULT_A
    x = (x ^ (x >> _U27)) * _U_MULT_B
    return x ^ (x >> _U31)


def wos_batch_entry(cx, cy, cr, score, x0, y0, walks, eps, seed, max_steps):
    """Vectorised walk-on-spheres batch; see `_kernels_nb.wos_batch`."""
    ncomp = cr.shape[0]
    seed_mixed = np.uint64(mix64(seed))
    idx = np.arange(walks, dtype=np.uint64)
    st = _mix_vec(seed_mixed + (idx + _U1) * _U_GAMMA_STREAM)
    x = np.full(walks, x0, dtype=np.float64)
    y = np.full(walks, y0, dtype=np.float64)
    alive = np.ones(walks, dtype=bool)
    hits = 0
    steps = 0
    while True:
        act = np.nonzero(alive)[0]
        if act.size == 0:
            stalled = 0
            break
        if steps >= max_steps:
            stalled = act.size
            break
        ax = x[act]
        ay = y[act]
        best = 1.0 - np.sqrt(ax * ax + ay * ay)
        besti = np.full(act.size, -1, dtype=np.int64)
        for k in range(ncomp):
            dx = ax - cx[k]
            dy = ay - cy[k]
            dk = np.sqrt(dx * dx + dy * dy) - cr[k]
            closer = dk < best
            best = np.where(closer, dk, best)
            besti = np.where(closer, k, besti)
        done = best <= eps
        if done.any():
            fin = besti[done]
            hits += int(np.count_nonzero((fin >= 0) & (score[fin] > 0.5)))
            alive[act[done]] = False
        move = act[~done]
        if move.size:
            d = best[~done]
            ux = np.empty(move.size)
            uy = np.empty(move.size)
            pend = np.arange(move.size)
            while pend.size:
                lanes = move[pend]
                sa = st[lanes] + _U_GAMMA_DRAW
                u1 = (_mix_vec(sa) >> _U11).astype(np.float64) * _INV53
                sb = sa + _U_GAMMA_DRAW
                u2 = (_mix_vec(sb) >> _U11).astype(np.float64) * _INV53
                st[lanes] = sb
                px = 2.0 * u1 - 1.0
                py = 2.0 * u2 - 1.0
                q = px * px + py * py
                ok = (q > 0.0) & (q <= 1.0)
                r = np.sqrt(q[ok])
                sel = pend[ok]
                ux[sel] = px[ok] / r
                uy[sel] = py[ok] / r
                pend = pend[~ok]
            x[move] = x[move] + d * ux
            y[move] = y[move] + d * uy
        steps += 1
    return hits, stalled


def sor_sweeps(u, fixed, omega, tol, max_sweeps):
    """Red-black SOR, vectorised; see `_kernels_nb.sor_sweeps`."""
    n0, n1 = u.shape
    iy, ix = np.indices((n0, n1))
    free = ~fixed
    free[0, :] = free[-1, :] = False
    free[:, 0] = free[:, -1] = False
    masks = [free & (((iy + ix) & 1) == p) for p in (0, 1)]
    sweeps = 0
    maxdiff = np.inf
    s = np.zeros_like(u)
    while sweeps < max_sweeps and maxdiff > tol:
        maxdiff = 0.0
        for m in masks:
            s[1:-1, 1:-1] = (u[:-2, 1:-1] + u[2:, 1:-1]) + (u[1:-1, :-2] + u[1:-1, 2:])
            new = (1.0 - omega) * u + 0.25 * omega * s
            diff = np.abs(new[m] - u[m])
            if diff.size:
                md = diff.max()
                if md > maxdiff:
                    maxdiff = md
            u[m] = new[m]
        sweeps += 1
    return sweeps, maxdiff
