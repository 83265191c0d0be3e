"""Counter-based pseudo-random streams shared by both walk backends.

Every Monte-Carlo walk owns an independent splitmix64-style stream derived
from the root seed and the walk index, so estimates do not depend on
evaluation order or batching.  The same integer recipe is implemented
scalar-side here (for seed derivation), vectorised in ``_kernels_np`` and
compiled in ``_kernels_nb``; the three must stay in lockstep.
"""

MASK64 = (1 << 64) - 1

# Stream spacing and per-draw increment; distinct odd constants so that
# neighbouring streams are not shifted copies of each other.
GAMMA_STREAM = 0x9E3779B97F4A7C15
GAMMA_DRAW = 0xC2B2AE3D27D4EB4F

_MULT_A = 0xBF58476D1CE4E5B9
_MULT_B = 0x94D049BB133111EB


def mix64(x: int) -> int:
    """splitmix64 finalizer on a 64-bit integer."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * _MULT_A) & MASK64
    x = ((x ^ (x >> 27)) * _MULT_B) & MASK64
    return x ^ (x >> 31)


def derive_seed(seed: int, *indices: int) -> int:
    """Fold integer indices into a root seed, one mixing round per index.

    Used to split one user-facing seed into independent sub-seeds
    (per probe point, per certification attempt, ...).
    """
    s = mix64(seed)
    for k in indices:
        s = mix64((s + GAMMA_STREAM * (int(k) + 1)) & MASK64)
    return s


def stream_state(seed: int, k: int) -> int:
    """Initial counter of stream ``k`` under root ``seed``."""
    return mix64((mix64(seed) + (k + 1) * GAMMA_STREAM) & MASK64)


def stream_next(state: int) -> tuple[int, float]:
    """Advance one draw; returns (new_state, uniform in [0, 1))."""
    state = (state + GAMMA_DRAW) & MASK64
    return state, (mix64(state) >> 11) * 2.0**-53
