"""Splitting-composition coefficients for the separable-Hamiltonian integrators.

Each method is a palindromic composition of velocity-Verlet (kick-drift-kick)
substeps with weights ``gamma``; adjacent half-kicks are merged, so a step with
s substeps costs s drifts and s+1 kicks.  Orders 2 and 4 come from the
classical triple-jump construction, order 6 is Yoshida's solution A, and order
8 is the Kahan-Li 17-stage composition (small error constants).  The measured
convergence order of every table is pinned by a test.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["composition_gammas", "kick_drift_coefficients", "SPLIT_ORDERS"]

SPLIT_ORDERS = (2, 4, 6, 8)

_W1_4 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))

_YOSHIDA6 = (
    0.784513610477560,
    0.235573213359357,
    -1.17767998417887,
)

# Kahan & Li s=17 order-8 symmetric composition, first half; the list is
# palindromic and the middle entry makes the weights sum to 1.
_KAHAN_LI8 = (
    0.13020248308889008087881763,
    0.56116298177510838456196441,
    -0.38947496264484728640807860,
    0.15884190655515560089621075,
    -0.39590389413323757733623154,
    0.18453964097831570709183254,
    0.25837438768632204729397911,
    0.29501172360931029887096624,
    -0.60550853383003451169892108,
)


def composition_gammas(order: int) -> np.ndarray:
    """Palindromic substep weights for the given convergence order."""
    if order == 2:
        g = [1.0]
    elif order == 4:
        g = [_W1_4, 1.0 - 2.0 * _W1_4, _W1_4]
    elif order == 6:
        w = list(_YOSHIDA6)
        g = w + [1.0 - 2.0 * math.fsum(w)] + w[::-1]
    elif order == 8:
        w = list(_KAHAN_LI8)
        g = w[:-1] + [w[-1]] + w[-2::-1]
    else:
        raise ValueError(f"no splitting table for order {order}; choose from {SPLIT_ORDERS}")
    return np.asarray(g, dtype=np.float64)


def kick_drift_coefficients(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Merged (kicks, drifts) coefficient arrays for one composition step.

    kicks has len(gammas)+1 entries: the outer half-kicks plus the merged
    interior pairs; drifts equals gammas.
    """
    g = composition_gammas(order)
    kicks = np.empty(g.size + 1, dtype=np.float64)
    kicks[0] = 0.5 * g[0]
    kicks[-1] = 0.5 * g[-1]
    for i in range(1, g.size):
        kicks[i] = 0.5 * (g[i - 1] + g[i])
    return kicks, g
