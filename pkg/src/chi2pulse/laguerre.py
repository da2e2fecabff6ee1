"""Generalized Laguerre polynomials by three-term recurrence."""

import numpy as np


def genlaguerre_all(n, a, x):
    """Stack ``[L_0^(a)(x), ..., L_n^(a)(x)]`` along a new leading axis."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n + 1,) + x.shape)
    out[0] = 1.0
    if n >= 1:
        out[1] = 1.0 + a - x
    for m in range(1, n):
        out[m + 1] = ((2 * m + 1 + a - x) * out[m] - (m + a) * out[m - 1]) / (m + 1)
    return out


def scaled_genlaguerre_all(n, a, rho, q):
    """Stack of ``P_m = rho**m L_m^(a)(-q / rho)`` for ``m = 0..n``.

    The scaling removes the apparent singularity at ``rho = 0``: the
    recurrence ``(m+1) P_{m+1} = ((2m+1+a) rho + q) P_m - (m+a) rho**2 P_{m-1}``
    is polynomial in ``rho`` and ``q``.  For ``rho, q >= 0`` every term is
    non-negative, so there is no cancellation.
    """
    rho = np.asarray(rho, dtype=float)
    q = np.asarray(q, dtype=float)
    shape = np.broadcast(rho, q).shape
    out = np.empty((n + 1,) + shape)
    out[0] = 1.0
    if n >= 1:
        out[1] = (1.0 + a) * rho + q
    for m in range(1, n):
        out[m + 1] = (((2 * m + 1 + a) * rho + q) * out[m] - (m + a) * rho**2 * out[m - 1]) / (m + 1)
    return out
