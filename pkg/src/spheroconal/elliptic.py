"""Jacobi elliptic functions sn, cn, dn and the complete quarter period.

All routines take the *parameter* ksq = k^2 (not the modulus k). Evaluation
uses the descending Gauss/Landen transformation: build the arithmetic
geometric mean ladder once per parameter, then fold the amplitude back down
through the ladder. This gives near machine precision on [0, 1] with no
special-function library dependence.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import Divergent, OutOfRange

__all__ = ["JacobiTriple", "jacobi", "quarter_period"]

_MAX_AGM_ITER = 32


class JacobiTriple(NamedTuple):
    """Values sn(u), cn(u), dn(u) at a common argument and parameter."""

    sn: np.ndarray | float
    cn: np.ndarray | float
    dn: np.ndarray | float


def _agm_ladder(ksq: float) -> list[tuple[float, float, float]]:
    """AGM scale ladder [(a_n, b_n, c_n), ...] until c_n underflows."""
    a, b, c = 1.0, math.sqrt(1.0 - ksq), math.sqrt(ksq)
    ladder = [(a, b, c)]
    for _ in range(_MAX_AGM_ITER):
        if abs(c) <= 4.0 * np.finfo(float).eps * a:
            return ladder
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        ladder.append((a, b, c))
    raise ArithmeticError(f"AGM failed to converge for ksq={ksq!r}")


def jacobi(u, ksq: float) -> JacobiTriple:
    """Evaluate sn, cn, dn at argument ``u`` and parameter ``ksq``.

    Parameters
    ----------
    u : array_like
        Real argument(s); any shape, vectorized.
    ksq : float
        Parameter k^2 in the closed interval [0, 1].

    Returns
    -------
    JacobiTriple
        Arrays (or scalars, matching the input) sn(u), cn(u), dn(u).
        dn is taken on its positive branch, consistent with real argument
        and parameter in [0, 1].
    """
    if not 0.0 <= ksq <= 1.0:
        raise OutOfRange(f"parameter ksq must lie in [0, 1], got {ksq!r}")
    arr = np.asarray(u, dtype=float)
    scalar = arr.ndim == 0

    if ksq == 0.0:
        sn, cn, dn = np.sin(arr), np.cos(arr), np.ones_like(arr)
    elif ksq == 1.0:
        sn = np.tanh(arr)
        cn = 1.0 / np.cosh(arr)
        dn = cn.copy()
    else:
        ladder = _agm_ladder(ksq)
        n = len(ladder) - 1
        phi = (2.0**n) * ladder[n][0] * arr
        for a_i, _, c_i in reversed(ladder[1:]):
            ratio = np.clip((c_i / a_i) * np.sin(phi), -1.0, 1.0)
            phi = 0.5 * (phi + np.arcsin(ratio))
        sn = np.sin(phi)
        cn = np.cos(phi)
        dn = np.sqrt(np.clip(1.0 - ksq * sn * sn, 0.0, None))

    if scalar:
        return JacobiTriple(float(sn), float(cn), float(dn))
    return JacobiTriple(sn, cn, dn)


def quarter_period(ksq: float) -> float:
    """Complete elliptic integral K(ksq), the quarter period of sn.

    Computed as pi / (2 * AGM(1, sqrt(1 - ksq))). Raises Divergent at
    ksq = 1 where the integral is logarithmically infinite.
    """
    if not 0.0 <= ksq <= 1.0:
        raise OutOfRange(f"parameter ksq must lie in [0, 1], got {ksq!r}")
    if ksq == 1.0:
        raise Divergent("quarter period diverges at ksq = 1")
    a_n = _agm_ladder(ksq)[-1][0]
    return math.pi / (2.0 * a_n)
