"""Molecular asymmetry parameters and the induced elliptic moduli.

A rigid rotor with principal moments of inertia I1 <= I2 <= I3 defines a
mean inverse inertia q, an asymmetry scale p, and a dimensionless triple
(e1, e2, e3) with e1 + e2 + e3 = 0 and e1^2 + e2^2 + e3^2 = 3/2. The most
asymmetric direction fixes the complementary parameters k1^2 + k2^2 = 1 of
the elliptic coordinate system in which the rotor Hamiltonian separates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidOrdering, OutOfRange, SphericalTop, SymmetricTop

__all__ = ["AsymmetryConfig", "from_moments", "from_e1", "e1_from_modulus"]

_COINCIDENT_RTOL = 1e-12


@dataclass(frozen=True)
class AsymmetryConfig:
    """Dimensionless asymmetry triple and elliptic moduli of one rotor.

    Attributes
    ----------
    e : tuple of float
        (e1, e2, e3), sorted descending, traceless, with fixed norm 3/2.
    k1sq, k2sq : float
        Complementary elliptic parameters, k1sq + k2sq = 1.
    q, p : float or None
        Mean inverse inertia and asymmetry scale in absolute units, or None
        when the configuration was built from e1 alone.
    """

    e: tuple[float, float, float]
    k1sq: float
    k2sq: float
    q: float | None = None
    p: float | None = None

    def __post_init__(self) -> None:
        e1, e2, e3 = self.e
        if not e1 > e2 > e3:
            raise OutOfRange(f"asymmetry triple must be strictly ordered, got {self.e}")
        if abs(e1 + e2 + e3) > 1e-12:
            raise OutOfRange(f"asymmetry triple must be traceless, got sum {e1 + e2 + e3!r}")
        if abs(e1 * e1 + e2 * e2 + e3 * e3 - 1.5) > 1e-12:
            raise OutOfRange("asymmetry triple must have squared norm 3/2")
        if not (0.0 < self.k1sq < 1.0 and 0.0 < self.k2sq < 1.0):
            raise OutOfRange("elliptic parameters must lie strictly inside (0, 1)")
        if abs(self.k1sq + self.k2sq - 1.0) > 1e-14:
            raise OutOfRange("elliptic parameters must be complementary")


def from_moments(i1: float, i2: float, i3: float) -> AsymmetryConfig:
    """Build the configuration from principal moments of inertia.

    Parameters
    ----------
    i1, i2, i3 : float
        Strictly positive moments, sorted ascending.

    Raises
    ------
    InvalidOrdering
        If the moments are not positive or not ascending.
    SphericalTop, SymmetricTop
        If three (respectively two) moments coincide to 1e-12 relative; the
        asymmetric parametrization degenerates there.
    """
    if not (0.0 < i1 <= i2 <= i3):
        raise InvalidOrdering(f"moments must satisfy 0 < i1 <= i2 <= i3, got {(i1, i2, i3)}")
    if i3 - i1 <= _COINCIDENT_RTOL * i3:
        raise SphericalTop("all three moments coincide; no asymmetry direction")
    if i2 - i1 <= _COINCIDENT_RTOL * i3 or i3 - i2 <= _COINCIDENT_RTOL * i3:
        raise SymmetricTop("two moments coincide; an elliptic parameter degenerates")

    inv = (1.0 / i1, 1.0 / i2, 1.0 / i3)
    q = (inv[0] + inv[1] + inv[2]) / 3.0
    # Re-center the deviations so the traceless constraint survives the
    # cancellation when the spread is many orders below the mean.
    d = [v - q for v in inv]
    shift = (d[0] + d[1] + d[2]) / 3.0
    d = [v - shift for v in d]
    p = math.sqrt(2.0 * (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / 3.0)
    if p <= 1e-12 * q:
        raise SphericalTop("asymmetry scale vanishes relative to the mean inverse inertia")
    e1, e2, e3 = d[0] / p, d[1] / p, d[2] / p

    k1sq = (e2 - e3) / (e1 - e3)
    # The complement is forced rather than recomputed from the e-triple so
    # that the two elliptic parameters are complementary to the last bit;
    # the spectra of the two coordinate sides are matched against each other
    # at tolerances tighter than the difference would introduce.
    return AsymmetryConfig(e=(e1, e2, e3), k1sq=k1sq, k2sq=1.0 - k1sq, q=q, p=p)


def from_e1(e1: float) -> AsymmetryConfig:
    """Build a dimensionless configuration from the leading parameter alone.

    e1 must lie strictly inside (1/2, 1): the lower end is the oblate-like
    symmetric top (e1 = e2), the upper end the prolate-like one (e2 = e3).
    No absolute inertia scale is attached (q = p = None).
    """
    if not 0.5 < e1 < 1.0:
        raise OutOfRange(f"e1 must lie strictly inside (1/2, 1), got {e1!r}")
    s = math.sqrt(3.0 * (1.0 - e1 * e1))
    e2 = 0.5 * (-e1 + s)
    e3 = -e1 - e2
    k1sq = 2.0 * s / (3.0 * e1 + s)
    return AsymmetryConfig(e=(e1, e2, e3), k1sq=k1sq, k2sq=1.0 - k1sq)


def e1_from_modulus(k1sq: float) -> float:
    """Inverse map: the e1 value whose configuration has parameter k1sq.

    Closed form from k1^2 = (e2 - e3)/(e1 - e3) with the traceless and
    norm constraints eliminated.
    """
    if not 0.0 < k1sq < 1.0:
        raise OutOfRange(f"k1sq must lie strictly inside (0, 1), got {k1sq!r}")
    t = 2.0 - k1sq
    return t / math.sqrt(t * t + 3.0 * k1sq * k1sq)
