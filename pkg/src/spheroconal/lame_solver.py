"""Polynomial eigenfunctions of the one-coordinate equation.

For each degree l and species prefactor, the operator
``-d^2/dchi^2 + l(l+1) k^2 sn^2(chi)`` maps the finite family
{prefactor * sn^(2s)} into itself. Its matrix in that basis is tridiagonal;
the eigenvalues h and the recurrence-normalized coefficient vectors
(leading coefficient fixed to 1) define the polynomial solutions used to
assemble the two-coordinate harmonics.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import math

import mpmath
import numpy as np

from .errors import DegenerateEigenvalues, WrongKind
from .polyalg import SnPoly, Species, differentiate

__all__ = ["LamePolynomial", "matrix_size", "build_matrix", "solve", "apply_operator"]


@dataclass(frozen=True)
class LamePolynomial:
    """One eigenstate of the one-coordinate operator.

    Attributes
    ----------
    ell : int
        Degree of the parent harmonic.
    species : Species
        Prefactor letters.
    n : int
        Node count on the requested coordinate side.
    h : float
        Separation eigenvalue.
    poly : SnPoly
        The full block (prefactor and polynomial part), coeffs[0] = 1.
    """

    ell: int
    species: Species
    n: int
    h: float
    poly: SnPoly


def matrix_size(ell: int, species: Species) -> int:
    """Dimension of the invariant polynomial family for (ell, species).

    The letter count must have the parity of ell (WrongKind otherwise).
    Across the four species of matching parity the sizes sum to 2*ell + 1.
    """
    if ell < 0:
        raise ValueError(f"degree must be nonnegative, got {ell}")
    n_letters = len(species.letters)
    if (ell - n_letters) % 2 != 0:
        raise WrongKind(
            f"species {species.tag(1)!r} has wrong parity for degree {ell}"
        )
    if ell % 2 == 0:
        return ell // 2 + 1 if n_letters == 0 else ell // 2
    return (ell + 1) // 2 if n_letters == 1 else (ell - 1) // 2


def apply_operator(p: SnPoly, ell: int) -> SnPoly:
    """Image of a block under -d^2/dchi^2 + l(l+1) k^2 sn^2."""
    minus_dd = differentiate(differentiate(p))
    shifted = (0.0,) + p.coeffs  # multiplication by sn^2
    n = max(len(minus_dd.coeffs), len(shifted))
    lam = ell * (ell + 1) * p.ksq
    out = [0.0] * n
    for i, ci in enumerate(minus_dd.coeffs):
        out[i] -= ci
    for i, ci in enumerate(shifted):
        out[i] += lam * ci
    return SnPoly(p.species, tuple(out), p.ksq)


def build_matrix(ell: int, species: Species, ksq: float) -> np.ndarray:
    """Tridiagonal matrix of the operator on {prefactor * sn^(2s)}, s < N.

    Column j holds the coefficients of the image of basis element j. The
    top-degree coefficient of the last column cancels identically; a small
    numerical remainder there is asserted and dropped.
    """
    n = matrix_size(ell, species)
    mat = np.zeros((n, n))
    for j in range(n):
        basis = SnPoly(species, (0.0,) * j + (1.0,), ksq)
        image = apply_operator(basis, ell)
        coeffs = np.asarray(image.coeffs)
        if len(coeffs) > n:
            overflow = np.abs(coeffs[n:]).max()
            scale = max(np.abs(coeffs).max(), 1.0)
            if overflow > 1e-10 * scale:
                raise AssertionError(
                    f"family not invariant at degree {ell}: overflow {overflow:.3e}"
                )
            coeffs = coeffs[:n]
        mat[: len(coeffs), j] = coeffs
    return mat


def _coefficients(mat: np.ndarray, h: float) -> tuple[float, ...]:
    """Eigenvector from the three-term recurrence, normalized to a0 = 1."""
    n = mat.shape[0]
    a = np.zeros(n)
    a[0] = 1.0
    for i in range(n - 1):
        acc = (h - mat[i, i]) * a[i]
        if i > 0:
            acc -= mat[i, i - 1] * a[i - 1]
        step = mat[i, i + 1]
        if abs(step) < 1e-12:
            raise DegenerateEigenvalues(
                f"vanishing recurrence step at row {i}; cannot normalize to a0 = 1"
            )
        a[i + 1] = acc / step
    return tuple(a)


# Dyadic interpolation nodes at which the float matrix pipeline is exact,
# plus an extra node guarding the assumed degree bound in k^2.
_KSQ_NODES = (
    Fraction(0),
    Fraction(1, 4),
    Fraction(1, 2),
    Fraction(3, 4),
    Fraction(1),
)
_KSQ_GUARD = Fraction(1, 8)


@lru_cache(maxsize=None)
def _entry_polynomials(ell: int, species: Species) -> tuple:
    """Every matrix entry as an exact polynomial in k^2.

    The eigenvalue problem is badly non-normal at large degree, where even
    the last-bit rounding of entries built at a generic k^2 moves the
    eigenvalues by a million times machine epsilon. Entries are low-degree
    polynomials in k^2 with rational coefficients, and the float pipeline
    evaluated at small dyadic k^2 is exact (every intermediate is a modest
    dyadic rational), so interpolation through dyadic nodes recovers those
    polynomials exactly without a parallel symbolic implementation. The
    guard node catches any violation of the assumed degree bound.
    """
    n = matrix_size(ell, species)
    if n == 0:
        return ()
    mats = [build_matrix(ell, species, float(x)) for x in _KSQ_NODES]
    lagrange = []
    for i, xi in enumerate(_KSQ_NODES):
        num = [Fraction(1)]
        den = Fraction(1)
        for j, xj in enumerate(_KSQ_NODES):
            if j == i:
                continue
            out = [Fraction(0)] * (len(num) + 1)
            for d, a in enumerate(num):
                out[d] -= a * xj
                out[d + 1] += a
            num = out
            den *= xi - xj
        lagrange.append([a / den for a in num])
    guard = build_matrix(ell, species, float(_KSQ_GUARD))
    rows = []
    for r in range(n):
        row = []
        for c in range(n):
            poly = [Fraction(0)] * len(_KSQ_NODES)
            for mat, lag in zip(mats, lagrange):
                v = Fraction(mat[r, c])
                for d, a in enumerate(lag):
                    poly[d] += v * a
            probe = sum(a * _KSQ_GUARD**d for d, a in enumerate(poly))
            if probe != Fraction(guard[r, c]):
                raise AssertionError(
                    f"entry ({r},{c}) of degree {ell} species {species.tag(1)!r} "
                    "is not the assumed low-degree polynomial in k^2"
                )
            row.append(tuple(poly))
        rows.append(tuple(row))
    return tuple(rows)


def _exact_matrix(ell: int, species: Species, ksq: float) -> list:
    """Entries at the exact rational image of the (binary) float ksq."""
    entries = _entry_polynomials(ell, species)
    big_k = Fraction(ksq)
    powers = [big_k**d for d in range(len(_KSQ_NODES))]
    return [
        [sum(a * powers[d] for d, a in enumerate(cell)) for cell in row]
        for row in entries
    ]


def _aberth(coeffs: list, seeds: np.ndarray, digits: int, scale: float):
    """Simultaneous real-root refinement from float-quality starting points.

    Returns the refined roots, or None when the iteration cannot be
    trusted (coincident iterates or no convergence), in which case the
    caller falls back to a seed-free root finder.
    """
    # Corrections shrink cubically until they hit the evaluation-noise
    # floor; anything below 1e-25 of scale is far outside float64 anyway.
    tol = mpmath.mpf("1e-25") * scale
    z = [mpmath.mpf(float(s)) for s in seeds]
    prev = mpmath.inf
    for _ in range(40):
        worst = mpmath.mpf(0)
        nxt = []
        for i, zi in enumerate(z):
            value = mpmath.mpf(0)
            slope = mpmath.mpf(0)
            for c in coeffs:
                slope = slope * zi + value
                value = value * zi + c
            if value == 0:
                nxt.append(zi)
                continue
            if slope == 0:
                return None
            ratio = value / slope
            repel = mpmath.mpf(0)
            for j, zj in enumerate(z):
                if j != i:
                    gap = zi - zj
                    if gap == 0:
                        return None
                    repel += 1 / gap
            step = ratio / (1 - ratio * repel)
            nxt.append(zi - step)
            worst = max(worst, abs(step))
        z = nxt
        if worst < tol:
            return z
        if worst > 4 * prev:
            return None
        prev = worst
    return None


def _eigenvalues(exact: list, ell: int, species: Species) -> np.ndarray:
    """Ascending eigenvalues from the exact characteristic polynomial.

    Nonsymmetric QR on the float matrix is not good enough here (see
    _entry_polynomials), so the characteristic polynomial is accumulated
    exactly through the principal-minor recurrence and its roots (all real
    and simple for an unreduced tridiagonal) are located in arbitrary
    precision, with enough working digits to absorb both the coefficient
    growth and the root sensitivity. QR still earns its keep: its
    eigenvalues seed the refinement, which otherwise starts blind.
    """
    n = len(exact)
    if n == 1:
        return np.array([float(exact[0][0])])
    p_prev = [Fraction(1)]
    p = [exact[0][0], Fraction(-1)]
    for i in range(1, n):
        q = exact[i - 1][i] * exact[i][i - 1]
        d = exact[i][i]
        nxt = [Fraction(0)] * (len(p) + 1)
        for j, a in enumerate(p):
            nxt[j] += a * d
            nxt[j + 1] -= a
        for j, b in enumerate(p_prev):
            nxt[j] -= q * b
        p_prev, p = p, nxt
    scale = max(2.0, max(abs(float(row[i])) for row in exact for i in range(n)))
    digits = 40 + int(n * math.log10(scale))
    with mpmath.workdps(digits):
        coeffs = [
            mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator) for c in reversed(p)
        ]
        seeds = np.sort(np.linalg.eigvals(
            np.array([[float(v) for v in row] for row in exact])
        ).real)
        refined = None
        if np.diff(seeds).min() > 1e-5 * scale:
            refined = _aberth(coeffs, seeds, digits, scale)
        if refined is not None:
            return np.sort(np.array([float(r) for r in refined]))
        roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=2 * digits)
        imag = max(abs(r.imag) for r in roots)
        if imag > 1e-10 * scale:
            raise DegenerateEigenvalues(
                f"complex characteristic roots in species {species.tag(1)!r} "
                f"at degree {ell}"
            )
        return np.sort(np.array([float(r.real) for r in roots]))


@lru_cache(maxsize=None)
def _solve_cached(ell: int, species: Species, ksq: float) -> tuple[tuple[float, tuple[float, ...]], ...]:
    n = matrix_size(ell, species)
    if n == 0:
        return ()
    mat = build_matrix(ell, species, ksq)
    hs = _eigenvalues(_exact_matrix(ell, species, ksq), ell, species)
    scale = max(1.0, float(np.abs(hs).max()))
    if n > 1 and np.diff(hs).min() < 1e-13 * scale:
        raise DegenerateEigenvalues(
            f"eigenvalue spacing below tolerance in species {species.tag(1)!r} at degree {ell}"
        )
    return tuple((float(h), _coefficients(mat, float(h))) for h in hs)


def solve(ell: int, species: Species, ksq: float, side: int = 1) -> list[LamePolynomial]:
    """All eigenstates for (ell, species, ksq), ordered by ascending h.

    Node counts follow the species ladder of the requested coordinate side:
    n = node_base(side) + 2 * rank. The polynomial blocks themselves do not
    depend on the side.
    """
    pairs = _solve_cached(ell, species, ksq)
    base = species.node_base(side)
    return [
        LamePolynomial(
            ell=ell,
            species=species,
            n=base + 2 * rank,
            h=h,
            poly=SnPoly(species, coeffs, ksq),
        )
        for rank, (h, coeffs) in enumerate(pairs)
    ]
