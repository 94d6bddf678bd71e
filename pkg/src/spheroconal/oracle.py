"""Independent numerical checks: grid operators and Cartesian rotor spectra.

Everything here is deliberately redundant with the exact polynomial algebra:
differential operators are applied by fourth-order finite differences on a
grid over the elliptic coordinates, and low-degree spectra are recomputed in
a Cartesian monomial basis. Agreement between the two routes is what the
test suite (and the CLI verify mode) certifies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .asymmetry import AsymmetryConfig
from .elliptic import jacobi, quarter_period
from .errors import GridTooCoarse, RankDeficient
from .harmonics import SpheroconalHarmonic, evaluate

__all__ = [
    "GridField",
    "make_grid",
    "state_field",
    "fd_operator",
    "fit_in_basis",
    "cartesian_rotor_energies",
]

_KINDS = ("L2", "Hstar", "Lx", "Ly", "Lz", "Px", "Py", "Pz")


@dataclass(frozen=True, eq=False)
class GridField:
    """Sampled values on a tensor grid in the two elliptic coordinates."""

    chi1: np.ndarray
    chi2: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        chi1 = np.asarray(self.chi1, dtype=float)
        chi2 = np.asarray(self.chi2, dtype=float)
        values = np.asarray(self.values, dtype=float)
        for axis, chi in enumerate((chi1, chi2)):
            if chi.ndim != 1 or chi.size < 9:
                raise ValueError(f"axis {axis + 1} grid must be 1-d with at least 9 points")
            steps = np.diff(chi)
            if steps.min() <= 0 or np.ptp(steps) > 1e-9 * abs(steps.mean()):
                raise ValueError(f"axis {axis + 1} grid must be uniform and increasing")
        if values.shape != (chi1.size, chi2.size):
            raise ValueError(
                f"values shape {values.shape} does not match grids "
                f"({chi1.size}, {chi2.size})"
            )
        object.__setattr__(self, "chi1", chi1)
        object.__setattr__(self, "chi2", chi2)
        object.__setattr__(self, "values", values)


def make_grid(config: AsymmetryConfig, n: int = 160, margin: float = 0.88) -> tuple[np.ndarray, np.ndarray]:
    """Uniform grids spanning ``margin`` of each quarter-period box.

    The box stays clear of the corner |sn| = 1 on both axes, where the
    metric factor W vanishes and quotients lose accuracy.
    """
    if n < 40:
        raise ValueError(f"grids need at least 40 points, got {n}")
    k1 = quarter_period(config.k1sq)
    k2 = quarter_period(config.k2sq)
    chi1 = np.linspace(-margin * k1, margin * k1, n)
    chi2 = np.linspace(-margin * k2, margin * k2, n)
    return chi1, chi2


def state_field(state: SpheroconalHarmonic, chi1, chi2) -> GridField:
    """Sample one harmonic on a tensor grid."""
    return GridField(chi1, chi2, evaluate(state, chi1, chi2))


def _deriv(values: np.ndarray, h: float, axis: int, order: int, stride: int = 1) -> np.ndarray:
    """Fourth-order central derivative along one axis at spacing stride*h.

    Returns the derivative on the interior where the widest (stride = 2)
    stencil is defined, so results at different strides are comparable.
    """

    def shift(k: int) -> np.ndarray:
        lo = 4 + k * stride
        hi = values.shape[axis] - 4 + k * stride
        sl: list[slice] = [slice(None), slice(None)]
        sl[axis] = slice(lo, hi if hi != 0 else None)
        return values[tuple(sl)]

    hh = stride * h
    if order == 1:
        return (shift(-2) - 8.0 * shift(-1) + 8.0 * shift(1) - shift(2)) / (12.0 * hh)
    if order == 2:
        return (
            -shift(-2) + 16.0 * shift(-1) - 30.0 * shift(0) + 16.0 * shift(1) - shift(2)
        ) / (12.0 * hh * hh)
    raise ValueError(f"order must be 1 or 2, got {order}")


def _checked_deriv(values: np.ndarray, h: float, axis: int, order: int) -> np.ndarray:
    """Derivative with a Richardson step-doubling consistency check.

    The comparison scale includes the field magnitude so that fields with
    (near-)vanishing derivatives are not flagged on roundoff alone.
    """
    fine = _deriv(values, h, axis, order, stride=1)
    coarse = _deriv(values, h, axis, order, stride=2)
    scale = max(float(np.abs(fine).max()), float(np.abs(values).max()), 1e-30)
    gap = float(np.abs(fine - coarse).max()) / scale
    if gap > 1e-4:
        raise GridTooCoarse(
            f"step-doubling disagreement {gap:.3e} for axis-{axis + 1} "
            f"derivative of order {order}"
        )
    return fine


def fd_operator(kind: str, field: GridField, config: AsymmetryConfig) -> GridField:
    """Apply one separated operator to a sampled field by finite differences.

    Kinds
    -----
    ``L2``
        Squared angular momentum; eigenfields return l(l+1) times themselves.
    ``Hstar``
        Scaled asymmetry energy operator; eigenfields return (2E*)/2 times
        themselves.
    ``Lx``, ``Ly``, ``Lz``
        Angular momentum components, action divided by i*hbar (real fields).
    ``Px``, ``Py``, ``Pz``
        The angular derivative term of the linear momentum with the metric
        scale cancelled: the field r * d(psi)/d(x_i) restricted to the sphere.

    The output grids are trimmed to the interior where the widest stencil
    fits. GridTooCoarse is raised when step doubling shifts any requested
    derivative by more than 1e-4 relative.
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown operator kind {kind!r}; expected one of {_KINDS}")
    chi1, chi2, values = field.chi1, field.chi2, field.values
    h1 = float(chi1[1] - chi1[0])
    h2 = float(chi2[1] - chi2[0])
    inner1 = chi1[4:-4]
    inner2 = chi2[4:-4]

    s1, c1, d1 = jacobi(inner1, config.k1sq)
    s2, c2, d2 = jacobi(inner2, config.k2sq)
    u = (s1 * s1)[:, None]
    v = (s2 * s2)[None, :]
    w = 1.0 - config.k1sq * u - config.k2sq * v

    def col(x: np.ndarray) -> np.ndarray:
        return x[:, None]

    def row(x: np.ndarray) -> np.ndarray:
        return x[None, :]

    if kind in ("L2", "Hstar"):
        d11 = _checked_deriv(values, h1, 0, 2)[:, 4:-4]
        d22 = _checked_deriv(values, h2, 1, 2)[4:-4, :]
        if kind == "L2":
            out = -(d11 + d22) / w
        else:
            e1, e2, e3 = config.e
            coef1 = e1 - (e1 - e2) * v
            coef2 = e3 + (e2 - e3) * u
            out = -(coef1 * d11 + coef2 * d22) / (2.0 * w)
        return GridField(inner1, inner2, out)

    g1 = _checked_deriv(values, h1, 0, 1)[:, 4:-4]
    g2 = _checked_deriv(values, h2, 1, 1)[4:-4, :]
    a = config.k1sq
    b = config.k2sq
    if kind == "Lx":
        out = -(col(d1) * row(c2 * d2) * g1 + a * col(s1 * c1) * row(s2) * g2) / w
    elif kind == "Ly":
        out = -(-col(c1) * row(s2 * d2) * g1 + col(s1 * d1) * row(c2) * g2) / w
    elif kind == "Lz":
        out = -(-b * col(s1) * row(s2 * c2) * g1 - col(c1 * d1) * row(d2) * g2) / w
    elif kind == "Px":
        out = (-a * col(s1 * c1) * row(s2) * g1 + col(d1) * row(c2 * d2) * g2) / w
    elif kind == "Py":
        out = (-col(s1 * d1) * row(c2) * g1 - col(c1) * row(s2 * d2) * g2) / w
    else:  # Pz
        out = (col(c1 * d1) * row(d2) * g1 - b * col(s1) * row(s2 * c2) * g2) / w
    return GridField(inner1, inner2, out)


def fit_in_basis(field: GridField, basis: list[SpheroconalHarmonic]) -> tuple[np.ndarray, float]:
    """Least-squares expansion of a sampled field over harmonic states.

    Returns (coefficients, relative rms residual). Raises RankDeficient when
    the Gram matrix condition number exceeds 1e10 (near-dependent columns).
    """
    if not basis:
        raise ValueError("basis must contain at least one state")
    columns = [evaluate(s, field.chi1, field.chi2).ravel() for s in basis]
    design = np.column_stack(columns)
    gram = design.T @ design
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > 1e10:
        raise RankDeficient(f"basis Gram condition number {cond:.3e} exceeds 1e10")
    target = field.values.ravel()
    coeffs, *_ = np.linalg.lstsq(design, target, rcond=None)
    norm = float(np.linalg.norm(target))
    if norm == 0.0:
        return coeffs, 0.0
    residual = float(np.linalg.norm(design @ coeffs - target)) / norm
    return coeffs, residual


# ---------------------------------------------------------------------------
# Cartesian route for the low-degree spectra


def _mono_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for (i, j, k), a in p.items():
        for (r, s, t), b in q.items():
            key = (i + r, j + s, k + t)
            out[key] = out.get(key, 0.0) + a * b
    return out


def _mono_diff(p: dict, axis: int) -> dict:
    out: dict = {}
    for key, a in p.items():
        if key[axis] == 0:
            continue
        new = list(key)
        new[axis] -= 1
        out[tuple(new)] = out.get(tuple(new), 0.0) + a * key[axis]
    return out


def _rotation_generator(axis: int, p: dict) -> dict:
    """(y d/dz - z d/dy) and cyclic: the real generator L/(i*hbar) ... times -1.

    Any consistent sign convention works here because only squares enter.
    """
    j, k = [(1, 2), (2, 0), (0, 1)][axis]
    xj = {tuple(1 if i == j else 0 for i in range(3)): 1.0}
    xk = {tuple(1 if i == k else 0 for i in range(3)): 1.0}
    term1 = _mono_mul(xj, _mono_diff(p, k))
    term2 = _mono_mul(xk, _mono_diff(p, j))
    return {
        key: term1.get(key, 0.0) - term2.get(key, 0.0)
        for key in set(term1) | set(term2)
    }


def cartesian_rotor_energies(ell: int, config: AsymmetryConfig) -> np.ndarray:
    """Scaled energies 2E* of one multiplet from Cartesian polynomials.

    Builds the operator sum(e_i L_i^2)/2 directly on harmonic monomial bases
    (degree 1: x, y, z; degree 2: xy, xz, yz, x^2 - y^2, 2z^2 - x^2 - y^2)
    with no elliptic machinery, and returns its eigenvalues doubled and
    sorted ascending.
    """
    if ell == 1:
        basis = [
            {(1, 0, 0): 1.0},
            {(0, 1, 0): 1.0},
            {(0, 0, 1): 1.0},
        ]
    elif ell == 2:
        basis = [
            {(1, 1, 0): 1.0},
            {(1, 0, 1): 1.0},
            {(0, 1, 1): 1.0},
            {(2, 0, 0): 1.0, (0, 2, 0): -1.0},
            {(0, 0, 2): 2.0, (2, 0, 0): -1.0, (0, 2, 0): -1.0},
        ]
    else:
        raise ValueError(f"cartesian route implemented for degrees 1 and 2, got {ell}")

    monomials = sorted({key for p in basis for key in p})
    index = {key: i for i, key in enumerate(monomials)}

    def vec(p: dict) -> np.ndarray:
        out = np.zeros(len(monomials))
        for key, a in p.items():
            out[index[key]] = a
        return out

    span = np.column_stack([vec(p) for p in basis])
    hstar = np.zeros((len(basis), len(basis)))
    for axis, e_i in enumerate(config.e):
        for j, p in enumerate(basis):
            image = _rotation_generator(axis, _rotation_generator(axis, p))
            coeffs, *_ = np.linalg.lstsq(span, vec(image), rcond=None)
            # L_i^2 = -(hbar * generator)^2 with the i stripped: minus sign
            hstar[:, j] += -0.5 * e_i * coeffs
    eigs = np.linalg.eigvals(hstar)
    if np.abs(eigs.imag).max() > 1e-9 * max(1.0, np.abs(eigs).max()):
        raise AssertionError("cartesian spectrum should be real")
    return np.sort(2.0 * eigs.real)
