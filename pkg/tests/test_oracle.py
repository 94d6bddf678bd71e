"""Finite-difference oracle: grids, stencil operators, basis fits."""

import numpy as np
import pytest

from spheroconal.elliptic import quarter_period
from spheroconal.errors import GridTooCoarse, RankDeficient
from spheroconal.harmonics import build_basis, evaluate
from spheroconal.oracle import (
    GridField,
    cartesian_rotor_energies,
    fd_operator,
    fit_in_basis,
    make_grid,
    state_field,
)


def test_make_grid_shape_and_bounds(mid_config):
    chi1, chi2 = make_grid(mid_config)
    for chi, ksq in ((chi1, mid_config.k1sq), (chi2, mid_config.k2sq)):
        assert chi.shape == (160,)
        steps = np.diff(chi)
        assert steps.min() > 0
        assert np.ptp(steps) < 1e-12
        assert np.abs(chi).max() < quarter_period(ksq)
    with pytest.raises(ValueError, match="at least 40 points"):
        make_grid(mid_config, n=39)


def test_grid_field_validation():
    good = np.linspace(0.0, 1.0, 12)
    with pytest.raises(ValueError, match="at least 9 points"):
        GridField(good[:5], good, np.zeros((5, 12)))
    crooked = good.copy()
    crooked[3] += 1e-3
    with pytest.raises(ValueError, match="uniform and increasing"):
        GridField(crooked, good, np.zeros((12, 12)))
    with pytest.raises(ValueError, match="does not match grids"):
        GridField(good, good, np.zeros((12, 5)))


def test_state_field_samples_the_wavefunction(mid_config):
    chi1, chi2 = make_grid(mid_config, n=48)
    state = build_basis(2, mid_config)[0]
    field = state_field(state, chi1, chi2)
    assert field.values.shape == (48, 48)
    assert np.array_equal(field.values, evaluate(state, chi1, chi2))


def rayleigh(kind, state, config, n=160):
    """Regression estimate of the eigenvalue of one stencil operator."""
    chi1, chi2 = make_grid(config, n=n)
    field = state_field(state, chi1, chi2)
    inner = field.values[4:-4, 4:-4]
    out = fd_operator(kind, field, config)
    return float(np.sum(inner * out.values) / np.sum(inner * inner))


def test_stencil_eigenvalues_degree2_and_3(mid_config):
    for ell in (2, 3):
        for state in build_basis(ell, mid_config):
            lam = rayleigh("L2", state, mid_config)
            assert abs(lam / (ell * (ell + 1)) - 1.0) < 1e-5, (ell, state.label)
            mu = rayleigh("Hstar", state, mid_config)
            scale = max(1.0, abs(state.estar2) / 2.0)
            assert abs(mu - state.estar2 / 2.0) < 1e-5 * scale, (ell, state.label)


def test_stencil_angular_momentum_kills_the_constant(mid_config):
    chi1, chi2 = make_grid(mid_config, n=64)
    (ground,) = build_basis(0, mid_config)
    field = state_field(ground, chi1, chi2)
    for kind in ("Lx", "Ly", "Lz"):
        out = fd_operator(kind, field, mid_config)
        assert np.abs(out.values).max() < 1e-10, kind


def test_stencil_refuses_coarse_grids(mid_config):
    chi1, chi2 = make_grid(mid_config, n=40)
    state = build_basis(3, mid_config)[0]
    with pytest.raises(GridTooCoarse, match="step-doubling disagreement"):
        fd_operator("L2", state_field(state, chi1, chi2), mid_config)


def test_unknown_operator_kind(mid_config):
    chi1, chi2 = make_grid(mid_config, n=48)
    (ground,) = build_basis(0, mid_config)
    with pytest.raises(ValueError, match="unknown operator kind"):
        fd_operator("Qx", state_field(ground, chi1, chi2), mid_config)


def test_fit_recovers_scaled_member(mid_config):
    chi1, chi2 = make_grid(mid_config, n=64)
    basis = build_basis(2, mid_config)
    target = state_field(basis[1], chi1, chi2)
    scaled = GridField(chi1, chi2, 2.5 * target.values)
    coeffs, residual = fit_in_basis(scaled, basis)
    assert residual < 1e-10
    assert coeffs[1] == pytest.approx(2.5, abs=1e-10)
    others = np.delete(coeffs, 1)
    assert np.abs(others).max() < 1e-10


def test_fit_rejects_out_of_band_content(mid_config):
    chi1, chi2 = make_grid(mid_config, n=64)
    intruder = build_basis(4, mid_config)[2]
    _, residual = fit_in_basis(state_field(intruder, chi1, chi2), build_basis(2, mid_config))
    assert residual > 0.1


def test_fit_degenerate_basis_and_empty_basis(mid_config):
    chi1, chi2 = make_grid(mid_config, n=64)
    state = build_basis(1, mid_config)[0]
    field = state_field(state, chi1, chi2)
    with pytest.raises(RankDeficient, match="condition number"):
        fit_in_basis(field, [state, state])
    with pytest.raises(ValueError, match="at least one state"):
        fit_in_basis(field, [])


def test_cartesian_route_agrees_with_elliptic(mid_config, modulus_config):
    _, cfg = modulus_config
    for config in (mid_config, cfg):
        for ell in (1, 2):
            want = sorted(s.estar2 for s in build_basis(ell, config))
            got = cartesian_rotor_energies(ell, config)
            assert np.max(np.abs(np.asarray(want) - got)) < 1e-10, ell
    with pytest.raises(ValueError, match="degrees 1 and 2"):
        cartesian_rotor_energies(3, mid_config)
