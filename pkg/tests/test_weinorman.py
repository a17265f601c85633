"""Wei-Norman integration against closed forms and the dense propagator."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from krylov_lie.algebra import SU2, SU11, SectorSignature, coupling_function
from krylov_lie.drives import Constant, ConstantPhase, DriveEnvelope, PiecewiseConstantQuench, \
    RotatingField, SechPulse
from krylov_lie.errors import DomainError, IntegrationError
from krylov_lie.reference import build_rep, integrate_schrodinger, wn_product_matrix
from krylov_lie.weinorman import (closed_form_constant_phase, closed_form_quench,
                                  closed_form_rotating, dragged_alpha, dragged_complexity,
                                  hw_displacement, integrate_riccati, integrate_wn,
                                  projective_state, unitarity_defect, wn_state_from_pair)


def sech_gamma(omega0, T, delta=0.0):
    return coupling_function(DriveEnvelope(ConstantPhase(SechPulse(omega0, T), delta)))


@pytest.mark.parametrize("sigma", [SU2, SU11])
def test_constant_phase_closed_form(sigma):
    sector = SectorSignature.su2(1) if sigma == SU2 else SectorSignature.su11(0.5)
    omega0, T, delta = 0.9, 1.2, 0.7
    env = SechPulse(omega0, T)
    grid = np.linspace(0, 8, 401)
    states = integrate_wn(sector, sech_gamma(omega0, T, delta), grid)
    for s in states:
        ref = closed_form_constant_phase(sigma, float(env.integral(s.t)), delta, s.t)
        assert abs(s.A - ref.A) < 1e-9 and abs(s.B - ref.B) < 1e-9
        if sigma == SU11 or abs(ref.A) > 1e-3:
            assert abs(s.eta - ref.eta) < 1e-8


def test_su2_pole_crossings_follow_closed_form_branch():
    """A pulse of one-sided area 1.1 pi crosses the pole of z at R = pi/2.

    At each crossing arg A jumps by pi (Im eta by -2 pi); away from the
    crossings eta is smooth and matches the closed-form branch.
    """
    T = 1.0
    env = SechPulse(2.2, T)  # one-sided area 1.1 pi
    grid = np.linspace(0, 12, 1201)
    states = integrate_wn(SectorSignature.su2(0.5), sech_gamma(2.2, T), grid)
    jumps = np.diff([s.eta.imag for s in states])
    assert np.sum(np.abs(jumps) > 1.0) == 1
    for s in states[::10]:
        ref = closed_form_constant_phase(SU2, float(env.integral(s.t)), 0.0, s.t)
        if abs(ref.A) > 1e-3:
            assert abs(s.eta - ref.eta) < 1e-8
    assert max(unitarity_defect(s, SU2) for s in states) < 1e-9


@pytest.mark.parametrize("Omega", [0.5, 1.0, 2.0])
def test_rotating_closed_form(Omega):
    drive = DriveEnvelope(RotatingField(1.0, Omega), (RotatingField(1.0, Omega, part="cartan"),))
    grid = np.linspace(0, 15, 301)
    for s in integrate_wn(SectorSignature.su2(1), coupling_function(drive, (1,)), grid):
        ref = closed_form_rotating(1.0, Omega, s.t)
        assert abs(s.z - ref.z) < 1e-8
        assert abs(s.eta - ref.eta) < 1e-8
        assert abs(s.w - ref.w) < 1e-8


def test_quench_closed_form_and_freeze():
    w0, w1, tau = 0.6, 2.0, 3.0
    drive = DriveEnvelope(PiecewiseConstantQuench(w0, w1, tau),
                          (PiecewiseConstantQuench(w0, w1, tau, part="cartan"),))
    grid = np.linspace(0, 5, 501)
    states = integrate_wn(SectorSignature.su11(0.25), coupling_function(drive, (2,)), grid)
    for s in states:
        ref = closed_form_quench(w0, w1, s.t, tau)
        if s.t <= tau:
            assert abs(s.z - ref.z) < 1e-9
            assert abs(s.eta - ref.eta) < 1e-8
        else:
            # the Cartan drive keeps rotating z after the quench; |z| is frozen
            assert abs(abs(s.z) - abs(ref.z)) < 1e-9


def test_riccati_chart_agrees_away_from_poles():
    gamma = sech_gamma(0.5, 1.0, 0.3)
    grid = np.linspace(0, 6, 121)
    for sector in (SectorSignature.su2(1), SectorSignature.su11(0.5)):
        a = integrate_wn(sector, gamma, grid)
        b = integrate_riccati(sector, gamma, grid)
        for x, y in zip(a, b):
            assert abs(x.z - y.z) < 1e-9 and abs(x.eta - y.eta) < 1e-9 and abs(x.w - y.w) < 1e-9


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 2.0), st.floats(-2.0, 2.0), st.floats(0.0, math.pi))
def test_product_matches_dense_propagator_su2(h, Omega, theta0):
    drive = DriveEnvelope(RotatingField(theta0, Omega, h), (RotatingField(theta0, Omega, h, "cartan"),))
    gamma = coupling_function(drive, (1,))
    sector = SectorSignature.su2(1.5)
    rep = build_rep(sector)
    grid = np.linspace(0, 3, 7)
    states = integrate_wn(sector, gamma, grid)
    cols = [integrate_schrodinger(lambda t: rep.hamiltonian(gamma(t)), e, grid)
            for e in np.eye(rep.dim)]
    for k, s in enumerate(states):
        if abs(s.A) < 1e-3:
            continue  # the product chart is singular at poles
        U = np.array([c[k] for c in cols]).T
        assert np.max(np.abs(wn_product_matrix(rep, s) - U)) < 1e-8


def test_product_first_column_matches_truncated_oracle_su11():
    sector = SectorSignature.su11(0.75, 60)
    gamma = sech_gamma(0.6, 1.0, -0.2)
    grid = np.linspace(0, 4, 9)
    states = integrate_wn(sector, gamma, grid)
    big = build_rep(sector.with_dim(120))
    psi = integrate_schrodinger(lambda t: big.hamiltonian(gamma(t)), np.eye(120)[0], grid)
    rep = build_rep(sector)
    for k, s in enumerate(states):
        col = wn_product_matrix(rep, s)[:, 0]
        assert np.max(np.abs(col - psi[k, :60])) < 1e-9


def test_su11_edge_raises():
    gamma = coupling_function(DriveEnvelope(Constant(5.0)))
    with pytest.raises(IntegrationError):
        integrate_wn(SectorSignature.su11(0.5), gamma, np.linspace(0, 5, 11))


def test_grid_semantics_and_errors():
    gamma = sech_gamma(1.0, 1.0)
    grid = [0.0, 0.1, 0.1, 0.35]
    states = integrate_wn(SectorSignature.su2(1), gamma, grid)
    assert [s.t for s in states] == grid
    assert states[1].A == states[2].A
    with pytest.raises(DomainError):
        integrate_wn(SectorSignature.su2(1), gamma, [0.0, 0.2, 0.1])
    with pytest.raises(DomainError):
        integrate_wn(SectorSignature.su2(1), gamma, [0.1, 0.2])
    with pytest.raises(DomainError):
        integrate_wn(SectorSignature.heisenberg_weyl(8), gamma, [0.0, 1.0])
    with pytest.raises(DomainError):
        integrate_wn(SectorSignature.su2(1), gamma, [0.0, 1.0], tol=0.0)


def test_pair_helpers():
    s = wn_state_from_pair(0.0, 0.0, 1.0)
    assert s.at_pole and math.isnan(s.z.real) and math.isnan(s.eta.real)
    A, B = 0.6 + 0.0j, 0.8j
    s = wn_state_from_pair(1.0, A, B)
    assert abs(s.w + np.conj(B) / A) < 1e-15
    assert unitarity_defect(s, SU2) < 1e-15
    p = projective_state(s, SU2, 0.4 - 0.3j)
    assert abs(p.z(SU2, 0.4 - 0.3j) - s.z) < 1e-15


def test_hw_displacement_dragged():
    x0, omega, m = 0.5, 2.0, 1.3
    from krylov_lie.drives import DraggedCosine
    drive = DriveEnvelope(DraggedCosine(x0, omega, m), (DraggedCosine(x0, omega, m, "cartan"),))
    grid = np.linspace(0, 6, 601)
    disp = hw_displacement(coupling_function(drive, (1,)), grid)
    alpha = np.array([d.alpha for d in disp])
    np.testing.assert_allclose(alpha, dragged_alpha(x0, omega, grid, m), atol=1e-9, rtol=0)
    np.testing.assert_allclose(np.abs(alpha) ** 2, dragged_complexity(x0, omega, grid, m),
                               atol=1e-8, rtol=0)


def test_hw_state_matches_truncated_oracle():
    """e^{i Phi} e^{-i(alpha a^dag + alpha* a)} |0> against the matrix evolution."""
    from krylov_lie.krylov import hw_wavefunction
    gamma = coupling_function(DriveEnvelope(RotatingField(1.0, 0.7)))
    grid = np.linspace(0, 3, 7)
    disp = hw_displacement(gamma, grid)
    rep = build_rep(SectorSignature.heisenberg_weyl(80))
    psi = integrate_schrodinger(lambda t: rep.hamiltonian(gamma(t)), np.eye(80)[0], grid)
    for k, d in enumerate(disp):
        assert np.max(np.abs(hw_wavefunction(d, 40).amplitudes - psi[k, :40])) < 1e-9
