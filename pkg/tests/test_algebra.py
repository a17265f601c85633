"""Sector signatures, Lanczos coefficients, Cartan phases and root data."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from krylov_lie.algebra import (CARTAN_A3, CARTAN_B3, HW, SU2, SU11, RootData, SectorSignature,
                                cartan_phase, cartan_phase_rate, coupling_function,
                                effective_coupling, lanczos_coefficient, lanczos_coefficients,
                                validate_commuting_sectors, virasoro_weight)
from krylov_lie.drives import Constant, DriveEnvelope, RotatingField, SechPulse
from krylov_lie.errors import DomainError
from krylov_lie.reference import build_rep


def spin_raising(j):
    """J+ in the |j, m> basis ordered m = -j, ..., j (textbook matrix elements)."""
    ms = np.arange(-j, j + 1)
    d = ms.size
    jp = np.zeros((d, d))
    for k in range(d - 1):
        m = ms[k]
        jp[k + 1, k] = math.sqrt((j - m) * (j + m + 1))
    return jp


def su11_raising(kappa, dim):
    """K+ |kappa, n> = sqrt((n + 1)(n + 2 kappa)) |kappa, n + 1> (discrete series)."""
    kp = np.zeros((dim, dim))
    for n in range(dim - 1):
        kp[n + 1, n] = math.sqrt((n + 1) * (n + 2 * kappa))
    return kp


@given(st.integers(min_value=1, max_value=40))
def test_su2_coefficients_match_spin_matrices(two_j):
    j = two_j / 2
    b = lanczos_coefficients(SectorSignature.su2(j), two_j)
    ref = np.diagonal(spin_raising(j), -1)
    np.testing.assert_allclose(b**2, ref**2, rtol=1e-12, atol=0)


@given(st.floats(min_value=0.05, max_value=20.0), st.integers(min_value=2, max_value=60))
def test_su11_coefficients_match_discrete_series(kappa, dim):
    b = lanczos_coefficients(SectorSignature.su11(kappa, dim), dim - 1)
    ref = np.diagonal(su11_raising(kappa, dim), -1)
    np.testing.assert_allclose(b**2 / ref**2, 1.0, rtol=1e-12, atol=0)


def test_hw_coefficients_are_sqrt_n():
    b = lanczos_coefficients(SectorSignature.heisenberg_weyl(50), 49)
    np.testing.assert_allclose(b, np.sqrt(np.arange(1, 50)), rtol=1e-15)


@pytest.mark.parametrize("sector", [SectorSignature.su2(2.5), SectorSignature.su11(0.75, 40),
                                    SectorSignature.heisenberg_weyl(40)])
def test_matrix_rep_closes_the_algebra(sector):
    rep = build_rep(sector)
    assert rep.commutator_defect() < 1e-12
    np.testing.assert_allclose(rep.ladder, lanczos_coefficients(sector, sector.dim - 1))


def test_su2_chain_terminates():
    s = SectorSignature.su2(1.5)
    assert s.dim == 4
    assert lanczos_coefficient(s, 4) == 0.0
    assert lanczos_coefficient(s, 0) == 0.0
    with pytest.raises(DomainError):
        lanczos_coefficients(s, 5)


@pytest.mark.parametrize("kwargs", [dict(sigma=3), dict(sigma=SU2, lowest_weight=-0.3),
                                    dict(sigma=SU2, lowest_weight=0.5),
                                    dict(sigma=SU11, lowest_weight=0.0),
                                    dict(sigma=SU11, lowest_weight=math.inf),
                                    dict(sigma=SU2, lowest_weight=-1, dim=5),
                                    dict(sigma=HW, dim=0)])
def test_invalid_signatures(kwargs):
    with pytest.raises(DomainError):
        SectorSignature(**kwargs)


def test_signature_helpers():
    s = SectorSignature.su2(1)
    assert s.j == 1 and not s.is_truncated and s.with_dim(99) is s
    q = SectorSignature.su11(0.25, 64)
    assert q.is_truncated and q.with_dim(128).dim == 128
    assert SectorSignature.heisenberg_weyl(10).lowest_weight == 0.0
    with pytest.raises(AttributeError):
        q.j
    assert s.to_dict() == {"sigma": 1, "lowest_weight": -1.0, "dim": 3}


def test_complexity_algebra_constants_against_matrices():
    """[L, B] = A K + G with K = L0 - lambda, L = L+ + L-, B = L+ - L-."""
    for sector in (SectorSignature.su2(2), SectorSignature.su11(0.6, 30)):
        rep = build_rep(sector)
        L, B = rep.Lp + rep.Lm, rep.Lp - rep.Lm
        K = rep.L0 - sector.lowest_weight * np.eye(sector.dim)
        a, g = sector.complexity_algebra
        lhs = L @ B - B @ L
        rhs = a * K + g * np.eye(sector.dim)
        m = sector.dim - 1 if sector.is_truncated else sector.dim
        np.testing.assert_allclose(lhs[:m, :m], rhs[:m, :m], atol=1e-12)


def test_cartan_phase_is_row_weighted_integral():
    drive = DriveEnvelope(SechPulse(1.0, 1.0), (Constant(0.3), SechPulse(0.7, 2.0), Constant(-0.2)))
    row = (2, -1, 0)
    for t in (0.0, 0.4, 3.0, 11.0):
        ref = sum(w * quad(lambda s, g=g: g.value(s), 0, t)[0] for w, g in zip(row, drive.cartan_drives))
        assert abs(cartan_phase(drive, row, t) - ref) < 1e-12
        rate = sum(w * g.value(t) for w, g in zip(row, drive.cartan_drives))
        assert abs(cartan_phase_rate(drive, row, t) - rate) < 1e-14


def test_effective_coupling_and_callable():
    drive = DriveEnvelope(RotatingField(0.8, 0.5), (RotatingField(0.8, 0.5, part="cartan"),))
    gamma = coupling_function(drive, (1,))
    t = 2.3
    expect = np.exp(1j * math.cos(0.8) * t) * 0.5 * math.sin(0.8) * np.exp(-0.5j * t)
    assert abs(gamma(t) - expect) < 1e-15
    assert abs(effective_coupling(drive, (1,), t) - expect) < 1e-15
    assert gamma.breakpoints == ()
    with pytest.raises(DomainError):
        coupling_function(drive, (1, 2))


def test_virasoro_weight_from_commutator():
    """b_1^2 = <h| L_k L_-k |h> / k^2 = (2 k h + c (k^3 - k) / 12) / k^2."""
    for h, c, k in [(0.5, 1.0, 3), (0.0, 0.5, 2), (1.25, 25.0, 1)]:
        s = virasoro_weight(h, c, k)
        b1sq = (2 * k * h + c * (k**3 - k) / 12.0) / k**2
        assert abs(lanczos_coefficient(s, 1) ** 2 - b1sq) < 1e-12
    with pytest.raises(DomainError):
        virasoro_weight(0.0, 1.0, 1)
    with pytest.raises(DomainError):
        virasoro_weight(0.5, 1.0, 0)


def test_root_data_and_commuting_sectors():
    a3 = RootData(tuple(map(tuple, CARTAN_A3)), (1, 3))
    assert validate_commuting_sectors(a3)
    assert a3.cartan_row(1) == (2, -1, 0)
    bad = validate_commuting_sectors(RootData(tuple(map(tuple, CARTAN_A3)), (1, 2)))
    assert not bad and bad.offending_pairs == ((1, 2),)
    assert "(1,2)" in bad.diagnostic
    b3 = RootData(tuple(map(tuple, CARTAN_B3)), (1, 3))
    assert validate_commuting_sectors(b3) and b3.cartan_row(3) == (0, -1, 2)
    assert not validate_commuting_sectors(RootData(tuple(map(tuple, CARTAN_B3)), (2, 3)))


@pytest.mark.parametrize("matrix, roots", [
    (((2, 1), (1, 2)), (1,)),
    (((2, -1), (-1, 3)), (1,)),
    (((2, -1), (-1, 2)), (3,)),
    (((2, -1), (-1, 2)), (1, 1)),
    (((2, -1, 0), (-1, 2, -1)), (1,)),
])
def test_root_data_validation(matrix, roots):
    with pytest.raises(DomainError):
        RootData(matrix, roots)
