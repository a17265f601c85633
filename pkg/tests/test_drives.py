"""Envelopes: closed-form integrals against quadrature, serialization."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from krylov_lie.drives import (Constant, ConstantPhase, DraggedCosine, DriveEnvelope,
                               PiecewiseConstantQuench, RotatingField, SechPulse, Tabulated,
                               drive_from_dict, envelope_from_dict)
from krylov_lie.errors import ConfigError, DomainError


def quad_integral(env, t):
    pts = [b for b in env.breakpoints if 0 < b < t] or None
    re = quad(lambda s: np.real(env.value(s)), 0, t, points=pts, limit=200, epsabs=1e-13)[0]
    im = quad(lambda s: np.imag(env.value(s)), 0, t, points=pts, limit=200, epsabs=1e-13)[0]
    return complex(re, im)


ENVELOPES = [
    Constant(0.7),
    Constant(0.2 - 0.5j),
    SechPulse(1.3, 0.8),
    PiecewiseConstantQuench(0.6, 2.0, 1.5),
    PiecewiseConstantQuench(0.6, 2.0, 1.5, part="cartan"),
    RotatingField(1.1, 0.5, 2.0),
    RotatingField(1.1, 0.0),
    RotatingField(1.1, 0.5, part="cartan"),
    DraggedCosine(0.5, 2.0, 1.5),
    DraggedCosine(0.5, 2.0, part="cartan"),
    Tabulated((0.0, 0.5, 1.0, 4.0), (0.0, 1.0 + 1j, -0.5, 0.25)),
    ConstantPhase(SechPulse(1.0, 2.0), 0.9),
    ConstantPhase(lambda t: math.exp(-t * t), -0.4),
]


@pytest.mark.parametrize("env", ENVELOPES, ids=lambda e: type(e).__name__)
@pytest.mark.parametrize("t", [0.0, 0.3, 1.5, 3.7])
def test_integral_matches_quadrature(env, t):
    assert abs(complex(env.integral(t)) - quad_integral(env, t)) < 1e-10


@settings(max_examples=50)
@given(st.floats(0.1, 3.0), st.floats(0.1, 3.0), st.floats(0.0, 20.0))
def test_sech_integral_property(omega0, T, t):
    env = SechPulse(omega0, T)
    assert abs(env.integral(t) - quad(env.value, 0, t, epsabs=1e-13)[0]) < 1e-9
    # one-sided area is pi omega0 T / 2
    assert abs(env.integral(1e3 * T) - 0.5 * math.pi * omega0 * T) < 1e-9


def test_quench_parts():
    c = PiecewiseConstantQuench(0.6, 2.0, 10.0)
    g = PiecewiseConstantQuench(0.6, 2.0, 10.0, part="cartan")
    assert abs(c.value(1.0) - 2 * (4 - 0.36) / (4 * 0.6)) < 1e-15
    assert c.value(10.5) == 0.0
    assert abs(g.value(1.0) - (4 + 0.36) / (2 * 0.6)) < 1e-15
    assert g.value(10.5) == 0.6
    assert c.breakpoints == (10.0,)


def test_vectorized_values():
    t = np.linspace(0, 2, 5)
    for env in ENVELOPES[:-1]:
        assert np.shape(env.value(t)) == (5,)
        assert np.shape(env.integral(t)) == (5,)


def test_tabulated_domain():
    env = Tabulated((0.0, 1.0), (1.0, 2.0))
    assert abs(env.integral(1.0) - 1.5) < 1e-15
    with pytest.raises(DomainError):
        env.value(1.5)
    with pytest.raises(DomainError):
        Tabulated((0.0, 0.0), (1.0, 2.0))
    with pytest.raises(DomainError):
        Tabulated((0.0,), (1.0,))


def test_construction_errors():
    with pytest.raises(DomainError):
        SechPulse(1.0, 0.0)
    with pytest.raises(DomainError):
        Constant(math.nan)
    with pytest.raises(DomainError):
        RotatingField(1.0, 1.0, part="bogus")
    with pytest.raises(DomainError):
        DriveEnvelope(Constant(1.0), (Constant(1j),))
    with pytest.raises(DomainError):
        ConstantPhase(Constant(1j), 0.0)


@pytest.mark.parametrize("env", [e for e in ENVELOPES if not callable(getattr(e, "amplitude", None))
                                 or isinstance(getattr(e, "amplitude", None), SechPulse)],
                         ids=lambda e: type(e).__name__)
def test_dict_round_trip(env):
    back = envelope_from_dict(env.to_dict())
    for t in (0.0, 0.7, 2.9):
        assert abs(complex(back.value(t)) - complex(env.value(t))) < 1e-15
        assert abs(complex(back.integral(t)) - complex(env.integral(t))) < 1e-15


@pytest.mark.parametrize("doc", [
    {"tag": "Nope"},
    {"tag": "SechPulse", "omega0": 1.0},
    {"tag": "SechPulse", "omega0": 1.0, "T": 1.0, "extra": 2},
    {"tag": "Constant", "value": "x"},
    {"tag": "Constant", "value": [1.0, 2.0, 3.0]},
    {"tag": "Tabulated", "times": [0, 1]},
    {"tag": "ConstantPhase", "phase": 1.0},
    {"omega0": 1.0},
    [1, 2],
])
def test_bad_envelope_documents(doc):
    with pytest.raises(ConfigError):
        envelope_from_dict(doc)


def test_drive_from_dict():
    d = drive_from_dict({"tag": "SechPulse", "omega0": 1.0, "T": 2.0},
                        [{"tag": "Constant", "value": 0.3}])
    assert isinstance(d.coupling, SechPulse) and len(d.cartan_drives) == 1
    d2 = drive_from_dict({"tag": "PiecewiseConstantQuench", "omega0": 1, "omega1": 2, "tau": 3},
                         [{"tag": "Tabulated", "times": [0, 5], "values": [0, 1]}])
    assert 3.0 in d2.breakpoints
