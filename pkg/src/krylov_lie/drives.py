"""Time-dependent drive envelopes.

Every envelope exposes ``value(t)`` and the closed-form running integral
``integral(t) = int_0^t value``. Envelopes with a ``part`` field describe
one physical protocol that feeds both the ladder coupling and a Cartan
drive; ``part="coupling"`` and ``part="cartan"`` select which function
the instance evaluates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

import numpy as np
from scipy import integrate

from .errors import ConfigError, DomainError

_PARTS = ("coupling", "cartan")


def _check_finite(**params: float) -> None:
    for name, v in params.items():
        if not np.all(np.isfinite(np.asarray(v, dtype=complex))):
            raise DomainError(f"envelope parameter {name}={v!r} is not finite")


def _check_part(part: str) -> None:
    if part not in _PARTS:
        raise DomainError(f"part must be one of {_PARTS}, got {part!r}")


class Envelope:
    """Base class for drive envelopes."""

    tag: str = ""

    def value(self, t):
        raise NotImplementedError

    def integral(self, t):
        raise NotImplementedError

    def __call__(self, t):
        return self.value(t)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Times where the envelope is not smooth."""
        return ()

    @property
    def is_real(self) -> bool:
        return True

    def to_dict(self) -> dict[str, Any]:
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(Envelope):
    """Time-independent value."""

    value_: complex = 0.0
    tag = "Constant"

    def __post_init__(self):
        _check_finite(value=self.value_)

    def value(self, t):
        return self.value_ + 0.0 * np.asarray(t, dtype=float)

    def integral(self, t):
        return self.value_ * np.asarray(t, dtype=float)

    @property
    def is_real(self) -> bool:
        return complex(self.value_).imag == 0.0

    def to_dict(self):
        v = complex(self.value_)
        return {"tag": self.tag, "value": v.real if v.imag == 0 else [v.real, v.imag]}


@dataclass(frozen=True)
class SechPulse(Envelope):
    """``omega0 * sech(t / T)``."""

    omega0: float
    T: float
    tag = "SechPulse"

    def __post_init__(self):
        _check_finite(omega0=self.omega0, T=self.T)
        if self.T <= 0:
            raise DomainError("SechPulse width T must be positive")

    def value(self, t):
        return self.omega0 / np.cosh(np.asarray(t, dtype=float) / self.T)

    def integral(self, t):
        t = np.asarray(t, dtype=float)
        return 2.0 * self.omega0 * self.T * np.arctan(np.tanh(t / (2.0 * self.T)))

    def to_dict(self):
        return {"tag": self.tag, "omega0": self.omega0, "T": self.T}


@dataclass(frozen=True)
class PiecewiseConstantQuench(Envelope):
    """Sudden frequency quench ``omega0 -> omega1 -> omega0`` of a dilated oscillator.

    The coupling part is the squeezing amplitude ``2 f0`` on ``[0, tau)`` and
    zero afterwards; the Cartan part is ``g0`` on ``[0, tau)`` and ``omega0``
    afterwards. Used with Cartan weight 2 it reproduces ``gamma = 2 f e^{2i G}``.
    """

    omega0: float
    omega1: float
    tau: float
    part: str = "coupling"
    tag = "PiecewiseConstantQuench"

    def __post_init__(self):
        _check_finite(omega0=self.omega0, omega1=self.omega1, tau=self.tau)
        _check_part(self.part)
        if self.omega0 <= 0 or self.omega1 <= 0:
            raise DomainError("quench frequencies must be positive")
        if self.tau <= 0:
            raise DomainError("quench duration tau must be positive")

    @property
    def f0(self) -> float:
        return (self.omega1**2 - self.omega0**2) / (4.0 * self.omega0)

    @property
    def g0(self) -> float:
        return (self.omega1**2 + self.omega0**2) / (2.0 * self.omega0)

    def value(self, t):
        t = np.asarray(t, dtype=float)
        on = (t >= 0) & (t < self.tau)
        if self.part == "coupling":
            return np.where(on, 2.0 * self.f0, 0.0)
        return np.where(on, self.g0, self.omega0)

    def integral(self, t):
        t = np.asarray(t, dtype=float)
        during = np.clip(t, 0.0, self.tau)
        if self.part == "coupling":
            return 2.0 * self.f0 * during
        return self.g0 * during + self.omega0 * np.maximum(t - self.tau, 0.0)

    @property
    def breakpoints(self):
        return (self.tau,)

    def to_dict(self):
        return {"tag": self.tag, "omega0": self.omega0, "omega1": self.omega1,
                "tau": self.tau, "part": self.part}


@dataclass(frozen=True)
class RotatingField(Envelope):
    """Field of strength ``h`` at polar angle ``theta0`` rotating at rate ``Omega``.

    coupling: ``(h/2) sin(theta0) e^{-i Omega t}``; cartan: ``h cos(theta0)``.
    """

    theta0: float
    Omega: float
    h: float = 1.0
    part: str = "coupling"
    tag = "RotatingField"

    def __post_init__(self):
        _check_finite(theta0=self.theta0, Omega=self.Omega, h=self.h)
        _check_part(self.part)

    def value(self, t):
        t = np.asarray(t, dtype=float)
        if self.part == "coupling":
            return 0.5 * self.h * math.sin(self.theta0) * np.exp(-1j * self.Omega * t)
        return self.h * math.cos(self.theta0) + 0.0 * t

    def integral(self, t):
        t = np.asarray(t, dtype=float)
        if self.part == "cartan":
            return self.h * math.cos(self.theta0) * t
        amp = 0.5 * self.h * math.sin(self.theta0)
        if self.Omega == 0:
            return amp * t + 0j
        return amp * (np.exp(-1j * self.Omega * t) - 1.0) / (-1j * self.Omega)

    @property
    def is_real(self) -> bool:
        return self.part == "cartan"

    def to_dict(self):
        return {"tag": self.tag, "theta0": self.theta0, "Omega": self.Omega,
                "h": self.h, "part": self.part}


@dataclass(frozen=True)
class DraggedCosine(Envelope):
    """Oscillator dragged along ``x0(t) = x0 cos(omega t)``.

    coupling: ``-sqrt(m omega^3 / 2) x0 cos(omega t)``; cartan: ``omega``
    (number-operator frequency, Cartan weight 1).
    """

    x0: float
    omega: float
    m: float = 1.0
    part: str = "coupling"
    tag = "DraggedCosine"

    def __post_init__(self):
        _check_finite(x0=self.x0, omega=self.omega, m=self.m)
        _check_part(self.part)
        if self.m <= 0 or self.omega <= 0:
            raise DomainError("DraggedCosine needs m > 0 and omega > 0")

    @property
    def scale(self) -> float:
        return -math.sqrt(self.m * self.omega**3 / 2.0) * self.x0

    def value(self, t):
        t = np.asarray(t, dtype=float)
        if self.part == "coupling":
            return self.scale * np.cos(self.omega * t)
        return self.omega + 0.0 * t

    def integral(self, t):
        t = np.asarray(t, dtype=float)
        if self.part == "coupling":
            return self.scale * np.sin(self.omega * t) / self.omega
        return self.omega * t

    def to_dict(self):
        return {"tag": self.tag, "x0": self.x0, "omega": self.omega, "m": self.m,
                "part": self.part}


@dataclass(frozen=True)
class Tabulated(Envelope):
    """Piecewise-linear interpolation of complex samples.

    The running integral is exact for the interpolant (trapezoid sums), so no
    quadrature tolerance enters.
    """

    times: tuple[float, ...]
    values: tuple[complex, ...]
    tag = "Tabulated"
    _t: np.ndarray = field(init=False, repr=False, compare=False)
    _v: np.ndarray = field(init=False, repr=False, compare=False)
    _cum: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if t.ndim != 1 or t.shape != v.shape or t.size < 2:
            raise DomainError("Tabulated needs matching 1-d times/values with >= 2 samples")
        _check_finite(times=t, values=v)
        if np.any(np.diff(t) <= 0):
            raise DomainError("Tabulated times must be strictly increasing")
        cum = np.concatenate([[0.0], np.cumsum(0.5 * np.diff(t) * (v[1:] + v[:-1]))])
        object.__setattr__(self, "_t", t)
        object.__setattr__(self, "_v", v)
        object.__setattr__(self, "_cum", cum)

    def _check_domain(self, t: np.ndarray) -> None:
        if np.any(t < self._t[0]) or np.any(t > self._t[-1]):
            raise DomainError(
                f"Tabulated envelope evaluated outside [{self._t[0]}, {self._t[-1]}]")

    def value(self, t):
        t = np.asarray(t, dtype=float)
        self._check_domain(t)
        out = np.interp(t, self._t, self._v.real) + 1j * np.interp(t, self._t, self._v.imag)
        return out.real if self.is_real else out

    def _primitive(self, t: np.ndarray):
        k = np.clip(np.searchsorted(self._t, t, side="right") - 1, 0, self._t.size - 2)
        dt = t - self._t[k]
        slope = (self._v[k + 1] - self._v[k]) / (self._t[k + 1] - self._t[k])
        return self._cum[k] + self._v[k] * dt + 0.5 * slope * dt**2

    def integral(self, t):
        t = np.asarray(t, dtype=float)
        self._check_domain(t)
        self._check_domain(np.asarray(0.0))
        out = self._primitive(t) - self._primitive(np.asarray(0.0))
        return out.real if self.is_real else out

    @property
    def breakpoints(self):
        return tuple(float(x) for x in self._t)

    @property
    def is_real(self) -> bool:
        return bool(np.all(self._v.imag == 0))

    def to_dict(self):
        vals = [[v.real, v.imag] for v in self._v]
        return {"tag": self.tag, "times": list(map(float, self._t)), "values": vals}


@dataclass(frozen=True)
class ConstantPhase(Envelope):
    """``r(t) e^{i delta}`` with real amplitude ``r``.

    ``amplitude`` is either another real envelope (closed-form integral) or a
    plain callable, in which case the integral falls back to adaptive
    Gauss-Kronrod quadrature unless ``amplitude_integral`` is supplied.
    """

    amplitude: Envelope | Callable[[float], float]
    phase: float = 0.0
    amplitude_integral: Callable[[float], float] | None = None
    tag = "ConstantPhase"

    def __post_init__(self):
        _check_finite(phase=self.phase)
        if isinstance(self.amplitude, Envelope) and not self.amplitude.is_real:
            raise DomainError("ConstantPhase amplitude must be real-valued")

    def _r(self, t):
        if isinstance(self.amplitude, Envelope):
            return self.amplitude.value(t)
        return np.vectorize(self.amplitude, otypes=[float])(t)

    def _r_integral(self, t):
        if isinstance(self.amplitude, Envelope):
            return self.amplitude.integral(t)
        if self.amplitude_integral is not None:
            return np.vectorize(self.amplitude_integral, otypes=[float])(t)

        def quad(x):
            val, _ = integrate.quad(self.amplitude, 0.0, x, epsabs=1e-12, epsrel=1e-12,
                                    limit=200)
            return val
        return np.vectorize(quad, otypes=[float])(t)

    def value(self, t):
        out = self._r(np.asarray(t, dtype=float)) * np.exp(1j * self.phase)
        return out.real if self.is_real else out

    def integral(self, t):
        out = self._r_integral(np.asarray(t, dtype=float)) * np.exp(1j * self.phase)
        return out.real if self.is_real else out

    @property
    def breakpoints(self):
        if isinstance(self.amplitude, Envelope):
            return self.amplitude.breakpoints
        return ()

    @property
    def is_real(self) -> bool:
        return self.phase == 0.0

    def to_dict(self):
        if not isinstance(self.amplitude, Envelope):
            raise ConfigError("ConstantPhase with a Python callable cannot be serialized")
        return {"tag": self.tag, "amplitude": self.amplitude.to_dict(), "phase": self.phase}


@dataclass(frozen=True)
class DriveEnvelope:
    """Ladder coupling ``f(t)`` plus the Cartan drives ``g_i(t)``."""

    coupling: Envelope
    cartan_drives: tuple[Envelope, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "cartan_drives", tuple(self.cartan_drives))
        for g in self.cartan_drives:
            if not g.is_real:
                raise DomainError("Cartan drives must be real-valued")

    @property
    def breakpoints(self) -> tuple[float, ...]:
        pts = set(self.coupling.breakpoints)
        for g in self.cartan_drives:
            pts.update(g.breakpoints)
        return tuple(sorted(pts))


# --- (de)serialization -----------------------------------------------------

_FIELDS: dict[str, tuple[type, dict[str, str], set[str]]] = {
    # tag: (class, json-key -> attribute, required keys)
    "Constant": (Constant, {"value": "value_"}, {"value"}),
    "SechPulse": (SechPulse, {"omega0": "omega0", "T": "T"}, {"omega0", "T"}),
    "PiecewiseConstantQuench": (
        PiecewiseConstantQuench,
        {"omega0": "omega0", "omega1": "omega1", "tau": "tau", "part": "part"},
        {"omega0", "omega1", "tau"}),
    "RotatingField": (
        RotatingField,
        {"theta0": "theta0", "Omega": "Omega", "h": "h", "part": "part"},
        {"theta0", "Omega"}),
    "DraggedCosine": (
        DraggedCosine,
        {"x0": "x0", "omega": "omega", "m": "m", "part": "part"},
        {"x0", "omega"}),
}


def _complex(v: Any) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ConfigError(f"complex value must be [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"expected a number, got {v!r}")
    return float(v)


def envelope_from_dict(doc: Mapping[str, Any]) -> Envelope:
    """Build an envelope from its JSON form ``{"tag": ..., params...}``.

    Unknown tags and unknown keys are rejected.
    """
    if not isinstance(doc, Mapping) or "tag" not in doc:
        raise ConfigError(f"envelope must be an object with a 'tag', got {doc!r}")
    tag = doc["tag"]
    params = {k: v for k, v in doc.items() if k != "tag"}
    try:
        if tag == "Tabulated":
            extra = set(params) - {"times", "values"}
            if extra or {"times", "values"} - set(params):
                raise ConfigError(f"Tabulated takes exactly 'times' and 'values' (got {sorted(params)})")
            return Tabulated(tuple(float(x) for x in params["times"]),
                             tuple(_complex(v) for v in params["values"]))
        if tag == "ConstantPhase":
            extra = set(params) - {"amplitude", "phase"}
            if extra or "amplitude" not in params:
                raise ConfigError(f"ConstantPhase takes 'amplitude' and optional 'phase' (got {sorted(params)})")
            return ConstantPhase(envelope_from_dict(params["amplitude"]),
                                 float(params.get("phase", 0.0)))
        if tag not in _FIELDS:
            raise ConfigError(f"unknown envelope tag {tag!r}")
        cls, keymap, required = _FIELDS[tag]
        unknown = set(params) - set(keymap)
        if unknown:
            raise ConfigError(f"unknown keys for {tag}: {sorted(unknown)}")
        missing = required - set(params)
        if missing:
            raise ConfigError(f"missing keys for {tag}: {sorted(missing)}")
        kwargs = {}
        for key, val in params.items():
            if key == "part":
                kwargs["part"] = str(val)
            elif key == "value":
                kwargs["value_"] = _complex(val)
            else:
                kwargs[keymap[key]] = float(_complex(val).real)
        return cls(**kwargs)
    except DomainError as exc:
        raise ConfigError(f"invalid {tag} envelope: {exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid {tag} envelope: {exc}") from exc


def drive_from_dict(drive: Mapping[str, Any], cartan_drives: Sequence[Mapping[str, Any]] = ()) -> DriveEnvelope:
    return DriveEnvelope(envelope_from_dict(drive),
                         tuple(envelope_from_dict(g) for g in cartan_drives))
