"""Wei-Norman parameters ``U = e^{z L+} e^{eta L0} e^{w L-}`` for rank-one drives.

The ODE is integrated in the 2x2 defining representation, where the
propagator reads ``[[A, sigma w A], [B, .]]`` with ``A = e^{-eta/2}`` and
``B = z A``. That chart has no poles and keeps ``|A|^2 + sigma |B|^2 = 1``
up to integration error; ``(z, eta, w)`` are read off afterwards. The direct
Riccati chart is kept in :func:`integrate_riccati` for cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .algebra import SU2, SU11, SectorSignature
from .errors import DomainError, IntegrationError

DEFAULT_TOL = 1e-10
ODE_METHOD = "RK45"
#: Local tolerance handed to the stepper, relative to the requested ``tol``.
#: Three decades of headroom keep the accumulated global error below ``tol``
#: over spans of a few hundred oscillation periods.
LOCAL_TOL_FACTOR = 1e-3
#: Smallest local tolerance handed to the stepper (scipy floors rtol at 100 eps).
MIN_LOCAL_TOL = 2.5e-14
SU11_EDGE = 1.0 - 1e-12
#: Phase increments this close to +-pi are treated as exact pole crossings.
PI_TIE = 1e-6


@dataclass(frozen=True)
class WNState:
    """Wei-Norman parameters at time ``t``.

    ``A`` and ``B`` are the pole-free pair ``(e^{-eta/2}, z e^{-eta/2})``.
    At an su(2) pole (``A == 0``) ``z``, ``eta`` and ``w`` are NaN.
    """

    t: float
    z: complex
    eta: complex
    w: complex
    A: complex
    B: complex

    @property
    def at_pole(self) -> bool:
        return self.A == 0


def unitarity_defect(state: WNState, sigma: int) -> float:
    return abs(abs(state.A) ** 2 + sigma * abs(state.B) ** 2 - 1.0)


def wn_state_from_pair(t: float, A: complex, B: complex, w: complex | None = None,
                       log_abs_and_arg: tuple[float, float] | None = None) -> WNState:
    """Assemble a :class:`WNState` from ``(A, B)``.

    ``w`` defaults to ``-conj(B)/A``, which holds for any SU(2) or SU(1,1)
    element. ``log_abs_and_arg`` supplies a branch-continuous ``log A``.
    """
    A = complex(A)
    B = complex(B)
    if A == 0:
        nan = complex(math.nan, math.nan)
        return WNState(float(t), nan, nan, nan, A, B)
    if log_abs_and_arg is None:
        log_abs_and_arg = (math.log(abs(A)), math.atan2(A.imag, A.real))
    eta = -2.0 * complex(*log_abs_and_arg)
    if w is None:
        w = -B.conjugate() / A
    return WNState(float(t), B / A, eta, complex(w), A, B)


@dataclass(frozen=True)
class ProjectiveState:
    """Linearizing pair ``(u, u_dot)`` with ``z = -u_dot / (i sigma gamma* u)``.

    For the physical flow ``u = A`` and ``u_dot = -i sigma gamma* B``.
    """

    u: complex
    u_dot: complex
    t: float

    def z(self, sigma: int, gamma_t: complex) -> complex:
        return -self.u_dot / (1j * sigma * np.conj(gamma_t) * self.u)


def projective_state(state: WNState, sigma: int, gamma_t: complex) -> ProjectiveState:
    return ProjectiveState(state.A, -1j * sigma * np.conj(gamma_t) * state.B, state.t)


@dataclass(frozen=True)
class HWDisplacement:
    """Heisenberg-Weyl propagator data ``U = e^{i Phi} e^{-i alpha a^dag - i alpha* a}``."""

    t: float
    alpha: complex
    phi: float


# --- integration helpers ---------------------------------------------------

def _check_grid(grid: Sequence[float]) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise DomainError("grid must be a nonempty 1-d sequence")
    if g[0] != 0.0:
        raise DomainError("grid must start at t = 0")
    if np.any(np.diff(g) < 0):
        raise DomainError("grid must be ascending")
    return g


def _breakpoints_of(fn) -> tuple[float, ...]:
    return tuple(getattr(fn, "breakpoints", ()) or ())


def _solve(rhs: Callable, y0: np.ndarray, grid: np.ndarray, breakpoints: Iterable[float],
           tol: float, method: str = ODE_METHOD):
    """Integrate piecewise between breakpoints.

    Returns ``(Y_grid, T_all, Y_all)`` where ``T_all``/``Y_all`` merge the
    integrator's internal step points with the grid (for phase unwrapping).
    """
    t_end = grid[-1]
    cuts = sorted({0.0, t_end, *(b for b in breakpoints if 0.0 < b < t_end)})
    y = np.asarray(y0)
    y_grid = np.empty((grid.size, y.size), dtype=y.dtype)
    t_all: list[np.ndarray] = []
    y_all: list[np.ndarray] = []
    filled = np.zeros(grid.size, dtype=bool)
    if t_end == 0.0:
        y_grid[:] = y
        return y_grid, np.array([0.0]), y[None, :]
    for a, b in zip(cuts[:-1], cuts[1:]):
        local = max(tol * LOCAL_TOL_FACTOR, MIN_LOCAL_TOL)
        sol = solve_ivp(rhs, (a, b), y, method=method, rtol=local, atol=local,
                        dense_output=True)
        if not sol.success:
            raise IntegrationError(f"integration failed on [{a}, {b}]: {sol.message}")
        mask = (grid >= a) & (grid <= b) & ~filled
        pts = grid[mask]
        ts = np.union1d(sol.t, pts)
        ys = sol.sol(ts).T
        # step endpoints are exact; keep them rather than interpolated copies
        idx = np.searchsorted(ts, sol.t)
        ys[idx] = sol.y.T
        y_grid[mask] = ys[np.searchsorted(ts, pts)]
        filled |= mask
        t_all.append(ts)
        y_all.append(ys)
        y = sol.y[:, -1]
    return y_grid, np.concatenate(t_all), np.concatenate(y_all)


def _continuous_log(t_all: np.ndarray, a_all: np.ndarray, grid: np.ndarray):
    """Unwrapped ``arg A`` on ``grid`` from a finely sampled path.

    When ``A`` passes through an su(2) pole the increment is ``+-pi`` and its
    sign is decided by roundoff; such ties are resolved to ``+pi``, the limit
    of ``arg(cos x + i r sin x)`` for ``r -> 0+`` used by the closed forms.
    """
    order = np.argsort(t_all, kind="stable")
    t_sorted = t_all[order]
    ang = np.angle(a_all[order])
    step = (np.diff(ang) + np.pi) % (2.0 * np.pi) - np.pi
    step[np.abs(np.abs(step) - np.pi) < PI_TIE] = np.pi
    arg = np.concatenate([[ang[0]], ang[0] + np.cumsum(step)])
    idx = np.searchsorted(t_sorted, grid, side="left")
    idx = np.clip(idx, 0, t_sorted.size - 1)
    return arg[idx]


# --- Wei-Norman integration ------------------------------------------------

def integrate_wn(sector: SectorSignature, gamma: Callable[[float], complex],
                 grid: Sequence[float], tol: float = DEFAULT_TOL) -> list[WNState]:
    """Integrate the Wei-Norman flow for ``H = gamma L+ + gamma* L-``.

    Args:
        sector: su(2) or su(1,1) sector (only ``sigma`` is used).
        gamma: interaction-picture coupling; a ``breakpoints`` attribute, if
            present, splits the integration at drive discontinuities.
        grid: ascending output times starting at 0.
        tol: target accuracy; the embedded Runge-Kutta 5(4) pair runs with
            local tolerance ``tol * LOCAL_TOL_FACTOR``.

    Returns:
        One :class:`WNState` per grid time, with ``eta`` branch-continuous.

    Raises:
        IntegrationError: step-size failure, or an su(1,1) trajectory
            reaching ``|z| >= 1 - 1e-12``.
    """
    sigma = sector.sigma
    if sigma not in (SU2, SU11):
        raise DomainError("integrate_wn needs an su(2) or su(1,1) sector")
    if tol <= 0:
        raise DomainError("tol must be positive")
    g = _check_grid(grid)

    def rhs(t, y):
        c = gamma(t)
        cs = sigma * np.conj(c)
        m00, m01, m10, m11 = y
        return np.array([-1j * cs * m10, -1j * cs * m11, -1j * c * m00, -1j * c * m01])

    y0 = np.array([1, 0, 0, 1], dtype=complex)
    y_grid, t_all, y_all = _solve(rhs, y0, g, _breakpoints_of(gamma), tol)
    if sigma == SU11:
        a_all, b_all = y_all[:, 0], y_all[:, 2]
        zmax = np.max(np.abs(b_all) / np.abs(a_all))
        if zmax >= SU11_EDGE:
            raise IntegrationError(f"su(1,1) trajectory reached |z| = {zmax:.15f} >= 1")
    arg = _continuous_log(t_all, y_all[:, 0], g)
    states = []
    for k, t in enumerate(g):
        m00, m01, m10, _ = y_grid[k]
        if m00 == 0:
            states.append(wn_state_from_pair(t, m00, m10))
            continue
        w = sigma * m01 / m00
        states.append(wn_state_from_pair(t, m00, m10, w, (math.log(abs(m00)), arg[k])))
    return states


def integrate_riccati(sector: SectorSignature, gamma: Callable[[float], complex],
                      grid: Sequence[float], tol: float = DEFAULT_TOL) -> list[WNState]:
    """Integrate ``(z, eta, w)`` directly in the Riccati chart.

    Cross-check only: for su(2) this blows up at poles of ``z``.
    """
    sigma = sector.sigma
    if sigma not in (SU2, SU11):
        raise DomainError("integrate_riccati needs an su(2) or su(1,1) sector")
    g = _check_grid(grid)

    def rhs(t, y):
        c = gamma(t)
        z, eta, _ = y
        cs = np.conj(c)
        return np.array([-1j * c + 1j * sigma * cs * z * z,
                         2j * sigma * cs * z,
                         -1j * cs * np.exp(eta)])

    y_grid, _, _ = _solve(rhs, np.zeros(3, dtype=complex), g, _breakpoints_of(gamma), tol)
    out = []
    for t, (z, eta, w) in zip(g, y_grid):
        A = np.exp(-eta / 2)
        out.append(WNState(float(t), complex(z), complex(eta), complex(w), complex(A), complex(z * A)))
    return out


# --- closed forms ----------------------------------------------------------

def _continuous_arg(x: float, r: float) -> float:
    """Continuous ``arg(cos x + i r sin x)`` along ``x`` from 0 (r != 0)."""
    base = math.atan2(r * math.sin(x), math.cos(x))
    if r == 0:
        return base
    return base + math.copysign(2.0 * math.pi, r) * math.floor((x + math.pi) / (2.0 * math.pi))


def closed_form_constant_phase(sigma: int, R: float, delta: float = 0.0, t: float = 0.0) -> WNState:
    """Solution for ``gamma = e^{i delta} r(t)`` with pulse area ``R = int r``.

    su(2): ``z = -i e^{i delta} tan R``, ``eta = -2 ln cos R``;
    su(1,1): ``tanh``/``cosh`` in place of ``tan``/``cos``.
    """
    if sigma == SU2:
        A, S = math.cos(R), math.sin(R)
    elif sigma == SU11:
        A, S = math.cosh(R), math.sinh(R)
    else:
        raise DomainError("constant-phase closed form needs sigma = +-1")
    B = -1j * np.exp(1j * delta) * S
    if A == 0:
        return wn_state_from_pair(t, 0.0, B)
    # A is real: continuous log picks up i*pi per sign change of cos R
    arg = math.pi * math.floor(R / math.pi + 0.5) if sigma == SU2 else 0.0
    return wn_state_from_pair(t, A, B, log_abs_and_arg=(math.log(abs(A)), arg))


def closed_form_quench(omega0: float, omega1: float, t: float, tau: float = math.inf) -> WNState:
    """Frequency-quench solution of the su(1,1) (kappa = 1/4) Wei-Norman flow.

    ``z = -2i f0 e^{2i g0 t} sin(w1 t) / (w1 cos(w1 t) + i g0 sin(w1 t))`` and
    ``eta = 2i g0 t - 2 ln[cos(w1 t) + i (g0/w1) sin(w1 t)]`` with
    ``f0 = (w1^2 - w0^2)/(4 w0)``, ``g0 = (w1^2 + w0^2)/(2 w0)``. Frozen for
    ``t > tau``.
    """
    if omega0 <= 0 or omega1 <= 0:
        raise DomainError("quench frequencies must be positive")
    s = min(float(t), tau)
    f0 = (omega1**2 - omega0**2) / (4.0 * omega0)
    g0 = (omega1**2 + omega0**2) / (2.0 * omega0)
    x = omega1 * s
    r = g0 / omega1
    q = complex(math.cos(x), r * math.sin(x))
    A = np.exp(-1j * g0 * s) * q
    B = -2j * (f0 / omega1) * np.exp(1j * g0 * s) * math.sin(x)
    log_abs = math.log(abs(q))
    arg = _continuous_arg(x, r) - g0 * s
    return wn_state_from_pair(t, A, B, log_abs_and_arg=(log_abs, arg))


def closed_form_rotating(theta0: float, Omega: float, t: float) -> WNState:
    """Spin in a field rotating at ``Omega`` (unit strength, polar angle ``theta0``).

    With detuning ``delta = Omega - cos(theta0)`` and Rabi frequency
    ``Omega_R = sqrt(delta^2 + sin^2 theta0)``.
    """
    delta = Omega - math.cos(theta0)
    rabi = math.hypot(delta, math.sin(theta0))
    if rabi == 0:
        return wn_state_from_pair(t, 1.0, 0.0)
    x = 0.5 * rabi * t
    c, s = math.cos(x), math.sin(x)
    r = -delta / rabi
    q = complex(c, r * s)
    A = np.exp(0.5j * delta * t) * q
    B = -1j * (math.sin(theta0) / rabi) * np.exp(-0.5j * delta * t) * s
    if q == 0:
        return wn_state_from_pair(t, 0.0, B)
    w = -1j * math.sin(theta0) * s / (rabi * q)
    arg = _continuous_arg(x, r) + 0.5 * delta * t
    return wn_state_from_pair(t, A, B, w, (math.log(abs(q)), arg))


# --- Heisenberg-Weyl -------------------------------------------------------

def hw_displacement(gamma: Callable[[float], complex], grid: Sequence[float],
                    tol: float = DEFAULT_TOL) -> list[HWDisplacement]:
    """Displacement ``alpha = int gamma`` and phase ``Phi`` with ``dPhi/dt = Im[gamma conj(alpha)]``."""
    g = _check_grid(grid)

    def rhs(t, y):
        c = complex(gamma(t))
        alpha = complex(y[0], y[1])
        return np.array([c.real, c.imag, (c * alpha.conjugate()).imag])

    y_grid, _, _ = _solve(rhs, np.zeros(3), g, _breakpoints_of(gamma), tol)
    return [HWDisplacement(float(t), complex(y[0], y[1]), float(y[2])) for t, y in zip(g, y_grid)]


def dragged_alpha(x0: float, omega: float, t, m: float = 1.0):
    """Closed-form displacement of the oscillator dragged along ``x0 cos(omega t)``."""
    t = np.asarray(t, dtype=float)
    scale = -x0 * math.sqrt(m * omega**3 / 2.0)
    return scale * (t / 2.0 + (np.exp(2j * omega * t) - 1.0) / (4j * omega))


def dragged_complexity(x0: float, omega: float, t, m: float = 1.0):
    """``K(t) = (m w^3 x0^2 / 8) [t^2 + (t/w) sin(2wt) + sin^2(wt)/w^2]``."""
    t = np.asarray(t, dtype=float)
    return (m * omega**3 * x0**2 / 8.0) * (
        t**2 + (t / omega) * np.sin(2 * omega * t) + np.sin(omega * t) ** 2 / omega**2)
