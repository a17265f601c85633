"""Brute-force oracles: explicit matrices, direct Schrodinger evolution, Lanczos.

Nothing here uses the Wei-Norman machinery, so agreement with the closed
forms is an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import eigh, eigh_tridiagonal

from .algebra import HW, SectorSignature, lanczos_coefficients
from .errors import DomainError, IntegrationError, TruncationError
from .generator import GeneratorParams, chain_coefficients, unitary_corner
from .weinorman import WNState


@dataclass(frozen=True)
class MatrixRep:
    """Dense ``L+``, ``L-``, ``L0`` in the lowest-weight basis.

    For Heisenberg-Weyl ``Lp = a^dag``, ``Lm = a`` and ``L0`` is the number
    operator.
    """

    sector: SectorSignature
    Lp: np.ndarray
    Lm: np.ndarray
    L0: np.ndarray

    @property
    def dim(self) -> int:
        return self.Lp.shape[0]

    @property
    def ladder(self) -> np.ndarray:
        """Subdiagonal of ``Lp``: ``b_1 .. b_{dim-1}``."""
        return np.real(np.diagonal(self.Lp, -1)).copy()

    def commutator_defect(self) -> float:
        """Max entry of ``[L+, L-] - 2 sigma L0`` (``[a, a^dag] - 1`` for HW).

        The last row and column are exempt for truncated sectors.
        """
        if self.sector.sigma == HW:
            diff = self.Lm @ self.Lp - self.Lp @ self.Lm - np.eye(self.dim)
        else:
            diff = self.Lp @ self.Lm - self.Lm @ self.Lp - 2 * self.sector.sigma * self.L0
        if self.sector.is_truncated:
            diff = diff[:-1, :-1]
        return float(np.max(np.abs(diff))) if diff.size else 0.0

    def hamiltonian(self, gamma_t: complex) -> np.ndarray:
        return gamma_t * self.Lp + np.conj(gamma_t) * self.Lm


def build_rep(sector: SectorSignature, dim: int | None = None) -> MatrixRep:
    """Matrix representation of ``sector``, optionally with another truncation."""
    if dim is not None:
        sector = sector.with_dim(dim)
    d = sector.dim
    b = lanczos_coefficients(sector, d - 1)
    Lp = np.zeros((d, d), dtype=complex)
    idx = np.arange(1, d)
    Lp[idx, idx - 1] = b
    n = np.arange(d, dtype=float)
    L0 = np.diag(n if sector.sigma == HW else sector.lowest_weight + n).astype(complex)
    return MatrixRep(sector, Lp, Lp.conj().T.copy(), L0)


# --- direct time evolution ---------------------------------------------------

def _step_counts(grid: np.ndarray, steps_per_unit: float) -> np.ndarray:
    return np.maximum(1, np.ceil(np.diff(grid) * steps_per_unit - 1e-9).astype(int))


def _check_grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size == 0 or np.any(np.diff(g) < 0):
        raise DomainError("grid must be a nonempty ascending sequence")
    return g


def direct_evolve(rep: MatrixRep, gamma: Callable[[float], complex], grid: Sequence[float],
                  steps_per_unit: float = 1000.0, psi0: np.ndarray | None = None) -> np.ndarray:
    """Midpoint-exponential evolution under ``H(t) = gamma L+ + gamma* L-``.

    Each step applies ``exp(-i dt H(t_mid))``. ``H`` is tridiagonal with
    couplings ``gamma b_n``, so ``H = |gamma| D T D^dag`` with a fixed real
    ``T`` and a diagonal phase ``D = diag(e^{i n arg gamma})``; ``T`` is
    diagonalized once and every step is exact for the frozen Hamiltonian.

    Returns:
        Array of shape ``(len(grid), dim)``: the state at every grid time,
        starting from ``psi0`` (default ``e_0``) at ``grid[0]``.
    """
    g = _check_grid(grid)
    dim = rep.dim
    psi = np.zeros(dim, dtype=complex)
    if psi0 is None:
        psi[0] = 1.0
    else:
        psi[:] = psi0
    out = np.empty((g.size, dim), dtype=complex)
    out[0] = psi
    if dim == 1:
        out[:] = psi
        return out
    energies, vecs = eigh_tridiagonal(np.zeros(dim), rep.ladder)
    vt = vecs.T.copy()
    n = np.arange(dim)
    for k, m in enumerate(_step_counts(g, steps_per_unit)):
        t0, t1 = g[k], g[k + 1]
        dt = (t1 - t0) / m
        for i in range(m):
            c = complex(gamma(t0 + (i + 0.5) * dt))
            phase = np.exp(1j * n * math.atan2(c.imag, c.real))
            x = vt @ (np.conj(phase) * psi)
            x *= np.exp(-1j * dt * abs(c) * energies)
            psi = phase * (vecs @ x)
        out[k + 1] = psi
    return out


def direct_evolve_hamiltonian(hamiltonian: Callable[[float], np.ndarray], psi0: np.ndarray,
                              grid: Sequence[float], steps_per_unit: float = 1000.0
                              ) -> np.ndarray:
    """Midpoint-exponential evolution for a generic Hermitian ``H(t)``.

    Every step diagonalizes ``H(t_mid)`` densely.
    """
    g = _check_grid(grid)
    psi = np.asarray(psi0, dtype=complex).copy()
    out = np.empty((g.size, psi.size), dtype=complex)
    out[0] = psi
    for k, m in enumerate(_step_counts(g, steps_per_unit)):
        t0, t1 = g[k], g[k + 1]
        dt = (t1 - t0) / m
        for i in range(m):
            e, v = eigh(hamiltonian(t0 + (i + 0.5) * dt))
            psi = v @ (np.exp(-1j * dt * e) * (v.conj().T @ psi))
        out[k + 1] = psi
    return out


def integrate_schrodinger(hamiltonian: Callable[[float], np.ndarray], psi0: np.ndarray,
                          grid: Sequence[float], tol: float = 1e-12,
                          breakpoints: Sequence[float] = ()) -> np.ndarray:
    """Adaptive high-order integration of ``i dpsi/dt = H(t) psi``.

    Used where the oracle has to beat the second-order midpoint rule by many
    digits (tensor-product checks at 1e-8).
    """
    g = _check_grid(grid)
    psi = np.asarray(psi0, dtype=complex).copy()
    out = np.empty((g.size, psi.size), dtype=complex)
    out[0] = psi
    cuts = sorted({*g.tolist(), *(b for b in breakpoints if g[0] < b < g[-1])})

    def rhs(t, y):
        return -1j * (hamiltonian(t) @ y)

    pos = {t: i for i, t in enumerate(g.tolist())}
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b > a:
            sol = solve_ivp(rhs, (a, b), psi, method="DOP853", rtol=tol, atol=tol)
            if not sol.success:
                raise IntegrationError(sol.message)
            psi = sol.y[:, -1]
        if b in pos:
            out[pos[b]] = psi
    return out


# --- Lanczos -----------------------------------------------------------------

@dataclass(frozen=True)
class LanczosResult:
    a: np.ndarray
    b: np.ndarray
    basis: np.ndarray

    @property
    def krylov_dim(self) -> int:
        return self.a.size


def hermitian_lanczos(H: np.ndarray, v0: np.ndarray, m: int, breakdown: float = 1e-12
                      ) -> LanczosResult:
    """Three-term Lanczos recursion with full reorthogonalization.

    Returns ``a_0..a_{d-1}``, ``b_1..b_{d-1}`` and the basis as columns;
    stops early when a new ``b`` falls below ``breakdown``.
    """
    H = np.asarray(H, dtype=complex)
    dim = H.shape[0]
    if H.shape != (dim, dim):
        raise DomainError("H must be square")
    if not 1 <= m <= dim:
        raise DomainError("need 1 <= m <= dim")
    v = np.asarray(v0, dtype=complex)
    v = v / np.linalg.norm(v)
    Q = np.zeros((dim, m), dtype=complex)
    a: list[float] = []
    b: list[float] = []
    Q[:, 0] = v
    for k in range(m):
        w = H @ Q[:, k]
        a.append(float(np.real(np.vdot(Q[:, k], w))))
        for _ in range(2):
            w = w - Q[:, : k + 1] @ (Q[:, : k + 1].conj().T @ w)
        if k == m - 1:
            break
        beta = float(np.linalg.norm(w))
        if beta < breakdown:
            break
        b.append(beta)
        Q[:, k + 1] = w / beta
    d = len(a)
    return LanczosResult(np.array(a), np.array(b), Q[:, :d])


# --- Wei-Norman operator identity ------------------------------------------

def _nilpotent_exp(M: np.ndarray) -> np.ndarray:
    """``exp(M)`` for strictly triangular ``M`` by its finite Taylor sum."""
    dim = M.shape[0]
    out = np.eye(dim, dtype=complex)
    term = np.eye(dim, dtype=complex)
    for k in range(1, dim):
        term = term @ M / k
        if not np.any(term):
            break
        out = out + term
    return out


def wn_product_matrix(rep: MatrixRep, wn: WNState) -> np.ndarray:
    """``e^{z L+} e^{eta L0} e^{w L-}`` as a dense matrix.

    The factors are triangular, diagonal and triangular, so the leading
    ``k x k`` block is exact whatever the truncation.
    """
    if rep.sector.sigma == HW:
        raise DomainError("Wei-Norman product is defined for sigma = +-1")
    left = _nilpotent_exp(wn.z * rep.Lp)
    right = _nilpotent_exp(wn.w * rep.Lm)
    mid = np.exp(wn.eta * np.real(np.diagonal(rep.L0)))
    return (left * mid[None, :]) @ right


def generator_unitary(sector: SectorSignature, params: GeneratorParams,
                      tol: float = 1e-10, max_dim: int = 4096, block: int | None = None
                      ) -> np.ndarray:
    """Leading ``block x block`` corner of ``exp(-i G)`` (default: the full dim).

    For truncated sectors the exponential is taken on doubled chains until
    the corner converges to ``tol``.
    """
    size = sector.dim if block is None else min(block, sector.dim)

    def corner(d: int) -> np.ndarray:
        return unitary_corner(*chain_coefficients(sector.with_dim(d), params), size)

    U = corner(sector.dim)
    if not sector.is_truncated:
        return U
    d = sector.dim
    while d < max_dim:
        d *= 2
        nxt = corner(d)
        change = np.max(np.abs(nxt - U))
        U = nxt
        if change < tol:
            return U
    raise TruncationError(f"exp(-iG) block not converged at dim {max_dim}")


def operator_identity_defect(sector: SectorSignature, params: GeneratorParams, wn: WNState,
                             block: int | None = None) -> float:
    """Max entrywise ``|exp(-iG) - e^{z L+} e^{eta L0} e^{w L-}|`` on the leading block."""
    if wn.at_pole:
        raise DomainError("Wei-Norman product is undefined at a pole of z")
    U = generator_unitary(sector, params, block=block)
    size = U.shape[0]
    P = wn_product_matrix(build_rep(sector, size), wn)
    return float(np.max(np.abs(U - P)))
# --- naive-frame gauge check -----------------------------------------------

# --- Appendix-B gauge check ------------------------------------------------

@dataclass(frozen=True)
class GaugeReport:
    """``modulus_deviation``: max ``| |phi^_n| - |phi_n| |``;
    ``probability_deviation``: max ``| |phi^_n|^2 - P_n |``;
    ``diagonal_deviation``: max residual of
    ``i d/dt phi^_n - f b_n phi^_{n-1} - f* b_{n+1} phi^_{n+1} - n phidot phi^_n``
    by centered differences (NaN when no coupling was supplied);
    ``h``: the finite-difference step.
    """

    modulus_deviation: float
    probability_deviation: float
    diagonal_deviation: float
    h: float


def naive_amplitudes(amplitudes: np.ndarray, phi: float) -> np.ndarray:
    n = np.arange(amplitudes.shape[-1])
    return np.exp(-1j * n * phi) * amplitudes


def gauge_check(series, phi_alpha: Callable, phi_alpha_dot: Callable | None = None,
                gamma: Callable | None = None) -> GaugeReport:
    """Compare naive moving-basis amplitudes with interaction-picture ones.

    ``series`` is a list of wavefunctions on a uniform grid. When both
    ``phi_alpha_dot`` and the interaction-picture coupling ``gamma`` are
    given, the naive-frame equation of motion is tested at interior points
    with the Schrodinger-frame coupling ``f = e^{-i phi_alpha} gamma``.
    """
    ts = np.array([w.t for w in series])
    amps = np.array([w.amplitudes for w in series])
    probs = np.array([w.probabilities for w in series])
    hats = np.array([naive_amplitudes(a, phi_alpha(t)) for a, t in zip(amps, ts)])
    mod_dev = float(np.max(np.abs(np.abs(hats) - np.abs(amps))))
    prob_dev = float(np.max(np.abs(np.abs(hats) ** 2 - probs)))
    h = float(ts[1] - ts[0]) if ts.size > 1 else math.nan
    diag_dev = math.nan
    if phi_alpha_dot is not None and gamma is not None and ts.size >= 3:
        if not np.allclose(np.diff(ts), h, rtol=1e-9, atol=0):
            raise DomainError("gauge_check finite differences need a uniform grid")
        sector = series[0].sector
        dim = amps.shape[1]
        b = lanczos_coefficients(sector, dim - 1)
        n = np.arange(dim)
        worst = 0.0
        for k in range(1, ts.size - 1):
            t = ts[k]
            deriv = (hats[k + 1] - hats[k - 1]) / (2.0 * h)
            f = np.exp(-1j * phi_alpha(t)) * complex(gamma(t))
            hop = np.zeros(dim, dtype=complex)
            hop[1:] += f * b * hats[k, :-1]
            hop[:-1] += np.conj(f) * b * hats[k, 1:]
            resid = 1j * deriv - hop - n * phi_alpha_dot(t) * hats[k]
            worst = max(worst, float(np.max(np.abs(resid))))
        diag_dev = worst
    return GaugeReport(mod_dev, prob_dev, diag_dev, h)
